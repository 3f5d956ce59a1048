"""Numerical property checks: constant width, symmetry, convexity, curvature
and the projection sandwich.

Every check returns a :class:`PropertyReport`.  Checks accept a
:class:`~constwidth.bodies.BodySpec` or any object with ``support``,
``dim`` and (for curvature) ``contact`` attributes, which is how the
deliberately broken bodies used in negative tests are passed in.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import (
    ALL_PERMUTATIONS_4,
    STAR_VERTEX,
    TETRA_VERTICES,
    BodyKind,
    BodySpec,
    CaseRegion,
    case_codes,
    contact_point,
    from_ambient,
    meissner_a,
    meissner_b,
    meissner_piece,
    permutation_matrix_abc,
    permutation_parity,
    random_directions,
    support_meissner_a,
    support_meissner_b,
    to_ambient,
)
from .volume import ball_volume, reuleaux_triangle_area, volume_u3

WIDTH_TOL = 1e-12
SYMMETRY_TOL = 1e-12
CONVEXITY_TOL = 1e-10
CURVATURE_TOL = 1e-3
CURVATURE_STEP = 1e-4
SPHERE_TOL = 1e-12


@dataclass(frozen=True)
class PropertyReport:
    name: str
    samples: int
    max_violation: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": dict(self.details),
        }


def _report(name, samples, violations, tol, **details):
    v = float(np.max(violations)) if np.size(violations) else 0.0
    if not math.isfinite(v):
        v = math.inf
    return PropertyReport(name, int(samples), v, tol, bool(v <= tol), details)


@dataclass(frozen=True)
class SupportBody:
    """A body given only by callables, e.g. a corrupted support function."""

    name: str
    dim: int
    support: object
    contact: object = None

    def __str__(self):
        return self.name


def _contact(body):
    if isinstance(body, BodySpec):
        return lambda theta: contact_point(body, theta)
    if body.contact is None:
        raise ValueError(f"{body} has no contact map")
    return body.contact


def corrupted_u3() -> SupportBody:
    """U_3 with ``h + 0.05 + 0.1 sign(a)``: neither of width 2 nor convex."""
    from .bodies import support_u3_ab

    def h(theta):
        theta = np.asarray(theta, dtype=float)
        return support_u3_ab(theta) + 0.05 + 0.1 * np.sign(theta[..., 0])

    return SupportBody("corrupted_U_3", 3, h)


def _rng(seed):
    return np.random.default_rng(seed)


def _chunks(total, size=1 << 16):
    while total > 0:
        yield min(total, size)
        total -= size


# --------------------------------------------------------------------------
# constant width


def check_constant_width(body, samples: int = 10**6, seed: int = 0, tol: float = WIDTH_TOL) -> PropertyReport:
    """``h(theta) + h(-theta) = 2`` on random unit directions."""
    rng = _rng(seed)
    worst = 0.0
    for m in _chunks(samples):
        theta = random_directions(body.dim, m, rng)
        worst = max(worst, float(np.max(np.abs(body.support(theta) + body.support(-theta) - 2.0))))
    return _report(f"constant_width[{body}]", samples, worst, tol)


# --------------------------------------------------------------------------
# symmetry


def _ambient_action(perm):
    perm = list(perm)
    return lambda y: from_ambient(to_ambient(y)[..., perm])


def _matrix_action(M):
    return lambda theta: theta @ M.T


def symmetry_group(body, rng=None, max_perms: int = 120, n_random: int = 50):
    """Direction maps expected to leave ``h`` invariant, with labels.

    Groups of at most ``max_perms`` permutations are used whole, larger ones
    are sampled with ``n_random`` random permutations.
    """
    kind = getattr(body, "kind", None)
    n = body.dim
    if kind in (BodyKind.MEISSNER_A, BodyKind.MEISSNER_B):
        perms = [p for p in ALL_PERMUTATIONS_4 if p[STAR_VERTEX] == STAR_VERTEX]
        return [(p, _matrix_action(permutation_matrix_abc(p))) for p in perms]
    if kind is BodyKind.MEISSNER_AVERAGE or (kind is BodyKind.U and n == 3):
        return [(p, _matrix_action(permutation_matrix_abc(p))) for p in ALL_PERMUTATIONS_4]
    size = n + 1 if kind is BodyKind.U else n
    if math.factorial(size) <= max_perms:
        perms = list(itertools.permutations(range(size)))
    else:
        rng = rng or np.random.default_rng(0)
        perms = [tuple(rng.permutation(size)) for _ in range(n_random)]
    if kind is BodyKind.U:
        return [(p, _ambient_action(p)) for p in perms]
    return [(p, lambda t, p=list(p): t[..., p]) for p in perms]


def check_symmetry(body, samples: int = 10**5, seed: int = 0, tol: float = SYMMETRY_TOL) -> PropertyReport:
    """``h(P theta) = h(theta)`` for the symmetry group of ``body``.

    U_n uses ambient coordinate permutations (all of them for small n),
    M_n coordinate permutations, U_3 and the Meissner average the full
    tetrahedral group, and each Meissner body the six permutations that fix
    its star vertex.
    """
    rng = _rng(seed)
    group = symmetry_group(body, rng)
    theta = random_directions(body.dim, samples, rng)
    h0 = body.support(theta)
    worst = 0.0
    for _, act in group:
        worst = max(worst, float(np.max(np.abs(body.support(act(theta)) - h0))))
    return _report(f"symmetry[{body}]", samples, worst, tol, group_size=len(group))


def check_meissner_swap(samples: int = 10**5, seed: int = 0, tol: float = SYMMETRY_TOL) -> PropertyReport:
    """Test ``h_A(P theta) = h_B(theta)`` for some odd permutation P.

    No tetrahedral symmetry maps a star of three edges onto a triangle of
    three edges, so this is expected to fail; the report records the best
    permutation found.
    """
    theta = random_directions(3, samples, _rng(seed))
    hb = support_meissner_b(theta)
    best = math.inf
    for p in ALL_PERMUTATIONS_4:
        if permutation_parity(p) == 1:
            M = permutation_matrix_abc(p)
            best = min(best, float(np.max(np.abs(support_meissner_a(theta @ M.T) - hb))))
    return _report("meissner_odd_swap", samples, best, tol)


def check_meissner_local_identity(samples: int = 10**5, seed: int = 0, tol: float = SYMMETRY_TOL) -> PropertyReport:
    """``h_B(a, b, c) + h_A(b, a, c) = 2`` on the cap ``c >= sqrt2 max(|a|, |b|)``."""
    rng = _rng(seed)
    theta = random_directions(3, 4 * samples, rng)
    a, b, c = theta[:, 0], theta[:, 1], theta[:, 2]
    keep = c >= math.sqrt(2.0) * np.maximum(np.abs(a), np.abs(b))
    theta = theta[keep][:samples]
    swapped = theta[:, [1, 0, 2]]
    v = np.abs(support_meissner_b(theta) + support_meissner_a(swapped) - 2.0)
    return _report("meissner_local_identity", len(theta), v, tol)


# --------------------------------------------------------------------------
# convexity


def check_convexity(body, samples: int = 10**5, seed: int = 0, tol: float = CONVEXITY_TOL) -> PropertyReport:
    """Subadditivity of the 1-homogeneous extension of ``h``.

    ``H(x) = |x| h(x / |x|)`` is the support function of a convex body iff
    ``H(x + y) <= H(x) + H(y)``.
    """

    def H(x):
        r = np.linalg.norm(x, axis=-1)
        return r * body.support(x / r[..., None])

    rng = _rng(seed)
    worst = 0.0
    for m in _chunks(samples):
        x = rng.standard_normal((m, body.dim))
        y = rng.standard_normal((m, body.dim))
        worst = max(worst, float(np.max(H(x + y) - H(x) - H(y))))
    return _report(f"convexity[{body}]", samples, max(worst, 0.0), tol)


# --------------------------------------------------------------------------
# curvature


def _tangent_basis(theta):
    """Two orthonormal tangent vectors at each direction of S^2."""
    helper = np.where(
        (np.abs(theta[..., 0]) < 0.9)[..., None], np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    )
    t1 = helper - np.sum(helper * theta, axis=-1, keepdims=True) * theta
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(theta, t1)
    return t1, t2


def _geodesic(theta, t, eps):
    return math.cos(eps) * theta + math.sin(eps) * t


def radii_of_curvature(contact, theta, step: float = CURVATURE_STEP):
    """Principal radii of curvature at the boundary point with normal ``theta``.

    The differential of the contact map (the inverse Gauss map) on the
    tangent plane is estimated by central differences with one Richardson
    step; its eigenvalues are the principal radii.  Returns an ``(m, 2)``
    array, sorted ascending.
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    t1, t2 = _tangent_basis(theta)
    frame = (t1, t2)

    def jac(eps):
        J = np.empty(theta.shape[:-1] + (2, 2))
        for j, tj in enumerate(frame):
            dx = (contact(_geodesic(theta, tj, eps)) - contact(_geodesic(theta, tj, -eps))) / (2.0 * eps)
            for i, ti in enumerate(frame):
                J[..., i, j] = np.sum(ti * dx, axis=-1)
        return J

    J = (4.0 * jac(step / 2.0) - jac(step)) / 3.0
    J = 0.5 * (J + np.swapaxes(J, -1, -2))
    return np.linalg.eigvalsh(J)


def _labeller(body, region):
    """Return ``(label_fn, target)``: a per-direction piece label and the wanted one."""
    kind = getattr(body, "kind", None)
    if kind in (BodyKind.MEISSNER_A, BodyKind.MEISSNER_B):
        if region in ("face", "rounded", "arc", "vertex"):
            def label(theta):
                piece, index = meissner_piece(theta, kind)
                return np.char.add(piece.astype(str), index.astype(str))

            def want(theta):
                return meissner_piece(theta, kind)[0] == region

            return label, want
    region = CaseRegion(region)

    def codes(theta):
        return case_codes(theta)

    return codes, lambda theta: case_codes(theta) == region.code


def check_curvature(
    body,
    region="I",
    samples: int = 2000,
    seed: int = 0,
    step: float = CURVATURE_STEP,
    tol: float = CURVATURE_TOL,
    expected: float | None = None,
) -> PropertyReport:
    """Smallest principal curvature ``1 / max radius`` on one boundary region.

    A local minimizer of volume among bodies of width 2 has smallest
    principal curvature 1/2 on its smooth pieces.  Directions are sampled
    until ``samples`` of them lie in ``region`` and every probe within
    ``10 * step`` carries the same piece label; others are skipped and
    counted.  For the unit ball the expected value is 1.
    """
    if body.dim != 3:
        raise ValueError("curvature checks are for bodies in R^3")
    if expected is None:
        expected = 1.0 if getattr(body, "kind", None) is BodyKind.BALL else 0.5
    contact = _contact(body)
    rng = _rng(seed)
    kind = getattr(body, "kind", None)
    if kind is BodyKind.BALL:
        label = lambda theta: np.zeros(len(theta), dtype=int)  # noqa: E731
        want = lambda theta: np.ones(len(theta), dtype=bool)  # noqa: E731
    else:
        label, want = _labeller(body, region)

    kept = []
    skipped = 0
    drawn = 0
    while sum(len(k) for k in kept) < samples and drawn < 1000 * samples:
        theta = random_directions(3, 4 * samples, rng)
        drawn += len(theta)
        theta = theta[want(theta)]
        if not len(theta):
            continue
        base = label(theta)
        ok = np.ones(len(theta), dtype=bool)
        t1, t2 = _tangent_basis(theta)
        for t in (t1, t2, -t1, -t2, t1 + t2, t1 - t2, -t1 + t2, -t1 - t2):
            t = t / np.linalg.norm(t, axis=-1, keepdims=True)
            ok &= label(_geodesic(theta, t, 10.0 * step)) == base
        skipped += int(np.count_nonzero(~ok))
        kept.append(theta[ok])
    theta = np.concatenate(kept)[:samples] if kept else np.empty((0, 3))
    if len(theta) == 0:
        return PropertyReport(f"curvature[{body},{region}]", 0, math.inf, tol, False, {"skipped": skipped})
    radii = radii_of_curvature(contact, theta, step)
    kappa_min = 1.0 / radii[:, -1]
    v = np.abs(kappa_min - expected)
    return _report(
        f"curvature[{body},{region}]",
        len(theta),
        v,
        tol,
        skipped=skipped,
        expected=expected,
        mean_kappa_min=float(np.mean(kappa_min)),
    )


def check_face_spheres(samples: int = 10**5, seed: int = 0, tol: float = SPHERE_TOL) -> PropertyReport:
    """Case-I boundary points of U_3 lie on the radius-2 sphere about the
    opposite tetrahedron vertex."""
    from .bodies import _canonical, u3

    rng = _rng(seed)
    theta = random_directions(3, 4 * samples, rng)
    theta = theta[case_codes(theta) == CaseRegion.I.code][:samples]
    x = contact_point(u3(), theta)
    order = _canonical(theta)[0]
    centre = TETRA_VERTICES[order[:, 3]]
    v = np.abs(np.linalg.norm(x - centre, axis=-1) - 2.0)
    return _report("face_spheres[U_3]", len(theta), v, tol)


# --------------------------------------------------------------------------
# projection sandwich


def polygon_area_from_contact(contact, samples: int = 20000) -> float:
    """Shoelace area of the polygon through boundary points of a planar body."""
    phi = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    theta = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    x = contact(theta)
    return 0.5 * float(np.sum(x[:, 0] * np.roll(x[:, 1], -1) - np.roll(x[:, 0], -1) * x[:, 1]))


def check_projection_inequality(
    n: int, mc_samples: int = 10**6, seed: int = 0, workers: int | None = 1, sigmas: float = 3.0
) -> PropertyReport:
    """``Vol(M_(n+1)) / 2 <= Vol(U_n) <= 2 Vol(M_(n+1))``.

    The lower bound holds because every fibre of M_(n+1) over U_n has
    length at most 2.  The factor 2 in the upper bound is the Steiner
    symmetral bound ``(n + 1) / 2`` at n = 3; both upper factors are
    evaluated and the Steiner result is stored in ``details``.

    ``Vol(U_2)`` is the Reuleaux triangle area and ``Vol(U_3)`` the case
    formula; other volumes are Monte Carlo estimates and each side is
    allowed ``sigmas`` standard errors.  The violation is the larger
    relative shortfall of the two asserted inequalities.
    """
    from .montecarlo import estimate_volume_M, estimate_volume_U

    vm = estimate_volume_M(n + 1, mc_samples, seed, workers)
    if n == 2:
        vu, su = reuleaux_triangle_area(), 0.0
    elif n == 3:
        vu, su = volume_u3().volume, 0.0
    else:
        est = estimate_volume_U(n, mc_samples, seed, workers)
        vu, su = est.volume, est.std_error
    sm = vm.std_error

    def shortfall(factor):
        return (vu - sigmas * su) - factor * (vm.volume + sigmas * sm)

    lower = 0.5 * (vm.volume - sigmas * sm) - (vu + sigmas * su)
    v = max(lower, shortfall(2.0), 0.0) / vu
    return _report(
        f"projection_sandwich[n={n}]",
        mc_samples,
        v,
        0.0,
        volume_u=vu,
        volume_m=vm.volume,
        std_u=su,
        std_m=sm,
        steiner_factor=0.5 * (n + 1),
        steiner_ok=bool(shortfall(0.5 * (n + 1)) <= 0.0),
    )


def check_ball_projection() -> PropertyReport:
    """Steiner bound for the unit 4-ball and its projection, the unit 3-ball."""
    v = max(ball_volume(3) - 2.0 * ball_volume(4), 0.0)
    return _report("projection_sandwich[ball]", 1, v, 0.0)


def run_suite(suite: str, body, samples: int, seed: int = 0, region: str = "I", workers: int | None = 1):
    """Run one named suite and return a list of reports."""
    if suite == "width":
        return [check_constant_width(body, samples, seed)]
    if suite == "symmetry":
        return [check_symmetry(body, samples, seed)]
    if suite == "convexity":
        return [check_convexity(body, samples, seed)]
    if suite == "curvature":
        return [check_curvature(body, region, samples, seed)]
    if suite == "sandwich":
        if getattr(body, "kind", None) is not BodyKind.U:
            raise ValueError("the sandwich suite applies to U_n")
        return [check_projection_inequality(body.dim, samples, seed, workers)]
    if suite == "meissner-swap":
        return [check_meissner_swap(samples, seed), check_meissner_local_identity(samples, seed)]
    raise ValueError(f"unknown suite {suite!r}")


__all__ = [
    "PropertyReport",
    "SupportBody",
    "check_constant_width",
    "check_convexity",
    "check_curvature",
    "check_face_spheres",
    "check_meissner_local_identity",
    "check_meissner_swap",
    "check_ball_projection",
    "check_projection_inequality",
    "check_symmetry",
    "corrupted_u3",
    "meissner_a",
    "meissner_b",
    "polygon_area_from_contact",
    "radii_of_curvature",
    "run_suite",
    "symmetry_group",
]
