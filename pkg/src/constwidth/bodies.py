"""Support functions, membership tests and case decompositions.

All bodies here have constant width 2.  Directions are numpy arrays whose
last axis holds the coordinates, so every evaluator accepts a single
direction or a stack of them.

Three-dimensional bodies (U_3 and the Meissner bodies) are evaluated in
``(a, b, c)`` coordinates with respect to the orthonormal basis
``e1, e2, e3`` of the hyperplane ``w + x + y + z = 0`` in R^4 returned by
:func:`simplex_basis` for ``n = 3``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)

UNIT_TOL = 1e-14
IDENTITY_TOL = 1e-12
CASE_TIE_TOL = 1e-12


class CaseRegion(str, enum.Enum):
    """Sign/magnitude pattern of the ambient coordinates of a U_3 direction."""

    I = "I"
    IIa = "IIa"
    IIb = "IIb"
    III = "III"

    @property
    def code(self) -> int:
        return _CASE_ORDER.index(self)

    @classmethod
    def from_code(cls, code: int) -> "CaseRegion":
        return _CASE_ORDER[int(code)]


_CASE_ORDER = (CaseRegion.I, CaseRegion.IIa, CaseRegion.IIb, CaseRegion.III)
CASE_I, CASE_IIA, CASE_IIB, CASE_III = range(4)


class BodyKind(str, enum.Enum):
    M = "M"
    U = "U"
    MEISSNER_A = "MeissnerA"
    MEISSNER_B = "MeissnerB"
    MEISSNER_AVERAGE = "MeissnerAverage"
    BALL = "Ball"


@dataclass(frozen=True)
class BodySpec:
    """A body of constant width 2.

    ``ambient_dim`` is the dimension the body lives in.  For ``U`` the body
    is realized inside the hyperplane ``(1, ..., 1)^perp`` of R^(n+1) but is
    evaluated in the n hyperplane coordinates of :func:`simplex_basis`.
    """

    kind: BodyKind
    ambient_dim: int

    def __post_init__(self):
        object.__setattr__(self, "kind", BodyKind(self.kind))
        if self.kind in (BodyKind.MEISSNER_A, BodyKind.MEISSNER_B, BodyKind.MEISSNER_AVERAGE):
            if self.ambient_dim != 3:
                raise ValueError(f"{self.kind.value} lives in dimension 3, got {self.ambient_dim}")
        elif self.ambient_dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.ambient_dim}")

    @property
    def dim(self) -> int:
        """Number of coordinates of a direction for this body."""
        return self.ambient_dim

    def support(self, theta):
        return support_function(self)(theta)

    def __str__(self):
        return f"{self.kind.value}_{self.ambient_dim}"


def u3() -> BodySpec:
    return BodySpec(BodyKind.U, 3)


def meissner_a() -> BodySpec:
    return BodySpec(BodyKind.MEISSNER_A, 3)


def meissner_b() -> BodySpec:
    return BodySpec(BodyKind.MEISSNER_B, 3)


def meissner_average() -> BodySpec:
    return BodySpec(BodyKind.MEISSNER_AVERAGE, 3)


def ball(n: int = 3) -> BodySpec:
    return BodySpec(BodyKind.BALL, n)


def _check_dim(theta, n):
    if n is not None and theta.shape[-1] != n:
        raise ValueError(f"expected vectors of dimension {n}, got {theta.shape[-1]}")


def _check_unit(theta, tol=UNIT_TOL):
    norms = np.linalg.norm(theta, axis=-1)
    worst = np.max(np.abs(norms - 1.0), initial=0.0)
    if not worst <= tol:
        raise ValueError(f"direction is not a unit vector (|norm - 1| = {worst:.3g})")


def as_direction(coords, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate and return ``coords`` as a float array of unit vectors."""
    theta = np.asarray(coords, dtype=float)
    if theta.shape[-1] < 2:
        raise ValueError("directions need at least 2 coordinates")
    _check_unit(theta, tol)
    return theta


def random_directions(n: int, samples: int, rng) -> np.ndarray:
    """Uniform directions on the unit sphere in R^n (normalized Gaussians)."""
    g = rng.standard_normal((samples, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


# --------------------------------------------------------------------------
# M_n


@dataclass(frozen=True)
class PosNegSplit:
    plus: np.ndarray
    minus: np.ndarray


def split_pos_neg(x) -> PosNegSplit:
    """Write ``x = plus - minus`` with disjointly supported nonnegative parts."""
    x = np.asarray(x, dtype=float)
    return PosNegSplit(np.where(x > 0, x, 0.0), np.where(x < 0, -x, 0.0))


def support_m(theta, n: int | None = None):
    """Support function of M_n at unit direction(s) ``theta``.

    ``sqrt(2)|theta_+|`` when ``|theta_+| >= |theta_-|``, otherwise
    ``2 - sqrt(2)|theta_-|``.  The first branch wins ties.
    """
    theta = np.asarray(theta, dtype=float)
    _check_dim(theta, n)
    s = split_pos_neg(theta)
    p = np.linalg.norm(s.plus, axis=-1)
    m = np.linalg.norm(s.minus, axis=-1)
    return np.where(p >= m, SQRT2 * p, 2.0 - SQRT2 * m)


def constraint_m(x):
    """``|x_+|^2 + (|x_-| + sqrt 2)^2``; M_n is the sublevel set ``<= 4``.

    Any representation ``x = v - w`` with ``v, w >= 0`` has
    ``v = x_+ + s, w = x_- + s`` for some ``s >= 0`` and the defining
    expression is nondecreasing in every ``s_i``, so ``s = 0`` is optimal.
    """
    s = split_pos_neg(x)
    return np.sum(s.plus**2, axis=-1) + (np.linalg.norm(s.minus, axis=-1) + SQRT2) ** 2


MEMBERSHIP_TOL = 1e-12


def membership_m(x, n: int | None = None):
    """``x`` in M_n, with slack ``MEMBERSHIP_TOL`` so rounded boundary points count."""
    x = np.asarray(x, dtype=float)
    _check_dim(x, n)
    return constraint_m(x) <= 4.0 + MEMBERSHIP_TOL


def contact_point_m(theta):
    """Boundary point of M_n with outer normal ``theta`` (gradient of the
    homogeneous extension of :func:`support_m`)."""
    theta = np.asarray(theta, dtype=float)
    s = split_pos_neg(theta)
    p = np.linalg.norm(s.plus, axis=-1, keepdims=True)
    m = np.linalg.norm(s.minus, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        first = SQRT2 * s.plus / p
        second = 2.0 * theta + SQRT2 * s.minus / m
    return np.where(p >= m, first, second)


# --------------------------------------------------------------------------
# simplex hyperplane and U_n

_U3_BASIS = np.array(
    [
        [1 / SQRT2, -1 / SQRT2, 0.0, 0.0],
        [0.0, 0.0, 1 / SQRT2, -1 / SQRT2],
        [0.5, 0.5, -0.5, -0.5],
    ]
)


def simplex_basis(n: int) -> np.ndarray:
    """Orthonormal basis of ``(1, ..., 1)^perp`` in R^(n+1), as an (n, n+1) array.

    For ``n = 3`` this is ``e1 = (1, -1, 0, 0)/sqrt 2``,
    ``e2 = (0, 0, 1, -1)/sqrt 2``, ``e3 = (1, 1, -1, -1)/2``.  Other ``n``
    use a Helmert basis.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n == 3:
        return _U3_BASIS.copy()
    rows = []
    for k in range(1, n + 1):
        row = np.zeros(n + 1)
        row[:k] = 1.0
        row[k] = -k
        rows.append(row / np.sqrt(k * (k + 1)))
    return np.array(rows)


def to_ambient(y, n: int | None = None):
    """Hyperplane coordinates -> points of R^(n+1)."""
    y = np.asarray(y, dtype=float)
    n = y.shape[-1] if n is None else n
    _check_dim(y, n)
    return y @ simplex_basis(n)


def from_ambient(x):
    x = np.asarray(x, dtype=float)
    return x @ simplex_basis(x.shape[-1] - 1).T


def support_u(y, n: int | None = None, check_unit: bool = True):
    """Support function of U_n: that of M_(n+1) restricted to the hyperplane."""
    y = np.asarray(y, dtype=float)
    _check_dim(y, n)
    if check_unit:
        _check_unit(y)
    return support_m(to_ambient(y))


def contact_point_u(y):
    y = np.asarray(y, dtype=float)
    basis = simplex_basis(y.shape[-1])
    return contact_point_m(y @ basis) @ basis.T


def permutation_matrix_abc(perm) -> np.ndarray:
    """3x3 orthogonal matrix acting on (a, b, c) as the ambient permutation.

    ``perm`` maps new ambient coordinate i to old coordinate ``perm[i]``,
    i.e. ``X_new = X_old[perm]``.
    """
    P = np.eye(4)[list(perm)]
    return _U3_BASIS @ P @ _U3_BASIS.T


def permutation_parity(perm) -> int:
    perm = list(perm)
    parity = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            parity ^= perm[i] > perm[j]
    return parity


ALL_PERMUTATIONS_4 = tuple(itertools.permutations(range(4)))


# --------------------------------------------------------------------------
# U_3 in (a, b, c) coordinates


def abc_from_ab(a, b):
    """Unit point with c = sqrt(1 - a^2 - b^2) >= 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    r2 = a * a + b * b
    if np.any(r2 > 1.0):
        raise ValueError("a^2 + b^2 must not exceed 1")
    return np.stack(np.broadcast_arrays(a, b, np.sqrt(1.0 - r2)), axis=-1)


def abc_to_wxyz(p):
    """``w = (c + a sqrt2)/2, x = (c - a sqrt2)/2, y = (-c + b sqrt2)/2, z = (-c - b sqrt2)/2``."""
    p = np.asarray(p, dtype=float)
    a, b, c = p[..., 0], p[..., 1], p[..., 2]
    return np.stack(
        [(c + a * SQRT2) / 2, (c - a * SQRT2) / 2, (-c + b * SQRT2) / 2, (-c - b * SQRT2) / 2],
        axis=-1,
    )


def wxyz_to_abc(X):
    X = np.asarray(X, dtype=float)
    w, x, y, z = (X[..., i] for i in range(4))
    return np.stack([(w - x) / SQRT2, (y - z) / SQRT2, (w + x - y - z) / 2], axis=-1)


def _canonical(p):
    """Sort ambient coordinates descending (a symmetry of U_3).

    Returns the sort order and the canonical ``(a, b, c)``, which satisfy
    ``a >= 0``, ``b >= 0``, ``c >= 0``.
    """
    X = abc_to_wxyz(p)
    order = np.argsort(-X, axis=-1, kind="stable")
    Xs = np.take_along_axis(X, order, axis=-1)
    a = (Xs[..., 0] - Xs[..., 1]) / SQRT2
    b = (Xs[..., 2] - Xs[..., 3]) / SQRT2
    c = (Xs[..., 0] + Xs[..., 1] - Xs[..., 2] - Xs[..., 3]) / 2
    return order, a, b, c


def _case_of_canonical(a, b, c, tol=CASE_TIE_TOL):
    # priority I > IIa > IIb > III on closed conditions; ties within tol go
    # to the higher priority so points on mirror planes are labelled alike
    case_i = (b * SQRT2 >= c - tol) & (c >= a * SQRT2 - tol)
    case_iia = (c >= a * SQRT2 - tol) & (a >= b - tol)
    case_iib = (c >= b * SQRT2 - tol) & (b >= a - tol)
    return np.select([case_i, case_iia, case_iib], [CASE_I, CASE_IIA, CASE_IIB], CASE_III)


def case_codes(p):
    """Vectorized case classification; integer codes 0..3 for I, IIa, IIb, III."""
    p = np.asarray(p, dtype=float)
    _check_unit(p, 1e-12)
    _, a, b, c = _canonical(p)
    return _case_of_canonical(a, b, c)


def classify_case(p) -> CaseRegion:
    """Case region of a single unit (a, b, c) point.

    Case I is ``b sqrt2 >= c >= |a| sqrt2``, IIa ``c >= |a| sqrt2 >= |b| sqrt2``,
    IIb ``c >= |b| sqrt2 >= |a| sqrt2`` and III ``a sqrt2 >= c >= |b| sqrt2``;
    other points are first moved into this chart by a coordinate
    permutation.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise ValueError("classify_case takes a single (a, b, c) point; use case_codes for arrays")
    return CaseRegion.from_code(case_codes(p))


def classify_ab(a: float, b: float) -> CaseRegion:
    """Classify the upper-hemisphere point over ``(a, b)``."""
    return classify_case(abc_from_ab(a, b))


def _u3_canonical_value(a, b, c, case):
    """``h`` of U_3 from the four case formulas (canonical coordinates)."""
    return np.select(
        [case == CASE_I, case == CASE_IIA, case == CASE_IIB],
        [
            2.0 - c / SQRT2 - b,
            np.sqrt(np.maximum(1.0 + a * a - b * b, 0.0)),
            2.0 - np.sqrt(np.maximum(1.0 - a * a + b * b, 0.0)),
        ],
        c / SQRT2 + a,
    )


def support_u3_ab(p):
    """Support function of U_3 from the (a, b, c) case formulas.

    ``h - 1`` is ``1 - c/sqrt2 - b`` (I), ``sqrt(1 + a^2 - b^2) - 1`` (IIa),
    ``1 - sqrt(1 - a^2 + b^2)`` (IIb) and ``c/sqrt2 + a - 1`` (III), applied
    after sorting the ambient coordinates.
    """
    p = np.asarray(p, dtype=float)
    _check_unit(p)
    _, a, b, c = _canonical(p)
    return _u3_canonical_value(a, b, c, _case_of_canonical(a, b, c))


# --------------------------------------------------------------------------
# Meissner bodies
#
# Vertices are V_i = sqrt2 * (ambient unit vector i) projected to the
# hyperplane: (1, 0, 1/sqrt2), (-1, 0, 1/sqrt2), (0, 1, -1/sqrt2),
# (0, -1, -1/sqrt2) for w, x, y, z.  A rounds the three edges at vertex z,
# B rounds the opposite three (the triangle w, x, y); every edge of the
# Reuleaux tetrahedron is rounded in exactly one of them.

TETRA_VERTICES = SQRT2 * _U3_BASIS.T
STAR_VERTEX = 3


def _edge_rounded(kind: BodyKind, i, j):
    touches = (i == STAR_VERTEX) | (j == STAR_VERTEX)
    if kind is BodyKind.MEISSNER_A:
        return touches
    if kind is BodyKind.MEISSNER_B:
        return ~touches
    raise ValueError(f"not a Meissner body: {kind}")


def _unrounded_edge_value(a, b, c):
    """``h`` near an unrounded edge, canonical chart (edge on top).

    ``sqrt(3(1 - b^2)) - c/sqrt2`` on ``b <= 1/2`` (circular edge arc) and
    ``2 - c/sqrt2 - b`` beyond it (sphere about the far vertex).
    """
    return np.where(
        b <= 0.5,
        np.sqrt(np.maximum(3.0 * (1.0 - b * b), 0.0)) - c / SQRT2,
        2.0 - c / SQRT2 - b,
    )


def _support_meissner(p, kind):
    p = np.asarray(p, dtype=float)
    _check_unit(p)
    order, a, b, c = _canonical(p)
    case = _case_of_canonical(a, b, c)
    rounded = _edge_rounded(kind, order[..., 0], order[..., 1])
    edge = np.where(
        rounded,
        2.0 - _unrounded_edge_value(b, a, c),
        _unrounded_edge_value(a, b, c),
    )
    is_edge = (case == CASE_IIA) | (case == CASE_IIB)
    return np.where(is_edge, edge, _u3_canonical_value(a, b, c, case))


def support_meissner_a(p):
    """Support function of Meissner body A (edges at vertex z rounded)."""
    return _support_meissner(p, BodyKind.MEISSNER_A)


def support_meissner_b(p):
    """Support function of Meissner body B (edges of the face w, x, y rounded)."""
    return _support_meissner(p, BodyKind.MEISSNER_B)


def support_meissner_average(p):
    return 0.5 * (support_meissner_a(p) + support_meissner_b(p))


def meissner_average_pieces(a, b):
    """Closed-form ``h`` of (A + B)/2 on the two chart pieces near the top edge.

    ``0 <= a <= 1/2 <= b <= sqrt((1 - a^2)/3)``: ``2 - b/2 - sqrt(3(1 - a^2))/2``;
    ``0 <= a <= b <= 1/2``: ``1 + (sqrt(3(1 - b^2)) - sqrt(3(1 - a^2)))/2``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ra = np.sqrt(3.0 * (1.0 - a * a))
    rb = np.sqrt(3.0 * (1.0 - b * b))
    upper = (a >= 0) & (a <= 0.5) & (b >= 0.5) & (3 * b * b <= 1 - a * a)
    lower = (a >= 0) & (a <= b) & (b <= 0.5)
    if not np.all(upper | lower):
        raise ValueError("(a, b) outside the two closed-form pieces")
    return np.where(lower, 1.0 + 0.5 * (rb - ra), 2.0 - 0.5 * b - 0.5 * ra)


def meissner_piece(p, kind):
    """Label the boundary piece hit by the normal ``p``.

    Returns ``(piece, index)`` arrays: piece is one of ``"face"``,
    ``"vertex"``, ``"arc"`` or ``"rounded"``; index identifies the vertex
    (faces are labelled by the centre vertex of their sphere) or the edge
    (encoded ``4 * i + j`` with ``i < j``).
    """
    kind = BodyKind(kind)
    p = np.asarray(p, dtype=float)
    order, a, b, c = _canonical(p)
    case = _case_of_canonical(a, b, c)
    top_i = np.minimum(order[..., 0], order[..., 1])
    top_j = np.maximum(order[..., 0], order[..., 1])
    bot_i = np.minimum(order[..., 2], order[..., 3])
    bot_j = np.maximum(order[..., 2], order[..., 3])
    rounded = _edge_rounded(kind, order[..., 0], order[..., 1])
    is_edge = (case == CASE_IIA) | (case == CASE_IIB)
    piece = np.select(
        [
            case == CASE_I,
            case == CASE_III,
            is_edge & ~rounded & (b <= 0.5),
            is_edge & ~rounded,
            is_edge & rounded & (a <= 0.5),
        ],
        ["face", "vertex", "arc", "face", "rounded"],
        "vertex",
    )
    index = np.select(
        [
            case == CASE_I,
            case == CASE_III,
            piece == "arc",
            (piece == "face") & is_edge,
            piece == "rounded",
        ],
        [order[..., 3], order[..., 0], 4 * top_i + top_j, order[..., 3], 4 * bot_i + bot_j],
        order[..., 0],
    )
    return piece, index


def _unrounded_edge_contact(p, order, b):
    """Contact point near the unrounded top edge (canonical chart)."""
    r, s = order[..., 2], order[..., 3]
    Vr = TETRA_VERTICES[r]
    Vs = TETRA_VERTICES[s]
    centre = 0.5 * (Vr + Vs)
    axis = 0.5 * (Vr - Vs)
    perp = p - np.sum(p * axis, axis=-1, keepdims=True) * axis
    arc = centre + SQRT3 * perp / np.linalg.norm(perp, axis=-1, keepdims=True)
    face = Vs + 2.0 * p
    return np.where((b <= 0.5)[..., None], arc, face)


def contact_point_meissner(p, kind):
    """Boundary point with outer normal ``p`` for A, B or their average."""
    kind = BodyKind(kind)
    p = np.asarray(p, dtype=float)
    if kind is BodyKind.MEISSNER_AVERAGE:
        return 0.5 * (
            contact_point_meissner(p, BodyKind.MEISSNER_A)
            + contact_point_meissner(p, BodyKind.MEISSNER_B)
        )
    order, a, b, c = _canonical(p)
    case = _case_of_canonical(a, b, c)
    rounded = _edge_rounded(kind, order[..., 0], order[..., 1])
    face = TETRA_VERTICES[order[..., 3]] + 2.0 * p
    vertex = TETRA_VERTICES[order[..., 0]]
    near = _unrounded_edge_contact(p, order, b)
    order_q, _, b_q, _ = _canonical(-p)
    far = _unrounded_edge_contact(-p, order_q, b_q) + 2.0 * p
    is_edge = ((case == CASE_IIA) | (case == CASE_IIB))[..., None]
    edge = np.where(rounded[..., None], far, near)
    out = np.where((case == CASE_I)[..., None], face, vertex)
    return np.where(is_edge, edge, out)


# --------------------------------------------------------------------------
# dispatch


def support_function(body: BodySpec):
    """Vectorized support function of ``body`` on its direction coordinates."""
    kind = body.kind
    if kind is BodyKind.M:
        return lambda theta: support_m(theta, body.ambient_dim)
    if kind is BodyKind.U:
        if body.ambient_dim == 3:
            return support_u3_ab
        return lambda y: support_u(y, body.ambient_dim)
    if kind is BodyKind.MEISSNER_A:
        return support_meissner_a
    if kind is BodyKind.MEISSNER_B:
        return support_meissner_b
    if kind is BodyKind.MEISSNER_AVERAGE:
        return support_meissner_average
    if kind is BodyKind.BALL:
        return lambda theta: np.ones(np.shape(theta)[:-1])
    raise ValueError(f"unknown body {body}")


def contact_point(body: BodySpec, theta):
    """Boundary point of ``body`` with outer unit normal ``theta``."""
    theta = np.asarray(theta, dtype=float)
    kind = body.kind
    if kind is BodyKind.M:
        return contact_point_m(theta)
    if kind is BodyKind.U:
        return contact_point_u(theta)
    if kind is BodyKind.BALL:
        return theta.copy()
    return contact_point_meissner(theta, kind)


# --------------------------------------------------------------------------
# names in the mathematical notation, dimension first


def support_M(n: int, theta):
    return support_m(theta, n)


def membership_M(n: int, x):
    return membership_m(x, n)


def support_U(n: int, y):
    return support_u(y, n)


support_U3_ab = support_u3_ab
support_meissner_A = support_meissner_a
support_meissner_B = support_meissner_b
