"""Monte Carlo volume estimates for M_n and U_n in moderate dimension.

Points are drawn uniformly in the ball of radius sqrt(2), which contains
every body of width 2 considered here (``max h = sqrt 2`` for M_n).  Each
batch of samples has its own child seed, so results do not depend on the
number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bodies import MEMBERSHIP_TOL, BodyKind, BodySpec, constraint_m, membership_m, to_ambient
from .volume import ball_volume

SAMPLING_RADIUS = math.sqrt(2.0)
BATCH_SIZE = 1 << 16
MAX_DIM = 20

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
T_SEARCH = (-2.0, 2.0)
T_TOL = 1e-10


@dataclass(frozen=True)
class McEstimate:
    body: BodySpec
    n_samples: int
    hits: int
    volume: float
    std_error: float
    ratio_to_ball: float
    ratio_root: float
    seed: int

    def interval(self, k: float = 3.0):
        return self.volume - k * self.std_error, self.volume + k * self.std_error

    def ratio_root_interval(self, k: float = 3.0):
        n = self.body.ambient_dim
        ref = ball_volume(n)
        lo, hi = self.interval(k)
        return (max(lo, 0.0) / ref) ** (1.0 / n), (hi / ref) ** (1.0 / n)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["body"] = {"kind": self.body.kind.value, "ambient_dim": self.body.ambient_dim}
        return d


def sample_ball(rng, n: int, count: int, radius: float = SAMPLING_RADIUS):
    """Uniform points in the n-ball: Gaussian direction, radius ``r U^(1/n)``."""
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / n)
    return g * r[:, None]


def _batch_sizes(n_samples: int):
    full, rest = divmod(n_samples, BATCH_SIZE)
    return [BATCH_SIZE] * full + ([rest] if rest else [])


def count_hits(membership, n: int, n_samples: int, seed: int, workers: int | None = 1,
               radius: float = SAMPLING_RADIUS) -> int:
    """Number of uniform points of the radius-``radius`` ball accepted by ``membership``."""
    sizes = _batch_sizes(n_samples)
    children = np.random.SeedSequence([seed, n]).spawn(len(sizes))

    def run(i):
        rng = np.random.Generator(np.random.PCG64(children[i]))
        return int(np.count_nonzero(membership(sample_ball(rng, n, sizes[i], radius))))

    if workers is None or workers <= 1 or len(sizes) == 1:
        counts = [run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, range(len(sizes))))
    return int(sum(counts))


def estimate_volume(body: BodySpec, membership, n_samples: int, seed: int, workers: int | None = 1,
                    radius: float = SAMPLING_RADIUS) -> McEstimate:
    """Hit-or-miss estimate with the binomial standard error."""
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    n = body.ambient_dim
    hits = count_hits(membership, n, n_samples, seed, workers, radius)
    region = ball_volume(n, radius)
    p = hits / n_samples
    vol = p * region
    std = region * math.sqrt(p * (1.0 - p) / n_samples)
    ratio = vol / ball_volume(n)
    return McEstimate(body, n_samples, hits, vol, std, ratio, ratio ** (1.0 / n), seed)


def _check_dim(n):
    if not 2 <= n <= MAX_DIM:
        raise ValueError(f"dimension must be in [2, {MAX_DIM}], got {n}")


def estimate_volume_M(n: int, n_samples: int, seed: int, workers: int | None = 1) -> McEstimate:
    _check_dim(n)
    if n_samples < 1000:
        raise ValueError("use at least 1000 samples")
    return estimate_volume(BodySpec(BodyKind.M, n), membership_m, n_samples, seed, workers)


def estimate_volume_ball(n: int, n_samples: int, seed: int, workers: int | None = 1) -> McEstimate:
    """Calibration run: the unit ball, sampled exactly like the other bodies."""
    _check_dim(n)
    return estimate_volume(
        BodySpec(BodyKind.BALL, n), lambda x: np.einsum("ij,ij->i", x, x) <= 1.0, n_samples, seed, workers
    )


def min_constraint_on_fibre(y, t_range=T_SEARCH, tol: float = T_TOL):
    """Minimize ``t -> |x_+|^2 + (|x_-| + sqrt2)^2`` for ``x = B y + t d``.

    ``d`` is the unit diagonal of R^(n+1).  The function is convex in ``t``,
    so a vectorized golden-section search converges to the minimizer over
    ``t_range`` (an endpoint if the minimum lies outside).  Returns
    ``(t_star, g_star)``.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    X0 = to_ambient(y)
    d = np.full(X0.shape[-1], 1.0 / math.sqrt(X0.shape[-1]))

    def g(t):
        return constraint_m(X0 + t[:, None] * d)

    m = len(y)
    lo = np.full(m, float(t_range[0]))
    hi = np.full(m, float(t_range[1]))
    c = hi - INV_PHI * (hi - lo)
    e = lo + INV_PHI * (hi - lo)
    fc, fe = g(c), g(e)
    steps = int(math.ceil(math.log(tol / (t_range[1] - t_range[0])) / math.log(INV_PHI)))
    for _ in range(steps):
        left = fc <= fe
        hi = np.where(left, e, hi)
        lo = np.where(left, lo, c)
        new_c = np.where(left, hi - INV_PHI * (hi - lo), e)
        new_e = np.where(left, c, lo + INV_PHI * (hi - lo))
        probe = np.where(left, new_c, new_e)
        fp = g(probe)
        fc, fe = np.where(left, fp, fe), np.where(left, fc, fp)
        c, e = new_c, new_e
    t_star = 0.5 * (lo + hi)
    return t_star, g(t_star)


def membership_u(y):
    """``y`` in U_n iff some point of the fibre ``B y + t d`` lies in M_(n+1).

    Members need ``|B y + t d| <= sqrt 2``, hence ``|t| <= sqrt 2``, so the
    constrained minimum over ``[-2, 2]`` decides membership even when the
    unconstrained minimizer lies outside that interval.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    _, g = min_constraint_on_fibre(y)
    out = g <= 4.0 + MEMBERSHIP_TOL
    return bool(out[0]) if single else out


def estimate_volume_U(n: int, n_samples: int, seed: int, workers: int | None = 1) -> McEstimate:
    _check_dim(n)
    return estimate_volume(BodySpec(BodyKind.U, n), membership_u, n_samples, seed, workers)


def ratio_trend(n_lo: int, n_hi: int, samples_per_n: int, seed: int, workers: int | None = 1):
    """Per-dimension estimates of Vol(M_n) and ``(Vol(M_n)/Vol(B^n))^(1/n)``.

    Rows carry 3-sigma bounds on the root ratio.  No trend is asserted.
    """
    if not 2 <= n_lo <= n_hi <= MAX_DIM:
        raise ValueError(f"need 2 <= n_lo <= n_hi <= {MAX_DIM}")
    rows = []
    for n in range(n_lo, n_hi + 1):
        est = estimate_volume_M(n, samples_per_n, seed, workers)
        lo, hi = est.ratio_root_interval(3.0)
        rows.append(
            {
                "n": n,
                "volume": est.volume,
                "std_error": est.std_error,
                "ratio_root": est.ratio_root,
                "ratio_root_lo": lo,
                "ratio_root_hi": hi,
                "hits": est.hits,
            }
        )
    return rows
