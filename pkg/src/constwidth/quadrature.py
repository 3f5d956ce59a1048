"""Deterministic 1-D and 2-D quadrature with error estimates.

Endpoint singularities of inverse-square-root type are handled with the
tanh-sinh (double exponential) substitution.  Integrands that blow up at an
endpoint usually lose all precision when evaluated from ``x`` alone (``1 - x``
cancels), so the tanh-sinh routines can hand the integrand the exact
distances to both endpoints as well (``complement=True``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _sp_integrate

DEFAULT_MAX_EVALS = 10**7

# tanh-sinh abscissae are truncated where the distance to the endpoint
# (relative to the interval length) drops below these values
_Q_MIN_COMPLEMENT = 1e-280
_Q_MIN_PLAIN = 2e-17


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self):
        return float(self.value)


class QuadratureError(RuntimeError):
    """Raised when an integral does not converge within the evaluation budget.

    ``best`` holds the last estimate as a :class:`QuadratureResult`.
    """

    def __init__(self, message: str, best: QuadratureResult | None = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class IntegrationRegion2D:
    """``b_lo <= b <= b_hi``, ``a_lo(b) <= a <= a_hi(b)``.

    The limit functions must accept numpy arrays.
    """

    b_lo: float
    b_hi: float
    a_lo: Callable
    a_hi: Callable


def tanh_sinh_nodes(level: int, complement: bool = True):
    """Abscissae and weights of the tanh-sinh rule on [0, 1].

    Returns ``(x, d_lo, d_hi, w)`` where ``d_lo = x`` and ``d_hi = 1 - x``
    are computed without cancellation.  The step is ``2**-level``.
    """
    q_min = _Q_MIN_COMPLEMENT if complement else _Q_MIN_PLAIN
    # q = 1/(1 + exp(2u)) >= q_min  <=>  u <= log(1/q_min - 1)/2
    u_max = 0.5 * math.log(1.0 / q_min - 1.0)
    t_max = math.asinh(u_max / (0.5 * math.pi))
    h = 2.0**-level
    k = int(math.floor(t_max / h))
    t = np.arange(-k, k + 1) * h
    u = 0.5 * math.pi * np.sinh(t)
    q = 1.0 / (1.0 + np.exp(2.0 * np.abs(u)))
    w = h * math.pi * np.cosh(t) * q * (1.0 - q)
    d_lo = np.where(t < 0, q, 1.0 - q)
    d_hi = np.where(t < 0, 1.0 - q, q)
    x = np.where(t < 0, d_lo, 1.0 - d_hi)
    return x, d_lo, d_hi, w


def _call(f, x, d_lo, d_hi, complement):
    with np.errstate(divide="ignore", invalid="ignore"):
        y = f(x, d_lo, d_hi) if complement else f(x)
    return np.broadcast_to(np.asarray(y, dtype=float), np.shape(x))


def _weighted_sum(values, weights):
    with np.errstate(invalid="ignore", over="ignore"):
        prod = values * weights
    bad = ~np.isfinite(prod) & (weights != 0)
    if np.any(bad):
        raise QuadratureError("integrand is not finite at a quadrature node")
    return float(np.sum(np.where(weights != 0, prod, 0.0)))


def _plain_values(f, x, d_lo, d_hi, lo, hi, singular):
    """Evaluate ``f(x)`` on plain-mode nodes.

    On a side flagged in ``singular`` the integrand is assumed to behave like
    ``C / sqrt(distance)``.  Values at retained nodes are rescaled from the
    rounded abscissa to the ideal one, and nodes that round onto the
    endpoint get the power law fitted at the nearest retained node.  On other
    sides such nodes are dropped.
    """
    length = hi - lo
    inside = (x > lo) & (x < hi)
    y = np.zeros_like(x)
    y[inside] = _call(f, x[inside], None, None, False)
    for side, flag in enumerate(singular):
        if not flag:
            continue
        on_side = (d_lo <= d_hi) if side == 0 else (d_lo > d_hi)
        ideal = length * (d_lo if side == 0 else d_hi)
        real = (x - lo) if side == 0 else (hi - x)
        kept = on_side & inside
        with np.errstate(invalid="ignore", divide="ignore"):
            y[kept] *= np.sqrt(real[kept] / ideal[kept])
        lost = on_side & ~inside
        if lost.any() and kept.any():
            j = np.flatnonzero(kept)[np.argmin(ideal[kept])]
            y[lost] = y[j] * np.sqrt(ideal[j] / ideal[lost])
    return y, int(np.count_nonzero(inside))


def tanh_sinh(
    f,
    lo: float,
    hi: float,
    rel_tol: float = 1e-12,
    abs_tol: float = 0.0,
    complement: bool = False,
    singular: tuple[bool, bool] = (False, False),
    min_level: int = 3,
    max_level: int = 14,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadratureResult:
    """Tanh-sinh quadrature of ``f`` over ``[lo, hi]``.

    With ``complement=True`` the integrand is called as ``f(x, x - lo, hi - x)``
    and can resolve endpoint singularities to full precision.  Otherwise it
    is called as ``f(x)``; endpoints flagged in ``singular`` are treated as
    inverse-square-root singularities (see :func:`_plain_values`) and
    abscissae that round onto an unflagged endpoint are dropped.
    The level is raised until two successive estimates agree to
    ``max(rel_tol * |value|, abs_tol)``; that difference is reported as the
    error estimate.
    """
    if hi < lo:
        raise ValueError("need lo <= hi")
    length = hi - lo
    if length == 0:
        return QuadratureResult(0.0, 0.0, 1)
    fine_nodes = complement or any(singular)
    evals = 0
    prev = None
    value = None
    err = float("inf")
    for level in range(min_level, max_level + 1):
        _, d_lo, d_hi, w = tanh_sinh_nodes(level, fine_nodes)
        x = np.where(d_lo <= d_hi, lo + length * d_lo, hi - length * d_hi)
        if complement:
            y = _call(f, x, length * d_lo, length * d_hi, True)
            evals += x.size
        else:
            y, n = _plain_values(f, x, d_lo, d_hi, lo, hi, singular)
            evals += n
        value = length * _weighted_sum(y, w)
        if prev is not None:
            err = abs(value - prev)
            if err <= max(rel_tol * abs(value), abs_tol):
                return QuadratureResult(value, err, evals)
        if evals > max_evals:
            break
        prev = value
    raise QuadratureError(
        f"tanh-sinh did not converge (estimate {value!r}, error {err:.3g}, {evals} evaluations)",
        QuadratureResult(value, err, evals),
    )


def integrate_1d(
    f,
    lo: float,
    hi: float,
    rel_tol: float = 1e-12,
    singular: tuple[bool, bool] = (False, False),
    complement: bool = False,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, hi]``.

    Intervals with an endpoint flagged in ``singular`` (or integrands that
    want endpoint distances, ``complement=True``) go through
    :func:`tanh_sinh`.  Everything else uses adaptive Gauss-Kronrod
    (QUADPACK via scipy).
    """
    if hi < lo:
        raise ValueError("need lo <= hi")
    if any(singular) or complement:
        return tanh_sinh(
            f, lo, hi, rel_tol=rel_tol, complement=complement, singular=singular, max_evals=max_evals
        )
    limit = max(50, min(max_evals // 21, 10**5))
    with np.errstate(all="ignore"):
        value, err, info = _sp_integrate.quad(
            lambda x: float(f(x)), lo, hi, epsabs=0.0, epsrel=rel_tol, limit=limit, full_output=1
        )[:3]
    evals = int(info["neval"])
    result = QuadratureResult(float(value), float(err), evals)
    if not (err <= max(rel_tol * abs(value), 1e-15 * (hi - lo))):
        raise QuadratureError(f"Gauss-Kronrod did not converge (error {err:.3g})", result)
    return result


def integrate_2d(
    f,
    region: IntegrationRegion2D,
    rel_tol: float = 1e-11,
    abs_tol: float = 0.0,
    complement: bool = False,
    min_level: int = 3,
    max_level: int = 10,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadratureResult:
    """Iterated integral: inner over ``a`` in ``[a_lo(b), a_hi(b)]``, outer over ``b``.

    Both levels use tanh-sinh with a common step that is halved until two
    successive estimates agree.  With ``complement=True`` the integrand is
    called as ``f(a, b, a - a_lo(b), a_hi(b) - a)``; otherwise ``f(a, b)``.
    """
    b_lo, b_hi = float(region.b_lo), float(region.b_hi)
    if b_hi < b_lo:
        raise ValueError("need b_lo <= b_hi")
    evals = 0
    prev = None
    value = None
    err = float("inf")
    for level in range(min_level, max_level + 1):
        _, db_lo, db_hi, wb = tanh_sinh_nodes(level, complement=False)
        b = np.where(db_lo <= db_hi, b_lo + (b_hi - b_lo) * db_lo, b_hi - (b_hi - b_lo) * db_hi)
        _, da_lo, da_hi, wa = tanh_sinh_nodes(level, complement)
        lo = np.asarray(region.a_lo(b), dtype=float)[:, None]
        hi = np.asarray(region.a_hi(b), dtype=float)[:, None]
        width = np.maximum(hi - lo, 0.0)
        d_lo = width * da_lo[None, :]
        d_hi = width * da_hi[None, :]
        a = np.where(da_lo[None, :] <= da_hi[None, :], lo + d_lo, hi - d_hi)
        bb = np.broadcast_to(b[:, None], a.shape)
        weights = (width * wa[None, :]) * wb[:, None]
        if not complement:
            weights = np.where((a > lo) & (a < hi), weights, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = f(a, bb, d_lo, d_hi) if complement else f(a, bb)
        vals = np.broadcast_to(np.asarray(vals, dtype=float), a.shape)
        evals += a.size
        value = (b_hi - b_lo) * _weighted_sum(vals, weights)
        if prev is not None:
            err = abs(value - prev)
            if err <= max(rel_tol * abs(value), abs_tol):
                return QuadratureResult(value, err, evals)
        if evals > max_evals:
            break
        prev = value
    raise QuadratureError(
        f"2-D tanh-sinh did not converge (estimate {value!r}, error {err:.3g}, {evals} evaluations)",
        QuadratureResult(value, err, evals),
    )


def _gauss_rect(f, x0, x1, y0, y1, nodes, weights):
    """Tensor Gauss-Legendre on a batch of rectangles (arrays of corners)."""
    hx = 0.5 * (x1 - x0)
    hy = 0.5 * (y1 - y0)
    cx = 0.5 * (x1 + x0)
    cy = 0.5 * (y1 + y0)
    X = cx[:, None, None] + hx[:, None, None] * nodes[None, :, None]
    Y = cy[:, None, None] + hy[:, None, None] * nodes[None, None, :]
    X, Y = np.broadcast_arrays(X, Y)
    vals = np.asarray(f(X, Y), dtype=float)
    W = weights[:, None] * weights[None, :]
    return hx * hy * np.einsum("kij,ij->k", vals, W), X.size


def _quadrants(panels):
    x0, x1, y0, y1 = panels.T
    xm = 0.5 * (x0 + x1)
    ym = 0.5 * (y0 + y1)
    return np.concatenate(
        [
            np.stack([x0, xm, y0, ym], axis=1),
            np.stack([xm, x1, y0, ym], axis=1),
            np.stack([x0, xm, ym, y1], axis=1),
            np.stack([xm, x1, ym, y1], axis=1),
        ]
    )


def integrate_rectangle_adaptive(
    f,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    abs_tol: float = 1e-8,
    order: int = 5,
    initial: tuple[int, int] = (8, 8),
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadratureResult:
    """Adaptive tensor Gauss-Legendre cubature on a rectangle.

    Each leaf panel is compared with the sum over its four quadrants.  While
    the summed discrepancy exceeds ``abs_tol`` the leaves carrying the
    largest discrepancies are split.  Meant for integrands that are smooth
    except across curves where a derivative jumps.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nx, ny = initial
    xs = np.linspace(*x_range, nx + 1)
    ys = np.linspace(*y_range, ny + 1)
    X0, Y0 = np.meshgrid(xs[:-1], ys[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(xs[1:], ys[1:], indexing="ij")
    panels = np.stack([X0.ravel(), X1.ravel(), Y0.ravel(), Y1.ravel()], axis=1)
    coarse, evals = _gauss_rect(f, *panels.T, nodes, weights)

    def refine(panels, coarse):
        kids = _quadrants(panels)
        vals, n = _gauss_rect(f, *kids.T, nodes, weights)
        m = len(panels)
        fine = vals.reshape(4, m).sum(axis=0)
        return kids, vals, fine, np.abs(fine - coarse), n

    kids, kid_vals, fine, err, n = refine(panels, coarse)
    evals += n
    while True:
        total_err = float(np.sum(err))
        if total_err <= abs_tol:
            return QuadratureResult(float(np.sum(fine)), total_err, evals)
        if evals > max_evals:
            raise QuadratureError(
                f"adaptive cubature exhausted its budget (error {total_err:.3g})",
                QuadratureResult(float(np.sum(fine)), total_err, evals),
            )
        # split the largest-error leaves until what remains is within half the tolerance
        m = len(panels)
        order_desc = np.argsort(-err, kind="stable")
        tail = np.cumsum(err[order_desc][::-1])[::-1]
        n_split = max(1, int(np.count_nonzero(tail > 0.5 * abs_tol)))
        split = np.zeros(m, dtype=bool)
        split[order_desc[:n_split]] = True
        idx = np.flatnonzero(split)
        sel = np.concatenate([idx + k * m for k in range(4)])
        new_panels = kids[sel]
        new_coarse = kid_vals[sel]
        nk, nv, nf, ne, n = refine(new_panels, new_coarse)
        evals += n
        keep = ~split
        panels = np.concatenate([panels[keep], new_panels])
        mk = int(np.count_nonzero(keep))
        old_kids = kids.reshape(4, m, 4)[:, keep].reshape(4 * mk, 4)
        old_vals = kid_vals.reshape(4, m)[:, keep]
        new_m = len(new_panels)
        kids = np.concatenate([old_kids.reshape(4, mk, 4), nk.reshape(4, new_m, 4)], axis=1).reshape(-1, 4)
        kid_vals = np.concatenate([old_vals, nv.reshape(4, new_m)], axis=1).ravel()
        fine = np.concatenate([fine[keep], nf])
        err = np.concatenate([err[keep], ne])
