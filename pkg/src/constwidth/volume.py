"""Volumes of U_3, the Meissner bodies and their Minkowski average.

Every volume goes through the support-function functional for bodies of
constant width 2 in R^3,

    Vol = 4 pi / 3 - integral over S^2 of  |grad h|^2 / 2 - (h - 1)^2,

either through dedicated chart integrals (``I1`` .. ``I4``) over
``(a, b)`` with area form ``da db / sqrt(1 - a^2 - b^2)``, or through the
generic evaluator :func:`ag_volume_generic` that only needs ``h``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import bodies
from .bodies import BodySpec
from .quadrature import (
    IntegrationRegion2D,
    QuadratureResult,
    integrate_1d,
    integrate_2d,
    integrate_rectangle_adaptive,
)

BALL_VOLUME_3 = 4.0 * math.pi / 3.0
SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

REL_TOL_1D = 1e-12
REL_TOL_2D = 1e-11

# reference ratios Vol / Vol(B^3)
U3_RATIO = 0.80297025514991011046814277
MEISSNER_RATIO = 0.80187362
MEISSNER_AVERAGE_RATIO = 0.803806345386


@dataclass(frozen=True)
class VolumeReport:
    body: BodySpec | None
    volume: float
    ratio_to_ball: float
    method: str
    error_estimate: float
    evaluations: int = 0

    @classmethod
    def from_volume(cls, body, volume, method, error_estimate, evaluations=0):
        return cls(body, float(volume), float(volume) / BALL_VOLUME_3, method, float(error_estimate), evaluations)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["body"] = None if self.body is None else {"kind": self.body.kind.value, "ambient_dim": self.body.ambient_dim}
        return d


def _c(a, b):
    r2 = np.asarray(a * a + b * b, dtype=float)
    if np.any(r2 > 1.0):
        raise ValueError("a^2 + b^2 must not exceed 1")
    return np.sqrt(1.0 - r2)


def integrand_case_iii(a, b):
    """``|grad h|^2/2 - (h - 1)^2`` on Case III, where ``h = a + c/sqrt2``."""
    t = a + _c(a, b) / SQRT2
    return 0.75 - 0.5 * t * t - (t - 1.0) ** 2


def integrand_case_iia(a, b):
    """``|grad h|^2/2 - (h - 1)^2`` on Case IIa, where ``h = sqrt(1 + a^2 - b^2)``."""
    _c(a, b)
    s = 1.0 + a * a - b * b
    d = a * a - b * b
    return 0.5 * ((a * a + b * b) / s - d * d / s) - (np.sqrt(s) - 1.0) ** 2


# ------------------------------------------------------------------ I1


def _i1_a_lo(b):
    return np.sqrt((1.0 - b * b) / 3.0)


def _i1_a_hi(b):
    return np.sqrt(np.maximum(1.0 - 3.0 * b * b, 0.0))


I1_REGION = IntegrationRegion2D(0.0, 0.5, _i1_a_lo, _i1_a_hi)


def _i1_integrand(a, b, d_lo, d_hi):
    # 1 - a^2 - b^2 = 2 b^2 + (a_hi - a)(a_hi + a): no cancellation at the a = 1, b = 0 corner
    one_minus = 2.0 * b * b + d_hi * (_i1_a_hi(b) + a)
    c = np.sqrt(one_minus)
    t = a + c / SQRT2
    return (0.75 - 0.5 * t * t - (t - 1.0) ** 2) / c


def I1_closed() -> float:
    return (math.pi * math.sqrt(6.0) - 3.0 * SQRT2) / 12.0 - math.atan(SQRT2 / 5.0)


def I1_quad(rel_tol: float = REL_TOL_2D) -> QuadratureResult:
    """Case-III integrand over ``0 <= b <= 1/2``, ``sqrt((1-b^2)/3) <= a <= sqrt(1-3b^2)``."""
    return integrate_2d(_i1_integrand, I1_REGION, rel_tol=rel_tol, complement=True)


# ------------------------------------------------------------------ I2


def _i2_a_lo(b):
    return b


I2_REGION = IntegrationRegion2D(0.0, 0.5, _i2_a_lo, _i1_a_lo)


def _i2_integrand(a, b):
    s = 1.0 + a * a - b * b
    return (a * a / s - 1.5 * (a * a - b * b) - 2.0 + 2.0 * np.sqrt(s)) / np.sqrt(1.0 - a * a - b * b)


def _j_integrand(a, b):
    return np.sqrt(1.0 + a * a - b * b) / np.sqrt(1.0 - a * a - b * b)


def I2_quad(rel_tol: float = REL_TOL_2D) -> QuadratureResult:
    return integrate_2d(_i2_integrand, I2_REGION, rel_tol=rel_tol)


def J_quad(rel_tol: float = REL_TOL_2D) -> QuadratureResult:
    """``sqrt(1 + a^2 - b^2)/sqrt(1 - a^2 - b^2)`` over the I2 region."""
    return integrate_2d(_j_integrand, I2_REGION, rel_tol=rel_tol)


def _arctan_kernel(a):
    return np.sqrt((1.0 + a * a) / (1.0 - a * a)) * np.arctan(a / (np.sqrt(1.0 + a * a) + 1.0))


def K_quad(rel_tol: float = REL_TOL_1D) -> QuadratureResult:
    """``int_0^{1/sqrt3} sqrt((1+a^2)/(1-a^2)) arctan(a/(sqrt(1+a^2)+1)) da``."""
    return integrate_1d(_arctan_kernel, 0.0, 1.0 / SQRT3, rel_tol=rel_tol)


def J_one_dim(rel_tol: float = REL_TOL_1D) -> QuadratureResult:
    """J reduced to one dimension: ``arctan(1/sqrt8)/4 + K``."""
    k = K_quad(rel_tol)
    return QuadratureResult(math.atan(1.0 / math.sqrt(8.0)) / 4.0 + k.value, k.abs_error_estimate, k.evaluations)


def J_one_dim_unsplit(rel_tol: float = REL_TOL_1D) -> QuadratureResult:
    """J as ``int_0^{1/sqrt3} sqrt((1+a^2)/(1-a^2)) (a/(2(1+a^2)) + arctan(...)) da``."""

    def f(a):
        return np.sqrt((1.0 + a * a) / (1.0 - a * a)) * (
            a / (2.0 * (1.0 + a * a)) + np.arctan(a / (np.sqrt(1.0 + a * a) + 1.0))
        )

    return integrate_1d(f, 0.0, 1.0 / SQRT3, rel_tol=rel_tol)


def I2_rearranged(rel_tol: float = REL_TOL_2D) -> float:
    j = J_quad(rel_tol)
    return 7.0 * SQRT2 / 12.0 - 1.0 - math.atan(SQRT2) + math.pi / 4.0 + 2.0 * j.value


# ------------------------------------------------------------------ U_3


def volume_u3(method: str = "cases", rel_tol: float | None = None) -> VolumeReport:
    """Volume of U_3.

    ``"cases"``: ``4 pi/3 - 16 I1 - 48 I2``.
    ``"theorem"``: ``(4 pi/3)(4 - sqrt6) + 24(2 - sqrt2 - arctan(1/sqrt8)) - 96 K``.
    ``"generic"``: :func:`ag_volume_generic` with finite-difference gradients.
    """
    body = bodies.u3()
    if method == "cases":
        tol = REL_TOL_2D if rel_tol is None else rel_tol
        i1 = I1_quad(tol)
        i2 = I2_quad(tol)
        vol = BALL_VOLUME_3 - 16.0 * i1.value - 48.0 * i2.value
        err = 16.0 * i1.abs_error_estimate + 48.0 * i2.abs_error_estimate
        return VolumeReport.from_volume(body, vol, "cases", err, i1.evaluations + i2.evaluations)
    if method == "theorem":
        tol = REL_TOL_1D if rel_tol is None else rel_tol
        k = K_quad(tol)
        vol = (
            BALL_VOLUME_3 * (4.0 - math.sqrt(6.0))
            + 24.0 * (2.0 - SQRT2 - math.atan(1.0 / math.sqrt(8.0)))
            - 96.0 * k.value
        )
        return VolumeReport.from_volume(body, vol, "theorem", 96.0 * k.abs_error_estimate, k.evaluations)
    if method == "generic":
        report = ag_volume_generic(bodies.support_u3_ab, rel_tol=GENERIC_REL_TOL if rel_tol is None else rel_tol)
        return VolumeReport.from_volume(body, report.volume, "generic", report.error_estimate, report.evaluations)
    raise ValueError(f"unknown method {method!r} for U3 (use cases, theorem or generic)")


# ------------------------------------------------------------------ Meissner


def volume_meissner_closed() -> VolumeReport:
    """``8 pi (2/3 - (sqrt3/4) arccos(1/3))``, shared by both Meissner bodies."""
    vol = 8.0 * math.pi * (2.0 / 3.0 - SQRT3 / 4.0 * math.acos(1.0 / 3.0))
    return VolumeReport.from_volume(bodies.meissner_a(), vol, "closed", 0.0)


def _i3_integrand(b, a):
    r = np.sqrt(1.0 - a * a)
    return (
        0.125
        * (
            (1.0 + 2.0 * a * a) / (1.0 - a * a)
            - 2.0 * (b - 2.0 + SQRT3 * r) ** 2
            - (SQRT3 * a * a / r - b) ** 2
        )
        / np.sqrt(1.0 - a * a - b * b)
    )


def _i4_integrand(b, a):
    ra = np.sqrt(1.0 - a * a)
    rb = np.sqrt(1.0 - b * b)
    return (
        0.125
        * (
            3.0 * a * a / (1.0 - a * a)
            + 3.0 * b * b / (1.0 - b * b)
            - 6.0 * (rb - ra) ** 2
            - 3.0 * (a * a / ra - b * b / rb) ** 2
        )
        / np.sqrt(1.0 - a * a - b * b)
    )


def i3_integrand(a, b):
    """Integrand of I3 (area form included) at chart point ``(a, b)``."""
    return _i3_integrand(np.asarray(b, dtype=float), np.asarray(a, dtype=float))


def i4_integrand(a, b):
    return _i4_integrand(np.asarray(b, dtype=float), np.asarray(a, dtype=float))


# outer variable a, inner b
I3_REGION = IntegrationRegion2D(0.0, 0.5, lambda a: np.full_like(a, 0.5), _i1_a_lo)
I4_REGION = IntegrationRegion2D(0.0, 0.5, lambda a: a, lambda a: np.full_like(a, 0.5))


def I3_quad(rel_tol: float = REL_TOL_2D) -> QuadratureResult:
    """Over ``0 <= a <= 1/2``, ``1/2 <= b <= sqrt((1-a^2)/3)``."""
    return integrate_2d(_i3_integrand, I3_REGION, rel_tol=rel_tol)


def I4_quad(rel_tol: float = REL_TOL_2D) -> QuadratureResult:
    """Over ``0 <= a <= 1/2``, ``a <= b <= 1/2``."""
    return integrate_2d(_i4_integrand, I4_REGION, rel_tol=rel_tol)


def volume_meissner_average(method: str = "cases", rel_tol: float | None = None) -> VolumeReport:
    """Volume of (A + B)/2: ``4 pi/3 - 16 I1 - 48 (I3 + I4)``, or the generic evaluator."""
    body = bodies.meissner_average()
    if method == "cases":
        tol = REL_TOL_2D if rel_tol is None else rel_tol
        i1, i3, i4 = I1_quad(tol), I3_quad(tol), I4_quad(tol)
        vol = BALL_VOLUME_3 - 16.0 * i1.value - 48.0 * (i3.value + i4.value)
        err = 16.0 * i1.abs_error_estimate + 48.0 * (i3.abs_error_estimate + i4.abs_error_estimate)
        return VolumeReport.from_volume(body, vol, "cases", err, i1.evaluations + i3.evaluations + i4.evaluations)
    if method == "generic":
        report = ag_volume_generic(
            bodies.support_meissner_average, rel_tol=GENERIC_REL_TOL if rel_tol is None else rel_tol
        )
        return VolumeReport.from_volume(body, report.volume, "generic", report.error_estimate, report.evaluations)
    raise ValueError(f"unknown method {method!r} for the Meissner average (use cases or generic)")


# ------------------------------------------------------------------ generic

GENERIC_REL_TOL = 1e-7
FD_STEP = 1e-6


def _tangent_frame(theta):
    helper = np.zeros_like(theta)
    use_y = np.abs(theta[..., 0]) > 0.9
    helper[..., 0] = np.where(use_y, 0.0, 1.0)
    helper[..., 1] = np.where(use_y, 1.0, 0.0)
    t1 = np.cross(helper, theta)
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(theta, t1)
    return t1, t2


def fd_spherical_gradient(h, theta, step: float = FD_STEP):
    """Spherical gradient of ``h`` by central differences along great circles."""
    theta = np.asarray(theta, dtype=float)
    cs, sn = math.cos(step), math.sin(step)
    grad = np.zeros_like(theta)
    for t in _tangent_frame(theta):
        plus = h(cs * theta + sn * t)
        minus = h(cs * theta - sn * t)
        grad += ((plus - minus) / (2.0 * step))[..., None] * t
    return grad


def contact_gradient(body: BodySpec):
    """Spherical gradient from the body's contact points: ``x(theta) - h theta``."""

    def grad(theta):
        x = bodies.contact_point(body, theta)
        return x - np.sum(x * theta, axis=-1, keepdims=True) * theta

    return grad


def ag_integrand(h, grad, theta):
    hv = h(theta)
    g = grad(theta)
    return 0.5 * np.sum(g * g, axis=-1) - (hv - 1.0) ** 2


def ag_volume_generic(h, grad="fd", rel_tol: float = GENERIC_REL_TOL, max_evals: int = 4 * 10**7) -> VolumeReport:
    """Volume of a width-2 body in R^3 from its support function alone.

    The upper hemisphere is charted by ``(a, b)``; with ``a = sin(phi) cos(psi)``,
    ``b = sin(phi) sin(psi)`` the area form ``da db / sqrt(1 - a^2 - b^2)``
    becomes ``sin(phi) dphi dpsi``.  The lower hemisphere contributes the
    same amount because ``h(-theta) = 2 - h(theta)`` leaves the integrand
    unchanged.  ``grad`` is ``"fd"`` or a callable returning spherical
    gradients.
    """
    if grad == "fd":

        def grad(theta):
            return fd_spherical_gradient(h, theta)

    def f(phi, psi):
        s = np.sin(phi)
        theta = np.stack([s * np.cos(psi), s * np.sin(psi), np.cos(phi)], axis=-1)
        shape = theta.shape
        vals = ag_integrand(h, grad, theta.reshape(-1, 3)).reshape(shape[:-1])
        return s * vals

    half = integrate_rectangle_adaptive(
        f,
        (0.0, 0.5 * math.pi),
        (0.0, 2.0 * math.pi),
        abs_tol=0.5 * rel_tol * BALL_VOLUME_3,
        initial=(8, 32),
        max_evals=max_evals,
    )
    vol = BALL_VOLUME_3 - 2.0 * half.value
    return VolumeReport.from_volume(None, vol, "generic", 2.0 * half.abs_error_estimate, half.evaluations)


def ball_volume(n: int, radius: float = 1.0) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0) * radius**n


def reuleaux_triangle_area() -> float:
    """Area of the Reuleaux triangle of width 2, ``2 (pi - sqrt3)``."""
    return 2.0 * (math.pi - SQRT3)


# names in the mathematical notation
integrand_case_III = integrand_case_iii
integrand_case_IIa = integrand_case_iia
volume_U3 = volume_u3
