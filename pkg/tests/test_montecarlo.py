import math

import numpy as np
import pytest

from constwidth import bodies
from constwidth import montecarlo as mc
from constwidth.verify import polygon_area_from_contact
from constwidth.volume import ball_volume, reuleaux_triangle_area, volume_u3

U3_VOLUME = volume_u3().volume


def _within(est, target, k=3.0):
    return abs(est.volume - target) <= k * est.std_error


# --------------------------------------------------------------------- sampling


def test_sample_ball_is_inside_and_spread():
    x = mc.sample_ball(np.random.default_rng(0), 4, 20000)
    r = np.linalg.norm(x, axis=1)
    assert np.all(r <= mc.SAMPLING_RADIUS)
    # P(|x| <= R/2) = 2^-4 for the uniform 4-ball
    assert np.mean(r <= mc.SAMPLING_RADIUS / 2) == pytest.approx(1 / 16, abs=0.01)


def test_sampling_ball_contains_m():
    # max h = sqrt2, attained at the coordinate directions
    for n in (2, 3, 6):
        theta = bodies.random_directions(n, 5000, np.random.default_rng(n))
        assert np.max(bodies.support_m(theta)) <= math.sqrt(2.0) + 1e-15
        assert bodies.support_m(np.eye(n)[0]) == pytest.approx(math.sqrt(2.0), abs=1e-15)


# --------------------------------------------------------------------- determinism


def test_determinism_and_thread_independence():
    a = mc.estimate_volume_M(4, 300_000, seed=5, workers=1)
    b = mc.estimate_volume_M(4, 300_000, seed=5, workers=4)
    c = mc.estimate_volume_M(4, 300_000, seed=5, workers=1)
    assert a == b == c
    assert mc.estimate_volume_M(4, 300_000, seed=6).hits != a.hits


def test_estimate_fields():
    est = mc.estimate_volume_M(3, 100_000, seed=1)
    assert 0 <= est.hits <= est.n_samples
    assert est.volume == pytest.approx(est.hits / est.n_samples * ball_volume(3, math.sqrt(2.0)))
    p = est.hits / est.n_samples
    assert est.std_error == pytest.approx(ball_volume(3, math.sqrt(2.0)) * math.sqrt(p * (1 - p) / est.n_samples))
    assert est.ratio_root == pytest.approx(est.ratio_to_ball ** (1 / 3))
    lo, hi = est.ratio_root_interval(3.0)
    assert lo < est.ratio_root < hi
    d = est.to_dict()
    assert d["body"] == {"kind": "M", "ambient_dim": 3}


def test_input_validation():
    with pytest.raises(ValueError):
        mc.estimate_volume_M(3, 999, seed=0)
    with pytest.raises(ValueError):
        mc.estimate_volume_M(1, 10**4, seed=0)
    with pytest.raises(ValueError):
        mc.estimate_volume_M(mc.MAX_DIM + 1, 10**4, seed=0)
    with pytest.raises(ValueError):
        mc.ratio_trend(5, 4, 10**4, 0)


# --------------------------------------------------------------------- M_n


def test_m3_not_larger_than_ball():
    est = mc.estimate_volume_M(3, 10**6, seed=0, workers=4)
    assert est.volume <= 4 * math.pi / 3 + 3 * est.std_error


def test_m2_area_against_shoelace():
    area = polygon_area_from_contact(lambda t: bodies.contact_point_m(t), 10**4)
    est = mc.estimate_volume_M(2, 10**6, seed=3, workers=4)
    assert _within(est, area)


def test_m2_ratio_root_against_shoelace():
    area = polygon_area_from_contact(lambda t: bodies.contact_point_m(t), 10**4)
    row = mc.ratio_trend(2, 2, 10**6, seed=3, workers=4)[0]
    assert row["ratio_root_lo"] <= math.sqrt(area / math.pi) <= row["ratio_root_hi"]


@pytest.mark.slow
def test_m10_feasibility():
    est = mc.estimate_volume_M(10, 10**7, seed=42, workers=8)
    assert est.hits > 0
    assert est.std_error / est.volume < 0.05


# --------------------------------------------------------------------- U_n


def test_origin_is_member():
    for n in (2, 3, 5):
        assert mc.membership_u(np.zeros(n))


def test_membership_matches_support_function():
    # boundary points of U_3 are members; points pushed outward are not
    rng = np.random.default_rng(2)
    theta = bodies.random_directions(3, 500, rng)
    x = bodies.contact_point(bodies.u3(), theta)
    assert np.all(mc.membership_u(0.999 * x))
    assert not np.any(mc.membership_u(x + 1e-3 * theta))


def test_u3_against_quadrature():
    est = mc.estimate_volume_U(3, 200_000, seed=0, workers=4)
    assert _within(est, U3_VOLUME)
    assert _within(est, 3.36347)


def test_u2_against_reuleaux():
    est = mc.estimate_volume_U(2, 200_000, seed=1, workers=4)
    assert _within(est, reuleaux_triangle_area())


def test_golden_section_against_grid_scan():
    rng = np.random.default_rng(11)
    y = mc.sample_ball(rng, 3, 10**4)
    _, g_star = mc.min_constraint_on_fibre(y)
    X0 = bodies.to_ambient(y)
    d = np.full(4, 0.5)
    best = np.full(len(y), np.inf)
    for t in np.arange(-2.0, 2.0 + 1e-12, 1e-3):
        best = np.minimum(best, bodies.constraint_m(X0 + t * d))
    # the constraint has kinks where an ambient coordinate changes sign; scan them too
    for t in np.clip(-2.0 * X0, -2.0, 2.0).T:
        best = np.minimum(best, bodies.constraint_m(X0 + t[:, None] * d))
    assert np.all(g_star <= best + 1e-9)
    disagree = (g_star <= 4.0) != (best <= 4.0)
    band = np.abs(g_star - 4.0) <= 1e-6
    assert not np.any(disagree & ~band)


def test_fibre_minimum_is_convex_minimum():
    # g along the fibre is convex: values at the minimizer do not exceed neighbours
    y = mc.sample_ball(np.random.default_rng(4), 4, 200)
    t, g = mc.min_constraint_on_fibre(y)
    X0 = bodies.to_ambient(y)
    d = np.full(5, 1.0 / math.sqrt(5.0))
    for s in (-1e-3, 1e-3):
        g2 = bodies.constraint_m(X0 + (t + s)[:, None] * d)
        assert np.all(g <= g2 + 1e-12)


# --------------------------------------------------------------------- calibration and trend


@pytest.mark.parametrize("n", [2, 5, 10])
def test_ball_calibration(n):
    inside = 0
    for seed in range(30):
        est = mc.estimate_volume_ball(n, 20_000, seed)
        inside += _within(est, ball_volume(n))
    assert inside >= 27


def test_ball_control_ratio_root():
    for n in (2, 3, 4, 6):
        est = mc.estimate_volume_ball(n, 100_000, seed=n)
        lo, hi = est.ratio_root_interval(3.0)
        assert lo <= 1.0 <= hi


def test_trend_rows():
    rows = mc.ratio_trend(2, 6, 20_000, seed=0, workers=2)
    assert [r["n"] for r in rows] == [2, 3, 4, 5, 6]
    for r in rows:
        assert math.isfinite(r["std_error"]) and r["std_error"] > 0
        assert r["ratio_root_lo"] <= r["ratio_root"] <= r["ratio_root_hi"]
    assert rows == mc.ratio_trend(2, 6, 20_000, seed=0, workers=1)
