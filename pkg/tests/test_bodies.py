import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constwidth import bodies as B
from constwidth.bodies import (
    SQRT2,
    BodyKind,
    BodySpec,
    CaseRegion,
    TETRA_VERTICES,
    classify_case,
    contact_point,
    membership_M,
    split_pos_neg,
    support_M,
    support_meissner_A,
    support_meissner_B,
    support_meissner_average,
    support_U,
    support_U3_ab,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def unit_vectors(dim):
    return st.lists(st.floats(-1, 1, allow_nan=False), min_size=dim, max_size=dim).filter(
        lambda v: np.linalg.norm(v) > 1e-3
    ).map(lambda v: np.asarray(v) / np.linalg.norm(v))


def sphere(n, m, seed=0):
    return B.random_directions(n, m, np.random.default_rng(seed))


# ---------------------------------------------------------------- split


def test_split_examples():
    s = split_pos_neg([1, -2, 0])
    assert s.plus.tolist() == [1, 0, 0] and s.minus.tolist() == [0, 2, 0]
    s = split_pos_neg([0, 0])
    assert s.plus.tolist() == [0, 0] and s.minus.tolist() == [0, 0]
    s = split_pos_neg([3, 4])
    assert s.plus.tolist() == [3, 4] and s.minus.tolist() == [0, 0]


@given(st.lists(finite, min_size=1, max_size=12))
def test_split_invariants(x):
    s = split_pos_neg(x)
    assert np.array_equal(s.plus - s.minus, np.asarray(x, dtype=float))
    assert np.all(s.plus >= 0) and np.all(s.minus >= 0)
    assert np.all(s.plus * s.minus == 0)


# ---------------------------------------------------------------- M_n


def test_support_m_examples():
    for n in (2, 3, 7):
        e = np.zeros(n)
        e[0] = 1
        assert support_M(n, e) == pytest.approx(SQRT2, abs=1e-15)
        assert support_M(n, -e) == pytest.approx(2 - SQRT2, abs=1e-15)
    assert support_M(2, [1 / SQRT2, -1 / SQRT2]) == pytest.approx(1.0, abs=1e-15)


def test_support_m_dimension_mismatch():
    with pytest.raises(ValueError):
        support_M(3, [1.0, 0.0])


@pytest.mark.parametrize("n", range(2, 11))
def test_support_m_range_and_width(n):
    th = sphere(n, 20000, n)
    h = support_M(n, th)
    assert np.all(h >= 2 - SQRT2 - 1e-15) and np.all(h <= SQRT2 + 1e-15)
    assert np.max(np.abs(h + support_M(n, -th) - 2)) <= 1e-12


def test_membership_examples():
    assert membership_M(3, np.zeros(3))
    x = np.array([SQRT2, 0, 0])
    assert B.constraint_m(x) == pytest.approx(4.0, abs=1e-15)
    assert membership_M(3, x)


@pytest.mark.parametrize("n", [2, 3])
def test_membership_agrees_with_separation_oracle(n):
    # x lies in the body iff x . theta <= h(theta) for all theta
    rng = np.random.default_rng(10 + n)
    x = rng.standard_normal((1000, n))
    x *= (1.6 * rng.random(1000) ** (1 / n) / np.linalg.norm(x, axis=1))[:, None]
    th = B.random_directions(n, 10000, rng)
    sep = np.max(x @ th.T - support_M(n, th)[None, :], axis=1)
    inside = membership_M(n, x)
    assert np.all(sep[inside] <= 1e-12)
    g = B.constraint_m(x)
    clearly_out = g > 4.05
    assert np.all(sep[clearly_out] > 1e-12)
    assert inside.sum() > 100 and clearly_out.sum() > 100


@pytest.mark.parametrize("n", [2, 3, 5])
def test_contact_point_m_is_boundary_point(n):
    th = sphere(n, 5000, n)
    x = B.contact_point_m(th)
    assert np.max(np.abs(np.sum(x * th, axis=1) - support_M(n, th))) <= 1e-12
    assert np.max(np.abs(B.constraint_m(x) - 4)) <= 1e-12


# ---------------------------------------------------------------- U_n


def test_simplex_basis_n3_exact():
    e = B.simplex_basis(3)
    assert np.array_equal(e[0], np.array([1, -1, 0, 0]) / SQRT2)
    assert np.array_equal(e[1], np.array([0, 0, 1, -1]) / SQRT2)
    assert np.array_equal(e[2], np.array([1, 1, -1, -1]) / 2)


@pytest.mark.parametrize("n", [2, 3, 5, 9])
def test_simplex_basis_orthonormal(n):
    e = B.simplex_basis(n)
    assert e.shape == (n, n + 1)
    assert np.max(np.abs(e @ e.T - np.eye(n))) <= 1e-14
    assert np.max(np.abs(e.sum(axis=1))) <= 1e-14


def test_simplex_basis_rejects_small_n():
    with pytest.raises(ValueError):
        B.simplex_basis(1)


def test_support_u3_examples():
    case_i = 2 - 0.6 / SQRT2 - 0.8
    assert support_U(3, [0, 0.8, 0.6]) == pytest.approx(case_i, abs=1e-15)
    assert support_U3_ab(np.array([0, 0.8, 0.6])) == pytest.approx(0.775735931288071, abs=1e-14)
    assert support_U(3, [0, 0, 1]) == pytest.approx(1.0, abs=1e-15)
    a = 0.3
    assert support_U3_ab(np.array([a, a, math.sqrt(1 - 2 * a * a)])) == pytest.approx(1.0, abs=1e-15)
    assert support_U3_ab(np.array([1.0, 0, 0])) == pytest.approx(1.0, abs=1e-15)


def test_support_u_rejects_non_unit():
    with pytest.raises(ValueError):
        support_U(3, [0, 0, 2.0])
    with pytest.raises(ValueError):
        support_U(3, [1.0, 0.0])


def test_support_u3_formulas_match_ambient_evaluation():
    th = sphere(3, 200000, 1)
    assert np.max(np.abs(support_U3_ab(th) - support_U(3, th))) <= 1e-14


def test_u2_is_reuleaux_triangle():
    th = sphere(2, 1000, 2)
    assert np.max(np.abs(support_U(2, th) + support_U(2, -th) - 2)) <= 1e-12
    # the three corners sit on an equilateral triangle of side 2
    x = B.contact_point_u(th)
    corners = x[np.linalg.norm(x, axis=1) > np.linalg.norm(x, axis=1).max() - 1e-9]
    assert np.linalg.norm(x, axis=1).max() == pytest.approx(2 / math.sqrt(3), abs=1e-12)
    assert len(corners) > 0


@settings(max_examples=200, deadline=None)
@given(unit_vectors(4), st.permutations(range(5)))
def test_u4_invariant_under_ambient_permutations(y, perm):
    yp = B.from_ambient(B.to_ambient(y)[list(perm)])
    assert support_U(4, yp) == pytest.approx(support_U(4, y), abs=1e-12)


# ---------------------------------------------------------------- cases


def test_classify_examples():
    assert classify_case(np.array([0, 0.8, 0.6])) is CaseRegion.I
    assert classify_case(np.array([0.8, 0, 0.6])) is CaseRegion.III
    assert classify_case(np.array([0.5, 0.1, math.sqrt(0.74)])) is CaseRegion.IIa
    assert B.classify_ab(0.1, 0.5) is CaseRegion.IIb


def test_classify_rejects_outside_disk():
    with pytest.raises(ValueError):
        B.classify_ab(0.9, 0.9)


def test_classify_tie_priority():
    # a = b lies on the IIa/IIb boundary; IIa wins
    a = 0.3
    assert classify_case(np.array([a, a, math.sqrt(1 - 2 * a * a)])) is CaseRegion.IIa


def _case_value(a, b, c, case):
    return B._u3_canonical_value(np.asarray(a), np.asarray(b), np.asarray(c), np.full(np.shape(a), case))


@pytest.mark.parametrize(
    "boundary",
    ["b_sqrt2_eq_c", "c_eq_a_sqrt2", "a_eq_b"],
)
def test_case_boundary_continuity(boundary):
    rng = np.random.default_rng(5)
    if boundary == "b_sqrt2_eq_c":
        # I against IIb: c = b sqrt2, a = sqrt(1 - 3 b^2) <= b
        b = rng.uniform(0.5, 1 / math.sqrt(3), 1000)
        c = b * SQRT2
        a = np.sqrt(np.maximum(1 - 3 * b * b, 0))
        pairs = [(B.CASE_I, B.CASE_IIB)]
    elif boundary == "c_eq_a_sqrt2":
        # IIa against III: c = a sqrt2, b = sqrt(1 - 3 a^2) <= a
        a = rng.uniform(0.5, 1 / math.sqrt(3), 1000)
        c = a * SQRT2
        b = np.sqrt(np.maximum(1 - 3 * a * a, 0))
        pairs = [(B.CASE_IIA, B.CASE_III)]
    else:
        a = rng.uniform(0, 0.5, 1000)
        b = a
        c = np.sqrt(1 - 2 * a * a)
        pairs = [(B.CASE_IIA, B.CASE_IIB)]
    for p, q in pairs:
        assert np.max(np.abs(_case_value(a, b, c, p) - _case_value(a, b, c, q))) <= 1e-12


def test_support_u3_continuous_on_fine_grid():
    phi = np.linspace(0, math.pi, 721)
    psi = np.linspace(0, 2 * math.pi, 1441)
    P, S = np.meshgrid(phi, psi, indexing="ij")
    th = np.stack([np.sin(P) * np.cos(S), np.sin(P) * np.sin(S), np.cos(P)], axis=-1)
    h = support_U3_ab(th)
    # the support function is 1-Lipschitz-ish on the sphere: jumps would show here
    step = math.pi / 720
    assert np.max(np.abs(np.diff(h, axis=0))) <= 3 * step
    assert np.max(np.abs(np.diff(h, axis=1))) <= 3 * step


# ---------------------------------------------------------------- Meissner


def test_tetra_vertices():
    expected = np.array(
        [[1, 0, 1 / SQRT2], [-1, 0, 1 / SQRT2], [0, 1, -1 / SQRT2], [0, -1, -1 / SQRT2]]
    )
    assert np.max(np.abs(TETRA_VERTICES - expected)) <= 1e-15
    d = [np.linalg.norm(TETRA_VERTICES[i] - TETRA_VERTICES[j]) for i, j in itertools.combinations(range(4), 2)]
    assert np.allclose(d, 2.0, atol=1e-15)


def test_meissner_a_examples():
    p = np.array([0, 0.8, 0.6])
    assert support_meissner_A(p) == pytest.approx(2 - 0.6 / SQRT2 - 0.8, abs=1e-15)
    c = math.sqrt(0.87)
    assert support_meissner_A(np.array([0.2, 0.3, c])) - 1 == pytest.approx(
        math.sqrt(3 * 0.91) - c / SQRT2 - 1, abs=1e-14
    )


def test_meissner_a_piece_formulas():
    rng = np.random.default_rng(3)
    # first piece: 0 <= a <= 1/2, 1/2 <= b <= sqrt((1 - a^2)/3)
    a = rng.uniform(0, 0.5, 5000)
    b = 0.5 + rng.random(5000) * (np.sqrt((1 - a * a) / 3) - 0.5)
    p = B.abc_from_ab(a, b)
    assert np.max(np.abs(support_meissner_A(p) - (2 - p[:, 2] / SQRT2 - b))) <= 1e-14
    # second piece: 0 <= b <= 1/2, 0 <= a <= sqrt((1 - b^2)/3)
    b = rng.uniform(0, 0.5, 5000)
    a = rng.random(5000) * np.sqrt((1 - b * b) / 3)
    p = B.abc_from_ab(a, b)
    expected = np.sqrt(3 * (1 - b * b)) - p[:, 2] / SQRT2
    assert np.max(np.abs(support_meissner_A(p) - expected)) <= 1e-14


def test_meissner_equal_u3_on_cases_i_and_iii():
    th = sphere(3, 100000, 4)
    codes = B.case_codes(th)
    sel = (codes == B.CASE_I) | (codes == B.CASE_III)
    u = support_U3_ab(th[sel])
    assert np.max(np.abs(support_meissner_A(th[sel]) - u)) <= 1e-15
    assert np.max(np.abs(support_meissner_B(th[sel]) - u)) <= 1e-15


def test_meissner_average_examples():
    a = np.linspace(0, 0.5, 11)
    p = B.abc_from_ab(a, a)
    assert np.max(np.abs(support_meissner_average(p) - 1)) <= 1e-15
    p = B.abc_from_ab(0.0, 0.5)
    expected = 1 + 1 - 0.25 - math.sqrt(3) / 2
    assert float(support_meissner_average(p)) == pytest.approx(expected, abs=1e-12)
    assert float(B.meissner_average_pieces(0.0, 0.5)) == pytest.approx(expected, abs=1e-12)


def test_meissner_average_pieces_agree():
    rng = np.random.default_rng(6)
    a = rng.uniform(0, 0.5, 4000)
    b = 0.5 + rng.random(4000) * (np.sqrt((1 - a * a) / 3) - 0.5)
    p = B.abc_from_ab(a, b)
    assert np.max(np.abs(support_meissner_average(p) - B.meissner_average_pieces(a, b))) <= 1e-14
    b = rng.uniform(0, 0.5, 4000)
    a = rng.random(4000) * b
    p = B.abc_from_ab(a, b)
    assert np.max(np.abs(support_meissner_average(p) - B.meissner_average_pieces(a, b))) <= 1e-14


def test_meissner_local_swap_identity():
    # h_B(a, b) + h_A(b, a) = 2 on the upper cap where the piece formulas live
    th = sphere(3, 400000, 8)
    th = th[th[:, 2] >= SQRT2 * np.maximum(np.abs(th[:, 0]), np.abs(th[:, 1]))]
    assert len(th) > 10000
    v = support_meissner_B(th) + support_meissner_A(th[:, [1, 0, 2]]) - 2
    assert np.max(np.abs(v)) <= 1e-14


def test_meissner_bodies_are_not_congruent_by_tetrahedral_symmetry():
    # a star of three rounded edges and a triangle of three are never
    # exchanged by a permutation of the vertices, so h_A o P != h_B
    th = sphere(3, 20000, 9)
    hb = support_meissner_B(th)
    for perm in B.ALL_PERMUTATIONS_4:
        M = B.permutation_matrix_abc(perm)
        assert np.max(np.abs(support_meissner_A(th @ M.T) - hb)) > 1e-3


@pytest.mark.parametrize("kind", [BodyKind.MEISSNER_A, BodyKind.MEISSNER_B])
def test_meissner_inside_reuleaux_tetrahedron(kind):
    th = sphere(3, 50000, 11)
    x = contact_point(BodySpec(kind, 3), th)
    d = np.linalg.norm(x[:, None, :] - TETRA_VERTICES[None, :, :], axis=-1)
    assert np.max(d) <= 2 + 1e-12


@pytest.mark.parametrize(
    "body", [B.u3(), B.meissner_a(), B.meissner_b(), B.meissner_average(), BodySpec("U", 4), BodySpec("M", 5)]
)
def test_contact_points_touch_and_separate(body):
    n = body.dim
    th = sphere(n, 3000, 12)
    x = contact_point(body, th)
    h = body.support(th)
    assert np.max(np.abs(np.sum(x * th, axis=1) - h)) <= 1e-12
    phi = sphere(n, 3000, 13)
    assert np.max(x @ phi.T - body.support(phi)[None, :]) <= 1e-12


# ---------------------------------------------------------------- specs


def test_body_spec_validation():
    with pytest.raises(ValueError):
        BodySpec(BodyKind.MEISSNER_A, 4)
    with pytest.raises(ValueError):
        BodySpec(BodyKind.M, 1)
    assert str(B.u3()) == "U_3"
    assert BodySpec("Ball", 5).support(sphere(5, 3)).tolist() == [1.0, 1.0, 1.0]


def test_case_region_codes_round_trip():
    for region in CaseRegion:
        assert CaseRegion.from_code(region.code) is region
