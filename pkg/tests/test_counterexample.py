import numpy as np
import pytest
from hypothesis import given, strategies as st

from superopt.counterexample import (
    build_ekp,
    build_from_interpolation,
    build_kp,
    exterior_gap,
    g_disk_zeros,
    g_residuals,
    interpolate_blaschke,
    pick_matrix,
    zero_count_by_winding,
)
from superopt.errors import ConstructionFailure, InfeasibleInterpolation
from superopt.nehari2x2 import verify_very_bad
from superopt.ratfun import RatFun, blaschke
from superopt.ratmat import mcmillan_degree, riesz_split_mat
from superopt.thematic import check_bounds, degree_profile
from superopt.tolerances import circle_grid

from conftest import sup


def test_smallest_instance_by_hand():
    kp = build_kp(2, 2.0, 0.5, B1_zeros=[0, 0])
    # g = 1 - 2 z^2 has zeros +-1/sqrt(2); the larger-real one is chosen
    assert kp.spec.deltas == [[pytest.approx(1 / np.sqrt(2))]]
    minus, plus = riesz_split_mat(kp.psi)
    assert mcmillan_degree(minus, "all") == 2
    assert mcmillan_degree(plus, "all") == 1
    assert (kp.deg_minus, kp.deg_plus) == (2, 1)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_sharp_degrees(k):
    kp = build_kp(k, 2.0, 0.5)
    assert (kp.deg_minus, kp.deg_plus) == (k, 2 * k - 3)
    assert kp.form_mismatch < 1e-9
    assert max(g_residuals(kp.spec)) < 1e-9


@pytest.mark.parametrize("k", [2, 3, 4])
def test_no_exterior_cancellation(k):
    assert exterior_gap(build_kp(k, 2.0, 0.5).spec) > 1e-3


@pytest.mark.parametrize("k", [2, 3])
def test_normalized_instance_is_very_badly_approximable(k):
    kp = build_kp(k, 2.0, 0.5)
    assert verify_very_bad(kp.psi).passed


@pytest.mark.parametrize("k", [2, 3, 4])
def test_instance_satisfies_all_bound_clauses(k):
    v = check_bounds(build_kp(k, 2.0, 0.5).spec.thematic(), n_scan=20)
    assert v.passed
    row = next(r for r in v.rows if abs(r.s - 0.5) < 1e-12)
    assert row.deg_plus == 2 * row.deg_minus - 3


@given(st.integers(2, 5), st.floats(1.2, 4.0), st.floats(0.1, 0.95))
def test_disk_zero_count_by_two_routes(k, a, t):
    if a * a * t <= 1.05:
        return
    B1 = blaschke([0.6 * np.exp(2j * np.pi * j / k) for j in range(k)])
    B2 = RatFun.z(k - 2)
    roots = g_disk_zeros(B1, B2, a, t)
    g = 1 - B1 * B2 * (t * a * a)
    # argument principle: g has no disk poles, so winding counts disk zeros
    from superopt.ratfun import winding_number
    assert len(roots) == winding_number(g) == 2 * k - 2


def test_winding_count_helper():
    spec = build_kp(3, 2.0, 0.5).spec
    assert zero_count_by_winding(spec) == 4


def test_parameter_checks():
    with pytest.raises(ConstructionFailure):
        build_kp(1, 2.0, 0.5)
    with pytest.raises(ConstructionFailure):
        build_kp(3, 0.9, 0.5)
    with pytest.raises(ConstructionFailure):
        build_ekp(3, 2.0, [0.4, 0.8], [1, 2])


def test_prescribed_violation_pattern():
    ekp = build_ekp(3, 2.0, [0.4, 0.8], [1, 1])
    assert [r.deficit for r in ekp.rows] == [1, 1]
    gen = degree_profile(ekp.thematic, [0.6, 0.9, 1.0])
    assert all(r.margin >= 2 for r in gen)


def test_single_block_partition_reduces_to_single_parameter():
    ekp = build_ekp(3, 2.0, [0.5], [2])
    kp = build_kp(3, 2.0, 0.5)
    zeta = circle_grid(128)
    assert sup(ekp.spec.B0(zeta) - kp.spec.B0(zeta)) < 1e-12


def test_full_partition_attains_sum_equality():
    ekp = build_ekp(4, 2.0, [0.4, 0.6, 0.9], [1, 1, 1])
    v = check_bounds(ekp.thematic, n_scan=20)
    assert v.passed and v.deficit_sum == v.deg_minus_u1 == 3


# -- interpolation ---------------------------------------------------------------------

def test_one_point_interpolation():
    B = interpolate_blaschke([0.0], [0.5])
    assert B(0.0) == pytest.approx(0.5)
    assert sup(np.abs(B(circle_grid(256))) - 1) < 1e-12
    assert B.degree == 1


def test_zero_targets_give_blaschke_with_node_zeros():
    nodes = [0.3, -0.2j, 0.5 + 0.1j]
    B = interpolate_blaschke(nodes, [0, 0, 0])
    zeta = circle_grid(256)
    assert sup(B(zeta) / blaschke(nodes)(zeta) - (B(zeta) / blaschke(nodes)(zeta))[0]) < 1e-10


def test_infeasible_pick_data():
    nodes, targets = [0.1, 0.11], [0.9, -0.9]
    P = pick_matrix(nodes, targets)
    assert np.linalg.det(P).real < 0    # oracle: 2x2 Pick determinant sign
    with pytest.raises(InfeasibleInterpolation):
        interpolate_blaschke(nodes, targets)


@given(st.integers(0, 2**32 - 1))
def test_interpolant_is_unimodular_and_interpolates(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    nodes = [0.7 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()) for _ in range(n)]
    targets = [0.2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()) for _ in range(n)]
    if np.linalg.eigvalsh(pick_matrix(nodes, targets)).min() <= 1e-6:
        return
    budget = n + int(rng.integers(0, 3))
    B = interpolate_blaschke(nodes, targets, budget)
    assert sup(np.abs(B(circle_grid(256))) - 1) < 1e-10
    assert max(abs(B(z) - w) for z, w in zip(nodes, targets)) < 1e-8
    assert B.degree == budget


def test_interpolation_route_matches_theorem_hypothesis():
    k, a, t = 3, 3.0, 0.5
    deltas = [[0.2, -0.3j]]
    spec = build_from_interpolation(k, a, [t], deltas)
    assert max(g_residuals(spec)) < 1e-8
    (row,) = degree_profile(spec.thematic(), [t])
    assert (row.deg_minus, row.deg_plus) == (k, 2 * k - 3)
