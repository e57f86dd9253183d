import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superopt.counterexample import build_ekp, build_kp
from superopt.errors import InvalidThematicData, TheoremViolation
from superopt.ratfun import RatFun, degree_region
from superopt.ratmat import RatMat, determinant
from superopt.thematic import (
    ThematicData,
    assemble,
    check_bounds,
    degree_profile,
    diagonal_example,
    disturbing_numbers,
    family,
    outer_factors,
    product_form,
    random_thematic,
    verify_identities,
)
from superopt.tolerances import circle_grid

from conftest import sup

seeds = st.integers(0, 2**32 - 1)


def _mat_close(A, B, zeta, tol=1e-9):
    a, b = A(zeta), B(zeta)
    return np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(b)))


# -- assembly ------------------------------------------------------------------------

def test_diagonal_example(zeta):
    Psi = assemble(diagonal_example(2.0, 1.0), 1.0)
    expected = RatMat([[RatFun.z(-1) * 2, RatFun.zero()], [RatFun.zero(), RatFun.z(-1)]])
    assert _mat_close(Psi, expected, zeta, 1e-14)


def test_diagonal_identities_are_exact():
    rep = verify_identities(diagonal_example(2.0, 1.0), 1.0)
    assert rep.passed and rep.worst[1] < 1e-14


@given(seeds, st.floats(0.05, 1.0))
def test_random_family_identities(seed, s):
    th = random_thematic(np.random.default_rng(seed))
    rep = verify_identities(th, s * th.t0)
    assert rep.passed, rep.worst


@given(seeds, st.floats(0.05, 1.0))
def test_symbolic_determinant_matches_scalar_product(seed, s):
    # second route for the determinant identity: RatMat algebra instead of grid values
    th = random_thematic(np.random.default_rng(seed))
    t = s * th.t0
    d = determinant(assemble(th, t))
    rhs = th.u0 * th.u1 * (th.t0 * t)
    zeta = circle_grid(256)
    assert sup(d(zeta) - rhs(zeta)) <= 1e-9 * th.t0 * t


@given(seeds)
def test_product_form_and_unit_outer_determinants(seed):
    th = random_thematic(np.random.default_rng(seed))
    zeta = circle_grid(256)
    assert _mat_close(product_form(th, th.t1), assemble(th, th.t1), zeta)
    W, V = outer_factors(th)
    assert sup(determinant(W)(zeta) - 1) < 1e-9
    assert sup(determinant(V)(zeta) - 1) < 1e-9


def test_corrupted_column_fails_identities():
    th = random_thematic(np.random.default_rng(7))
    bad = ThematicData(th.t0, th.t1, th.u0, th.u1, (th.v[0] * 1.2, th.v[1]), th.w)
    with pytest.raises(InvalidThematicData):
        bad.validate()
    rep = verify_identities(bad, bad.t1)
    assert not rep.passed and rep.worst[1] >= 1e-3


def test_non_unimodular_u0_rejected():
    th = diagonal_example()
    with pytest.raises(InvalidThematicData):
        ThematicData(2.0, 1.0, RatFun.z(-1) * 2, th.u1, th.v, th.w).validate()


# -- disturbing numbers ----------------------------------------------------------------

def test_no_disk_events_when_u1_has_no_disk_poles():
    th = diagonal_example()
    th = ThematicData(th.t0, th.t1, th.u0, RatFun.const(1.0), th.v, th.w)
    assert disturbing_numbers(th).side("disk") == []


@pytest.mark.parametrize("k", [2, 3, 4])
def test_single_parameter_instance_has_one_disk_event(k):
    th = build_kp(k, 2.0, 0.5).spec.thematic()
    rep = disturbing_numbers(th)
    disk = rep.side("disk")
    assert {round(e.s, 9) for e in disk} == {0.5}
    assert sum(e.drop for e in disk) == k - 1
    assert rep.side("exterior") == []


def test_multi_parameter_events_match_partition():
    ekp = build_ekp(3, 2.0, [0.4, 0.8], [1, 1])
    rep = disturbing_numbers(ekp.thematic)
    drops = {}
    for e in rep.side("disk"):
        drops[round(e.s, 9)] = drops.get(round(e.s, 9), 0) + e.drop
    assert drops == {0.4: 1, 0.8: 1}


# -- degree profiles and bounds -------------------------------------------------------

@pytest.mark.parametrize("k", [2, 3, 4])
def test_profile_at_disturbing_parameter(k):
    th = build_kp(k, 2.0, 0.5).spec.thematic()
    (row,) = degree_profile(th, [0.5])
    assert (row.deg_minus, row.deg_plus) == (k, 2 * k - 3)
    (gen,) = degree_profile(th, [0.3])
    assert gen.margin >= 2


@pytest.mark.parametrize("k", [2, 3])
def test_margin_at_top_parameter(k):
    th = build_kp(k, 2.0, 0.5).spec.thematic()
    (row,) = degree_profile(th, [1.0])
    assert row.margin >= 2


def test_diagonal_bounds_hold():
    v = check_bounds(diagonal_example(2.0, 1.0), n_scan=20)
    assert v.passed and v.deficit_sum == 0
    assert all(r.margin >= 2 for r in v.rows)


def test_sum_inequality_is_tight_for_full_partition():
    ekp = build_ekp(3, 2.0, [0.4, 0.8], [1, 1])
    v = check_bounds(ekp.thematic, n_scan=40)
    assert v.passed
    assert v.deficit_sum == v.deg_minus_u1 == 2
    assert {round(r.s, 9) for r in v.violations} == {0.4, 0.8}


def test_check_bounds_raises_on_corrupted_verdict(monkeypatch):
    import superopt.thematic as thematic_mod

    th = diagonal_example(2.0, 1.0)
    real = thematic_mod.degree_profile

    def lying_profile(th_, s_list):
        rows = real(th_, s_list)
        for r in rows:
            r.deg_plus = r.deg_minus   # margin 0 everywhere
        return rows

    monkeypatch.setattr(thematic_mod, "degree_profile", lying_profile)
    with pytest.raises(TheoremViolation):
        check_bounds(th, n_scan=10)
    v = check_bounds(th, n_scan=10, raise_on_failure=False)
    assert "margin_at_nondisturbing" in v.failed


@settings(max_examples=4)
@given(seeds)
def test_random_bounds_and_monotone_structure(seed):
    th = random_thematic(np.random.default_rng(seed))
    v = check_bounds(th, n_scan=30)
    disk_s = {e.s for e in v.report.side("disk")}
    ext_s = {e.s for e in v.report.side("exterior")}
    assert len({r.deg_minus for r in v.rows if r.s not in disk_s}) == 1
    assert len({r.deg_plus for r in v.rows if r.s not in ext_s}) == 1
    assert len(v.violations) <= degree_region(th.u1, "inside")
    assert len(v.report.side("exterior")) <= degree_region(th.u0, "outside")


@given(seeds, st.floats(0.05, 1.0))
def test_family_parameter_is_normalized(seed, s):
    th = random_thematic(np.random.default_rng(seed))
    zeta = circle_grid(64)
    assert _mat_close(family(th, s), assemble(th, s * th.t0), zeta, 1e-14)
