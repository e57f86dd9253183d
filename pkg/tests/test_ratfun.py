import numpy as np
import pytest
from hypothesis import given, strategies as st

from superopt.errors import (
    InvalidBlaschkeZero,
    InvalidFunction,
    NotPositive,
    OnCircleSingularity,
    PoleEvaluation,
    PoleOnCircle,
)
from superopt.ratfun import (
    INF,
    RatFun,
    blaschke,
    combine,
    degree_at,
    degree_region,
    evaluate,
    is_badly_approximable,
    make_ratfun,
    reflect_sharp,
    riesz_split,
    spectral_factor,
    winding_number,
)
from superopt.samples import disk_point, random_ratfun
from superopt.tolerances import circle_grid

from conftest import sup

seeds = st.integers(0, 2**32 - 1)


def _random(seed, max_degree=8):
    rng = np.random.default_rng(seed)
    n_in = int(rng.integers(0, 4))
    n_out = int(rng.integers(0, 3))
    poly = int(rng.integers(-1, max(0, max_degree - n_in - n_out) + 1))
    return random_ratfun(rng, n_in, n_out, poly_degree=min(poly, 2))


def _same(f, g, zeta, tol=1e-10):
    a, b = f(zeta), g(zeta)
    return sup(a - b) <= tol * max(1.0, sup(b))


# -- construction ------------------------------------------------------------------

def test_linear_polynomial_has_pole_at_infinity():
    f = make_ratfun(([-0.3, 1.0], [1.0]))
    assert f.gain == 1
    assert f.zeros == ((0.3 + 0j, 1),)
    assert f.poles == ()
    assert degree_at(f, INF) == 1


def test_reciprocal_has_pole_at_origin_and_zero_at_infinity():
    f = make_ratfun(([1.0], [0.0, 1.0]))
    assert f.poles == ((0j, 1),)
    assert f.order_at_inf == 1


def test_common_root_cancels(zeta):
    num = np.convolve([-0.5, 1.0], [-2.0, 1.0])   # ascending (z - 0.5)(z - 2)
    f = make_ratfun((num, [-0.5, 1.0]))
    assert f.poles == ()
    assert len(f.zeros) == 1 and abs(f.zeros[0][0] - 2) < 1e-12
    assert _same(f, RatFun(1.0, [(2.0, 1)]), zeta)


def test_zero_over_zero_rejected():
    with pytest.raises(InvalidFunction):
        make_ratfun(([0.0], [0.0]))


def test_factored_triple_matches_coefficient_form():
    f = make_ratfun((2.0, [(0.5, 2)], [(-0.25, 1)]))
    num, den = f.coeffs()
    z = 0.3 + 0.4j
    assert abs(np.polyval(num[::-1], z) / np.polyval(den[::-1], z) - f(z)) < 1e-12


@given(seeds)
def test_factored_and_expanded_evaluation_agree(seed):
    f = _random(seed)
    if f.is_zero:
        return
    zeta = np.exp(2j * np.pi * np.random.default_rng(seed).uniform(size=64))
    num, den = f.coeffs()
    expanded = np.polyval(num[::-1], zeta) / np.polyval(den[::-1], zeta)
    assert sup(expanded - f(zeta)) <= 1e-10 * sup(f(zeta))


# -- evaluation --------------------------------------------------------------------

def test_evaluation_examples():
    assert evaluate(RatFun.z(-1), 2.0) == pytest.approx(0.5)
    b = blaschke([0.5])
    assert evaluate(b, 1.0) == pytest.approx(-1.0)
    assert evaluate(RatFun.const(3.0), 0.123 + 4j) == 3


def test_evaluation_at_pole_raises():
    with pytest.raises(PoleEvaluation):
        RatFun(1.0, [], [(0.5, 1)])(0.5)


# -- arithmetic --------------------------------------------------------------------

def test_reciprocal_times_z_is_one():
    f = combine(RatFun.z(-1), RatFun.z(1), "mul")
    assert f.is_constant() and f(0.7) == pytest.approx(1.0)


def test_sum_over_common_denominator(zeta):
    f = combine(RatFun(1.0, [], [(0.5, 1)]), RatFun(1.0, [], [(2.0, 1)]), "add")
    expected = RatFun(2.0, [(1.25, 1)], [(0.5, 1), (2.0, 1)])
    assert _same(f, expected, zeta)
    assert sorted(abs(b) for b, _ in f.poles) == pytest.approx([0.5, 2.0])


def test_blaschke_times_reflection_is_one():
    b = blaschke([0.5])
    one = combine(b, reflect_sharp(b), "mul")
    assert one.is_constant() and one(0.1) == pytest.approx(1.0)


def test_subtraction_to_zero():
    f = RatFun(2.0, [(0.1, 1)], [(0.4, 2)])
    assert (f - f).is_zero


# -- reflections -------------------------------------------------------------------

def test_sharp_examples(zeta):
    assert _same(reflect_sharp(RatFun.z(1)), RatFun.z(-1), zeta)
    assert reflect_sharp(RatFun.const(2 + 3j))(0.2) == pytest.approx(2 - 3j)
    b = blaschke([0.3 + 0.2j, -0.5])
    assert _same(reflect_sharp(b), 1 / b, zeta)


@given(seeds)
def test_sharp_is_conjugation_on_circle_and_involution(seed):
    f = _random(seed)
    zeta = circle_grid(64)
    assert sup(reflect_sharp(f)(zeta) - np.conj(f(zeta))) <= 1e-10 * max(1.0, sup(f(zeta)))
    assert sup(f.sharp().sharp()(zeta) - f(zeta)) <= 1e-10 * max(1.0, sup(f(zeta)))


@given(seeds)
def test_unimodular_times_reflection_is_one(seed):
    rng = np.random.default_rng(seed)
    u = blaschke([disk_point(rng) for _ in range(3)]) / blaschke([disk_point(rng)])
    assert sup((u * u.sharp())(circle_grid(64)) - 1) < 1e-10


@given(seeds)
def test_degree_is_reflection_invariant(seed):
    f = _random(seed)
    assert degree_region(f, "all") == degree_region(f.sharp(), "all")


# -- Riesz projections -------------------------------------------------------------

def test_riesz_examples(zeta):
    f = RatFun(1.0, [], [(0.3, 1)])
    m, p = riesz_split(f)
    assert _same(m, f, zeta) and p.is_zero
    g = RatFun(1.0, [], [(2.0, 1)])
    m, p = riesz_split(g)
    assert m.is_zero and _same(p, g, zeta)
    h = RatFun.z(1) + RatFun.z(-1)
    m, p = riesz_split(h)
    assert _same(m, RatFun.z(-1), zeta) and _same(p, RatFun.z(1), zeta)


def test_riesz_rejects_circle_pole():
    with pytest.raises(PoleOnCircle):
        riesz_split(RatFun(1.0, [], [(1.0, 1)]))


@given(seeds)
def test_riesz_round_trip(seed):
    f = _random(seed)
    zeta = circle_grid(256)
    m, p = riesz_split(f)
    assert sup(m(zeta) + p(zeta) - f(zeta)) <= 1e-9 * max(1.0, sup(f(zeta)))
    assert all(abs(b) < 1 for b, _ in m.poles)
    assert all(abs(b) > 1 for b, _ in p.poles)
    if not m.is_zero:
        assert m.order_at_inf >= 1


def test_fourier_split_matches_fft(rng):
    f = random_ratfun(rng, 2, 2, poly_degree=1)
    n = 512
    zeta = np.exp(2j * np.pi * np.arange(n) / n)
    c = np.fft.fft(f(zeta)) / n
    m, _ = riesz_split(f)
    cm = np.fft.fft(m(zeta)) / n
    assert sup(cm[: n // 2]) < 1e-12
    assert sup(cm[n // 2:] - c[n // 2:]) < 1e-10


# -- degrees and winding -----------------------------------------------------------

def test_degree_examples():
    assert degree_at(RatFun(1.0, [], [(0.3, 2)]), 0.3) == 2
    assert degree_at(RatFun.z(2), INF) == 2
    assert degree_region(blaschke([0.1, 0.2j, -0.5]), "inside") == 0


def test_winding_examples():
    assert winding_number(RatFun.z(1)) == 1
    assert winding_number(RatFun.z(-1)) == -1
    assert winding_number(blaschke([0.2, -0.4j, 0.7])) == 3
    assert winding_number(blaschke([0.0, 0.5])) == 2


def test_winding_of_mobius_map_by_two_routes():
    # (1 - 2z)/(z - 2) = (z - 1/2)/(1 - z/2): one zero inside, no pole inside
    f = make_ratfun(([1.0, -2.0], [-2.0, 1.0]))
    count = sum(m for a, m in f.zeros if abs(a) < 1) - sum(m for b, m in f.poles if abs(b) < 1)
    vals = f(circle_grid(1024))
    increment = np.angle(np.roll(vals, -1) / vals).sum() / (2 * np.pi)
    assert count == round(increment) == winding_number(f) == 1


def test_winding_rejects_circle_zero():
    with pytest.raises(OnCircleSingularity):
        winding_number(RatFun(1.0, [(1j, 1)]))


@given(seeds, seeds)
def test_winding_is_additive(s1, s2):
    f, g = _random(s1), _random(s2)
    if f.is_zero or g.is_zero:
        return
    try:
        wf, wg = winding_number(f), winding_number(g)
    except OnCircleSingularity:
        return
    assert winding_number(f * g) == wf + wg


# -- bad approximability -----------------------------------------------------------

def test_badly_approximable_examples():
    assert is_badly_approximable(RatFun.z(-1))
    assert not is_badly_approximable(RatFun.z(1))
    f = blaschke([0.3, -0.6j]).sharp() * 2.5
    cert = is_badly_approximable(f)
    assert cert and (cert.deg_plus, cert.deg_minus) == (0, 2)
    assert cert.modulus == pytest.approx(2.5)


# -- Blaschke products -------------------------------------------------------------

def test_blaschke_examples(zeta):
    b = blaschke([0.5])
    assert _same(b, RatFun.from_coeffs([0.5, -1.0], [1.0, -0.5]), zeta)
    assert blaschke([], 1j)(0.3) == pytest.approx(1j)
    assert sup(np.abs(blaschke([0.5, 0.9j, -0.2])(zeta)) - 1) < 1e-10


def test_blaschke_rejects_exterior_zero():
    with pytest.raises(InvalidBlaschkeZero):
        blaschke([1.5])


# -- spectral factors --------------------------------------------------------------

def test_spectral_factor_examples(zeta):
    h = spectral_factor(RatFun.const(4.0))
    assert h(0) == pytest.approx(2.0)
    s = RatFun(1.0, [(0.5, 1)]) * (RatFun.z(-1) - 0.5)
    h = spectral_factor(s)
    assert _same(h, RatFun.from_coeffs([1.0, -0.5]), zeta)
    b = blaschke([0.3, 0.4j])
    assert spectral_factor(b * b.sharp())(0.2) == pytest.approx(1.0)


def test_spectral_factor_rejects_sign_change():
    s = RatFun.z(1) + RatFun.z(-1)   # 2 cos(theta)
    with pytest.raises(NotPositive):
        spectral_factor(s)


@given(seeds)
def test_spectral_factor_is_outer_with_correct_modulus(seed):
    rng = np.random.default_rng(seed)
    p = RatFun.from_coeffs(list(rng.standard_normal(3) + 1j * rng.standard_normal(3)))
    q = RatFun(1.0, [], [(2 * disk_point(rng) / abs(disk_point(rng)) + 0.1, 1)])
    g = p * q if all(abs(abs(a) - 1) > 1e-3 for a, _ in p.zeros) else q
    s = g * g.sharp()
    h = spectral_factor(s)
    zeta = circle_grid(256)
    assert sup(np.abs(h(zeta)) ** 2 - s(zeta).real) <= 1e-9 * sup(s(zeta))
    assert all(abs(a) > 1 for a, _ in h.zeros) and all(abs(b) > 1 for b, _ in h.poles)
    assert h(0).real > 0 and abs(h(0).imag) < 1e-12 * abs(h(0))


def test_cancellation_of_far_exterior_poles(zeta):
    # determinant-style difference in which double poles far outside cancel exactly
    rng = np.random.default_rng(3)
    u = RatFun(1.0, [(2 * np.exp(2j * np.pi * rng.uniform()), 1) for _ in range(8)])
    far = RatFun(1.0, [], [(-4.2 + 12.8j, 2), (9.0, 2)])
    small = RatFun(1.0, [], [(0.2, 1)])
    diff = (u * far + small) - u * far
    assert all(abs(b) < 1 for b, _ in diff.poles)
    assert _same(diff, small, zeta, 1e-9)
