"""Random rational test data with poles kept away from the circle."""
from __future__ import annotations

import numpy as np

from .ratfun import RatFun
from .ratmat import RatMat
from .thematic import assemble, random_thematic


def disk_point(rng, lo=0.05, hi=0.85):
    r = rng.uniform(lo, hi)
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


def exterior_point(rng, lo=1.25, hi=3.0):
    r = rng.uniform(lo, hi)
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


def _cnormal(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def separated(p, points, gap):
    """True when p is at least ``gap`` from every point, in z and in 1/z."""
    for q in points:
        if abs(p - q) <= gap or abs(1 / p - 1 / q) <= gap:
            return False
    return True


def random_ratfun(rng, n_inside=2, n_outside=1, poly_degree=0, min_gap=0.1):
    """Sum of simple fractions at distinct random poles plus a polynomial.

    Poles are pairwise at least ``min_gap`` apart, so the function has exactly
    the requested disk and exterior degrees.
    """
    poles = []
    while len(poles) < n_inside + n_outside:
        p = disk_point(rng) if len(poles) < n_inside else exterior_point(rng)
        if separated(p, poles, min_gap):
            poles.append(p)
    f = RatFun.zero()
    for p in poles:
        f = f + RatFun(complex(rng.standard_normal(), rng.standard_normal()), [], [(p, 1)])
    if poly_degree >= 0:
        f = f + RatFun.from_coeffs(list(_cnormal(rng, poly_degree + 1)))
    return f


def random_scalar_symbol(rng, degree):
    """Scalar function of total degree ``degree`` with at least one disk pole."""
    n_in = int(rng.integers(1, degree + 1))
    n_out = int(rng.integers(0, degree - n_in + 1))
    return random_ratfun(rng, n_in, n_out, poly_degree=degree - n_in - n_out)


def random_ratmat(rng, shape=(2, 2), budget=10, min_gap=0.15):
    """Matrix function with degree at most ``budget``.

    Built as a sum of principal parts C/(z - p) and C1/(z - p) + C2/(z - p)^2
    with random low-rank coefficients, at disk and exterior poles.  Poles are
    kept ``min_gap`` apart in z and in 1/z; closer poles push genuine Hankel
    singular values below the rank threshold.
    """
    m, n = shape
    A = RatMat([[RatFun.zero()] * n for _ in range(m)])
    used, points = 0, []
    while used < budget:
        inside = rng.uniform() < 0.6
        p = disk_point(rng) if inside else exterior_point(rng)
        if not separated(p, points, min_gap):
            continue
        points.append(p)
        rank = int(rng.integers(1, min(m, n) + 1))
        order = 2 if rng.uniform() < 0.3 else 1
        Cs = [_cnormal(rng, m, rank) @ _cnormal(rng, rank, n) for _ in range(order)]
        if order == 1:
            cost = rank
        else:
            H = np.block([[Cs[0], Cs[1]], [Cs[1], np.zeros((m, n))]])
            cost = int(np.linalg.matrix_rank(H))
        if used + cost > budget:
            Cs = [_cnormal(rng, m, 1) @ _cnormal(rng, 1, n)]
            cost = 1
        for j, C in enumerate(Cs, start=1):
            term = RatMat([[RatFun(C[i, k], [], [(p, j)]) for k in range(n)] for i in range(m)])
            A = A + term
        used += cost
        if rng.uniform() < 0.25:
            break
    return A


def random_analytic(rng, shape=(2, 2), max_degree=4):
    """Matrix function analytic in the closed disk with degree at most ``max_degree``."""
    m, n = shape
    d = int(rng.integers(0, max_degree + 1))
    poles = []
    while len(poles) < d:
        p = exterior_point(rng)
        if all(abs(p - q) > 0.05 for q in poles):
            poles.append(p)
    A = RatMat.const(_cnormal(rng, m, n))
    for p in poles:
        C = _cnormal(rng, m, 1) @ _cnormal(rng, 1, n)
        A = A + RatMat([[RatFun(C[i, k], [], [(p, 1)]) for k in range(n)] for i in range(m)])
    return A


def random_unitary_vba(rng, max_poles=2):
    """Unitary-valued very badly approximable 2x2 function (t0 = t1 = 1)."""
    th = random_thematic(rng, max_poles=max_poles, t0=1.0, t1=1.0)
    return th, assemble(th, 1.0)

