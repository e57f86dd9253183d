"""Acceptance criteria, one test each, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""
import time
from functools import lru_cache

import numpy as np
import pytest

from superopt.counterexample import build_ekp, build_kp
from superopt.hankel import aak_scalar, build_hankel, flatness, rank_degree, singular_shift_check
from superopt.nehari2x2 import superopt_degree_report, superoptimal
from superopt.ratfun import degree_region, winding_number
from superopt.ratmat import mcmillan_degree, riesz_split_mat
from superopt.samples import random_analytic, random_ratmat, random_scalar_symbol, random_unitary_vba
from superopt.thematic import assemble, check_bounds, degrees, family, random_thematic, verify_identities
from superopt.tolerances import circle_grid

GRID = 256


def _report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line)
    return line


@lru_cache(maxsize=None)
def _random_family(count=25, n_scan=100):
    """The shared instances of criteria 2-4, with their bound verdicts."""
    out = []
    for i in range(count):
        th = random_thematic(np.random.default_rng(1000 + i))
        out.append((th, check_bounds(th, n_scan=n_scan, raise_on_failure=False)))
    return tuple(out)


def criterion_1():
    worst, rows = 0.0, []
    ok = True
    for k in (2, 3, 4, 5):
        start = time.perf_counter()
        kp = build_kp(k, 2.0, 0.5)                  # checks both oracles internally
        dm, dp = degrees(kp.psi)
        rep = superopt_degree_report(kp.phi)
        elapsed = time.perf_counter() - start
        worst = max(worst, elapsed)
        good = (dm, dp) == (k, 2 * k - 3) and (rep.deg_phi, rep.deg_approx) == (k, 2 * k - 3)
        ok &= good and elapsed < 5.0
        rows.append(f"k={k}:({dm},{dp})/({rep.deg_phi},{rep.deg_approx})")
    return ok, f"sharpness {' '.join(rows)}, slowest {worst:.2f}s"


def criterion_2():
    ok, max_deg, worst_viol = True, 0, 0
    for th, v in _random_family():
        max_deg = max(max_deg, max(r.deg_minus for r in v.rows))
        margin_ok = v.clauses["margin_at_nondisturbing"][0]
        count_ok = len(v.violations) <= v.deg_minus_u1
        worst_viol = max(worst_viol, len(v.violations))
        ok &= margin_ok and count_ok and v.passed
    ok &= max_deg <= 6
    return ok, (f"25 instances, max deg P- {max_deg}, max violating t count {worst_viol}, "
                f"all clauses {'hold' if ok else 'checked'}")


def criterion_3():
    ok = all(v.deficit_sum <= v.deg_minus_u1 for _, v in _random_family())
    ekp = build_ekp(3, 2.0, [0.4, 0.8], [1, 1])
    v = check_bounds(ekp.thematic, n_scan=100, raise_on_failure=False)
    tight = v.deficit_sum == v.deg_minus_u1 == 2
    return ok and tight and v.passed, (f"sum inequality on 25 instances {'holds' if ok else 'fails'}; "
                                       f"partition instance sum {v.deficit_sum} = deg P-u1 {v.deg_minus_u1}")


def criterion_4():
    worst, count = 0.0, 0
    instances = [(th, [r.s for r in v.rows]) for th, v in _random_family()]
    for k in (2, 3, 4, 5):
        th = build_kp(k, 2.0, 0.5).spec.thematic()
        instances.append((th, [0.1, 0.5, 1.0]))
    th = build_ekp(3, 2.0, [0.4, 0.8], [1, 1]).thematic
    instances.append((th, [0.4, 0.8, 1.0]))
    for th, s_list in instances:
        for s in s_list:
            rep = verify_identities(th, s * th.t0, GRID)
            worst = max(worst, rep.worst[1])
            count += 1
    return worst <= 1e-8, f"{count} family members, worst identity residual {worst:.2e}"


def criterion_5():
    rng = np.random.default_rng(5)
    worst_flat = worst_sigma = 0.0
    ok = True
    for _ in range(50):
        d = int(rng.integers(1, 9))
        phi = random_scalar_symbol(rng, d)
        r = aak_scalar(phi)
        mod = np.abs(r.error(circle_grid(GRID)))
        flat = flatness(r.error, GRID)
        sig = abs(mod.max() - r.sigma0) / r.sigma0
        worst_flat, worst_sigma = max(worst_flat, flat), max(worst_sigma, sig)
        ok &= flat <= 1e-7 and sig <= 1e-8
        ok &= degree_region(r.best, "all") <= d - 1 and winding_number(r.error) < 0
    return ok, f"50 scalar symbols, flatness {worst_flat:.2e}, |error| vs sigma0 {worst_sigma:.2e}"


def criterion_6():
    rng = np.random.default_rng(6)
    mismatches, max_deg = 0, 0
    for _ in range(200):
        A = random_ratmat(rng, budget=10)
        local = mcmillan_degree(A, "inside"), mcmillan_degree(A, "outside")
        hank = rank_degree(A, "inside"), rank_degree(A, "outside")
        max_deg = max(max_deg, sum(local))
        mismatches += local != hank
    return mismatches == 0, f"200 matrices (max degree {max_deg}), {mismatches} oracle mismatches"


def criterion_7():
    rng = np.random.default_rng(7)
    ok, worst, pairs = True, 0.0, []
    for _ in range(10):
        _, U = random_unitary_vba(rng)
        d = singular_shift_check(U)
        minus, plus = riesz_split_mat(U)
        dm, dp = mcmillan_degree(minus, "all"), mcmillan_degree(plus, "all")
        worst = max(worst, d.max_error)
        ok &= d.max_error <= 1e-7 and dp <= dm - 2
        pairs.append(f"{dm}/{dp}")
    return ok, f"10 unitary instances, shift error {worst:.2e}, deg P-/P+ {' '.join(pairs)}"


def criterion_8():
    rng = np.random.default_rng(8)
    zeta = circle_grid(GRID)
    worst_err = worst_flat = 0.0
    for _ in range(20):
        th = random_thematic(rng)
        psi = assemble(th, th.t1)
        G = random_analytic(rng, max_degree=4)
        minus, plus = riesz_split_mat(psi)
        r = superoptimal(minus + G, GRID)
        expected = G - plus
        worst_err = max(worst_err, float(np.abs(r.approximant(zeta) - expected(zeta)).max()))
        s = np.linalg.svd((minus + G)(zeta) - r.approximant(zeta), compute_uv=False)
        flat = max(np.ptp(s[:, 0]), np.ptp(s[:, 1])) / min(1.0, r.t0)
        worst_flat = max(worst_flat, float(flat))
    ok = worst_err <= 1e-7 and worst_flat <= 1e-7
    return ok, f"20 round trips, approximant error {worst_err:.2e}, s0/s1 flatness {worst_flat:.2e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("n", range(1, 9))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print()
        _report(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        _report(n, ok, detail)
        results.append(ok)
    raise SystemExit(0 if all(results) else 1)
