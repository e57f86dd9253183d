"""Superoptimal approximation of 2x2 rational matrix functions.

Stage one takes a top right Schmidt vector xi_s of the Hankel operator and the
matching left vector eta_s = H xi_s / t0.  Both have the same pointwise norm
|h| for one outer h; dividing by h and by the common inner factor of the
components gives the inner co-outer columns v and w, and

    u0 = h^# / (z h theta_v theta_w).

Stage two reduces to a scalar problem.  Any best approximant F satisfies
Phi - t0 u0 w^# v^* - F = rho xi theta^T, so the antianalytic part of rho is
fixed by matching principal parts at the disk poles, and t1 u1 is the scalar
best-approximation error of that part.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IdentityCase, NumericalFailure
from .hankel import aak_scalar, rank_degree, right_vector_rational, singular_system
from .ratfun import RatFun, _finish, _poly_from_roots, _poly_roots, blaschke, riesz_split
from .ratmat import (
    RatMat,
    contour_radius,
    laurent_on_circle,
    mcmillan_degree,
    pole_clusters,
    riesz_split_mat,
)
from .thematic import ThematicData, assemble, verify_identities
from .tolerances import GRID_SIZE, ROOT_CLUSTER, circle_grid

FLAT_TOL = 1e-7
ZERO_T1 = 1e-10   # t1 below ZERO_T1 * t0 is treated as zero
MATCH_RESIDUAL = 1e-6


# -- inner factors ---------------------------------------------------------------

def _disk_zero_list(f):
    return [a for a, m in f.zeros for _ in range(m) if abs(a) < 1]


def common_disk_zeros(f1, f2, tol=ROOT_CLUSTER):
    """Pairs (own1, own2, shared) of zeros common to both components in the disk."""
    if f1.is_zero and f2.is_zero:
        raise NumericalFailure("zero column has no inner-outer factorization")
    if f1.is_zero or f2.is_zero:
        other = f2 if f1.is_zero else f1
        return [(a, a, a) for a in _disk_zero_list(other)]
    z2 = _disk_zero_list(f2)
    used = [False] * len(z2)
    out = []
    for a in _disk_zero_list(f1):
        best, dist = None, None
        for j, b in enumerate(z2):
            if not used[j] and abs(a - b) <= tol * (1 + abs(a)):
                if dist is None or abs(a - b) < dist:
                    best, dist = j, abs(a - b)
        if best is not None:
            used[best] = True
            out.append((a, z2[best], (a + z2[best]) / 2))
    return out


def divide_blaschke_factor(f, own, shared):
    """f / b_shared where f has a zero at ``own`` close to ``shared``.

    The zero is removed from f's list directly, so near-coincident locations
    cannot leave a spurious pole-zero pair behind.
    """
    if f.is_zero:
        return f
    zeros = [[a, m] for a, m in f.zeros]
    k = min(range(len(zeros)), key=lambda i: abs(zeros[i][0] - own))
    zeros[k][1] -= 1
    zeros = [(a, m) for a, m in zeros if m > 0]
    gain = f.gain
    if abs(shared) < 1e-14:
        gain = -gain
    else:
        gain = gain * np.conj(shared)
        zeros.append((1 / np.conj(shared), 1))
    return RatFun(gain, zeros, f.poles)


def strip_inner(col):
    """(column with the common inner factor removed, list of its zeros)."""
    pairs = common_disk_zeros(*col)
    f1, f2 = col
    for o1, o2, s in pairs:
        f1 = divide_blaschke_factor(f1, o1, s)
        f2 = divide_blaschke_factor(f2, o2, s)
    return (f1, f2), [s for _, _, s in pairs]


def _column_numerators(col):
    """(p_i ascending, denominator poles) with col_i = p_i / prod (z - b)^m.

    The numerators come from an FFT of col_i * D on the circle, so no root
    finding is involved.
    """
    poles = []
    for f in col:
        for b, m in f.poles:
            for item in poles:
                if abs(item[0] - b) <= ROOT_CLUSTER * (1 + abs(b)):
                    item[1] = max(item[1], m)
                    break
            else:
                poles.append([b, m])
    if any(abs(b) <= 1 for b, _ in poles):
        raise NumericalFailure("column has poles in the closed disk")
    D = _poly_from_roots(poles)[::-1]
    deg = len(D) - 1 + max(0, max(-f.order_at_inf for f in col if not f.is_zero))
    n = 1 << int(np.ceil(np.log2(2 * deg + 16)))
    zeta = np.exp(2j * np.pi * np.arange(n) / n)
    Dv = np.polyval(D[::-1], zeta)
    nums = [np.fft.fft(f(zeta) * Dv) / n if not f.is_zero else np.zeros(n, complex)
            for f in col]
    ref = max(float(np.abs(p).max()) for p in nums)
    tail = max(float(np.abs(p[deg + 1:]).max()) for p in nums)
    if tail > 1e-9 * ref:
        raise NumericalFailure(f"column numerators are not polynomial (tail {tail:.2e})")
    return [p[:deg + 1] for p in nums], [tuple(x) for x in poles], ref


def inner_outer_column(col):
    """col = theta * h * v with theta inner, h outer, v inner co-outer.

    |col|^2 = P / |D|^2 with P a Laurent polynomial; the roots of z^n P come
    in reflected pairs and the exterior half is the numerator of h.
    """
    if all(f.is_zero for f in col):
        raise NumericalFailure("zero column has no inner-outer factorization")
    nums, poles, ref = _column_numerators(col)
    floor = 1e-13 * ref
    # common zeros at the origin belong to the inner factor
    low = min(int(np.argmax(np.abs(p) > floor)) for p in nums if np.abs(p).max() > floor)
    nums = [p[low:] for p in nums]
    n = max(int(np.nonzero(np.abs(p) > floor)[0].max()) for p in nums if np.abs(p).max() > floor)
    nums = [np.pad(p, (0, max(0, n + 1 - len(p))))[:n + 1] for p in nums]
    P = sum(np.convolve(p, np.conj(p[::-1])) for p in nums)    # z^n P, ascending
    top = 0
    while top < n and abs(P[-1 - top]) <= 1e-13 * np.abs(P).max():
        top += 1
    P = P[top:len(P) - top]
    roots = np.roots(P[::-1]) if len(P) > 1 else np.zeros(0)
    roots = sorted(roots, key=abs, reverse=True)[:(len(P) - 1) // 2]
    if any(abs(r) <= 1 for r in roots):
        raise NumericalFailure("squared modulus of the column vanishes on the circle")
    outer = [(complex(r), 1) for r in roots]
    q = _poly_from_roots(outer)                                 # descending, monic
    zeta = circle_grid(GRID_SIZE)
    num_sq = sum(np.abs(np.polyval(p[::-1], zeta)) ** 2 for p in nums)
    c = float(np.sqrt(np.mean(num_sq / np.abs(np.polyval(q, zeta)) ** 2)))
    h = RatFun(c, outer, poles)
    h = h.scale_gain(abs(h(0.0)) / h(0.0))
    c_h = h.gain
    sign = (-1) ** low   # blaschke([0]) = -z
    v = []
    for p in nums:
        if np.abs(p).max() <= floor:
            v.append(RatFun.zero())
            continue
        pd = np.trim_zeros(p[::-1], "f")
        while len(pd) > 1 and abs(pd[0]) <= floor:
            pd = pd[1:]
        v.append(RatFun(sign * pd[0] / c_h, _poly_roots(pd), outer, cancel_tol=ROOT_CLUSTER))
    v, zeros = strip_inner(tuple(v))
    zeros = [0j] * low + zeros
    norm = sum(np.abs(f(zeta)) ** 2 for f in v if not f.is_zero)
    if np.abs(norm - 1).max() > 1e-8:
        raise NumericalFailure(f"column is not unit-norm after factoring ({np.abs(norm - 1).max():.2e})")
    return v, h, zeros


# -- the two stages ----------------------------------------------------------------

def _matvec(A, col):
    return [sum((A[i, j] * col[j] for j in range(2) if not col[j].is_zero), RatFun.zero())
            for i in range(2)]


def _rank_one(c, left, right):
    return RatMat([[left[i] * right[j] * c for j in range(2)] for i in range(2)])


def second_corner(phi, first, xi, theta, nodes=256):
    """Antianalytic part of rho with phi - first - rho xi theta^T analytic."""
    X = RatMat([[xi[i] * theta[j] for j in range(2)] for i in range(2)])
    G0 = phi - first
    clusters = list(pole_clusters(G0))
    x_poles = [q for d in pole_clusters(X) for q in d.members]
    disk = [c for c in clusters if abs(c.center) < 1]
    rho = RatFun.zero()
    worst = 0.0
    for c in disk:
        # the contour must also avoid the (exterior) poles of xi theta^T
        others = [q for d in clusters if d is not c for q in d.members] + x_poles
        spread = max(abs(q - c.center) for q in c.members)
        r = contour_radius(c.center, others, spread)
        m = c.order
        G, vals = laurent_on_circle(G0, c.center, r,
                                    [-j for j in range(1, m + 1)], nodes)
        T, _ = laurent_on_circle(X, c.center, r, list(range(m)), nodes)
        M = np.zeros((4 * m, m), dtype=complex)
        rhs = np.zeros(4 * m, dtype=complex)
        for j in range(1, m + 1):
            rhs[4 * (j - 1):4 * j] = G[j - 1].ravel()
            for i in range(j, m + 1):
                M[4 * (j - 1):4 * j, i - 1] = T[i - j].ravel()
        sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
        ref = max(np.abs(rhs).max(), np.abs(vals).max(), 1e-300)
        worst = max(worst, float(np.abs(M @ sol - rhs).max() / ref))
        coeffs = sol * r ** np.arange(1, m + 1)
        if np.abs(coeffs).max() <= 1e-13 * max(1.0, np.abs(vals).max() * r):
            continue
        num = np.zeros(1, dtype=complex)
        for i in range(1, m + 1):
            num = np.polyadd(num, coeffs[i - 1] * _poly_from_roots([(c.center, m - i)]))
        rho = rho + _finish(num, [(c.center, m)], float(np.abs(coeffs).max()))
    if worst > MATCH_RESIDUAL:
        raise NumericalFailure(f"principal parts are not of the form rho xi theta^T "
                               f"(relative residual {worst:.2e})")
    return rho, worst


@dataclass
class SuperoptResult:
    approximant: RatMat
    t0: float
    t1: float
    factorization: ThematicData
    psi: RatMat
    certificates: dict = field(default_factory=dict)

    @property
    def passed(self):
        c = self.certificates
        return (c["s0_flatness"] <= FLAT_TOL and c["s1_flatness"] <= FLAT_TOL
                and c["residual"] <= FLAT_TOL and c["identities_pass"])


def singular_values_on_grid(A, n=GRID_SIZE):
    vals = A(circle_grid(n)) if isinstance(A, RatMat) else A
    return np.linalg.svd(vals, compute_uv=False)


def superoptimal(phi, grid=GRID_SIZE):
    """Superoptimal approximant, t0, t1 and a thematic factorization of phi - approximant."""
    if phi.shape != (2, 2):
        raise ValueError("superoptimal is implemented for 2x2 symbols")
    minus, plus = riesz_split_mat(phi)
    if minus.is_zero():
        raise IdentityCase(phi)

    system = singular_system(minus)
    t0 = float(system.values[0])
    degenerate = len(system.values) > 1 and system.values[1] > t0 * (1 - 1e-8)
    xs = right_vector_rational(system, 0)
    eta = [riesz_split(f)[0] * (1 / t0) for f in _matvec(minus, xs)]
    omega = [f.sharp() * RatFun.z(-1) for f in eta]

    v, h, zv = inner_outer_column(xs)
    w_h = tuple(f / h for f in omega)
    w, zw = strip_inner(w_h)
    theta_v, theta_w = blaschke(zv), blaschke(zw)
    u0 = h.sharp() / (h * theta_v * theta_w * RatFun.z(1))

    xi = (-w[1], w[0])
    theta = (-v[1], v[0])
    first = _rank_one(u0 * t0, [f.sharp() for f in w], [f.sharp() for f in v])
    rho, match_residual = second_corner(minus, first, xi, theta)

    if rho.is_zero:
        t1, u1 = 0.0, RatFun.z(-1)
    else:
        res = aak_scalar(rho)
        t1 = res.sigma0
        if t1 <= ZERO_T1 * t0:
            t1, u1 = 0.0, RatFun.z(-1)
        else:
            u1 = res.error * (1 / t1)

    th = ThematicData(t0, t1, u0, u1, v, w)
    psi = assemble(th, t1, check=False)
    psi_minus, psi_plus = riesz_split_mat(psi)
    approx = plus - psi_plus

    zeta = circle_grid(grid)
    E = phi(zeta) - approx(zeta)
    s = np.linalg.svd(E, compute_uv=False)
    ident = verify_identities(th, t1, grid)
    certificates = {
        "s0_flatness": float(np.abs(s[:, 0] - t0).max() / t0),
        "s1_flatness": float(np.abs(s[:, 1] - t1).max() / t0),
        "residual": float(np.abs(E - psi(zeta)).max() / t0),
        "antianalytic_match": float(np.abs(minus(zeta) - psi_minus(zeta)).max() / t0),
        "principal_match": match_residual,
        "identities_pass": ident.passed,
        "identity_worst": ident.worst[1],
        "thematic_problems": list(th.problems),
        "degenerate_top": bool(degenerate),
        "t0_multiplicity": int(np.sum(system.values > t0 * (1 - 1e-6))),
    }
    return SuperoptResult(approx, t0, t1, th, psi, certificates)


# -- certificates and reports ---------------------------------------------------------

@dataclass
class VeryBadCertificate:
    passed: bool
    s0_spread: float
    s1_spread: float
    approximant_sup: float
    detail: str = ""


def verify_very_bad(psi, grid=GRID_SIZE, tol=FLAT_TOL):
    s = singular_values_on_grid(psi, grid)
    scale = max(float(s[:, 0].max()), 1e-300)
    s0 = float(np.ptp(s[:, 0]) / scale)
    s1 = float(np.ptp(s[:, 1]) / scale)
    try:
        res = superoptimal(psi, grid)
    except IdentityCase:
        return VeryBadCertificate(False, s0, s1, np.inf, "symbol is analytic")
    sup = float(np.abs(res.approximant(circle_grid(grid))).max() / scale)
    ok = s0 <= tol and s1 <= tol and sup <= tol
    detail = "" if ok else "singular values not flat" if max(s0, s1) > tol else "nonzero approximant"
    return VeryBadCertificate(ok, s0, s1, sup, detail)


def degree_pair(A):
    """Total McMillan degree from local degrees and from Hankel ranks."""
    local = mcmillan_degree(A, "all")
    hank = rank_degree(A, "all")
    if local != hank:
        raise NumericalFailure(f"degree oracles disagree: {local} vs {hank}")
    return local


@dataclass
class DegreeReport:
    deg_phi: int
    deg_approx: int
    t1: float
    bound: int
    holds: bool
    branch: str


def superopt_degree_report(phi):
    deg_phi = degree_pair(phi)
    try:
        res = superoptimal(phi)
    except IdentityCase:
        return DegreeReport(deg_phi, deg_phi, 0.0, deg_phi, True, "analytic symbol")
    deg_a = degree_pair(res.approximant)
    if res.t1 != 0:
        bound, branch = 2 * deg_phi - 3, "t1 nonzero"
    else:
        bound, branch = deg_phi - 1, "t1 zero"
    return DegreeReport(deg_phi, deg_a, res.t1, bound, deg_a <= bound, branch)
