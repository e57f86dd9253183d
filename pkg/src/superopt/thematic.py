"""Thematic data and the one-parameter family it generates.

Given unimodular badly approximable scalars u0, u1 and inner co-outer columns
v, w, the family is

    Psi[t] = t0 * u0 * w^# v^*  +  t * u1 * xi theta^T,

with xi = (-w2, w1) and theta = (-v2, v1).  The normalized parameter
s = t / t0 runs over (0, 1]; ``family(data, s)`` uses it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import eig

from .errors import InvalidThematicData, NumericalFailure, TheoremViolation
from .hankel import rank_degree
from .ratfun import (
    INF,
    RatFun,
    blaschke,
    degree_region,
    is_badly_approximable,
    spectral_factor,
)
from .ratmat import (
    J,
    RatMat,
    block_hankel,
    local_degree,
    mcmillan_degree,
    numerical_rank,
    principal_data,
)
from .tolerances import EPS_CIRCLE, EPS_MATCH, GRID_SIZE, circle_grid

PROBES = (0.5772156649015329, 0.3183098861837907, 0.7071067811865476)
PENCIL_SEED = 20240917
IDENTITY_TOL = 1e-8


@dataclass(frozen=True)
class ThematicData:
    t0: float
    t1: float
    u0: RatFun
    u1: RatFun
    v: tuple
    w: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "w", tuple(self.w))
        if len(self.v) != 2 or len(self.w) != 2:
            raise InvalidThematicData("v and w must be 2-component columns")

    @property
    def xi(self):
        return (-self.w[1], self.w[0])

    @property
    def theta(self):
        return (-self.v[1], self.v[0])

    @cached_property
    def rank_one_parts(self):
        """(u0 w^# v^*, u1 xi theta^T), both without the t0 factor."""
        ws = [f.sharp() for f in self.w]
        vs = [f.sharp() for f in self.v]
        xi, th = self.xi, self.theta
        A = RatMat([[self.u0 * ws[i] * vs[j] for j in range(2)] for i in range(2)])
        B = RatMat([[self.u1 * xi[i] * th[j] for j in range(2)] for i in range(2)])
        return A, B

    @cached_property
    def problems(self):
        return _validation_problems(self)

    def validate(self):
        if self.problems:
            raise InvalidThematicData("; ".join(self.problems))
        return self

    def with_t1(self, t1):
        return ThematicData(self.t0, t1, self.u0, self.u1, self.v, self.w)


def _is_unimodular(f, zeta, tol=1e-9):
    if f.is_zero:
        return False
    return bool(np.abs(np.abs(f(zeta)) - 1).max() <= tol)


def _analytic_in_closed_disk(f):
    return all(abs(b) > 1 + EPS_CIRCLE for b, _ in f.poles)


def _common_disk_zero(f, g):
    if f.is_zero and g.is_zero:
        return 0j
    if f.is_zero:
        f, g = g, f
    if g.is_zero:
        return next((a for a, _ in f.zeros if abs(a) <= 1 + EPS_CIRCLE), None)
    for a, _ in f.zeros:
        if abs(a) <= 1 + EPS_CIRCLE and g.zero_order(a, EPS_MATCH) > 0:
            return a
    return None


def _validation_problems(th, n=GRID_SIZE):
    zeta = circle_grid(n)
    out = []
    if not th.t0 > 0:
        out.append("t0 must be positive")
    if not 0 <= th.t1 <= th.t0 * (1 + 1e-12):
        out.append("t1 must lie in [0, t0]")
    for name, u in (("u0", th.u0), ("u1", th.u1)):
        if not _is_unimodular(u, zeta):
            out.append(f"{name} is not unimodular on the circle")
        elif not is_badly_approximable(u):
            out.append(f"{name} is not badly approximable")
    for name, col in (("v", th.v), ("w", th.w)):
        if not all(_analytic_in_closed_disk(f) for f in col):
            out.append(f"{name} has a pole in the closed disk")
            continue
        norm = sum(np.abs(f(zeta)) ** 2 for f in col)
        if np.abs(norm - 1).max() > 1e-9:
            out.append(f"{name} does not have unit norm on the circle")
        if _common_disk_zero(*col) is not None:
            out.append(f"{name} components share a zero in the disk")
    return out


# -- assembly ---------------------------------------------------------------------

def assemble(th, t, check=True):
    """Psi[t] for the absolute parameter t."""
    if check:
        th.validate()
    A, B = th.rank_one_parts
    if t == 0:
        return A * th.t0
    return A * th.t0 + B * t


def family(th, s, check=True):
    """Psi at the normalized parameter s = t / t0."""
    return assemble(th, s * th.t0, check)


def psi(th, check=True):
    return assemble(th, th.t1, check)


def outer_factors(th):
    """(W, V) with Psi[t] = W diag(t0 u0, t u1) V; both have determinant one."""
    w, v, xi, th_ = th.w, th.v, th.xi, th.theta
    W = RatMat([[w[0].sharp(), xi[0]], [w[1].sharp(), xi[1]]])
    V = RatMat([[v[0].sharp(), v[1].sharp()], [th_[0], th_[1]]])
    return W, V


def product_form(th, t):
    W, V = outer_factors(th)
    D = RatMat([[th.u0 * th.t0, 0], [0, th.u1 * t]])
    return W @ D @ V


# -- identities on the grid --------------------------------------------------------

@dataclass
class IdentityReport:
    residuals: dict
    tolerance: float = IDENTITY_TOL

    @property
    def passed(self):
        return all(r <= self.tolerance for r in self.residuals.values())

    @property
    def worst(self):
        return max(self.residuals.items(), key=lambda kv: kv[1])


def _rel(lhs, rhs):
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1e-300)
    return float(np.abs(lhs - rhs).max() / scale)


def _vals(col, zeta):
    return np.stack([f(zeta) for f in col], axis=-1)


def _psi_values(th, t, zeta):
    u0, u1 = th.u0(zeta), th.u1(zeta)
    w, v = _vals(th.w, zeta), _vals(th.v, zeta)
    xi, tht = _vals(th.xi, zeta), _vals(th.theta, zeta)
    first = np.conj(w)[:, :, None] * np.conj(v)[:, None, :]
    second = xi[:, :, None] * tht[:, None, :]
    return th.t0 * u0[:, None, None] * first + t * u1[:, None, None] * second


def verify_identities(th, t, grid_size=GRID_SIZE):
    """Residuals of the algebraic identities of the family at parameter t.

    All work is pointwise on the circle, where f^# is the complex conjugate.
    Residuals are relative to the largest term in each identity.
    """
    zeta = circle_grid(grid_size)
    t0 = th.t0
    u0, u1 = th.u0(zeta), th.u1(zeta)
    w, v = _vals(th.w, zeta), _vals(th.v, zeta)
    xi, tht = _vals(th.xi, zeta), _vals(th.theta, zeta)
    P = _psi_values(th, t, zeta)
    c = lambda x: np.conj(x)
    res = {}

    Wm = np.stack([c(w), xi], axis=-1)          # columns w^#, xi
    Vm = np.stack([c(v), tht], axis=-2)         # rows v^*, theta^T
    D = np.zeros_like(P)
    D[:, 0, 0], D[:, 1, 1] = t0 * u0, t * u1
    res["product_form"] = _rel(P, Wm @ D @ Vm)
    res["outer_determinants"] = max(_rel(np.linalg.det(Wm), np.ones(len(zeta))),
                                    _rel(np.linalg.det(Vm), np.ones(len(zeta))))
    res["determinant"] = _rel(np.linalg.det(P), t0 * t * u0 * u1)

    Amat = w[:, :, None] * v[:, None, :]
    res["reflection_form"] = _rel(P, t0 * u0[:, None, None] * c(Amat)
                                  - t * u1[:, None, None] * (J @ Amat @ J))
    res["xi_row"] = _rel(np.einsum("ki,kij->kj", c(xi), P), t * u1[:, None] * tht)
    res["theta_column"] = _rel(np.einsum("kij,kj->ki", P, c(tht)), t * u1[:, None] * xi)

    adj = np.empty_like(P)
    adj[:, 0, 0], adj[:, 1, 1] = P[:, 1, 1], P[:, 0, 0]
    adj[:, 0, 1], adj[:, 1, 0] = -P[:, 0, 1], -P[:, 1, 0]
    res["adjugate_row"] = _rel(t0 * u0[:, None] * c(xi), np.einsum("ki,kij->kj", tht, adj))
    res["adjugate_column"] = _rel(t0 * u0[:, None] * c(tht), np.einsum("kij,kj->ki", adj, xi))

    if t != 0:
        P_rec = _psi_values(th, t0 ** 2 / t, zeta)
        rhs = -(t / (t0 * u0 * u1))[:, None, None] * (J @ P_rec @ J)
        res["reciprocal_parameter"] = _rel(c(P), rhs)
    res["w_row"] = _rel(np.einsum("ki,kij->kj", w, P), t0 * u0[:, None] * c(v))
    res["v_column"] = _rel(np.einsum("kij,kj->ki", P, v), t0 * u0[:, None] * c(w))
    return IdentityReport(res)


# -- degrees -------------------------------------------------------------------------

@dataclass
class DegreeRow:
    s: float
    deg_minus: int
    deg_plus: int
    deg_minus_rank: int
    deg_plus_rank: int

    @property
    def margin(self):
        return self.deg_minus - self.deg_plus

    @property
    def deficit(self):
        return max(0, self.deg_plus + 2 - self.deg_minus)


def degrees(Psi):
    """(deg P-, deg P+) from local degrees, checked against Hankel ranks."""
    dm = mcmillan_degree(Psi, "inside")
    dp = mcmillan_degree(Psi, "outside")
    rm = rank_degree(Psi, "inside")
    rp = rank_degree(Psi, "outside")
    if (dm, dp) != (rm, rp):
        raise NumericalFailure(
            f"degree oracles disagree: local ({dm}, {dp}) vs Hankel rank ({rm}, {rp})")
    return dm, dp


def degree_profile(th, s_list):
    rows = []
    for s in s_list:
        Psi = family(th, float(s), check=False)
        dm = mcmillan_degree(Psi, "inside")
        dp = mcmillan_degree(Psi, "outside")
        rm = rank_degree(Psi, "inside")
        rp = rank_degree(Psi, "outside")
        if (dm, dp) != (rm, rp):
            raise NumericalFailure(
                f"at s = {s}: local degrees ({dm}, {dp}) vs Hankel ranks ({rm}, {rp})")
        rows.append(DegreeRow(float(s), dm, dp, rm, rp))
    return rows


# -- disturbing numbers ----------------------------------------------------------------

@dataclass(frozen=True)
class Event:
    s: float
    lam: complex
    drop: int
    side: str  # "disk" or "exterior"


@dataclass
class DisturbingReport:
    events: list
    generic: tuple  # (deg P-, deg P+) at a probe parameter
    candidates: dict = field(default_factory=dict)

    def side(self, name):
        return [e for e in self.events if e.side == name]

    @property
    def s_values(self):
        return sorted({e.s for e in self.events})


def _pencil_roots(HA, HB, r_gen, rng):
    n = HA.shape[0]
    if r_gen == 0:
        return []
    P = rng.standard_normal((r_gen, n)) + 1j * rng.standard_normal((r_gen, n))
    Q = rng.standard_normal((n, r_gen)) + 1j * rng.standard_normal((n, r_gen))
    vals = eig(P @ HA @ Q, -(P @ HB @ Q), right=False)
    out = []
    for s in vals:
        if not np.isfinite(s):
            continue
        if abs(s.imag) <= 1e-6 * max(1.0, abs(s)) and s.real > 1e-9:
            out.append(float(s.real))
    return sorted(out)


def _local_pencil(A, B, lam):
    if lam == INF:
        A, B, lam = A.flat(), B.flat(), 0j
    order, _, (DA, DB), (sA, sB), _ = principal_data([A, B], complex(lam))
    if order == 0:
        return None
    return block_hankel(DA), block_hankel(DB), max(sA, sB)


def pencil_events(th, lam, side, rng=None, s_max=1.0):
    """Validated rank drops of the local principal-part pencil at lam."""
    rng = rng or np.random.default_rng(PENCIL_SEED)
    A, B = th.rank_one_parts
    data = _local_pencil(A, B, lam)
    if data is None:
        return []
    HA, HB, scale = data
    r_gen = max(numerical_rank(HA + p * HB, scale)[0] for p in PROBES)
    events = []
    for s in _pencil_roots(HA, HB, r_gen, rng):
        if s > s_max * (1 + 1e-9):
            continue
        s = min(s, s_max) if abs(s - s_max) <= 1e-9 else s
        r = numerical_rank(HA + s * HB, scale)[0]
        if r < r_gen:
            events.append(Event(s, lam, r_gen - r, side))
    return events


def _disk_poles(f):
    return [b for b, _ in f.poles if abs(b) < 1 - EPS_CIRCLE]


def _exterior_poles(f):
    out = [b for b, _ in f.poles if abs(b) > 1 + EPS_CIRCLE]
    if f.order_at_inf < 0:
        out.append(INF)
    return out


def disturbing_numbers(th, validate=True):
    """Parameters s in (0, 1] where a pole of Psi at some point loses degree."""
    rng = np.random.default_rng(PENCIL_SEED)
    cands = {"disk": _disk_poles(th.u1), "exterior": _exterior_poles(th.u0)}
    events = []
    for side, pts in cands.items():
        for lam in pts:
            events.extend(pencil_events(th, lam, side, rng))
    events = _snap(events)
    if validate:
        for e in events:
            _validate_event(th, e)
    generic = degrees(family(th, PROBES[0], check=False))
    return DisturbingReport(events, generic, cands)


def _snap(events, tol=1e-8):
    """Give events whose parameters agree to tol one shared parameter value."""
    events = sorted(events, key=lambda e: e.s)
    groups = []
    for e in events:
        if groups and abs(e.s - groups[-1][-1].s) <= tol * max(1.0, e.s):
            groups[-1].append(e)
        else:
            groups.append([e])
    out = []
    for g in groups:
        s = float(np.median([e.s for e in g]))
        out.extend(Event(s, e.lam, e.drop, e.side) for e in g)
    return out


def _local(th, s, lam):
    Psi = family(th, s, check=False)
    return local_degree(Psi, lam).degree


def _validate_event(th, e):
    at = _local(th, e.s, e.lam)
    gen = max(_local(th, p, e.lam) for p in PROBES)
    if gen - at != e.drop:
        raise NumericalFailure(
            f"event at lam={e.lam}, s={e.s}: pencil drop {e.drop}, direct degree drop {gen - at}")


# -- theorem checks -----------------------------------------------------------------

@dataclass
class BoundsVerdict:
    clauses: dict          # name -> (ok, detail)
    report: DisturbingReport
    rows: list
    deg_minus_u1: int
    deg_plus_u0: int

    @property
    def passed(self):
        return all(ok for ok, _ in self.clauses.values())

    @property
    def failed(self):
        return [k for k, (ok, _) in self.clauses.items() if not ok]

    @property
    def deficit_sum(self):
        return sum(r.deficit for r in self.rows)

    @property
    def violations(self):
        return [r for r in self.rows if r.margin < 2]


def scan_grid(n=100, lo=1e-2):
    return list(np.logspace(np.log10(lo), 0.0, n))


def column_degree(col, region="all"):
    return mcmillan_degree(RatMat.column(list(col)), region)


def check_bounds(th, n_scan=100, raise_on_failure=True):
    th.validate()
    report = disturbing_numbers(th)
    s_values = sorted(set(scan_grid(n_scan)) | set(report.s_values) | {1.0})
    rows = degree_profile(th, s_values)
    dm_u1 = degree_region(th.u1, "inside")
    dp_u0 = degree_region(th.u0, "outside")
    dm_u0 = degree_region(th.u0, "inside")
    deg_v, deg_w = column_degree(th.v), column_degree(th.w)
    disk_s = {e.s for e in report.side("disk")}
    clauses = {}

    def put(name, ok, detail=""):
        prev = clauses.get(name, (True, ""))
        clauses[name] = (prev[0] and bool(ok), prev[1] if not prev[0] else detail)

    for r in rows:
        put("u0_disk_degree_below_psi", dm_u0 <= r.deg_minus, f"s={r.s}: {dm_u0} > {r.deg_minus}")
        put("v_degree_below_psi", deg_v <= r.deg_minus - 1, f"s={r.s}: deg v {deg_v}, deg P- {r.deg_minus}")
        put("w_degree_below_psi", deg_w <= r.deg_minus - 1, f"s={r.s}: deg w {deg_w}, deg P- {r.deg_minus}")
        put("u1_disk_degree_below_psi", dm_u1 <= r.deg_minus - 1, f"s={r.s}: {dm_u1} vs {r.deg_minus}")
        put("analytic_degree_bound", r.deg_plus <= 2 * r.deg_minus - 3,
            f"s={r.s}: deg P+ {r.deg_plus} > 2*{r.deg_minus}-3")
        if r.s not in disk_s:
            put("margin_at_nondisturbing", r.margin >= 2, f"s={r.s}: margin {r.margin}")

    viol = [r for r in rows if r.margin < 2]
    put("violation_count", len(viol) <= dm_u1, f"{len(viol)} violating values > {dm_u1}")
    total = sum(r.deficit for r in rows)
    put("deficit_sum", total <= dm_u1, f"sum of deficits {total} > {dm_u1}")

    disk_events, ext_events = report.side("disk"), report.side("exterior")
    put("event_cap_disk", len(disk_events) <= dm_u1, f"{len(disk_events)} > {dm_u1}")
    put("event_cap_exterior", len(ext_events) <= dp_u0, f"{len(ext_events)} > {dp_u0}")
    seen = {}
    for e in report.events:
        key = (e.side, complex(e.lam) if e.lam != INF else INF)
        put("one_event_per_point", key not in seen, f"two events at {e.lam}")
        seen[key] = e

    for e in disk_events:
        _check_disk_event(th, e, put)
    for e in ext_events:
        _check_exterior_event(th, e, put)
        if abs(e.s - 1) <= 1e-9 and e.lam != INF:
            _check_pairing(th, e, put)

    verdict = BoundsVerdict(clauses, report, rows, dm_u1, dp_u0)
    if raise_on_failure and not verdict.passed:
        name = verdict.failed[0]
        raise TheoremViolation(name, clauses[name][1])
    return verdict


def _check_disk_event(th, e, put):
    d = th.u1.pole_order(e.lam, 1e-6)
    l = d - _local(th, e.s, e.lam)
    if l <= 0:
        return
    put("disk_event_u0_zero", th.u0.zero_order(e.lam, 1e-6) >= l, f"at {e.lam}: need order {l}")
    vs = RatMat.column([f.sharp() for f in th.v])
    ws = RatMat.column([f.sharp() for f in th.w])
    put("disk_event_v_pole", local_degree(vs, e.lam).degree >= l, f"at {e.lam}: need pole {l}")
    put("disk_event_w_pole", local_degree(ws, e.lam).degree >= l, f"at {e.lam}: need pole {l}")


def _check_exterior_event(th, e, put):
    d = th.u0.pole_order(e.lam, 1e-6)
    l = d - _local(th, e.s, e.lam)
    if l <= 0:
        return
    put("exterior_event_u1_zero", th.u1.zero_order(e.lam, 1e-6) >= l, f"at {e.lam}: need order {l}")
    put("exterior_event_v_pole", local_degree(RatMat.column(list(th.v)), e.lam).degree >= l,
        f"at {e.lam}: need pole {l}")
    put("exterior_event_w_pole", local_degree(RatMat.column(list(th.w)), e.lam).degree >= l,
        f"at {e.lam}: need pole {l}")


def _check_pairing(th, e, put):
    mirror = 1 / np.conj(e.lam)
    before = _local(th, PROBES[0], mirror)
    at_one = _local(th, 1.0, mirror)
    put("reflection_pairing", before - at_one == e.drop,
        f"exterior drop {e.drop} at {e.lam}, disk drop {before - at_one} at {mirror}")


# -- random instances -----------------------------------------------------------------

def _rand_disk(rng, r_max=0.8):
    r = r_max * np.sqrt(rng.uniform(0.05, 1.0))
    return r * np.exp(2j * np.pi * rng.uniform())


def random_unimodular(rng, n_poles, n_zeros, r_max=0.8):
    """c * B_a / B_b with deg B_a = n_zeros < deg B_b = n_poles."""
    a = [_rand_disk(rng, r_max) for _ in range(n_zeros)]
    b = [_rand_disk(rng, r_max) for _ in range(n_poles)]
    c = np.exp(2j * np.pi * rng.uniform())
    return blaschke(a, c) / blaschke(b)


def inner_coouter(p, q):
    """(p/h, q/h) for polynomials p, q (ascending) with |p|^2 + |q|^2 = |h|^2."""
    fp, fq = RatFun.from_coeffs(p), RatFun.from_coeffs(q)
    h = spectral_factor(fp * fp.sharp() + fq * fq.sharp())
    return (fp / h, fq / h)


def random_column(rng, degree=1):
    def poly():
        return rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    return inner_coouter(poly(), poly())


def random_thematic(rng, max_poles=2, col_degree=1, t1=None, t0=None):
    """Valid thematic data with winding index of u0 at least that of u1."""
    k1 = int(rng.integers(1, max_poles + 1))
    k0 = int(rng.integers(k1, max_poles + 1))
    u0 = random_unimodular(rng, k0, int(rng.integers(0, k0)))
    u1 = random_unimodular(rng, k1, int(rng.integers(0, k1)))
    t0 = float(rng.uniform(0.5, 3.0)) if t0 is None else t0
    t1 = float(rng.uniform(0.1, 0.9)) * t0 if t1 is None else t1
    th = ThematicData(t0, t1, u0, u1, random_column(rng, col_degree), random_column(rng, col_degree))
    return th.validate()


def diagonal_example(t0=2.0, t1=1.0):
    """u0 = u1 = 1/z and v = w = (1, 0); Psi = diag(t0/z, t1/z)."""
    iz = RatFun.z(-1)
    e1 = (RatFun.const(1.0), RatFun.zero())
    return ThematicData(t0, t1, iz, iz, e1, e1)
