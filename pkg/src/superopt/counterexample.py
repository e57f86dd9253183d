"""Explicit families where the analytic-part degree bound is attained.

With Blaschke products B1 (degree k), B2 (degree k-2) and B0 (degree k-1)
whose zeros are roots of g = 1 - t a^2 B1 B2, the function

    Psi = M diag(B0/B1, t B2/B0) M,   M = ((1/B0, a), (-a, B0)),

has an antianalytic part of degree k and an analytic part of degree 2k-3.
Here B0 is found by harvesting roots of g rather than by prescribing B0 and
interpolating for B1 B2; ``interpolate_blaschke`` covers the latter route.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionFailure, InfeasibleInterpolation, TheoremViolation
from .ratfun import RatFun, blaschke, winding_number
from .ratmat import RatMat, riesz_split_mat
from .thematic import ThematicData, assemble, degree_profile, degrees
from .tolerances import EPS_MATCH, circle_grid

SELECT_DIGITS = 9  # modulus rounding used by the zero-selection tie-break


@dataclass
class CounterexampleSpec:
    k: int
    a: float
    t_values: list
    kappa: list
    B1: RatFun
    B2: RatFun
    B0: RatFun
    deltas: list                       # zeros of B0 grouped by parameter
    disk_zero_counts: list = field(default_factory=list)

    @property
    def norm(self):
        return 1.0 / np.sqrt(1.0 + self.a ** 2)

    def thematic(self, j=0):
        """Thematic data whose family parameter s matches t_values[j]."""
        n, a = self.norm, self.a
        t0 = 1.0 + a ** 2
        v = (self.B0 * n, RatFun.const(a * n))
        w = (self.B0 * n, RatFun.const(-a * n))
        return ThematicData(t0, t0 * self.t_values[j], self.B0 / self.B1,
                            self.B2 / self.B0, v, w)


def default_b1_zeros(k, radius=0.6):
    return [radius * np.exp(2j * np.pi * j / k) for j in range(k)]


def _b2(B2_zeros, k):
    if B2_zeros is None:
        return RatFun.z(k - 2)
    if len(B2_zeros) != k - 2:
        raise ConstructionFailure(f"B2 needs {k - 2} zeros, got {len(B2_zeros)}")
    return blaschke(B2_zeros)


def _g_numerator(B1, B2, a, t):
    """Descending coefficients of the numerator of 1 - t a^2 B1 B2."""
    P = B1 * B2
    num, den = P.coeffs()
    n = max(len(num), len(den))
    num = np.pad(num, (0, n - len(num)))
    den = np.pad(den, (0, n - len(den)))
    return (den - t * a * a * num)[::-1]


def g_disk_zeros(B1, B2, a, t, polish=3):
    """All zeros of 1 - t a^2 B1 B2 in the open disk, Newton-polished."""
    c = _g_numerator(B1, B2, a, t)
    c = np.trim_zeros(c, "f")
    roots = np.roots(c)
    dc = np.polyder(c)
    for _ in range(polish):
        step = np.polyval(c, roots) / np.polyval(dc, roots)
        roots = roots - step
    return [complex(r) for r in roots if abs(r) < 1]


def _selection_key(z):
    return (-round(abs(z), SELECT_DIGITS), -z.real, -z.imag)


def _select(zeros, count, taken):
    pool = [z for z in sorted(zeros, key=_selection_key)
            if all(abs(z - q) > EPS_MATCH * (1 + abs(q)) for q in taken)]
    if len(pool) < count:
        raise ConstructionFailure(f"only {len(pool)} admissible disk zeros, need {count}")
    chosen = pool[:count]
    for i, z in enumerate(chosen):
        for q in chosen[:i]:
            if abs(z - q) <= EPS_MATCH * (1 + abs(q)):
                raise ConstructionFailure("selected zeros are not simple")
    return chosen


def product_formula(B0, B1, B2, a, t):
    M = RatMat([[1 / B0, a], [-a, B0]])
    D = RatMat([[B0 / B1, 0], [0, B2 / B0 * t]])
    return M @ D @ M


def _check_params(k, a, t_values):
    if k < 2:
        raise ConstructionFailure("k must be at least 2")
    if not a > 1:
        raise ConstructionFailure("a must exceed 1")
    for t in t_values:
        if not 0 < t < 1:
            raise ConstructionFailure(f"t = {t} is not in (0, 1)")


def build_spec(k, a, t_values, kappa, B1_zeros=None, B2_zeros=None):
    t_values = [float(t) for t in t_values]
    kappa = [int(x) for x in kappa]
    _check_params(k, a, t_values)
    if len(kappa) != len(t_values) or sum(kappa) != k - 1 or min(kappa) < 1:
        raise ConstructionFailure("partition sizes must be positive and sum to k - 1")
    if len(set(t_values)) != len(t_values):
        raise ConstructionFailure("parameter values must be distinct")
    B1_zeros = default_b1_zeros(k) if B1_zeros is None else list(B1_zeros)
    if len(B1_zeros) != k:
        raise ConstructionFailure(f"B1 needs {k} zeros, got {len(B1_zeros)}")
    B1, B2 = blaschke(B1_zeros), _b2(B2_zeros, k)
    deltas, counts, taken = [], [], []
    for t, kj in zip(t_values, kappa):
        zs = g_disk_zeros(B1, B2, a, t)
        counts.append(len(zs))
        chosen = _select(zs, kj, taken)
        taken.extend(chosen)
        deltas.append(chosen)
    B0 = blaschke(taken)
    return CounterexampleSpec(k, a, t_values, kappa, B1, B2, B0, deltas, counts)


def g_residuals(spec):
    """max |1 - t_j a^2 B1 B2| over the points of each group."""
    out = []
    for t, delta in zip(spec.t_values, spec.deltas):
        vals = [abs(1 - t * spec.a ** 2 * spec.B1(z) * spec.B2(z)) for z in delta]
        out.append(max(vals))
    return out


def zero_count_by_winding(spec, j=0):
    g = 1 - spec.B1 * spec.B2 * (spec.t_values[j] * spec.a ** 2)
    return winding_number(g)


def exterior_gap(spec, j=0):
    """min |-a^2/B1 + t B2| over the poles of B0 (nonzero means no cancellation there)."""
    t = spec.t_values[j]
    pts = [b for b, _ in spec.B0.poles]
    if not pts:
        return np.inf
    return float(min(abs(-spec.a ** 2 / spec.B1(p) + t * spec.B2(p)) for p in pts))


@dataclass
class KPResult:
    spec: CounterexampleSpec
    psi: RatMat
    phi: RatMat
    deg_minus: int
    deg_plus: int
    form_mismatch: float


def build_kp(k, a, t, B1_zeros=None, B2_zeros=None, validate=True):
    """Single-parameter instance; returns (spec, Psi, Phi = P_minus Psi)."""
    spec = build_spec(k, a, [t], [k - 1], B1_zeros, B2_zeros)
    psi = product_formula(spec.B0, spec.B1, spec.B2, a, t)
    th = spec.thematic()
    zeta = circle_grid()
    alt = assemble(th, th.t1, check=validate)
    mismatch = float(np.abs(psi(zeta) - alt(zeta)).max() / np.abs(alt(zeta)).max())
    if mismatch > 1e-9:
        raise ConstructionFailure(f"product and thematic forms differ by {mismatch:.2e}")
    phi, _ = riesz_split_mat(psi)
    dm, dp = degrees(psi) if validate else (None, None)
    if validate and (dm, dp) != (k, 2 * k - 3):
        raise TheoremViolation("counterexample degrees",
                               f"expected ({k}, {2 * k - 3}), got ({dm}, {dp})")
    return KPResult(spec, psi, phi, dm, dp, mismatch)


@dataclass
class EKPResult:
    spec: CounterexampleSpec
    thematic: ThematicData
    rows: list  # DegreeRow at each t_j


def build_ekp(k, a, t_values, kappa, B1_zeros=None, B2_zeros=None, validate=True):
    """Multi-parameter instance: the margin fails at exactly t_j, by kappa_j."""
    spec = build_spec(k, a, t_values, kappa, B1_zeros, B2_zeros)
    th = spec.thematic().validate()
    rows = degree_profile(th, spec.t_values)
    if validate:
        for row, kj in zip(rows, spec.kappa):
            if row.deg_plus != row.deg_minus - 2 + kj:
                raise TheoremViolation(
                    "prescribed violation pattern",
                    f"at s={row.s}: deg P+ {row.deg_plus}, deg P- {row.deg_minus}, kappa {kj}")
    return EKPResult(spec, th, rows)


# -- interpolation ---------------------------------------------------------------

def pick_matrix(nodes, targets):
    z = np.asarray(nodes, dtype=complex)
    w = np.asarray(targets, dtype=complex)
    return (1 - np.outer(w, w.conj())) / (1 - np.outer(z, z.conj()))


def _mobius_value(z, a):
    return (z - a) / (1 - np.conj(a) * z)


def interpolate_blaschke(nodes, targets, degree_budget=None):
    """Blaschke product of degree exactly ``degree_budget`` with B(z_i) = w_i.

    Schur-Nevanlinna recursion; the free inner parameter at the bottom is
    z^(budget - n), so the degree is padded with zeros at the origin.
    """
    nodes = [complex(z) for z in nodes]
    targets = [complex(w) for w in targets]
    n = len(nodes)
    budget = n if degree_budget is None else int(degree_budget)
    if budget < n:
        raise InfeasibleInterpolation("degree budget below the number of nodes")
    if any(abs(z) >= 1 for z in nodes) or any(abs(w) >= 1 for w in targets):
        raise InfeasibleInterpolation("nodes and targets must lie in the open disk")
    if n:
        P = pick_matrix(nodes, targets)
        if np.linalg.eigvalsh((P + P.conj().T) / 2).min() <= 1e-12:
            raise InfeasibleInterpolation("Pick matrix is not positive definite")
    return _schur(nodes, targets, budget - n)


def _schur(nodes, targets, pad):
    if not nodes:
        return RatFun.z(pad) if pad else RatFun.const(1.0)
    z1, w1 = nodes[0], targets[0]
    rest_nodes = nodes[1:]
    rest = []
    for z, w in zip(rest_nodes, targets[1:]):
        rest.append((w - w1) / ((1 - np.conj(w1) * w) * _mobius_value(z, z1)))
    g = _schur(rest_nodes, rest, pad)
    # b1 = (z - z1) / (1 - conj(z1) z), the opposite sign of blaschke([z1])
    bg = -blaschke([z1]) * g
    return (bg + w1) / (bg * np.conj(w1) + 1)


def build_from_interpolation(k, a, t_values, deltas):
    """Prescribe the zeros of B0 and interpolate B1 B2 instead.

    ``deltas[j]`` are the points where 1 - t_j a^2 B1 B2 must vanish.  The
    interpolant of degree 2k - 2 is split by zero modulus into B1 (k zeros,
    carrying the phase) and B2 (k - 2 zeros).
    """
    _check_params(k, a, t_values)
    nodes, targets = [], []
    for t, delta in zip(t_values, deltas):
        for z in delta:
            nodes.append(z)
            targets.append(1.0 / (a * a * t))
    if len(nodes) != k - 1:
        raise ConstructionFailure(f"B0 needs {k - 1} zeros, got {len(nodes)}")
    P = interpolate_blaschke(nodes, targets, 2 * k - 2)
    zeros = sorted((z for z, m in P.zeros for _ in range(m)), key=abs)
    if len(zeros) != 2 * k - 2:
        raise ConstructionFailure("interpolant has the wrong degree")
    B2 = blaschke(zeros[:k - 2])
    B1 = P / B2
    B0 = blaschke(nodes)
    return CounterexampleSpec(k, a, list(t_values), [len(d) for d in deltas],
                              B1, B2, B0, [list(d) for d in deltas])
