"""Scalar rational functions kept in factored form.

A nonzero function is stored as

    gain * prod (z - a)^k / prod (z - b)^l

with finite zeros ``a`` and poles ``b``.  The behaviour at infinity is implied
by the two multiplicity totals; ``order_at_inf`` reports it.  Products and
quotients are exact list operations; sums go through coefficient form and are
re-factored with a companion-matrix root finder.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    InvalidBlaschkeZero,
    InvalidFunction,
    NotPositive,
    NotSelfReflective,
    NumericalFailure,
    OnCircleSingularity,
    PoleEvaluation,
    PoleOnCircle,
)
from .tolerances import EPS_CIRCLE, EPS_MATCH, ROOT_CLUSTER, circle_grid

INF = math.inf


class Region(Enum):
    INSIDE = "inside"
    ON_CIRCLE = "circle"
    OUTSIDE = "outside"
    ALL = "all"


def classify(lam, eps=EPS_CIRCLE):
    if lam == INF or (isinstance(lam, complex) and cmath.isinf(lam)):
        return Region.OUTSIDE
    r = abs(lam)
    if abs(r - 1.0) <= eps:
        return Region.ON_CIRCLE
    return Region.INSIDE if r < 1.0 else Region.OUTSIDE


def reflect_point(lam):
    """1/conj(lam), with 0 <-> infinity."""
    if lam == INF:
        return 0j
    if lam == 0:
        return INF
    return 1.0 / np.conj(lam)


def _near(a, b, tol):
    return abs(a - b) <= tol * (1.0 + abs(a))


def _sort_key(item):
    loc = item[0]
    return (round(loc.real, 12), round(loc.imag, 12))


def _merge(roots, tol):
    """Merge (location, multiplicity) pairs whose locations agree within tol."""
    out = []
    for loc, m in roots:
        loc = complex(loc)
        if m <= 0:
            continue
        for item in out:
            if _near(item[0], loc, tol):
                total = item[1] + m
                item[0] = (item[0] * item[1] + loc * m) / total
                item[1] = total
                break
        else:
            out.append([loc, int(m)])
    return out


def _as_pairs(seq):
    pairs = []
    for x in seq:
        if isinstance(x, (tuple, list)):
            loc, m = x
        else:
            loc, m = x, 1
        pairs.append((complex(loc), int(m)))
    return pairs


def _binom_series(d, p, n):
    """Taylor coefficients in w of (d + w)**p, p integer of either sign."""
    out = np.zeros(n, dtype=complex)
    coef = 1.0 + 0j
    for k in range(n):
        if k > 0:
            coef *= (p - k + 1) / k
        if coef == 0:
            break
        out[k] = coef * d ** (p - k)
    return out


def _series_mul(a, b, n):
    return np.convolve(a, b)[:n]


# -- polynomial helpers (descending numpy order) ----------------------------

def _poly_from_roots(pairs):
    c = np.array([1.0 + 0j])
    for loc, m in pairs:
        for _ in range(m):
            c = np.convolve(c, [1.0, -loc])
    return c


def _poly_roots(c):
    """Roots of a descending coefficient vector, Newton-polished and clustered."""
    c = np.asarray(c, dtype=complex)
    if len(c) <= 1:
        return []
    raw = np.roots(c)
    dc = np.polyder(c)
    roots = []
    for x in raw:
        fx = np.polyval(c, x)
        d = np.polyval(dc, x)
        if d != 0:
            y = x - fx / d
            if abs(np.polyval(c, y)) < abs(fx):
                x = y
        roots.append((complex(x), 1))
    return [(loc, m) for loc, m in _merge(roots, ROOT_CLUSTER)]


def _abs_eval(c, p):
    return float(np.polyval(np.abs(c), abs(p)))


class RatFun:
    """Immutable scalar rational function in factored form."""

    __slots__ = ("gain", "zeros", "poles", "is_zero")

    def __init__(self, gain=1.0, zeros=(), poles=(), *, cancel_tol=EPS_MATCH):
        gain = complex(gain)
        if gain == 0:
            object.__setattr__(self, "gain", 0j)
            object.__setattr__(self, "zeros", ())
            object.__setattr__(self, "poles", ())
            object.__setattr__(self, "is_zero", True)
            return
        zs = _merge(_as_pairs(zeros), EPS_MATCH)
        ps = _merge(_as_pairs(poles), EPS_MATCH)
        for z in zs:
            for p in ps:
                if z[1] and p[1] and _near(p[0], z[0], cancel_tol):
                    k = min(z[1], p[1])
                    z[1] -= k
                    p[1] -= k
        zs = sorted(((loc, m) for loc, m in zs if m > 0), key=_sort_key)
        ps = sorted(((loc, m) for loc, m in ps if m > 0), key=_sort_key)
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "zeros", tuple(zs))
        object.__setattr__(self, "poles", tuple(ps))
        object.__setattr__(self, "is_zero", False)

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    def __reduce__(self):
        return (RatFun, (self.gain, self.zeros, self.poles))

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls(0.0)

    @classmethod
    def const(cls, c):
        return cls(c)

    @classmethod
    def z(cls, power=1):
        if power >= 0:
            return cls(1.0, [(0j, power)] if power else [])
        return cls(1.0, [], [(0j, -power)])

    @classmethod
    def from_coeffs(cls, num, den=(1.0,)):
        """Build from ascending coefficient lists, cancelling common roots."""
        num = np.trim_zeros(np.asarray(num, dtype=complex), "b")
        den = np.trim_zeros(np.asarray(den, dtype=complex), "b")
        if len(den) == 0:
            raise InvalidFunction("denominator is identically zero")
        if len(num) == 0:
            return cls.zero()
        dn = den[::-1]
        poles = _poly_roots(dn)
        scale = float(np.abs(num).max())
        g = _finish(num[::-1], poles, scale, tol=EPS_MATCH)
        return g / complex(dn[0])

    # -- basic structure ----------------------------------------------------

    @property
    def num_degree(self):
        return sum(m for _, m in self.zeros)

    @property
    def den_degree(self):
        return sum(m for _, m in self.poles)

    @property
    def order_at_inf(self):
        """Positive: zero at infinity of that order; negative: pole."""
        return self.den_degree - self.num_degree

    @property
    def degree(self):
        """Total number of poles on the Riemann sphere."""
        if self.is_zero:
            return 0
        return self.den_degree + max(0, -self.order_at_inf)

    def is_constant(self):
        return self.is_zero or (not self.zeros and not self.poles)

    def coeffs(self):
        """(numerator, denominator) as ascending coefficient arrays."""
        if self.is_zero:
            return np.zeros(1, complex), np.ones(1, complex)
        num = self.gain * _poly_from_roots(self.zeros)
        den = _poly_from_roots(self.poles)
        return num[::-1], den[::-1]

    def pole_order(self, lam, tol=EPS_MATCH):
        if self.is_zero:
            return 0
        if lam == INF:
            return max(0, -self.order_at_inf)
        return sum(m for p, m in self.poles if _near(p, lam, tol))

    def zero_order(self, lam, tol=EPS_MATCH):
        if self.is_zero:
            return INF
        if lam == INF:
            return max(0, self.order_at_inf)
        return sum(m for a, m in self.zeros if _near(a, lam, tol))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, z):
        arr = np.asarray(z, dtype=complex)
        if self.is_zero:
            out = np.zeros(arr.shape, dtype=complex)
        else:
            out = np.full(arr.shape, self.gain, dtype=complex)
            for a, m in self.zeros:
                out = out * (arr - a) ** m
            for b, m in self.poles:
                d = arr - b
                if np.any(np.abs(d) <= EPS_MATCH * (1.0 + abs(b))):
                    raise PoleEvaluation(f"evaluation at pole {b}")
                out = out / d ** m
        return complex(out) if out.ndim == 0 else out

    # -- arithmetic ---------------------------------------------------------

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return RatFun.zero()
        return RatFun(self.gain * other.gain, self.zeros + other.zeros,
                      self.poles + other.poles)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by the zero function")
        if self.is_zero:
            return RatFun.zero()
        return RatFun(self.gain / other.gain, self.zeros + other.poles,
                      self.poles + other.zeros)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, other, -1)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return RatFun(-self.gain, self.zeros, self.poles) if not self.is_zero else self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if self.is_zero:
            if n <= 0:
                raise ZeroDivisionError("0 ** non-positive power")
            return self
        if n >= 0:
            return RatFun(self.gain ** n, [(a, m * n) for a, m in self.zeros],
                          [(b, m * n) for b, m in self.poles])
        return RatFun(1.0) / self ** (-n)

    def scale_gain(self, c):
        return RatFun(self.gain * c, self.zeros, self.poles) if not self.is_zero else self

    # -- reflections --------------------------------------------------------

    def sharp(self):
        """f#(z) = conj(f(1/conj z)); equals conj(f) on the circle."""
        return _invert(self, conjugate=True)

    def flat(self):
        """f(1/z)."""
        return _invert(self, conjugate=False)

    # -- local expansions ---------------------------------------------------

    def local_series(self, lam, n):
        """(order, c) with f = (z-lam)^order * sum_k c[k] (z-lam)^k near lam."""
        lam = complex(lam)
        order = 0
        c = np.zeros(n, dtype=complex)
        if self.is_zero:
            return 0, c
        c[0] = self.gain
        for a, m in self.zeros:
            if _near(a, lam, EPS_MATCH):
                order += m
            else:
                c = _series_mul(c, _binom_series(lam - a, m, n), n)
        for b, m in self.poles:
            if _near(b, lam, EPS_MATCH):
                order -= m
            else:
                c = _series_mul(c, _binom_series(lam - b, -m, n), n)
        return order, c

    def principal_part(self, lam):
        """Coefficients c[j-1] of (z-lam)^(-j), j = 1..pole order."""
        m = self.pole_order(lam)
        if m == 0:
            return np.zeros(0, dtype=complex)
        order, c = self.local_series(lam, m)
        shift = -order  # may be < m if a zero sits within tolerance
        out = np.zeros(m, dtype=complex)
        for j in range(1, m + 1):
            k = shift - j
            if 0 <= k < len(c):
                out[j - 1] = c[k]
        return out

    def polynomial_part(self):
        """Ascending coefficients of the polynomial part (constant included)."""
        if self.is_zero:
            return np.zeros(1, complex)
        f = self.flat()
        m = f.pole_order(0j)
        order, c = f.local_series(0j, m + 1)
        poly = np.zeros(m + 1, dtype=complex)
        for p in range(m + 1):
            k = -p - order
            if 0 <= k < len(c):
                poly[p] = c[k]
        return poly

    # -- misc ---------------------------------------------------------------

    def __repr__(self):
        if self.is_zero:
            return "RatFun(0)"
        fmt = lambda pairs: ", ".join(
            f"{_cfmt(a)}" + (f"^{m}" if m > 1 else "") for a, m in pairs)
        return f"RatFun({_cfmt(self.gain)}; zeros=[{fmt(self.zeros)}]; poles=[{fmt(self.poles)}])"


def _cfmt(c):
    c = complex(c)
    if abs(c.imag) < 1e-14:
        return f"{c.real:.6g}"
    return f"({c.real:.6g}{c.imag:+.6g}j)"


def _coerce(x):
    if isinstance(x, RatFun):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return RatFun(x)
    return NotImplemented


def _invert(f, conjugate):
    """Substitute z -> 1/z (optionally conjugating coefficients)."""
    if f.is_zero:
        return f
    cj = np.conj if conjugate else (lambda x: x)
    gain = cj(f.gain)
    zeros, poles = [], []
    zpow = 0  # net power of z collected from 1/z factors
    for a, m in f.zeros:
        if a == 0 or abs(a) < 1e-300:
            zpow -= m
        else:
            gain *= (-cj(a)) ** m
            zeros.append((1.0 / cj(a), m))
            zpow -= m
    for b, m in f.poles:
        if b == 0 or abs(b) < 1e-300:
            zpow += m
        else:
            gain /= (-cj(b)) ** m
            poles.append((1.0 / cj(b), m))
            zpow += m
    if zpow > 0:
        zeros.append((0j, zpow))
    elif zpow < 0:
        poles.append((0j, -zpow))
    return RatFun(gain, zeros, poles)


def _lcd(f, g):
    """Least common denominator: list of [location, multiplicity]."""
    out = [[loc, m] for loc, m in f.poles]
    for loc, m in g.poles:
        for item in out:
            if _near(item[0], loc, EPS_MATCH):
                item[1] = max(item[1], m)
                break
        else:
            out.append([loc, m])
    return out


def _numer_over(f, lcd):
    extra = []
    for loc, M in lcd:
        mf = sum(m for p, m in f.poles if _near(p, loc, EPS_MATCH))
        if M > mf:
            extra.append((loc, M - mf))
    return f.gain * _poly_from_roots(list(f.zeros) + extra)


def _deflate(N, loc):
    """Divide the descending polynomial N by (z - loc).

    Returns (quotient, residual, reference) where residual / reference is the
    relative size of N at loc.  Roots outside the unit disk are divided out
    from the constant term upward; forward division amplifies rounding by
    |loc|^k there.
    """
    if abs(loc) <= 1:
        q, r = np.polydiv(N, [1.0, -loc])
        return q, (abs(r[-1]) if len(r) else 0.0), _abs_eval(N, loc)
    a = N[::-1]
    n = len(a) - 1
    b = np.empty(n, dtype=complex)
    b[0] = -a[0] / loc
    for j in range(1, n):
        b[j] = (b[j - 1] - a[j]) / loc
    resid = abs(a[n] - b[n - 1])
    ref = float(np.polyval(np.abs(a), 1 / abs(loc)))
    return b[::-1], resid, ref


def _finish(N, poles, scale, tol=EPS_MATCH, forced=()):
    """Numerator N (descending) over prod (z - p)^m; cancel and re-factor.

    Poles whose locations appear in ``forced`` are divided out unconditionally
    (the caller knows the cancellation is exact); the others only when the
    numerator vanishes there to relative accuracy ``tol``.
    """
    N = np.asarray(N, dtype=complex)
    floor = 1e-13 * scale
    while len(N) and abs(N[0]) <= floor:
        N = N[1:]
    if len(N) == 0 or np.all(np.abs(N) <= 1e-14 * scale):
        return RatFun.zero()
    zeros_at_origin = 0
    while len(N) > 1 and abs(N[-1]) <= floor:
        N = N[:-1]
        zeros_at_origin += 1
    remaining = []
    for loc, m in poles:
        loc = complex(loc)
        left = m
        if zeros_at_origin and loc == 0:
            k = min(zeros_at_origin, left)
            zeros_at_origin -= k
            left -= k
        is_forced = any(_near(loc, q, EPS_MATCH) for q in forced)
        while left > 0 and len(N) > 1:
            q, resid, ref = _deflate(N, loc)
            if is_forced:
                if resid > 1e-6 * max(ref, 1e-300) and resid > 1e-12 * scale:
                    raise NumericalFailure(
                        f"forced cancellation at {loc} left residual {resid:.3g} (ref {ref:.3g})")
            elif resid > tol * ref:
                break
            N = q
            left -= 1
        if left > 0:
            if is_forced:
                raise NumericalFailure(f"could not cancel pole at {loc}")
            remaining.append((loc, left))
    zeros = _poly_roots(N)
    if zeros_at_origin:
        zeros.append((0j, zeros_at_origin))
    return RatFun(N[0], zeros, remaining)


def _add(f, g, sign, forced=()):
    if g.is_zero:
        return f
    if f.is_zero:
        return g if sign > 0 else -g
    lcd = _lcd(f, g)
    nf = _numer_over(f, lcd)
    ng = sign * _numer_over(g, lcd)
    N = np.polyadd(nf, ng)
    scale = max(float(np.abs(nf).max()), float(np.abs(ng).max()))
    return _finish(N, lcd, scale, forced=forced)


# -- public operations -------------------------------------------------------

def make_ratfun(spec):
    """Build a RatFun from ``(num, den)`` ascending coefficients or ``(gain, zeros, poles)``."""
    if isinstance(spec, RatFun):
        return spec
    if isinstance(spec, dict):
        from .serialize import ratfun_from_json
        return ratfun_from_json(spec)
    if len(spec) == 2:
        return RatFun.from_coeffs(*spec)
    if len(spec) == 3:
        gain, zeros, poles = spec
        return RatFun(gain, zeros, poles)
    raise InvalidFunction(f"cannot build a rational function from {spec!r}")


def evaluate(f, z):
    return f(z)


def combine(f, g, op):
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown operation {op!r}")


def reflect_sharp(f):
    return f.sharp()


def _check_off_circle(f, what="pole"):
    for b, _ in f.poles:
        if classify(b) is Region.ON_CIRCLE:
            raise PoleOnCircle(f"{what} at {b} lies on the unit circle")


def principal_part_fun(f, lam):
    """The principal part of f at a finite point as a RatFun."""
    c = f.principal_part(lam)
    if len(c) == 0:
        return RatFun.zero()
    m = len(c)
    num = np.zeros(1, dtype=complex)
    for j in range(1, m + 1):
        num = np.polyadd(num, c[j - 1] * _poly_from_roots([(lam, m - j)]))
    scale = float(np.abs(c).max())
    return _finish(num, [(lam, m)], scale)


def riesz_split(f):
    """(P_minus f, P_plus f): principal parts inside the disk, and the rest."""
    if f.is_zero:
        return RatFun.zero(), RatFun.zero()
    _check_off_circle(f)
    inner = [(b, m) for b, m in f.poles if abs(b) < 1]
    if not inner:
        return RatFun.zero(), f
    num = np.zeros(1, dtype=complex)
    scale = 0.0
    for lam, m in inner:
        c = f.principal_part(lam)
        scale = max(scale, float(np.abs(c).max()))
        part = np.zeros(1, dtype=complex)
        for j in range(1, m + 1):
            part = np.polyadd(part, c[j - 1] * _poly_from_roots([(lam, m - j)]))
        others = [(q, k) for q, k in inner if q != lam]
        num = np.polyadd(num, np.convolve(part, _poly_from_roots(others)))
    fminus = _finish(num, inner, scale)
    if fminus.is_zero:
        return fminus, f
    fplus = _add(f, fminus, -1, forced=[b for b, _ in inner])
    return fminus, fplus


def degree_at(f, lam):
    return f.pole_order(lam)


def _region_points(f, region):
    if isinstance(region, Region):
        region = region.value
    if isinstance(region, str):
        _check_off_circle(f)
        pts = [b for b, _ in f.poles]
        if region == "inside":
            return [p for p in pts if abs(p) < 1]
        if region == "outside":
            return [p for p in pts if abs(p) > 1] + [INF]
        if region == "all":
            return pts + [INF]
        raise ValueError(f"unknown region {region!r}")
    return list(region)


def degree_region(f, region):
    return sum(f.pole_order(p) for p in _region_points(f, region))


def winding_number(f, n=1024):
    """Zeros minus poles inside the disk, confirmed by the argument increment."""
    if f.is_zero:
        raise OnCircleSingularity("the zero function has no winding number")
    for a, _ in f.zeros + f.poles:
        if classify(a) is Region.ON_CIRCLE:
            raise OnCircleSingularity(f"zero/pole at {a} lies on the unit circle")
    count = (sum(m for a, m in f.zeros if abs(a) < 1)
             - sum(m for b, m in f.poles if abs(b) < 1))
    for grid_n in (n, 16 * n):
        vals = f(circle_grid(grid_n))
        steps = np.angle(np.roll(vals, -1) / vals)
        numeric = int(round(float(steps.sum()) / (2 * np.pi)))
        if numeric == count:
            return count
    raise NumericalFailure(f"root count {count} disagrees with argument increment {numeric}")


@dataclass(frozen=True)
class BadApproxCertificate:
    value: bool
    deg_plus: int
    deg_minus: int
    modulus: float
    ratio: float

    def __bool__(self):
        return self.value


def is_badly_approximable(f, n=256):
    if f.is_zero:
        return BadApproxCertificate(False, 0, 0, 0.0, INF)
    mod = np.abs(f(circle_grid(n)))
    ratio = float(mod.max() / mod.min()) if mod.min() > 0 else INF
    dp = degree_region(f, "outside")
    dm = degree_region(f, "inside")
    ok = ratio <= 1 + 1e-9 and dp < dm
    return BadApproxCertificate(ok, dp, dm, float(mod.mean()), ratio)


def blaschke(zeros, c=1.0):
    """c * prod (lam - z) / (1 - conj(lam) z)."""
    c = complex(c)
    if abs(abs(c) - 1) > 1e-12:
        raise InvalidBlaschkeZero(f"constant {c} is not unimodular")
    gain = c
    zs, ps = [], []
    for lam in zeros:
        lam = complex(lam)
        if abs(lam) >= 1 - EPS_CIRCLE:
            raise InvalidBlaschkeZero(f"zero {lam} not in the open disk")
        zs.append((lam, 1))
        if lam == 0:
            gain *= -1
        else:
            gain *= 1.0 / np.conj(lam)
            ps.append((1.0 / np.conj(lam), 1))
    return RatFun(gain, zs, ps)


def spectral_factor(s, n=256):
    """Outer h with |h|^2 = s on the circle and h(0) > 0."""
    zeta = circle_grid(n)
    vals = s(zeta)
    scale = float(np.abs(vals).max())
    if scale == 0:
        raise NotPositive("s vanishes identically")
    if float(np.abs(vals.imag).max()) > 1e-8 * scale:
        raise NotSelfReflective("s is not real on the circle")
    if float(vals.real.min()) <= 1e-12 * scale:
        raise NotPositive("s is not strictly positive on the circle")
    for a, _ in s.zeros + s.poles:
        if classify(a) is Region.ON_CIRCLE:
            raise NotPositive(f"s has a zero or pole at {a} on the circle")
    zeros = [(1.0 / np.conj(a), m) for a, m in s.zeros if 0 < abs(a) < 1]
    poles = [(1.0 / np.conj(b), m) for b, m in s.poles if 0 < abs(b) < 1]
    nin_z = sum(m for a, m in s.zeros if abs(a) < 1)
    nout_z = sum(m for a, m in s.zeros if abs(a) > 1) + max(0, s.order_at_inf)
    nin_p = sum(m for b, m in s.poles if abs(b) < 1)
    nout_p = sum(m for b, m in s.poles if abs(b) > 1) + max(0, -s.order_at_inf)
    if nin_z != nout_z or nin_p != nout_p:
        raise NotSelfReflective("zeros/poles of s are not symmetric under reflection")
    h0 = RatFun(1.0, zeros, poles)
    c = float(np.mean(vals.real / np.abs(h0(zeta)) ** 2))
    h = h0.scale_gain(math.sqrt(c))
    at0 = h(0.0)
    h = h.scale_gain(abs(at0) / at0)
    resid = float(np.abs(np.abs(h(zeta)) ** 2 - vals.real).max())
    if resid > 1e-9 * scale:
        raise NumericalFailure(f"spectral factor residual {resid:.3g}")
    return h
