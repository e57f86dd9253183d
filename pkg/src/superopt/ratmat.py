"""Rational matrix functions and their McMillan degrees.

Local degrees come from principal-part Laurent coefficients obtained by
trapezoid-rule contour integrals; the degree at a point is the rank of the
block-Hankel matrix built from those coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidUnitary, NumericalFailure, PoleOnCircle, ShapeError
from .ratfun import INF, RatFun, Region, blaschke, classify, riesz_split
from .tolerances import EPS_CIRCLE, EPS_RANK, ROOT_CLUSTER

J = np.array([[0.0, -1.0], [1.0, 0.0]])
CONTOUR_NODES = 256


def _as_ratfun(x):
    return x if isinstance(x, RatFun) else RatFun(x)


class RatMat:
    """An m x n grid of RatFun entries, immutable."""

    __slots__ = ("entries", "_cache")

    def __init__(self, entries):
        rows = tuple(tuple(_as_ratfun(x) for x in row) for row in entries)
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("ragged or empty entry grid")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("RatMat is immutable")

    def __reduce__(self):
        return (RatMat, (self.entries,))

    @classmethod
    def const(cls, M):
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        return cls([[RatFun(x) for x in row] for row in M])

    @classmethod
    def scalar(cls, f, n=1):
        return cls([[f if i == j else RatFun.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, fs):
        return cls([[f] for f in fs])

    @classmethod
    def row(cls, fs):
        return cls([list(fs)])

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __iter__(self):
        for row in self.entries:
            yield from row

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        m, n = self.shape
        out = np.empty(z.shape + (m, n), dtype=complex)
        for i in range(m):
            for j in range(n):
                out[..., i, j] = self.entries[i][j](z)
        return out

    def map(self, fn):
        return RatMat([[fn(x) for x in row] for row in self.entries])

    def __add__(self, other):
        return mat_ops(self, other, "add")

    def __sub__(self, other):
        return mat_ops(self, other, "sub")

    def __neg__(self):
        return self.map(lambda f: -f)

    def __matmul__(self, other):
        return mat_ops(self, other, "mul")

    def __mul__(self, c):
        if isinstance(c, RatMat):
            return NotImplemented
        c = _as_ratfun(c)
        return self.map(lambda f: f * c)

    __rmul__ = __mul__

    @property
    def T(self):
        m, n = self.shape
        return RatMat([[self.entries[i][j] for i in range(m)] for j in range(n)])

    def sharp(self):
        return self.map(lambda f: f.sharp())

    def star(self):
        return self.sharp().T

    def flat(self):
        return self.map(lambda f: f.flat())

    def adjugate(self):
        if self.shape != (2, 2):
            raise ShapeError("adjugate is implemented for 2x2 only")
        (a, b), (c, d) = self.entries
        return RatMat([[d, -b], [-c, a]])

    def det(self):
        m, n = self.shape
        if m != n:
            raise ShapeError("determinant of a non-square matrix")
        if m == 1:
            return self.entries[0][0]
        if m == 2:
            (a, b), (c, d) = self.entries
            return a * d - b * c
        total = RatFun.zero()
        for j in range(n):
            minor = RatMat([[self.entries[i][k] for k in range(n) if k != j]
                            for i in range(1, m)])
            term = self.entries[0][j] * minor.det()
            total = total + term if j % 2 == 0 else total - term
        return total

    def poles(self):
        """All finite (location, multiplicity) pairs over the entries."""
        return [p for f in self for p in f.poles]

    def pole_at_inf(self):
        return max((max(0, -f.order_at_inf) for f in self if not f.is_zero), default=0)

    def is_zero(self):
        return all(f.is_zero for f in self)

    def __repr__(self):
        return "RatMat(" + "; ".join(", ".join(map(repr, r)) for r in self.entries) + ")"


def mat_ops(A, B, op):
    if op in ("add", "sub"):
        if A.shape != B.shape:
            raise ShapeError(f"shapes {A.shape} and {B.shape} differ")
        m, n = A.shape
        fn = (lambda x, y: x + y) if op == "add" else (lambda x, y: x - y)
        return RatMat([[fn(A[i, j], B[i, j]) for j in range(n)] for i in range(m)])
    if op == "mul":
        (m, k), (k2, n) = A.shape, B.shape
        if k != k2:
            raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
        out = []
        for i in range(m):
            row = []
            for j in range(n):
                acc = RatFun.zero()
                for l in range(k):
                    prod = A[i, l] * B[l, j]
                    if not prod.is_zero:
                        acc = acc + prod
                row.append(acc)
            out.append(row)
        return RatMat(out)
    raise ValueError(f"unknown operation {op!r}")


def transpose(A):
    return A.T


def sharp(A):
    return A.sharp()


def star(A):
    return A.star()


def adjugate(A):
    return A.adjugate()


def determinant(A):
    return A.det()


def riesz_split_mat(A):
    minus, plus = [], []
    for row in A.entries:
        pairs = [riesz_split(f) for f in row]
        minus.append([p[0] for p in pairs])
        plus.append([p[1] for p in pairs])
    return RatMat(minus), RatMat(plus)


# -- local degrees ------------------------------------------------------------

@dataclass
class PoleCluster:
    center: complex
    members: list
    order: int


def pole_clusters(A, tol=ROOT_CLUSTER):
    """Group the finite poles of all entries; order = max entry multiplicity."""
    key = ("clusters", tol)
    if key not in A._cache:
        A._cache[key] = _pole_clusters(A, tol)
    return A._cache[key]


def _pole_clusters(A, tol):
    groups = []
    for f in A:
        for b, m in f.poles:
            for g in groups:
                if any(abs(b - q) <= tol * (1 + abs(q)) for q in g["pts"]):
                    g["pts"].append(b)
                    break
            else:
                groups.append({"pts": [b]})
    out = []
    for g in groups:
        pts = g["pts"]
        center = complex(np.mean(pts))
        order = max(sum(m for b, m in f.poles if _in_group(b, pts, tol)) for f in A)
        out.append(PoleCluster(center, pts, order))
    return out


def _in_group(b, pts, tol):
    return any(abs(b - q) <= tol * (1 + abs(q)) for q in pts)


def laurent_on_circle(func, center, radius, powers, nodes=CONTOUR_NODES):
    """Coefficients a_k of (z-center)^k for k in powers, via the trapezoid rule.

    func maps an array of points to an array of shape (K, ...).
    Returns (coeffs scaled by radius^k, sample values).
    """
    theta = 2 * np.pi * np.arange(nodes) / nodes
    vals = func(center + radius * np.exp(1j * theta))
    out = []
    for k in powers:
        w = np.exp(-1j * k * theta).reshape((nodes,) + (1,) * (vals.ndim - 1))
        out.append((vals * w).mean(axis=0))
    return np.array(out), vals


def block_hankel(coeffs, size=None):
    """size x size block-Hankel matrix, block (i, j) = coeffs[i + j], zero past the end."""
    size = len(coeffs) if size is None else size
    if size == 0 or len(coeffs) == 0:
        return np.zeros((0, 0), dtype=complex)
    p, q = coeffs[0].shape
    H = np.zeros((size * p, size * q), dtype=complex)
    for i in range(size):
        for j in range(min(size, len(coeffs) - i)):
            H[i * p:(i + 1) * p, j * q:(j + 1) * q] = coeffs[i + j]
    return H


def numerical_rank(H, scale=0.0, eps=EPS_RANK):
    if H.size == 0:
        return 0, np.zeros(0)
    s = np.linalg.svd(H, compute_uv=False)
    tol = eps * max(s[0] if len(s) else 0.0, scale)
    if tol == 0:
        return 0, s
    return int(np.sum(s > tol)), s


@dataclass
class LocalDegreeData:
    lam: complex
    principal_coefficients: list = field(default_factory=list)
    degree: int = 0
    radius: float = 0.0
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))


def contour_radius(center, others, spread=0.0):
    d = min((abs(o - center) for o in others), default=2.0 * (1 + abs(center)))
    r = 0.5 * d
    if spread >= 0.25 * r:
        raise NumericalFailure(
            f"pole cluster at {center} (spread {spread:.2g}) too close to another singularity")
    return r


def _cluster_for(clusters, lam):
    for c in clusters:
        if abs(c.center - lam) <= ROOT_CLUSTER * (1 + abs(lam)) or any(
                abs(q - lam) <= ROOT_CLUSTER * (1 + abs(lam)) for q in c.members):
            return c
    return None


def principal_data(mats, lam, nodes=CONTOUR_NODES):
    """Scaled principal coefficients of each matrix in ``mats`` at a finite lam.

    All matrices share one contour.  Returns (order, radius, [D_list per mat],
    [scale per mat]) where D_list[j-1] is the coefficient of (z-lam)^(-j)
    multiplied by radius^(-j).
    """
    clusters = []
    for A in mats:
        clusters.extend(pole_clusters(A))
    merged = _merge_clusters(clusters)
    here = _cluster_for(merged, lam)
    if here is None:
        return 0, 0.0, [[] for _ in mats], [0.0 for _ in mats], complex(lam)
    others = [q for c in merged if c is not here for q in c.members]
    spread = max(abs(q - here.center) for q in here.members)
    r = contour_radius(here.center, others, spread)
    order = here.order
    out, scales = [], []
    for A in mats:
        D, vals = laurent_on_circle(A, here.center, r, [-j for j in range(1, order + 1)], nodes)
        out.append(list(D))
        norms = np.linalg.norm(vals, ord=2, axis=(-2, -1))
        scales.append(float(norms.max()))
    return order, r, out, scales, here.center


def _merge_clusters(clusters):
    merged = []
    for c in clusters:
        for g in merged:
            if any(abs(a - b) <= ROOT_CLUSTER * (1 + abs(b)) for a in c.members for b in g.members):
                g.members.extend(c.members)
                g.order = max(g.order, c.order)
                g.center = complex(np.mean(g.members))
                break
        else:
            merged.append(PoleCluster(c.center, list(c.members), c.order))
    return merged


def local_degree(A, lam, nodes=CONTOUR_NODES):
    """McMillan degree of A at lam (finite or INF)."""
    if lam == INF:
        data = local_degree(A.flat(), 0j, nodes)
        data.lam = INF
        return data
    order, r, Ds, scales, center = principal_data([A], complex(lam), nodes)
    if order == 0:
        return LocalDegreeData(complex(lam))
    D = Ds[0]
    rank, s = numerical_rank(block_hankel(D), scales[0])
    coeffs = [D[j - 1] * r ** j for j in range(1, order + 1)]
    return LocalDegreeData(center, coeffs, rank, r, s)


def _region_points(A, region):
    if isinstance(region, Region):
        region = region.value
    clusters = pole_clusters(A)
    for c in clusters:
        if classify(c.center, EPS_CIRCLE) is Region.ON_CIRCLE:
            raise PoleOnCircle(f"pole at {c.center} lies on the unit circle")
    centers = [c.center for c in clusters]
    if isinstance(region, str):
        if region == "inside":
            return [c for c in centers if abs(c) < 1]
        if region == "outside":
            return [c for c in centers if abs(c) > 1] + [INF]
        if region == "all":
            return centers + [INF]
        raise ValueError(f"unknown region {region!r}")
    return list(region)


def mcmillan_degree(A, region="all"):
    """Sum of local degrees over the region ('inside', 'outside', 'all' or points)."""
    return sum(local_degree(A, lam).degree for lam in _region_points(A, region))


def local_degree_map(A, region="all"):
    return {lam: local_degree(A, lam).degree for lam in _region_points(A, region)}


# -- Blaschke-Potapov products ------------------------------------------------

@dataclass(frozen=True)
class PotapovFactor:
    lam: complex
    basis: np.ndarray  # orthonormal columns spanning the range of P

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.basis, dtype=complex))
        if Q.shape[0] == 1 and Q.shape[1] > 1:
            Q = Q.T
        Q, _ = np.linalg.qr(Q)
        object.__setattr__(self, "basis", Q)
        if abs(self.lam) >= 1 - EPS_CIRCLE:
            raise ValueError(f"Potapov zero {self.lam} not in the open disk")

    @property
    def projection(self):
        return self.basis @ self.basis.conj().T

    @property
    def rank(self):
        return self.basis.shape[1]


def potapov_product(factors, U=None):
    """B = U B_1 ... B_k with B_j = b_j P_j + (I - P_j); returns (B, degree)."""
    n = factors[0].basis.shape[0] if factors else np.atleast_2d(U).shape[0]
    U = np.eye(n) if U is None else np.asarray(U, dtype=complex)
    if np.abs(U.conj().T @ U - np.eye(n)).max() > 1e-12:
        raise InvalidUnitary("U is not unitary")
    B = RatMat.const(U)
    degree = 0
    for fac in factors:
        P = fac.projection
        b = blaschke([fac.lam])
        Bj = RatMat([[b * P[i, j] + (float(i == j) - P[i, j]) for j in range(n)]
                     for i in range(n)])
        B = B @ Bj
        degree += fac.rank
    return B, degree
