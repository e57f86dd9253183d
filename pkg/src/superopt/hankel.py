"""Hankel operators with rational symbols.

The block-Hankel array H with block (i, j) = coefficient of z^-(i+j-1) is
built from closed-form Markov coefficients.  Its rank gives the disk McMillan
degree.  Singular values and Schmidt vectors are taken from a Jordan-block
state-space realization of the antianalytic part (Gramian square roots), which
is exact for finite rank; a truncated H only approximates them when a disk
pole sits close to the circle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.linalg import solve_discrete_lyapunov

from .errors import NonUnitarySymbol, NumericalFailure, PoleOnCircle, TruncationTooSmall
from .ratfun import RatFun, _poly_roots, riesz_split, winding_number
from .ratmat import RatMat, block_hankel, numerical_rank, pole_clusters, principal_data
from .tolerances import EPS_CIRCLE, EPS_HANKEL_RANK, EPS_RANK, GRID_SIZE, circle_grid

N_CAP = 512
FFT_NODES = 4096
SHIFT_BAND = 1e-6


def _as_mat(A):
    return A if isinstance(A, RatMat) else RatMat([[A]])


def _disk_poles(f):
    out = []
    for b, m in f.poles:
        if abs(abs(b) - 1) <= EPS_CIRCLE:
            raise PoleOnCircle(f"pole at {b} lies on the unit circle")
        if abs(b) < 1:
            out.append((b, m))
    return out


def markov_coeffs(A, N):
    """Coefficients of z^-1 ... z^-N as an (N, m, n) array, in closed form."""
    A = _as_mat(A)
    m, n = A.shape
    out = np.zeros((N, m, n), dtype=complex)
    idx = np.arange(1, N + 1)
    for a in range(m):
        for b in range(n):
            f = A[a, b]
            for lam, mult in _disk_poles(f):
                c = f.principal_part(lam)
                for i in range(1, mult + 1):
                    if c[i - 1] == 0:
                        continue
                    binom = np.array([comb(k - 1, i - 1) for k in idx], dtype=float)
                    if lam == 0:
                        pw = (idx == i).astype(complex)
                    else:
                        pw = np.where(idx >= i, lam ** np.maximum(idx - i, 0), 0)
                    out[:, a, b] += c[i - 1] * binom * pw
    return out


def markov_fft(A, N, nodes=FFT_NODES):
    """Same coefficients from a discrete circle transform (independent route)."""
    A = _as_mat(A)
    zeta = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = A(zeta)
    return np.array([(vals * (zeta ** j)[:, None, None]).mean(axis=0) for j in range(1, N + 1)])


def _scale(A, grid=GRID_SIZE):
    vals = A(circle_grid(grid))
    return float(np.linalg.norm(vals, ord=2, axis=(-2, -1)).max())


# -- exact realization --------------------------------------------------------

@dataclass
class Realization:
    """x_{k+1} = F x_k + G u, y = H x; Markov coefficient j equals H F^(j-1) G."""
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    clusters: list  # (center, order) over disk poles


def _nilpotent_realization(D, scale):
    """Minimal (F, G, H) with H F^(j-1) G = D[j-1] and F nilpotent (Kung's method).

    The sequence is finite, so one zero block appended to the Hankel array
    makes the shift equation exact.
    """
    m = len(D)
    p, q = D[0].shape
    Hk = block_hankel(list(D) + [np.zeros_like(D[0])], m + 1)
    U, s, Vh = np.linalg.svd(Hk)
    d = int(np.sum(s > EPS_RANK * max(s[0], scale)))
    if d == 0:
        return None
    root = np.sqrt(s[:d])
    O = U[:, :d] * root
    R = root[:, None] * Vh[:d]
    F = np.linalg.pinv(O[:m * p]) @ O[p:]
    return F, R[:, :q], O[:p]


def disk_realization(A):
    """Minimal realization of the antianalytic part, one block per disk pole cluster."""
    A = _as_mat(A)
    m, n = A.shape
    for f in A:
        _disk_poles(f)  # raises on circle poles
    blocks, clusters = [], []
    for c in pole_clusters(A):
        if abs(c.center) >= 1:
            continue
        order, r, (D,), (scale,), center = principal_data([A], c.center)
        if order == 0:
            continue
        real = _nilpotent_realization(D, scale)
        if real is None:
            continue
        Fh, Gh, Hh = real
        d = Fh.shape[0]
        blocks.append((center * np.eye(d) + r * Fh, r * Gh, Hh))
        clusters.append((center, order))
    d = sum(Fb.shape[0] for Fb, _, _ in blocks)
    F = np.zeros((d, d), dtype=complex)
    G = np.zeros((d, n), dtype=complex)
    H = np.zeros((m, d), dtype=complex)
    k = 0
    for Fb, Gb, Hb in blocks:
        s_ = Fb.shape[0]
        F[k:k + s_, k:k + s_] = Fb
        G[k:k + s_] = Gb
        H[:, k:k + s_] = Hb
        k += s_
    return Realization(F, G, H, clusters)


def _psd_sqrt(W):
    W = (W + W.conj().T) / 2
    vals, vecs = np.linalg.eigh(W)
    vals = np.clip(vals, 0, None)
    return vecs * np.sqrt(vals)


@dataclass
class SingularSystem:
    values: np.ndarray
    realization: Realization
    right_states: np.ndarray  # column k: y with x_k(z) = G^* (I - z F^*)^-1 y


def singular_system(A):
    """Exact Hankel singular values and right Schmidt-vector states."""
    R = disk_realization(A)
    d = R.F.shape[0]
    if d == 0:
        return SingularSystem(np.zeros(0), R, np.zeros((0, 0), dtype=complex))
    Wc = solve_discrete_lyapunov(R.F, R.G @ R.G.conj().T)
    Wo = solve_discrete_lyapunov(R.F.conj().T, R.H.conj().T @ R.H)
    Lc = _psd_sqrt(Wc)
    Lo = _psd_sqrt(Wo)
    U, s, Vh = np.linalg.svd(Lo.conj().T @ Lc)
    # Right singular vector k of the Hankel operator is R^* pinv(Lc^*) v_k.
    Y = np.linalg.pinv(Lc.conj().T, rcond=1e-13) @ Vh.conj().T
    return SingularSystem(s, R, Y)


def right_vector_series(system, k, length):
    """Taylor coefficients (length, n) of the k-th right Schmidt vector."""
    F, G = system.realization.F, system.realization.G
    y = system.right_states[:, k].copy()
    Fs = F.conj().T
    out = np.zeros((length, G.shape[1]), dtype=complex)
    for j in range(length):
        out[j] = G.conj().T @ y
        y = Fs @ y
    return out


def _common_denominator(clusters):
    """Ascending coefficients of prod (1 - conj(lam) z)^m and its RatFun."""
    D = np.ones(1, dtype=complex)
    poles, gain = [], 1.0 + 0j
    for lam, m in clusters:
        for _ in range(m):
            D = np.convolve(D, [1.0, -np.conj(lam)])
        if abs(lam) > 0:
            poles.append((1 / np.conj(lam), m))
            gain *= (-np.conj(lam)) ** m
    return D, poles, gain


def right_vector_rational(system, k=0, tail_tol=1e-9):
    """The k-th right Schmidt vector as a list of RatFun (one per column).

    Each component is p(z) / prod (1 - conj(lam) z)^m with deg p below the
    total order; the series tail past that degree must vanish.
    """
    D, poles, gain = _common_denominator(system.realization.clusters)
    deg = len(D) - 1
    series = right_vector_series(system, k, deg + 8)
    out = []
    for col in series.T:
        prod = np.convolve(col, D)[:deg + 8]
        p, tail = prod[:max(deg, 1)], prod[max(deg, 1):]
        ref = max(np.abs(p).max(), 1e-300)
        if np.abs(tail).max() > tail_tol * ref:
            raise NumericalFailure(
                f"Schmidt vector is not rational of the expected order (tail {np.abs(tail).max():.2e})")
        if np.abs(p).max() <= 1e-14 * ref:
            out.append(RatFun.zero())
            continue
        # roundoff in a cancelled top coefficient would become a root near infinity
        top = len(p)
        while top > 1 and abs(p[top - 1]) <= 1e-12 * ref:
            top -= 1
        p = p[:top]
        if len(p) == 0:
            out.append(RatFun.zero())
            continue
        zeros = _poly_roots(p[::-1])
        out.append(RatFun(p[-1] / gain, zeros, poles))
    return out


# -- block Hankel ---------------------------------------------------------------

@dataclass
class HankelData:
    symbol: RatMat
    N: int
    markov: np.ndarray
    matrix: np.ndarray
    rank: int
    singular_values: np.ndarray
    scale: float
    system: SingularSystem = field(repr=False, default=None)

    @property
    def sigma0(self):
        return float(self.singular_values[0]) if len(self.singular_values) else 0.0

    def truncated_singular_values(self):
        return np.linalg.svd(self.matrix, compute_uv=False)


def _degree_bound(A):
    return sum(m for f in A for _, m in _disk_poles(f))


def _rank_at(A, N, scale):
    M = markov_coeffs(A, 2 * N + 1)
    H1 = block_hankel(list(M[:2 * N - 1]), N)
    H2 = block_hankel(list(M[:2 * N + 1]), N + 1)
    r1, _ = numerical_rank(H1, scale, EPS_HANKEL_RANK)
    r2, _ = numerical_rank(H2, scale, EPS_HANKEL_RANK)
    return r1, r2, M[:2 * N - 1], H1


def converged_size(A, tol=1e-13):
    """Section size whose neglected tail is below ``tol`` relative to the symbol.

    Rank is stationary from deg + 1 on, but the section's singular values only
    converge like r^N for the outermost disk pole radius r.
    """
    r = max((abs(b) for f in A for b, _ in _disk_poles(f)), default=0.0)
    if r < 1e-3:
        return _degree_bound(A) + 4
    return min(N_CAP, max(_degree_bound(A) + 4, int(np.ceil(np.log(tol) / np.log(r)))))


def build_hankel(A, N=None, with_system=True):
    """Hankel data of A.  With an explicit N the stored section has that size;
    otherwise the rank is decided on a small stationary section and, when
    ``with_system`` is set, the stored section is sized by ``converged_size``.
    """
    A = _as_mat(A)
    scale = _scale(A)
    bound = _degree_bound(A)
    explicit = N is not None
    N = N or bound + 4
    while True:
        r1, r2, M, H = _rank_at(A, N, scale)
        if r1 == r2:
            break
        if 2 * N > N_CAP:
            raise TruncationTooSmall(f"rank not stationary at N = {N} ({r1} vs {r2})")
        N *= 2
    system = singular_system(A) if with_system else None
    if with_system and not explicit and converged_size(A) > N:
        N = converged_size(A)
        M = markov_coeffs(A, 2 * N - 1)
        H = block_hankel(list(M), N)
    s = system.values if with_system else np.linalg.svd(H, compute_uv=False)
    return HankelData(A, N, M, H, r1, s, scale, system)


def rank_degree(A, region="inside"):
    """McMillan degree from Hankel ranks: disk part, or exterior via A(1/z)."""
    A = _as_mat(A)
    if region == "inside":
        return build_hankel(A, with_system=False).rank
    if region == "outside":
        return build_hankel(A.flat(), with_system=False).rank
    if region == "all":
        return rank_degree(A, "inside") + rank_degree(A, "outside")
    raise ValueError(f"unknown region {region!r}")


def hankel_norm(A):
    A = _as_mat(A)
    return float(singular_system(A).values[0]) if _degree_bound(A) else 0.0


def power_norm(H, iters=500, seed=0):
    """Power-iteration estimate of the spectral norm of a finite matrix."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(H.shape[1]) + 1j * rng.standard_normal(H.shape[1])
    s = 0.0
    for _ in range(iters):
        y = H.conj().T @ (H @ x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = y / ny
        s_new = np.sqrt(ny)
        if abs(s_new - s) <= 1e-15 * s_new:
            break
        s = s_new
    return float(np.linalg.norm(H @ x))


# -- scalar AAK -----------------------------------------------------------------

@dataclass
class AAKResult:
    best: RatFun
    sigma0: float
    error: RatFun
    degenerate: bool
    mismatch: float = 0.0
    choice_spread: float = 0.0  # best approximants from two top vectors, when degenerate

    def __iter__(self):
        yield self.best
        yield self.sigma0


def aak_scalar(phi):
    """Best analytic approximant of a scalar rational function.

    Returns an AAKResult; ``best, sigma0 = aak_scalar(phi)`` also works.
    """
    phi = phi if isinstance(phi, RatFun) else RatFun(phi)
    minus, plus = riesz_split(phi)
    if minus.is_zero:
        return AAKResult(phi, 0.0, RatFun.zero(), False)
    system = singular_system(RatMat([[minus]]))
    s = system.values
    degenerate = len(s) > 1 and s[1] > s[0] * (1 - 1e-8)
    best, mismatch = _best_from_vector(minus, plus, system, 0)
    spread = 0.0
    if degenerate:
        # any vector of the top singular space must give the same approximant
        other, _ = _best_from_vector(minus, plus, system, 1)
        spread = _sup_diff(best, other)
    return AAKResult(best, float(s[0]), phi - best, bool(degenerate), mismatch, spread)


def _best_from_vector(minus, plus, system, k):
    xi = right_vector_rational(system, k)[0]
    e = riesz_split(minus * xi)[0] / xi
    e_minus, e_plus = riesz_split(e)
    return plus - e_plus, _sup_diff(e_minus, minus)


def _sup_diff(f, g, n=GRID_SIZE):
    zeta = circle_grid(n)
    return float(np.abs(f(zeta) - g(zeta)).max())


def flatness(f, n=GRID_SIZE):
    """(max - min) / max of |f| on the grid."""
    a = np.abs(f(circle_grid(n)))
    return float((a.max() - a.min()) / a.max()) if a.max() > 0 else 0.0


def aak_certificate(phi, result=None, n=GRID_SIZE):
    r = result or aak_scalar(phi)
    return {
        "sigma0": r.sigma0,
        "flatness": flatness(r.error, n) if not r.error.is_zero else 0.0,
        "winding": winding_number(r.error) if not r.error.is_zero else 0,
        "degree_best": r.best.degree,
        "degenerate": r.degenerate,
        "choice_spread": r.choice_spread,
    }


# -- singular value shift law -----------------------------------------------------

@dataclass
class SingularShiftData:
    mu: int
    sU: np.ndarray
    sUstar: np.ndarray
    table: list  # (j, s_j(H_{U*}), s_{j+mu}(H_U))

    @property
    def max_error(self):
        return max((abs(a - b) for _, a, b in self.table), default=0.0)


def singular_shift_check(U, n=GRID_SIZE):
    U = _as_mat(U)
    vals = U(circle_grid(n))
    eye = np.eye(U.shape[1])
    if np.abs(np.conj(np.swapaxes(vals, -1, -2)) @ vals - eye).max() > 1e-8:
        raise NonUnitarySymbol("symbol is not unitary on the circle")
    sU = np.sort(singular_system(U).values)[::-1] if _degree_bound(U) else np.zeros(0)
    Us = U.star()
    sUs = np.sort(singular_system(Us).values)[::-1] if _degree_bound(Us) else np.zeros(0)
    mu = int(np.sum(np.abs(sU - 1) <= SHIFT_BAND))
    L = max(len(sUs), len(sU) - mu)
    pa = np.concatenate([sUs, np.zeros(max(0, L - len(sUs)))])
    pb = np.concatenate([sU, np.zeros(max(0, L + mu - len(sU)))])
    table = [(j, float(pa[j]), float(pb[j + mu])) for j in range(L)]
    return SingularShiftData(mu, sU, sUs, table)
