"""Singular kernels on (0,1)^2, their Nystrom discretizations, norms and closed-form bounds.

All quadrature goes through one graded rule: a Gauss-Jacobi panel absorbs the
endpoint power v^e on [0, scale], then dyadic Gauss-Legendre panels
[scale 2^j, scale 2^(j+1)] cover the rest, so integrands that are smooth only
relative to their distance from an endpoint still converge geometrically.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import gamma, gammaln, roots_jacobi, roots_legendre

from .spectra import DEFAULT_SEED, lambda_max_matrix, operator_norm_matrix

__all__ = [
    "KernelDomainError",
    "NystromKernel",
    "StarKernel",
    "KernelBounds",
    "eval_G_alpha",
    "eval_h_alpha",
    "h_alpha_parts",
    "singularity_constant",
    "nystrom_G",
    "nystrom_from_function",
    "operator_norm_nystrom",
    "richardson_inverse_norm",
    "extrapolated_inverse_norm",
    "extrapolated_product_inverse_norm",
    "iterated_trace_norm",
    "star_product",
    "closed_form_bounds",
    "product_bounds",
]

QUAD_NODES = 32
_CHUNK = 16384


class KernelDomainError(ValueError):
    pass


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TOEPLITZ_FH_THREADS", "1")))
    except ValueError:
        return 1


@lru_cache(maxsize=None)
def _jacobi_rule(e: float, n: int = QUAD_NODES):
    # weight (1 + u)^e on [-1, 1]
    return roots_jacobi(n, 0.0, e)


@lru_cache(maxsize=None)
def _legendre_rule(n: int = QUAD_NODES):
    return roots_legendre(n)


def _graded(f, e: float, scale: np.ndarray, length: np.ndarray) -> np.ndarray:
    """Row-wise integral of v^e f(v, i) over [0, length_i].

    ``f(v, rows)`` receives a 2-D array of abscissae (one row per point) and
    must be smooth on (0, length] at resolution ``scale`` near 0.
    """
    scale = np.asarray(scale, float)
    length = np.asarray(length, float)
    out = np.zeros(length.shape)
    uj, wj = _jacobi_rule(float(e))
    ul, wl = _legendre_rule()
    b = np.minimum(scale, length)[:, None]
    v = b * (1.0 + uj) / 2.0
    out += ((b[:, 0] / 2.0) ** (e + 1.0)) * (f(v) @ wj)
    ratio = np.max(length / scale) if length.size else 0.0
    panels = int(np.ceil(np.log2(ratio))) if ratio > 1 else 0
    for j in range(panels):
        a0 = np.minimum(scale * 2.0 ** j, length)
        a1 = np.minimum(scale * 2.0 ** (j + 1), length)
        live = a1 > a0
        if not np.any(live):
            break
        h = ((a1 - a0) / 2.0)[live][:, None]
        v = a0[live][:, None] + h * (1.0 + ul)
        sub = _Rows(f, live)
        out[live] += h[:, 0] * ((v ** e * sub(v)) @ wl)
    return out


class _Rows:
    """Restrict a row-indexed integrand to a subset of rows."""

    def __init__(self, f, mask):
        self.f = f
        self.mask = mask

    def __call__(self, v):
        return self.f(v, self.mask)


def _with_rows(fn):
    # integrands are written as fn(v, mask); the Jacobi panel passes all rows
    def f(v, mask=None):
        return fn(v, slice(None) if mask is None else mask)
    return f


def _check_alpha(alpha: float, upper_open: bool = False):
    if not (0.0 < alpha < 0.5 or (alpha == 0.5 and not upper_open)):
        bound = "(0, 1/2)" if upper_open else "(0, 1/2]"
        raise KernelDomainError(f"alpha must lie in {bound}, got {alpha}")


def _G_offdiag(alpha: float, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """G_alpha at points with 0 <= lo < hi <= 1 (vectorized, no checks)."""
    out = np.zeros(lo.shape)
    ok = (lo > 0) & (hi < 1)
    if not np.any(ok):
        return out
    lo, hi = lo[ok], hi[ok]
    d = hi - lo
    a = alpha

    # t = hi + d v: integral = d^(2a-1) int_0^R v^(a-1) (1+v)^(a-1) (hi + d v)^(-2a) dv
    @_with_rows
    def f(v, rows):
        return (1.0 + v) ** (a - 1.0) * (hi[rows][:, None] + d[rows][:, None] * v) ** (-2.0 * a)

    integral = _graded(f, a - 1.0, np.ones_like(d), (1.0 - hi) / d)
    log_pref = (2 * a - 1) * np.log(d) + a * (np.log(lo) + np.log(hi)) - 2 * gammaln(a)
    out[ok] = np.exp(log_pref) * integral
    return out


def _chunked(fn, lo, hi):
    n = lo.size
    if n <= _CHUNK:
        return fn(lo, hi)
    starts = range(0, n, _CHUNK)
    parts = [(lo[s:s + _CHUNK], hi[s:s + _CHUNK]) for s in starts]
    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            res = list(ex.map(lambda p: fn(*p), parts))
    else:
        res = [fn(*p) for p in parts]
    return np.concatenate(res)


def _prepare(x, y, name):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    x, y = np.broadcast_arrays(x, y)
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise KernelDomainError(f"{name}: non-finite argument")
    return x, y


def eval_G_alpha(alpha: float, x, y):
    """G_alpha(x, y) = x^a y^a / Gamma(a)^2 * int_max^1 (t-x)^(a-1) (t-y)^(a-1) t^(-2a) dt.

    Accepts scalars or broadcastable arrays.  The diagonal is excluded except
    at the origin, where the value is 0; points with min(x, y) = 0 or
    max(x, y) = 1 evaluate to 0.
    """
    _check_alpha(alpha)
    x, y = _prepare(x, y, "G_alpha")
    shape = x.shape
    x, y = np.atleast_1d(x).ravel(), np.atleast_1d(y).ravel()
    if np.any((x < 0) | (x > 1) | (y < 0) | (y > 1)):
        raise KernelDomainError("G_alpha is defined on [0, 1]^2")
    diag = x == y
    if np.any(diag & (x != 0)):
        raise KernelDomainError("G_alpha is not evaluated on the diagonal")
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    out = np.zeros(x.shape)
    off = ~diag
    out[off] = _chunked(lambda a, b: _G_offdiag(alpha, a, b), lo[off], hi[off])
    return float(out[0]) if shape == () else out.reshape(shape)


def singularity_constant(alpha: float) -> float:
    """C_alpha = Gamma(1-2a) / (Gamma(a) Gamma(1-a)); G_alpha ~ C_alpha |x-y|^(2a-1) near the diagonal."""
    _check_alpha(alpha)
    if alpha == 0.5:
        return math.inf
    return math.exp(gammaln(1 - 2 * alpha) - gammaln(alpha) - gammaln(1 - alpha))


def _log1pm(t, a):
    # (1 - t)^a - 1 without cancellation for small t
    return np.expm1(a * np.log1p(-t))


def _h_parts(alpha: float, lo: np.ndarray, hi: np.ndarray):
    a = alpha
    m = lo
    d = hi - lo
    col = lambda arr, rows: arr[rows][:, None]

    # h1: u = m / t maps [m, inf) onto (0, 1]
    @_with_rows
    def f1(u, rows):
        return (1.0 + col(d, rows) * u / col(m, rows)) ** (a - 1.0)

    h1 = m ** (2 * a - 1) * _graded(f1, -2.0 * a, m / d, np.ones_like(m))

    # h2, first integral: split at m/2, graded from both ends
    def g2a(t, rows):
        return (col(d, rows) + t) ** (a - 1.0) * _log1pm(t, a)

    half = m / 2.0
    near = _graded(_with_rows(g2a), a - 1.0, d, half)

    @_with_rows
    def far_a(s, rows):
        t = col(m, rows) - s
        return t ** (a - 1.0) * g2a(t, rows)

    h2a = near + _graded(far_a, 0.0, 1.0 - m, half)

    # h2, second integral: t^a weight at 0, (1 - t - d)^(a-1) blows up at t = 1 - hi
    def g2b(t, rows):
        dd = col(d, rows)
        return (1.0 - t) ** (a - 1.0) * (1.0 - t - dd) ** (a - 1.0) * (dd + t) ** a

    near = _graded(_with_rows(g2b), a, d, half)

    @_with_rows
    def far_b(s, rows):
        t = col(m, rows) - s
        return t ** a * g2b(t, rows)

    h2b = near + _graded(far_b, 0.0, 1.0 - hi, half)
    return h1, h2a, h2b


def h_alpha_parts(alpha: float, x, y):
    """(h1, first h2 integral, second h2 integral) at (x, y), ordered so that x < y."""
    _check_alpha(alpha, upper_open=True)
    x, y = _prepare(x, y, "h_alpha")
    shape = x.shape
    x, y = np.atleast_1d(x).ravel(), np.atleast_1d(y).ravel()
    if np.any((x <= 0) | (x >= 1) | (y <= 0) | (y >= 1)):
        raise KernelDomainError("h_alpha is defined on the open square (0, 1)^2")
    if np.any(x == y):
        raise KernelDomainError("h_alpha is not evaluated on the diagonal")
    parts = _h_parts(alpha, np.minimum(x, y), np.maximum(x, y))
    if shape == ():
        return tuple(float(p[0]) for p in parts)
    return tuple(p.reshape(shape) for p in parts)


def eval_h_alpha(alpha: float, x, y):
    """h_alpha = h1 + h2, the correction kernel of the inverse.

    The defining integrals are written for x < y; the kernel is extended
    symmetrically, h(x, y) = h(min, max).
    """
    parts = h_alpha_parts(alpha, x, y)
    if isinstance(parts[0], float):
        return sum(parts)
    return parts[0] + parts[1] + parts[2]


@dataclass(frozen=True)
class NystromKernel:
    """Samples k(i/M, j/M), i, j = 0..M-1, with zero diagonal; the operator is entries * scale."""

    size: int
    scale: float
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        E = np.asarray(self.entries, dtype=float)
        if E.shape != (self.size, self.size):
            raise ValueError("entries must be size x size")
        if np.any(np.diag(E) != 0):
            raise ValueError("Nystrom kernel diagonal must be zero")
        if not np.array_equal(E, E.T):
            raise ValueError("Nystrom kernel must be symmetric")
        if np.any(E < 0):
            raise ValueError("Nystrom kernel entries must be non-negative")
        E = E.copy()
        E.setflags(write=False)
        object.__setattr__(self, "entries", E)

    @property
    def operator(self) -> np.ndarray:
        return self.entries * self.scale


@dataclass(frozen=True)
class StarKernel:
    """Discrete composition of two kernels; neither symmetric nor zero on the diagonal."""

    size: int
    scale: float
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        E = np.array(self.entries, dtype=float)
        E.setflags(write=False)
        object.__setattr__(self, "entries", E)

    @property
    def operator(self) -> np.ndarray:
        return self.entries * self.scale


@lru_cache(maxsize=16)
def _G_grid(alpha: float, M: int) -> np.ndarray:
    g = np.arange(M) / M
    i, j = np.triu_indices(M, 1)
    K = np.zeros((M, M))
    K[i, j] = _chunked(lambda a, b: _G_offdiag(alpha, a, b), g[i], g[j])
    K = K + K.T
    K.setflags(write=False)
    return K


def nystrom_G(alpha: float, M: int, c1_at_1: float = 1.0) -> NystromKernel:
    """G_alpha(i/M, j/M) / c1(1) on the M-point grid, zero diagonal."""
    _check_alpha(alpha)
    if M < 16:
        raise ValueError("Nystrom grid needs M >= 16")
    if not c1_at_1 > 0:
        raise ValueError("c1(1) must be positive")
    return NystromKernel(M, 1.0 / M, _G_grid(float(alpha), int(M)) / c1_at_1)


def nystrom_from_function(kernel, M: int) -> NystromKernel:
    """Nystrom samples of any vectorized symmetric non-negative kernel k(x, y)."""
    g = np.arange(M) / M
    E = np.array(kernel(g[:, None], g[None, :]), dtype=float) * np.ones((M, M))
    np.fill_diagonal(E, 0.0)
    return NystromKernel(M, 1.0 / M, E)


def operator_norm_nystrom(kernel, tol: float = 1e-10, seed: int = DEFAULT_SEED) -> float:
    """||K~|| ~ (1/M) ||entries||; symmetric kernels use power iteration, compositions the Gram operator."""
    if isinstance(kernel, NystromKernel):
        return abs(lambda_max_matrix(kernel.entries, tol=tol, seed=seed).value) * kernel.scale
    return operator_norm_matrix(kernel.entries, tol=tol, seed=seed) * kernel.scale


def richardson_inverse_norm(norm_coarse: float, norm_fine: float, exponent: float, ratio: float = 2.0) -> float:
    """Eliminate a c * M^-exponent error term from 1/norm sampled at M/ratio and M."""
    r = ratio ** exponent
    return (r / norm_fine - 1.0 / norm_coarse) / (r - 1.0)


def extrapolated_inverse_norm(alpha: float, M: int, c1_at_1: float = 1.0) -> float:
    """||G~_alpha||^-1 from Nystrom grids M/2 and M with Richardson extrapolation.

    Zeroing the diagonal loses an O(M^(-2 alpha)) slice of the operator, which
    is the leading discretization error; the extrapolation removes it.
    """
    coarse = operator_norm_nystrom(nystrom_G(alpha, M // 2, c1_at_1))
    fine = operator_norm_nystrom(nystrom_G(alpha, M, c1_at_1))
    return richardson_inverse_norm(coarse, fine, 2.0 * alpha, M / (M // 2))


def extrapolated_product_inverse_norm(alpha1: float, alpha2: float, M: int,
                                      c1_at_1: float = 1.0, c2_at_1: float = 1.0) -> float:
    """||G~_a1 * G~_a2||^-1 on grids M/2 and M, extrapolated with exponent 2 min(a1, a2)."""
    def norm(m):
        return operator_norm_nystrom(star_product(nystrom_G(alpha1, m, c1_at_1), nystrom_G(alpha2, m, c2_at_1)))
    return richardson_inverse_norm(norm(M // 2), norm(M), 2.0 * min(alpha1, alpha2), M / (M // 2))


def iterated_trace_norm(kernel, s_max: int) -> np.ndarray:
    """t_s = (tr of the s-fold star power)^(1/s) for s = 2..s_max.

    The s-fold power is s kernel factors, t_s = (tr A^s)^(1/s) with A the
    grid-weighted operator, which tends to the largest eigenvalue from above.
    Products are renormalized at every step and the scale tracked as a
    logarithm, so large traces never overflow.
    """
    if s_max < 2:
        raise ValueError("s_max must be >= 2")
    A = kernel.operator
    P = A.copy()
    log_scale = 0.0
    out = []
    for s in range(2, s_max + 1):
        P = P @ A
        c = np.abs(P).max()
        if c == 0:
            out.extend([0.0] * (s_max - s + 1))
            break
        P /= c
        log_scale += math.log(c)
        tr = float(np.trace(P))
        out.append(math.exp((math.log(tr) + log_scale) / s) if tr > 0 else float("nan"))
    return np.array(out)


def star_product(a, b) -> StarKernel:
    """(a * b)(x, y) = int a(x, t) b(t, y) dt, discretized as entries_a @ entries_b / M."""
    if a.size != b.size:
        raise ValueError(f"star product needs equal grids, got {a.size} and {b.size}")
    return StarKernel(a.size, a.scale, (a.entries @ b.entries) * a.scale)


@dataclass(frozen=True)
class KernelBounds:
    """Closed-form constants around ||G~||^-1 (or the product constant).

    ``c_upper`` is the bound as printed; ``c_upper_reconstructed`` is the
    value obtained by redoing the Beta-integral step of its derivation.
    """

    alpha: tuple
    c_lower: float
    c_upper: float
    c_upper_reconstructed: float
    c_singularity: float
    h_duo: float | None = None
    h_bound: float | None = None

    @property
    def upper_discrepancy(self) -> float:
        return self.c_upper_reconstructed / self.c_upper


def _lower_single(alpha: float) -> float:
    if alpha == 0.5:
        return 0.0
    return math.exp(gammaln(1 + alpha) + gammaln(1 - alpha) - gammaln(1 - 2 * alpha))


def _inv_beta3(p: float) -> float:
    # 1 / int_0^1 (1-t)^2 t^p dt = Gamma(p+4) / (2 Gamma(p+1))
    return (p + 1) * (p + 2) * (p + 3) / 2.0


def closed_form_bounds(alpha: float) -> KernelBounds:
    """Sandwich constants for ||G~_alpha||^-1, C_alpha, and the h-kernel bound constant.

    lower = Gamma(1+a) Gamma(1-a) / Gamma(1-2a) (0 at a = 1/2);
    upper as printed = Gamma(a)^2 Gamma(2a+4) / (6 Gamma(1+2a));
    upper reconstructed = Gamma(2a+4) / (2 Gamma(2a+1)) = 1 / B(2a+1, 3).
    """
    _check_alpha(alpha)
    a = alpha
    upper = gamma(a) ** 2 * gamma(2 * a + 4) / (6.0 * gamma(1 + 2 * a))
    h_bound = None
    if a < 0.5:
        h_bound = 1 / a + 1 / (1 - 2 * a) + 2 / a + abs(beta_fn(a, a + 1) - 1 / a)
    return KernelBounds(
        alpha=(a,),
        c_lower=_lower_single(a),
        c_upper=float(upper),
        c_upper_reconstructed=_inv_beta3(2 * a),
        c_singularity=singularity_constant(a),
        h_bound=h_bound,
    )


def product_bounds(alpha1: float, alpha2: float) -> KernelBounds:
    """Interval for the product constant c_{a1,a2}.

    lower = L(a1) L(a2) min(a1, a2) / (a1 + a2) with L the single-kernel lower bound;
    upper (integral form) = prod over p in (a1+a2, 2a1, 2a2) of 1/int (1-t)^2 t^p, times Gamma(a1)^2 Gamma(a2)^2;
    the printed Gamma-ratio form carries 1/6^3 where the integrals give 1/2^3, a factor 27 apart.
    """
    for a in (alpha1, alpha2):
        _check_alpha(a)
    if alpha1 + alpha2 <= 0.5:
        raise KernelDomainError("product constant needs alpha1 + alpha2 > 1/2")
    a1, a2 = alpha1, alpha2
    lower = _lower_single(a1) * _lower_single(a2) * min(a1, a2) / (a1 + a2)
    g = gamma(a1) ** 2 * gamma(a2) ** 2
    integral_form = _inv_beta3(a1 + a2) * _inv_beta3(2 * a1) * _inv_beta3(2 * a2) * g
    ratio = lambda p: gamma(p + 4) / gamma(p + 1)
    printed = ratio(a1 + a2) * ratio(2 * a1) * ratio(2 * a2) * g / 6.0 ** 3
    return KernelBounds(
        alpha=(a1, a2),
        c_lower=lower,
        c_upper=float(printed),
        c_upper_reconstructed=float(integral_form),
        c_singularity=singularity_constant(min(a1, a2)) if min(a1, a2) < 0.5 else math.inf,
        h_duo=1 / a1 + 1 / a2,
    )
