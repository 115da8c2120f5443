"""Hermitian Toeplitz systems: Levinson predictor, Gohberg-Semencul inverse, fast products."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .symbols import FourierTable

__all__ = [
    "LevinsonBreakdown",
    "ToeplitzSystem",
    "PredictorPoly",
    "build_toeplitz",
    "levinson_predictor",
    "orthogonal_poly",
    "gs_inverse_entry",
    "gs_inverse_matrix",
    "gs_inverse_block",
    "toeplitz_solve",
    "matvec",
    "lower_toeplitz_matvec",
    "shifted",
    "count_below",
]


class LevinsonBreakdown(ArithmeticError):
    """A prediction-error variance became non-positive."""

    def __init__(self, step: int, variance: float):
        self.step = step
        self.variance = variance
        super().__init__(f"Levinson recursion broke down at step {step} (error variance {variance:.3g})")


@dataclass(frozen=True)
class PredictorPoly:
    """P_N(z) = sum_u gamma[u] z^u, built from the first column of T_N^{-1}."""

    degree: int
    gamma: np.ndarray = field(repr=False)
    reflection: np.ndarray | None = field(default=None, repr=False)
    error_variance: float | None = None

    def __post_init__(self):
        g = np.asarray(self.gamma)
        if g.shape != (self.degree + 1,):
            raise ValueError("gamma must have degree + 1 entries")
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.gamma)

    def min_modulus_on_circle(self, samples: int | None = None) -> float:
        samples = samples or max(8 * self.degree, 64)
        z = np.exp(2j * np.pi * np.arange(samples) / samples)
        return float(np.abs(self(z)).min())


class ToeplitzSystem:
    """T_N(h) of order N (an (N+1) x (N+1) matrix) with entries h^(l - k).

    The predictor polynomial is computed on first use, under a lock, and
    cached; nothing else is mutable.
    """

    def __init__(self, table: FourierTable, order: int):
        if order < 0:
            raise ValueError("order must be non-negative")
        if table.half_width < order:
            raise ValueError(f"table half-width {table.half_width} is smaller than order {order}")
        self.order = order
        self.table = table
        self._row = np.array(table.nonnegative(order))  # h^(0..N): first row
        self._col = np.array(table.nonpositive(order))  # h^(0..-N): first column
        self._row.setflags(write=False)
        self._col.setflags(write=False)
        self._lock = threading.Lock()
        self._predictor: PredictorPoly | None = None

    def __repr__(self):
        return f"ToeplitzSystem(order={self.order})"

    @property
    def size(self) -> int:
        return self.order + 1

    @property
    def first_row(self) -> np.ndarray:
        return self._row

    @property
    def first_column(self) -> np.ndarray:
        return self._col

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self._row)

    def entry(self, k: int, l: int):
        if not (0 <= k <= self.order and 0 <= l <= self.order):
            raise IndexError("entry index outside [0, N]^2")
        return self.table[l - k]

    def dense(self) -> np.ndarray:
        n = np.arange(self.size)
        return self.table[n[None, :] - n[:, None]]

    @property
    def predictor(self) -> PredictorPoly:
        if self._predictor is None:
            with self._lock:
                if self._predictor is None:
                    self._predictor = _levinson(self)
        return self._predictor


def build_toeplitz(table: FourierTable, order: int) -> ToeplitzSystem:
    return ToeplitzSystem(table, order)


def _levinson(system: ToeplitzSystem) -> PredictorPoly:
    # Forward predictor a (a[0] = 1) with T_n a = sigma2 e_0; each order adds
    # kappa times the conjugate-reversed predictor.
    N = system.order
    col = system.first_column  # T[j, 0] = h^(-j)
    dtype = complex if np.iscomplexobj(col) else float
    a = np.zeros(N + 1, dtype=dtype)
    a[0] = 1.0
    kappa = np.zeros(N, dtype=dtype)
    sigma2 = float(np.real(col[0]))
    if not sigma2 > 0:
        raise LevinsonBreakdown(0, sigma2)
    for n in range(N):
        # row n+1 of T_{n+1} against [a; 0]: sum_j h^(j - (n+1)) a_j
        delta = np.dot(col[n + 1:0:-1], a[:n + 1])
        k = -delta / sigma2
        kappa[n] = k
        a[1:n + 2] = a[1:n + 2] + k * np.conj(a[n::-1])
        sigma2 = sigma2 * (1.0 - abs(k) ** 2)
        if not sigma2 > 0:
            raise LevinsonBreakdown(n + 1, sigma2)
    gamma = a / np.sqrt(sigma2)
    return PredictorPoly(N, gamma, reflection=kappa, error_variance=sigma2)


def levinson_predictor(system: ToeplitzSystem) -> PredictorPoly:
    """Predictor coefficients gamma_{u,N} = (T_N^{-1})_{u,0} / sqrt((T_N^{-1})_{0,0})."""
    return system.predictor


def orthogonal_poly(pred: PredictorPoly) -> np.ndarray:
    """Coefficients of Q_N(z) = z^N conj(P_N)(1/z): q_u = conj(gamma_{N-u})."""
    return np.conj(pred.gamma[::-1])


def gs_inverse_entry(pred: PredictorPoly, k: int, l: int):
    """(T_N^{-1})_{k,l} (0-based) from the Gohberg-Semencul two-sum formula.

    With gamma_{N+1} = 0 and k <= l:
        sum_{u<=k} gamma_{k-u} conj(gamma_{l-u}) - sum_{v<=k} conj(gamma_{v+N+1-k}) gamma_{v+N+1-l}.
    For real symbols this is the usual statement with omega = gamma.
    """
    N = pred.degree
    if not (0 <= k <= N and 0 <= l <= N):
        raise IndexError("entry index outside [0, N]^2")
    if k > l:
        return np.conj(gs_inverse_entry(pred, l, k))
    w = _padded(pred)
    u = np.arange(k + 1)
    first = np.sum(w[k - u] * np.conj(w[l - u]))
    second = np.sum(np.conj(w[u + N + 1 - k]) * w[u + N + 1 - l])
    return first - second


def _padded(pred: PredictorPoly) -> np.ndarray:
    return np.concatenate([pred.gamma, np.zeros(1, dtype=pred.gamma.dtype)])


def gs_inverse_matrix(pred: PredictorPoly) -> np.ndarray:
    """All of T_N^{-1}, accumulating the Gohberg-Semencul sums along diagonals."""
    w = _padded(pred)
    N = pred.degree
    n = N + 1
    out = np.empty((n, n), dtype=w.dtype)
    wc = np.conj(w)
    for d in range(n):
        i = np.arange(n - d)
        terms = w[i] * wc[i + d] - wc[N + 1 - i] * w[N + 1 - i - d]
        vals = np.cumsum(terms)
        out[i, i + d] = vals
        if d:
            out[i + d, i] = np.conj(vals)
    return out


def gs_inverse_block(pred: PredictorPoly, rows, cols) -> np.ndarray:
    """Entries (T_N^{-1})_{k,l} for k in ``rows``, l in ``cols`` (0-based)."""
    rows = np.asarray(rows, dtype=int)
    cols = np.asarray(cols, dtype=int)
    out = np.empty((rows.size, cols.size), dtype=pred.gamma.dtype)
    for i, k in enumerate(rows):
        for j, l in enumerate(cols):
            out[i, j] = gs_inverse_entry(pred, int(k), int(l))
    return out


def _fft_size(n: int) -> int:
    return 1 << int(np.ceil(np.log2(max(n, 1))))


def lower_toeplitz_matvec(first_col: np.ndarray, x: np.ndarray) -> np.ndarray:
    """L x for the lower-triangular Toeplitz L with the given first column."""
    n = x.shape[0]
    m = _fft_size(2 * n)
    if np.iscomplexobj(first_col) or np.iscomplexobj(x):
        y = np.fft.ifft(np.fft.fft(first_col, m) * np.fft.fft(x, m))[:n]
    else:
        y = np.fft.irfft(np.fft.rfft(first_col, m) * np.fft.rfft(x, m), m)[:n]
    return y


def _lower_adjoint_matvec(first_col: np.ndarray, x: np.ndarray) -> np.ndarray:
    # L^H x = reverse(conj(L) applied to reverse(x)) for Toeplitz L
    return lower_toeplitz_matvec(np.conj(first_col), x[::-1])[::-1]


def toeplitz_solve(system: ToeplitzSystem, rhs) -> np.ndarray:
    """Solve T_N x = rhs through the Gohberg-Semencul factors.

    T_N^{-1} = A A^H - B B^H, A and B lower-triangular Toeplitz with first
    columns gamma and (0, conj(gamma_N), ..., conj(gamma_1)); every factor is
    applied by FFT convolution.
    """
    rhs = np.asarray(rhs)
    if rhs.shape != (system.size,):
        raise ValueError(f"rhs must have length {system.size}")
    w = system.predictor.gamma
    b = np.concatenate([np.zeros(1, dtype=w.dtype), np.conj(w[:0:-1])])
    x = lower_toeplitz_matvec(w, _lower_adjoint_matvec(w, rhs)) - lower_toeplitz_matvec(b, _lower_adjoint_matvec(b, rhs))
    return x


def matvec(system: ToeplitzSystem, x) -> np.ndarray:
    """T_N x via a circulant embedding of size >= 2N + 2 and FFT convolution."""
    x = np.asarray(x)
    n = system.size
    if x.shape != (n,):
        raise ValueError(f"x must have length {n}")
    m = _fft_size(2 * n)
    # circulant first column: T[j, 0] for j = 0..N, zeros, then T[0, j] for j = N..1
    c = np.zeros(m, dtype=np.result_type(system.first_row, float))
    c[:n] = system.first_column
    c[m - n + 1:] = system.first_row[:0:-1]
    if np.iscomplexobj(c) or np.iscomplexobj(x):
        return np.fft.ifft(np.fft.fft(c) * np.fft.fft(x, m))[:n]
    return np.fft.irfft(np.fft.rfft(c) * np.fft.rfft(x, m), m)[:n]


def shifted(system: ToeplitzSystem, sigma: float) -> ToeplitzSystem:
    """T_N - sigma I, still Toeplitz."""
    coeffs = np.array(system.table.coeffs)
    coeffs[system.table.half_width] -= sigma
    return ToeplitzSystem(FourierTable(system.table.half_width, coeffs, hermitian=system.table.hermitian), system.order)


def count_below(system: ToeplitzSystem, sigma: float) -> int:
    """Number of eigenvalues of T_N strictly below sigma.

    The Levinson error variances of T_N - sigma I are ratios of consecutive
    leading principal minors, so by Sylvester's law of inertia the count of
    negative variances equals the count of negative eigenvalues.  A variance
    that is exactly zero raises ZeroDivisionError; callers nudge sigma.
    """
    N = system.order
    col = np.array(system.first_column)
    col[0] = col[0] - sigma
    dtype = complex if np.iscomplexobj(col) else float
    a = np.zeros(N + 1, dtype=dtype)
    a[0] = 1.0
    v = float(np.real(col[0]))
    if v == 0:
        raise ZeroDivisionError("singular leading minor")
    neg = int(v < 0)
    for n in range(N):
        delta = np.dot(col[n + 1:0:-1], a[:n + 1])
        k = -delta / v
        a[1:n + 2] = a[1:n + 2] + k * np.conj(a[n::-1])
        v = v * (1.0 - abs(k) ** 2)
        if v == 0 or not np.isfinite(v):
            raise ZeroDivisionError("singular leading minor")
        neg += v < 0
    return neg
