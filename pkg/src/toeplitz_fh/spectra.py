"""Extreme eigenvalues: inverse iteration on Toeplitz systems, power iteration, Jacobi oracle.

Residuals are reported relative to the eigenvalue, ||A v - lam v|| / (|lam| ||v||),
so a single tolerance works for matrices of any scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ToeplitzSystem, count_below, matvec, shifted, toeplitz_solve

__all__ = [
    "DEFAULT_SEED",
    "ConvergenceError",
    "EigenEstimate",
    "lambda_min_toeplitz",
    "toeplitz_eigenvalue",
    "toeplitz_norm",
    "lambda_max_matrix",
    "dominant_eigenvalue",
    "dense_eig_oracle",
    "operator_norm_matrix",
]

DEFAULT_SEED = 0x5EED
DENSE_ORACLE_MAX_ORDER = 512


class ConvergenceError(ArithmeticError):
    def __init__(self, message: str, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} after {iterations} iterations (last residual {residual:.3g})")


@dataclass(frozen=True)
class EigenEstimate:
    value: float
    iterations: int
    residual: float


def _start_vector(n: int, seed: int, complex_: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    if complex_:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _rel_residual(Av, lam, v) -> float:
    if lam == 0:
        return float(np.linalg.norm(Av))
    return float(np.linalg.norm(Av - lam * v) / (abs(lam) * np.linalg.norm(v)))


def _power(apply: Callable, v: np.ndarray, tol: float, max_iters: int, hermitian: bool = True) -> EigenEstimate:
    """Power iteration; stops once the relative residual drops to ``tol``."""
    Av = apply(v)
    res = np.inf
    for it in range(1, max_iters + 1):
        nv = np.vdot(v, v).real
        lam = np.vdot(v, Av) / nv
        if hermitian:
            lam = lam.real
        if not np.any(Av):
            return EigenEstimate(0.0, it, 0.0)
        res = _rel_residual(Av, lam, v)
        if res <= tol:
            return EigenEstimate(float(np.real(lam)), it, res)
        v = Av / np.linalg.norm(Av)
        Av = apply(v)
    raise ConvergenceError("power iteration did not converge", max_iters, res)


def _inverse_iteration(system: ToeplitzSystem, target: ToeplitzSystem, v: np.ndarray, tol: float, max_iters: int):
    """Inverse iteration with solves on ``target``; Rayleigh quotients and residuals on ``system``."""
    lam_prev = None
    lam, res, it = np.nan, np.inf, 0
    for it in range(1, max_iters + 1):
        w = toeplitz_solve(target, v)
        v = w / np.linalg.norm(w)
        Tv = matvec(system, v)
        lam = float(np.vdot(v, Tv).real)
        res = _rel_residual(Tv, lam, v)
        if lam_prev is not None and abs(lam - lam_prev) <= tol * abs(lam) and res <= tol:
            return EigenEstimate(lam, it, res), v
        lam_prev = lam
    return None, (lam, res, it, v)


def lambda_min_toeplitz(system: ToeplitzSystem, tol: float = 1e-10, max_iters: int = 10_000,
                        seed: int = DEFAULT_SEED, plain_iters: int = 200) -> EigenEstimate:
    """Smallest eigenvalue of a positive-definite Toeplitz system by inverse iteration.

    Each step is one Gohberg-Semencul solve.  Convergence requires both the
    Rayleigh quotient to settle (relative change <= tol) and the relative
    residual ||T v - lam v|| / (lam ||v||) <= tol.

    When the bottom of the spectrum is clustered (regular symbols, where the
    gap is O(1/N^2)) plain iteration stalls.  After ``plain_iters`` steps the
    eigenvalue is bracketed by inertia bisection and the iteration continues
    with a shift just below it, which restores fast convergence.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = _start_vector(system.size, seed, complex_=not system.is_real)
    est, state = _inverse_iteration(system, system, v, tol, min(plain_iters, max_iters))
    if est is not None:
        return est
    theta, res, used, v = state
    if used >= max_iters:
        raise ConvergenceError("inverse iteration did not converge", used, res)
    lo, hi = _bisect(system, 0, 0.0, theta, rtol=min(tol, 1e-12) * 1e-2)
    sigma = lo - (hi - lo)
    est, state = _inverse_iteration(system, shifted(system, sigma), v, tol, max_iters - used)
    if est is None:
        raise ConvergenceError("inverse iteration did not converge", max_iters, state[1])
    return EigenEstimate(est.value, est.iterations + used, est.residual)


def _count(system: ToeplitzSystem, sigma: float, width: float) -> tuple[int, float]:
    for _ in range(8):
        try:
            return count_below(system, sigma), sigma
        except ZeroDivisionError:
            sigma += width * 1e-3
    raise ConvergenceError("inertia count hit singular minors repeatedly", 8, np.nan)


def _bisect(system: ToeplitzSystem, index: int, lo: float, hi: float, rtol: float):
    """Shrink [lo, hi] around the index-th eigenvalue (ascending, 0-based)."""
    for _ in range(400):
        width = hi - lo
        if width <= rtol * max(abs(lo), abs(hi)) or width <= np.finfo(float).tiny:
            break
        mid = lo + width / 2
        if mid == lo or mid == hi:
            break
        c, mid = _count(system, mid, width)
        if c <= index:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _coefficient_bound(system: ToeplitzSystem) -> float:
    r = np.abs(system.first_row)
    return float(r[0] + 2 * r[1:].sum()) * (1 + 1e-12) + np.finfo(float).tiny


def toeplitz_eigenvalue(system: ToeplitzSystem, index: int, rtol: float = 1e-12) -> float:
    """index-th smallest eigenvalue of a Hermitian Toeplitz matrix by inertia bisection.

    Works for indefinite matrices; cost is one Levinson pass per bisection step.
    """
    n = system.size
    if not 0 <= index < n:
        raise IndexError(f"eigenvalue index {index} outside [0, {n - 1}]")
    B = _coefficient_bound(system)
    lo, hi = _bisect(system, index, -B, B, rtol)
    return 0.5 * (lo + hi)


def toeplitz_norm(system: ToeplitzSystem, rtol: float = 1e-12) -> float:
    """Spectral norm of a Hermitian Toeplitz matrix, max(|lambda_0|, |lambda_N|)."""
    return max(abs(toeplitz_eigenvalue(system, 0, rtol)), abs(toeplitz_eigenvalue(system, system.order, rtol)))


def lambda_max_matrix(matrix, tol: float = 1e-10, max_iters: int = 10_000, seed: int = DEFAULT_SEED,
                      restarts: int = 3) -> EigenEstimate:
    """Largest-magnitude eigenvalue of a Hermitian matrix by power iteration.

    ``restarts`` independent random starts are run and the largest magnitude
    kept.  For entrywise non-negative symmetric matrices this is the spectral
    norm.
    """
    A = np.asarray(matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    best = None
    for r in range(max(restarts, 1)):
        v = _start_vector(A.shape[0], seed + r, complex_=np.iscomplexobj(A))
        est = _power(lambda x: A @ x, v, tol, max_iters)
        if best is None or abs(est.value) > abs(best.value):
            best = est
    return best


def dominant_eigenvalue(apply: Callable, n: int, tol: float = 1e-10, max_iters: int = 10_000,
                        seed: int = DEFAULT_SEED, complex_: bool = False) -> EigenEstimate:
    """Power iteration for an operator given as a callable; no symmetry assumed."""
    v = _start_vector(n, seed, complex_=complex_)
    return _power(apply, v, tol, max_iters, hermitian=False)


def _round_robin(n: int):
    """n - 1 rounds of n/2 disjoint pairs covering every pair once (n even)."""
    players = list(range(n))
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        yield np.minimum(p, q), np.maximum(p, q)
        players = [players[0]] + [players[-1]] + players[1:-1]


def _jacobi_symmetric(A: np.ndarray, rel_tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if n % 2:
        A = np.pad(A, ((0, 1), (0, 1)))
    m = A.shape[0]
    total = np.linalg.norm(A)
    if total == 0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < rel_tol * total:
            break
        for p, q in _round_robin(m):
            apq = A[p, q]
            app = A[p, p]
            aqq = A[q, q]
            nz = apq != 0
            t = np.zeros_like(apq)
            with np.errstate(over="ignore"):
                tau = (aqq[nz] - app[nz]) / (2.0 * apq[nz])
                # huge tau gives t = 0, which is the right (negligible) rotation
                tn = np.sign(tau) / (np.abs(tau) + np.hypot(1.0, tau))
            tn[tau == 0] = 1.0  # equal diagonal: 45-degree rotation
            t[nz] = tn
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            Ap = A[p, :].copy()
            Aq = A[q, :].copy()
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap = A[:, p].copy()
            Aq = A[:, q].copy()
            A[:, p] = Ap * c - Aq * s
            A[:, q] = Ap * s + Aq * c
    else:
        raise ConvergenceError("Jacobi sweeps did not converge", max_sweeps, float(off / total))
    return np.diag(A)[:n]


def dense_eig_oracle(matrix) -> np.ndarray:
    """Full spectrum of a Hermitian matrix (order <= 512) by cyclic Jacobi rotations, ascending.

    Complex Hermitian input is handled through its real symmetric embedding
    [[Re, -Im], [Im, Re]], whose spectrum repeats each eigenvalue twice.
    """
    A = np.asarray(matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    n = A.shape[0]
    if n > DENSE_ORACLE_MAX_ORDER:
        raise ValueError(f"dense oracle limited to order {DENSE_ORACLE_MAX_ORDER}, got {n}")
    if np.iscomplexobj(A) and np.any(A.imag != 0):
        big = np.block([[A.real, -A.imag], [A.imag, A.real]])
        ev = np.sort(_jacobi_symmetric(big))
        return ev[::2]
    return np.sort(_jacobi_symmetric(np.real(A)))


def operator_norm_matrix(matrix, tol: float = 1e-10, max_iters: int = 20_000, seed: int = DEFAULT_SEED) -> float:
    """Spectral norm sqrt(lambda_max(A^H A)) by power iteration on the Gram operator."""
    A = np.asarray(matrix)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if not np.any(A):
        return 0.0
    AH = A.conj().T
    v = _start_vector(A.shape[1], seed, complex_=np.iscomplexobj(A))
    est = _power(lambda x: AH @ (A @ x), v, tol, max_iters)
    return float(np.sqrt(est.value))
