"""Fisher-Hartwig symbols |1 - e^{it}|^{2a} c1(e^{it}) and their Fourier data.

The regular factor c1 is a real, strictly positive trigonometric polynomial
given by its coefficients c1^(-d..d).  Everything here is a pure function of
immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

__all__ = [
    "SymbolError",
    "SymbolSpec",
    "FourierTable",
    "BetaSeries",
    "PRESETS",
    "fourier_fh_pure",
    "fh_pure_coeffs",
    "binomial_series",
    "fourier_of_symbol",
    "fourier_of_inverse_symbol",
    "wiener_hopf_beta",
    "g1_at_one",
    "quadrature_grid_size",
]

POSITIVITY_SAMPLES = 4096

PRESETS = {
    "one": (1.0,),
    "shifted-cos": (0.5, 2.0, 0.5),  # 2 + cos(theta)
}


class SymbolError(ValueError):
    """Invalid symbol parameters (domain error)."""


def _as_coeff_array(c1) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(c1, dtype=complex))
    if arr.ndim != 1 or arr.size % 2 != 1:
        raise SymbolError("c1 needs an odd number of coefficients (indices -d..d)")
    if not np.all(np.isfinite(arr)):
        raise SymbolError("c1 coefficients must be finite")
    return arr


def _trig_values(coeffs: np.ndarray, theta: np.ndarray) -> np.ndarray:
    d = coeffs.size // 2
    n = np.arange(-d, d + 1)
    return np.exp(1j * np.outer(theta, n)) @ coeffs


@dataclass(frozen=True)
class SymbolSpec:
    """Exponent ``alpha`` plus the regular factor c1 as coefficients c1^(-d..d).

    ``alpha`` may be 0 (purely regular symbol) or any value in (0, 1/2].
    """

    alpha: float
    c1: tuple = (1.0,)

    def __post_init__(self):
        alpha = float(self.alpha)
        if not np.isfinite(alpha) or alpha < 0.0 or alpha > 0.5:
            raise SymbolError(f"alpha must lie in [0, 1/2], got {self.alpha!r}")
        coeffs = _as_coeff_array(self.c1)
        if not np.allclose(coeffs, np.conj(coeffs[::-1]), rtol=0, atol=1e-14 * max(1.0, np.abs(coeffs).max())):
            raise SymbolError("c1 must be real-valued: c1^(-n) = conj(c1^(n))")
        theta = 2 * np.pi * np.arange(POSITIVITY_SAMPLES) / POSITIVITY_SAMPLES
        vals = _trig_values(coeffs, theta).real
        if vals.min() <= 0.0:
            raise SymbolError(f"c1 is not strictly positive on the circle (min {vals.min():.3g})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c1", tuple(complex(c) for c in coeffs))

    @classmethod
    def preset(cls, alpha: float, name: str) -> "SymbolSpec":
        try:
            return cls(alpha, PRESETS[name])
        except KeyError:
            raise SymbolError(f"unknown c1 preset {name!r}; choose from {sorted(PRESETS)}") from None

    @property
    def degree(self) -> int:
        return len(self.c1) // 2

    @property
    def c1_coeffs(self) -> np.ndarray:
        return np.array(self.c1, dtype=complex)

    @property
    def is_real_even(self) -> bool:
        c = self.c1_coeffs
        return bool(np.all(c.imag == 0) and np.allclose(c, c[::-1], rtol=0, atol=0))

    def c1_values(self, theta) -> np.ndarray:
        return _trig_values(self.c1_coeffs, np.atleast_1d(np.asarray(theta, dtype=float))).real

    def c1_at_one(self) -> float:
        return float(np.sum(self.c1_coeffs).real)

    def values(self, theta) -> np.ndarray:
        """phi_alpha on the circle; the singular factor is written as (2 - 2 cos t)^alpha."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return (2.0 - 2.0 * np.cos(theta)) ** self.alpha * self.c1_values(theta)


@dataclass(frozen=True)
class FourierTable:
    """Coefficients h^(-M..M) of a function on the circle."""

    half_width: int
    coeffs: np.ndarray = field(repr=False)
    hermitian: bool = True

    def __post_init__(self):
        arr = np.asarray(self.coeffs)
        if arr.shape != (2 * self.half_width + 1,):
            raise ValueError("coeffs must have length 2*half_width + 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Fourier table contains non-finite values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __getitem__(self, n):
        n = np.asarray(n)
        if np.any(np.abs(n) > self.half_width):
            raise IndexError(f"index outside -{self.half_width}..{self.half_width}")
        return self.coeffs[n + self.half_width]

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    def nonnegative(self, upto: int | None = None) -> np.ndarray:
        """h^(0), h^(1), ..., h^(upto)."""
        upto = self.half_width if upto is None else upto
        return self.coeffs[self.half_width:self.half_width + upto + 1]

    def nonpositive(self, upto: int | None = None) -> np.ndarray:
        """h^(0), h^(-1), ..., h^(-upto)."""
        upto = self.half_width if upto is None else upto
        return self.coeffs[self.half_width - upto:self.half_width + 1][::-1]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs) or bool(np.all(self.coeffs.imag == 0))

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))))


@dataclass(frozen=True)
class BetaSeries:
    """Taylor coefficients of 1/g_alpha, normalised so that values[0] == 1.

    ``g1_at_zero`` is the outer factor of c1 at the origin before normalisation,
    so ``values / g1_at_zero`` are the raw coefficients.  ``g1_at_one`` is the
    outer factor at z = 1 under the same normalisation, which is the constant
    appearing in the large-u asymptotics.
    """

    alpha: float
    values: np.ndarray = field(repr=False)
    g1_at_zero: float = 1.0
    g1_at_one: complex = 1.0

    def raw(self) -> np.ndarray:
        return self.values / self.g1_at_zero

    def asymptotic(self, u) -> np.ndarray:
        """Leading term u^(alpha-1) / (Gamma(alpha) g1(1)) of the normalised series."""
        u = np.asarray(u, dtype=float)
        return np.exp((self.alpha - 1.0) * np.log(u) - gammaln(self.alpha)) / self.g1_at_one

    def asymptotic_ratio(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=int)
        return self.values[u] / self.asymptotic(u)


def _log_abs_gamma_sign(z: np.ndarray):
    """log|Gamma(z)| and sign(Gamma(z)); poles give (+inf, 0).

    Negative arguments go through the reflection formula so that the log-gamma
    evaluation always happens at a positive argument.
    """
    z = np.asarray(z, dtype=float)
    logabs = np.empty_like(z)
    sign = np.ones_like(z)
    pos = z > 0
    logabs[pos] = gammaln(z[pos])
    neg = ~pos
    if np.any(neg):
        zn = z[neg]
        # sin(pi z) from the fractional part to keep accuracy for |z| up to 1e6
        r = np.mod(zn, 2.0)
        s = np.sin(np.pi * r)
        pole = (r == 0.0) | (r == 1.0)
        with np.errstate(divide="ignore"):
            la = np.log(np.pi) - np.log(np.abs(s)) - gammaln(1.0 - zn)
        sg = np.sign(s)
        la[pole] = np.inf
        sg[pole] = 0.0
        logabs[neg] = la
        sign[neg] = sg
    return logabs, sign


def fourier_fh_pure(alpha: float, n):
    """n-th Fourier coefficient of (2 - 2 cos t)^alpha.

    Closed form (-1)^n Gamma(2a+1) / (Gamma(a+n+1) Gamma(a-n+1)); vectorised
    over ``n``.  Returns a float (or float array).
    """
    if not np.isfinite(alpha) or alpha <= -0.5:
        raise SymbolError(f"alpha must exceed -1/2, got {alpha!r}")
    n_arr = np.asarray(n)
    if np.any(np.abs(n_arr) > 10**6):
        raise SymbolError("|n| must not exceed 1e6")
    n_arr = np.abs(n_arr).astype(float)  # the coefficients are even in n
    la, sa = _log_abs_gamma_sign(alpha + n_arr + 1.0)
    lb, sb = _log_abs_gamma_sign(alpha - n_arr + 1.0)
    parity = np.where(np.mod(n_arr, 2.0) == 0.0, 1.0, -1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        mag = np.exp(gammaln(2.0 * alpha + 1.0) - la - lb)
    out = parity * sa * sb * np.where(np.isinf(lb) | np.isinf(la), 0.0, mag)
    return float(out) if out.ndim == 0 else out


def fh_pure_coeffs(alpha: float, upto: int) -> np.ndarray:
    """Coefficients of (2 - 2 cos t)^alpha at n = 0..upto."""
    return fourier_fh_pure(alpha, np.arange(upto + 1))


def _symmetric_from_nonneg(c: np.ndarray) -> np.ndarray:
    return np.concatenate([c[:0:-1], c])


def quadrature_grid_size(half_width: int) -> int:
    """Power-of-two trapezoid grid, at least max(4096, 64 * half_width)."""
    target = max(4096, 64 * max(half_width, 1))
    return 1 << int(np.ceil(np.log2(target)))


def fourier_of_symbol(spec: SymbolSpec, half_width: int) -> FourierTable:
    """phi_alpha^(-M..M) as the convolution of the singular-part coefficients with c1^."""
    d = spec.degree
    if half_width < d:
        raise SymbolError(f"half_width {half_width} is below the degree {d} of c1")
    pure = _symmetric_from_nonneg(fh_pure_coeffs(spec.alpha, half_width + d))
    conv = np.convolve(pure, spec.c1_coeffs)
    # pure spans -(M+d)..(M+d); after convolution index 0 sits at (M+d)+d
    mid = half_width + 2 * d
    out = conv[mid - half_width:mid + half_width + 1]
    if np.all(out.imag == 0):
        out = out.real
    return FourierTable(half_width, out, hermitian=True)


def _inverse_c1_coeffs(spec: SymbolSpec, half_width: int) -> np.ndarray:
    """Coefficients of 1/c1 at -K..K, K chosen where the tail drops below roundoff."""
    P = quadrature_grid_size(half_width)
    theta = 2 * np.pi * np.arange(P) / P
    r = np.fft.fft(1.0 / spec.c1_values(theta)) / P
    if spec.degree == 0:
        return np.array([r[0]])
    mags = np.abs(r[: P // 2])
    significant = np.nonzero(mags > 1e-18 * mags[0])[0]
    K = int(min(significant[-1] if significant.size else 0, P // 4))
    return np.concatenate([r[P - K:], r[:K + 1]])


def fourier_of_inverse_symbol(spec: SymbolSpec, half_width: int) -> FourierTable:
    """Coefficients of 1/phi_alpha at -M..M (requires alpha < 1/2)."""
    if spec.alpha >= 0.5:
        raise SymbolError("1/phi_alpha has no summable coefficient table at alpha = 1/2")
    rc = _inverse_c1_coeffs(spec, half_width)
    K = rc.size // 2
    pure = _symmetric_from_nonneg(fh_pure_coeffs(-spec.alpha, half_width + K))
    conv = np.convolve(pure, rc)
    mid = half_width + 2 * K
    out = conv[mid - half_width:mid + half_width + 1]
    if np.allclose(out.imag, 0.0, atol=1e-15 * np.abs(out).max()):
        out = out.real
    return FourierTable(half_width, out, hermitian=True)


def binomial_series(alpha: float, length: int) -> np.ndarray:
    """Taylor coefficients of (1 - z)^(-alpha) at u = 0..length-1.

    Gamma(u + alpha) / (Gamma(alpha) u!) for alpha > 0; alpha = 0 gives a delta.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    u = np.arange(length, dtype=float)
    if alpha == 0:
        out = np.zeros(length)
        out[0] = 1.0
        return out
    if alpha < 0:
        # finite products are exact and cheap; used only for small tables
        out = np.empty(length)
        out[0] = 1.0
        for k in range(1, length):
            out[k] = out[k - 1] * (k - 1 + alpha) / k
        return out
    return np.exp(gammaln(u + alpha) - gammaln(alpha) - gammaln(u + 1.0))


def _outer_factor_grid(spec: SymbolSpec, P: int):
    """log g1 on the P-point grid, g1 = exp(P+(log c1 / 2)) with the zero mode halved."""
    theta = 2 * np.pi * np.arange(P) / P
    L = np.fft.fft(np.log(spec.c1_values(theta))) / P
    proj = np.zeros(P, dtype=complex)
    proj[0] = 0.5 * L[0]
    proj[1:P // 2] = L[1:P // 2]
    return proj


def g1_at_one(spec: SymbolSpec) -> complex:
    """Outer factor g1 of c1 evaluated at z = 1; |g1(1)|^2 = c1(1)."""
    proj = _outer_factor_grid(spec, quadrature_grid_size(spec.degree))
    val = np.exp(np.sum(proj))
    return complex(val.real, 0.0) if abs(val.imag) < 1e-14 * abs(val) else complex(val)


def wiener_hopf_beta(spec: SymbolSpec, length: int, exponent: float | None = None) -> BetaSeries:
    """Coefficients beta_u, u = 0..length-1, of 1/g_alpha = (1 - z)^(-alpha) / g1.

    ``exponent`` replaces alpha in the binomial factor (the edge asymptotics
    use alpha + 1).  The result is normalised to beta_0 = 1.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    alpha = spec.alpha if exponent is None else float(exponent)
    binom = binomial_series(alpha, length)
    if spec.degree == 0:
        return BetaSeries(alpha, binom, g1_at_zero=float(np.sqrt(spec.c1[0].real)), g1_at_one=1.0)
    P = quadrature_grid_size(length)
    proj = _outer_factor_grid(spec, P)
    # exp(-log g1) sampled on the circle: 1/g1 is analytic, its FFT gives Taylor coefficients
    log_g1 = np.fft.ifft(proj) * P
    inv_g1 = np.fft.fft(np.exp(-log_g1)) / P
    taylor = inv_g1[:length]
    vals = np.convolve(binom, taylor)[:length]
    g0 = float(np.exp(proj[0].real))
    vals = vals * g0
    if np.allclose(vals.imag, 0.0, atol=1e-15):
        vals = vals.real
    g1_one = np.exp(np.sum(proj)) / g0
    g1_one = complex(g1_one.real, 0.0) if abs(g1_one.imag) < 1e-14 * abs(g1_one) else complex(g1_one)
    return BetaSeries(alpha, vals, g1_at_zero=g0, g1_at_one=g1_one)
