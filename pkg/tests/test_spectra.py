import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_positive_c1
from toeplitz_fh.core import build_toeplitz, gs_inverse_matrix
from toeplitz_fh.spectra import (
    ConvergenceError,
    dense_eig_oracle,
    dominant_eigenvalue,
    lambda_max_matrix,
    lambda_min_toeplitz,
    operator_norm_matrix,
    toeplitz_eigenvalue,
    toeplitz_norm,
)
from toeplitz_fh.symbols import FourierTable, SymbolSpec, fourier_of_symbol


def fh_system(alpha, N, c1=(1.0,)):
    return build_toeplitz(fourier_of_symbol(SymbolSpec(alpha, c1), N), N)


def identity_system(N):
    c = np.zeros(2 * N + 1)
    c[N] = 1.0
    return build_toeplitz(FourierTable(N, c), N)


def banded(coeffs, N):
    coeffs = np.asarray(coeffs, dtype=float)
    d = (coeffs.size - 1) // 2
    return build_toeplitz(FourierTable(N, np.pad(coeffs, N - d)), N)


def sym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


class TestDenseOracle:
    def test_two_by_two(self):
        assert np.allclose(dense_eig_oracle([[2.0, 1.0], [1.0, 2.0]]), [1, 3], atol=1e-14)

    def test_identity(self):
        assert np.allclose(dense_eig_oracle(np.eye(10)), np.ones(10))

    def test_tridiagonal_formula(self):
        T = banded([1.0, 2.0, 1.0], 4).dense()
        ref = np.sort(2 + 2 * np.cos(np.arange(1, 6) * np.pi / 6))
        assert np.allclose(dense_eig_oracle(T), ref, rtol=0, atol=1e-12)

    @given(st.integers(0, 10_000), st.integers(1, 40))
    def test_against_lapack(self, seed, n):
        a = sym(np.random.default_rng(seed), n)
        ev = np.linalg.eigvalsh(a)
        assert np.abs(dense_eig_oracle(a) - ev).max() <= 1e-11 * max(1.0, np.abs(ev).max())

    def test_complex_hermitian(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
        a = (a + a.conj().T) / 2
        assert np.allclose(dense_eig_oracle(a), np.linalg.eigvalsh(a), atol=1e-11)

    def test_order_guard(self):
        with pytest.raises(ValueError):
            dense_eig_oracle(np.eye(513))


class TestLambdaMin:
    def test_identity(self):
        assert lambda_min_toeplitz(identity_system(7), 1e-10).value == pytest.approx(1.0, abs=1e-12)

    def test_shifted_cos_against_oracle(self):
        s = banded([0.5, 2.0, 0.5], 32)
        est = lambda_min_toeplitz(s, 1e-10)
        assert est.value == pytest.approx(dense_eig_oracle(s.dense())[0], abs=1e-8)
        assert est.residual <= 1e-10

    def test_clustered_bottom(self):
        # regular symbol at larger N: gap O(1/N^2), handled by the shifted fallback
        s = fh_system(0.0, 400, (0.5, 2.0, 0.5))
        est = lambda_min_toeplitz(s, 1e-10)
        assert est.value == pytest.approx(np.linalg.eigvalsh(s.dense())[0], rel=1e-9)
        assert est.residual <= 1e-10

    def test_nested_decrease(self):
        vals = [lambda_min_toeplitz(fh_system(0.25, N)).value for N in (512, 1024, 2048)]
        assert vals[2] < vals[1] < vals[0]

    @pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5])
    def test_interlacing(self, alpha):
        tab = fourier_of_symbol(SymbolSpec(alpha, (0.5, 2.0, 0.5)), 80)
        vals = [lambda_min_toeplitz(build_toeplitz(tab, N), 1e-12).value for N in range(40, 81, 4)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    @given(st.integers(0, 10_000), st.integers(4, 128), st.sampled_from([0.0, 0.2, 0.4]))
    def test_consistency_with_inverse(self, seed, N, alpha):
        spec = SymbolSpec(alpha, random_positive_c1(np.random.default_rng(seed), 2))
        s = build_toeplitz(fourier_of_symbol(spec, N), N)
        est = lambda_min_toeplitz(s)
        top = np.linalg.eigvalsh(np.linalg.inv(s.dense()))[-1]
        assert est.value > 0
        assert est.value * top == pytest.approx(1.0, rel=1e-6)
        assert est.residual <= 1e-10

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            lambda_min_toeplitz(identity_system(3), 0.0)

    def test_non_convergence(self):
        with pytest.raises(ConvergenceError) as info:
            lambda_min_toeplitz(fh_system(0.25, 64), tol=1e-30, max_iters=5, plain_iters=5)
        assert info.value.iterations == 5


def _slope(alpha):
    Ns = np.array([256, 512, 1024, 2048, 4096])
    lam = [lambda_min_toeplitz(fh_system(alpha, int(N))).value for N in Ns]
    return np.polyfit(np.log(Ns), np.log(lam), 1)[0]


class TestScaling:
    @pytest.mark.parametrize("alpha", [0.2, 0.3, 0.4])
    def test_slope(self, alpha):
        assert abs(_slope(alpha) + 2 * alpha) <= 0.03

    def test_slope_half(self):
        assert abs(_slope(0.5) + 1) <= 0.05


class TestInertiaBisection:
    def test_indefinite_matches_dense(self):
        s = banded([0.3, -1.0, 0.2, 0.1, 0.2, -1.0, 0.3], 30)
        ev = np.linalg.eigvalsh(s.dense())
        for i in (0, 7, 15, 30):
            assert toeplitz_eigenvalue(s, i) == pytest.approx(ev[i], abs=1e-11)
        assert toeplitz_norm(s) == pytest.approx(np.abs(ev).max(), abs=1e-11)

    def test_index_guard(self):
        with pytest.raises(IndexError):
            toeplitz_eigenvalue(identity_system(3), 4)


class TestLambdaMax:
    def test_identity(self):
        assert lambda_max_matrix(np.eye(6)).value == pytest.approx(1.0)

    def test_diagonal(self):
        assert lambda_max_matrix(np.diag([1.0, 2.0, 3.0])).value == pytest.approx(3.0, rel=1e-9)

    def test_random_symmetric(self):
        a = sym(np.random.default_rng(50), 50)
        ev = dense_eig_oracle(a)
        ref = ev[np.argmax(np.abs(ev))]
        assert lambda_max_matrix(a).value == pytest.approx(ref, abs=1e-8)

    def test_nonnegative_is_norm(self):
        a = np.abs(sym(np.random.default_rng(2), 30))
        assert lambda_max_matrix(a).value == pytest.approx(np.linalg.norm(a, 2), rel=1e-9)

    def test_inverse_top(self):
        s = fh_system(0.3, 100)
        inv = gs_inverse_matrix(s.predictor)
        assert lambda_max_matrix(inv).value * lambda_min_toeplitz(s).value == pytest.approx(1.0, rel=1e-8)

    def test_dominant_callable(self):
        a = np.diag([1.0, -5.0, 2.0])
        assert dominant_eigenvalue(lambda x: a @ x, 3).value == pytest.approx(-5.0, rel=1e-9)

    def test_non_square(self):
        with pytest.raises(ValueError):
            lambda_max_matrix(np.ones((2, 3)))


class TestOperatorNorm:
    def test_zero(self):
        assert operator_norm_matrix(np.zeros((4, 4))) == 0.0

    def test_diagonal(self):
        assert operator_norm_matrix(np.diag([3.0, -4.0])) == pytest.approx(4.0, rel=1e-9)

    def test_rectangular_against_gram_oracle(self):
        a = np.random.default_rng(40).standard_normal((40, 60))
        ref = np.sqrt(dense_eig_oracle(a @ a.T)[-1])
        assert operator_norm_matrix(a) == pytest.approx(ref, abs=1e-8)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            operator_norm_matrix(np.array([[np.inf]]))
