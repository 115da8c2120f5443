import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def trapezoid_coeffs(f, P: int, ns):
    """(1/2pi) int f(theta) e^{-in theta} on a P-point grid, evaluated by FFT."""
    theta = 2 * np.pi * np.arange(P) / P
    c = np.fft.fft(f(theta)) / P
    return np.array([c[n % P] for n in ns])


def random_positive_c1(rng, degree: int):
    """Real Hermitian coefficients c1^(-d..d) of a strictly positive trig polynomial."""
    pos = rng.standard_normal(degree) + 1j * rng.standard_normal(degree)
    pos *= 0.3 / max(1.0, np.abs(pos).sum())
    coeffs = np.concatenate([np.conj(pos[::-1]), [1.0], pos])
    return tuple(coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = {}


def record_criterion(number: int, title: str, ok: bool, detail: str):
    line = f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
