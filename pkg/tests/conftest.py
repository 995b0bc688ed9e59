import numpy as np
import pytest

from slap.analytic import PulsePair
from slap.master_eq import lambda_scheme

LAMBDA = 1.0
K = 2 * np.pi / LAMBDA


def reference_pulses(omega_tw0=1.0, R=100.0, T=10.0, sigma=5.0):
    """Reference Lambda-system pulses in units of gamma (times in 1/gamma, lengths in lambda)."""
    return PulsePair(omega_tw0, omega_tw0 * np.sqrt(R), sigma, sigma, 0.0, T, k_sw=K)


@pytest.fixture
def scheme():
    return lambda_scheme(1.0)


@pytest.fixture
def slap_pulses():
    return reference_pulses()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
