import numpy as np
import pytest

from tripol.circuit import compile_circuit, ghz_preset, ghz_specs

ACCEPTANCE_LINES = []


def ghz(r=(0.0, 0.0, 0.0), rp=(0.0, 0.0, 0.0), alpha_c=1.0, alpha_a=0.0, theta=0.0):
    specs = ghz_specs(r[0], rp[0], r[1], rp[1], r[2], rp[2])
    return compile_circuit(ghz_preset(specs, alpha_c, alpha_a, theta))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
