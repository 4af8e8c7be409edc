import numpy as np
import pytest


def bell_state():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 2 ** -0.5
    return np.outer(psi, psi.conj())


def basis_dm(d, i):
    out = np.zeros((d, d), dtype=complex)
    out[i, i] = 1.0
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bell():
    return bell_state()


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
