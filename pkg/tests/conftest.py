import numpy as np
import pytest

from perarfima import kernels

BACKENDS = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])

_acceptance_lines = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per available kernel backend."""
    previous = kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line; all lines are repeated in the terminal summary."""
    def report(number, title, ok, detail):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        print(line)
        _acceptance_lines.append(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
