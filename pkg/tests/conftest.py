import pytest

from siegelsign.jacobi import jacobi_cusp_phi
from siegelsign.siegel import maass_lift, required_jacobi_precision

TRACE_BOUND = 30

_acceptance_lines: list[str] = []


def record_acceptance(label: str, ok: bool, detail: str = "") -> None:
    _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))


@pytest.fixture(scope="session")
def phi10():
    return jacobi_cusp_phi(10, required_jacobi_precision(TRACE_BOUND))


@pytest.fixture(scope="session")
def phi12():
    return jacobi_cusp_phi(12, required_jacobi_precision(TRACE_BOUND))


@pytest.fixture(scope="session")
def lift10(phi10):
    return maass_lift(phi10, TRACE_BOUND)


@pytest.fixture(scope="session")
def lift12(phi12):
    return maass_lift(phi12, TRACE_BOUND)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
