import numpy as np
import pytest

from cnpf.kernels import KernelSpec

ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def szego():
    return KernelSpec.szego()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def record(n: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {n:2d}: {detail}"
        ACCEPTANCE_LINES[n] = line
        print(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
