import pytest

from exec_hyper.model import ModelParams

K_SWEEP = [0.125, 0.5, 1.0, 2.0, 8.0]


@pytest.fixture
def unit():
    """lambda = sigma = eta = X = T = 1 with k = 1/2."""
    return ModelParams(k=0.5)


def unit_params(k, **overrides):
    return ModelParams(k=k, **overrides)


# Acceptance criteria outcomes, printed after the run: (id, passed, detail).
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {cid:>2}: {detail}")
