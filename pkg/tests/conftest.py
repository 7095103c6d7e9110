import pytest

from markov_monotone.chain import validate

ACCEPTANCE_LINES = []


@pytest.fixture
def two_state():
    return validate([[0.5, 0.5], [0.25, 0.75]])


@pytest.fixture
def uniform3():
    return validate([[1 / 3] * 3] * 3)


@pytest.fixture
def cycle2():
    return validate([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def reducible():
    return validate([[1.0, 0.0], [0.5, 0.5]])


@pytest.fixture
def acceptance_log():
    def log(criterion, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
