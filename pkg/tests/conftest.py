import pytest

from cantorspec.measure import MeasureParams, compute_constants
from cantorspec.tree import make_kappa, make_tau24

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def p24():
    return MeasureParams(2, 4)


@pytest.fixture(scope="session")
def p26():
    return MeasureParams(2, 6)


@pytest.fixture(scope="session")
def tau24():
    return make_tau24()


@pytest.fixture(scope="session")
def kappa26(p26):
    return make_kappa(p26)


@pytest.fixture(scope="session")
def consts24(p24):
    return compute_constants(p24)


@pytest.fixture(scope="session")
def consts26(p26):
    return compute_constants(p26)


@pytest.fixture(scope="session")
def rescaled26(p26):
    from cantorspec.rescale import make_rescaled_counterexample
    return make_rescaled_counterexample(p26, 10)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
