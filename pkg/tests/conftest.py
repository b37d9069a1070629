import pytest

from bkwsieve.core import REGEV, Scenario
from bkwsieve.sieve import default_model
from bkwsieve.solvers import ObjectiveContext

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def regev_ctx(model):
    return ObjectiveContext(REGEV, Scenario("classical", "exponential"), model)


SCENARIOS = [(c, s) for s in ("exponential", "polynomial") for c in ("classical", "quantum")]


@pytest.fixture(scope="session")
def regev_results(model):
    """All three sieve schedules at Regev parameters, for every scenario (about 12 s)."""
    from bkwsieve.solvers import solve_all_schedules
    return {sc: solve_all_schedules(REGEV, Scenario(*sc), model) for sc in SCENARIOS}


def make_ctx(model, cq=2.0, cs=1.5, compute="classical", samples="exponential"):
    from bkwsieve.core import ProblemParams
    return ObjectiveContext(ProblemParams(cq, cs), Scenario(compute, samples), model)


@pytest.fixture
def report():
    """Record one acceptance line: report(criterion, passed, detail)."""
    def _record(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
