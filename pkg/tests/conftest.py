import numpy as np
import pytest

from reldesign.game import StaticGame
from reldesign.scenarios import make_prisoners_dilemma, make_traffic_game

_ACCEPTANCE = []


@pytest.fixture
def traffic3():
    return make_traffic_game(3)


@pytest.fixture(params=[2, 3, 4, 5])
def traffic(request):
    return make_traffic_game(request.param)


@pytest.fixture
def pd():
    return make_prisoners_dilemma()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_game(rng, n, actions, low=0.0, high=10.0):
    shape = tuple(actions) if np.iterable(actions) else (actions,) * n
    return StaticGame(tuple(rng.uniform(low, high, shape) for _ in range(n)))


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
