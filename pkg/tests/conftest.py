import numpy as np
import pytest

from bpgeom import CylinderCaps, curvature_map
from bpgeom.engine import counterexample_hyperbolic


@pytest.fixture(scope="session")
def caps3():
    return CylinderCaps(3, 0.5, 0.02)


@pytest.fixture(scope="session")
def caps4():
    return CylinderCaps(4, 0.5, 0.02)


@pytest.fixture(scope="session")
def M3(caps3):
    return curvature_map(caps3, -1)


@pytest.fixture(scope="session")
def M4(caps4):
    return curvature_map(caps4, -1)


@pytest.fixture(scope="session")
def hyperbolic3():
    return counterexample_hyperbolic(3)


@pytest.fixture(scope="session")
def hyperbolic4():
    return counterexample_hyperbolic(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance reporting ----------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    title = getattr(report, "criterion", None)
    if title is None:
        return
    ok = report.outcome == "passed"
    prev = _CRITERIA.get(title, True)
    _CRITERIA[title] = prev and ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = "%2d. %s" % mark.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for title in sorted(_CRITERIA):
        terminalreporter.write_line(f"{'PASS' if _CRITERIA[title] else 'FAIL'}  {title}")
