import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pssm.expand import expand_pde  # noqa: E402
from pssm.model import builtin  # noqa: E402
from pssm.solve import solve_system  # noqa: E402

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test checks")


def pytest_runtest_logreport(report):
    label = getattr(report, "criterion", None)
    if label is None:
        return
    if report.when == "call" or report.outcome == "failed":
        ok = report.outcome == "passed"
        _CRITERIA[label] = _CRITERIA.get(label, True) and ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split()[0][2:])):
        status = "PASS" if _CRITERIA[label] else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")


@pytest.fixture(scope="session")
def solved():
    cache = {}

    def get(name):
        if name not in cache:
            p = builtin(name)
            s = expand_pde(p)
            cache[name] = (p, s, solve_system(s))
        return cache[name]

    return get
