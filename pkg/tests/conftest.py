import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from streamnorm.core import Sample
from streamnorm.datagen import SyntheticSpec, generate_synthetic


def make_samples(rows):
    """Samples from plain numbers (one attribute) or tuples."""
    return [
        Sample(i, tuple(r) if isinstance(r, (tuple, list)) else (float(r),))
        for i, r in enumerate(rows)
    ]


@pytest.fixture
def two_window_stream():
    return make_samples([20, 25, 30, 35, 40, 80, 85, 90, 95, 100])


@pytest.fixture(scope="session")
def synthetic_160k():
    return list(generate_synthetic(SyntheticSpec(seed=0)))


# -- acceptance summary --------------------------------------------------

_criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        detail = dict(item.user_properties).get("detail", "")
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        if report.skipped and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2]
        _criteria.append((marker.args[0], status, detail))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _criteria:
        terminalreporter.write_line(f"{status:4} {name}" + (f"  [{detail}]" if detail else ""))
