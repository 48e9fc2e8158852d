import pytest

from kscert.incidence import build_graph
from kscert.rays import build_configuration

_acceptance: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def config():
    return build_configuration()


@pytest.fixture(scope="session")
def graph(config):
    return build_graph(config)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance:
        terminalreporter.write_line(f"[{status}] {name}")
