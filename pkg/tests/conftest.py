import pytest

from nambu import fixtures


@pytest.fixture(scope="session")
def n3():
    return fixtures.load("n3")


@pytest.fixture(scope="session")
def n4():
    return fixtures.load("n4")


@pytest.fixture(scope="session")
def n6():
    return fixtures.load("n6")


@pytest.fixture(scope="session")
def n6_mu0():
    return fixtures.load("n6", mu=0)


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    num, title = mark.args
    ok = call.excinfo is None
    prev = _criteria.get(num, (title, True))
    _criteria[num] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, ok = _criteria[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title}")
