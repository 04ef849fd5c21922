import pytest

from stringy.builders import SHIPPED, build_named
from stringy.dataset import load_shipped


@pytest.fixture(scope="session")
def shipped():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_shipped(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def built():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_named(name)
        return cache[name]

    return get


ALL = SHIPPED


def pytest_terminal_summary(terminalreporter, config):
    from test_acceptance import ACCEPTANCE_KEY

    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
