import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402

from engel.catalog import default_catalog, resolve_group  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def elems(H):
    """Element set of a group or subgroup handle, as image tuples."""
    return frozenset(tuple(p.images) for p in H.elements())


def oracle_group(G):
    """The group's element set rebuilt from its generators by the brute-force oracle."""
    return oracles.close([p.images for p in G.generators], G.degree)


@pytest.fixture(scope="session")
def group():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = resolve_group(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
