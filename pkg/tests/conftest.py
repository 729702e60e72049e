import os

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from orderdag import Dag

settings.register_profile("default", deadline=None, max_examples=60)
settings.register_profile("ci", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def dags(draw, min_n=1, max_n=7):
    """Random labelled DAG: a random order plus a random edge subset."""
    n = draw(st.integers(min_n, max_n))
    order = draw(st.permutations(range(n)))
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if draw(st.booleans()):
                edges.append((order[a], order[b]))
    return Dag.from_edges(n, edges)


@st.composite
def dags_with_targets(draw, min_n=1, max_n=7, max_targets=3):
    g = draw(dags(min_n, max_n))
    targets = draw(st.sets(st.integers(0, g.n - 1), max_size=min(max_targets, g.n)))
    return g, frozenset(targets)


@pytest.fixture
def v_structure():
    # 0 -> 2 <- 1, 2 -> 3
    return Dag.from_edges(4, [(0, 2), (1, 2), (2, 3)])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
