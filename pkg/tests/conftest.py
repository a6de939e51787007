from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from treegrowth.periodic_graph import PeriodicGraph
from treegrowth.quotient import FiniteMultigraph

REPO = Path(__file__).resolve().parent.parent
GRAPHS = REPO / "graphs"


def random_periodic_graph(rng: np.random.Generator, d_max=2, n_max=3, m_max=5, s_range=2) -> PeriodicGraph:
    d = int(rng.integers(1, d_max + 1))
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    edges = []
    for _ in range(m):
        i, j = (int(v) for v in rng.integers(1, n + 1, size=2))
        s = tuple(int(v) for v in rng.integers(-s_range, s_range + 1, size=d))
        edges.append((i, j, s))
    return PeriodicGraph(d, n, edges)


def random_multigraph(rng: np.random.Generator, n_max=10, e_max=24) -> FiniteMultigraph:
    """Connected: a random spanning tree plus random extra edges (parallels allowed)."""
    n = int(rng.integers(2, n_max + 1))
    e = int(rng.integers(n - 1, e_max + 1))
    perm = rng.permutation(n)
    edges = [(int(perm[int(rng.integers(0, v))]), int(perm[v])) for v in range(1, n)]
    while len(edges) < e:
        a, b = rng.choice(n, 2, replace=False)
        edges.append((int(a), int(b)))
    return FiniteMultigraph.from_edges(n, edges)


@st.composite
def periodic_graphs(draw, d_max=2, n_max=3, m_max=5, s_range=2):
    d = draw(st.integers(1, d_max))
    n = draw(st.integers(1, n_max))
    edge = st.tuples(
        st.integers(1, n),
        st.integers(1, n),
        st.tuples(*[st.integers(-s_range, s_range)] * d),
    )
    return PeriodicGraph(d, n, draw(st.lists(edge, max_size=m_max)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance lines, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
