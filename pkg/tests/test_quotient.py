import math
from fractions import Fraction

import numpy as np
import pytest
from conftest import random_multigraph, random_periodic_graph

from treegrowth.periodic_graph import PeriodicGraph, decompose, grid_graph
from treegrowth.quotient import (
    FiniteMultigraph,
    build_quotient,
    eigenvalue_product,
    spanning_tree_count,
    tau_deletion_contraction,
    upper_bound_check,
)
from treegrowth.sublattice import diagonal, parse_lattice


def test_complete_graphs():
    for n in range(1, 9):
        assert spanning_tree_count(FiniteMultigraph.complete(n)).T == n ** max(n - 2, 0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 9])
def test_cycles(n):
    c = FiniteMultigraph.cycle(n)
    assert spanning_tree_count(c).T == n
    assert tau_deletion_contraction(c) == n


def test_two_triangles():
    h = FiniteMultigraph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    report = spanning_tree_count(h)
    assert (report.T, report.n_lambda, report.tau_per_component) == (9, 9, (3, 3))


def test_isolated_vertex_counts_one():
    report = spanning_tree_count(FiniteMultigraph.from_edges(3, [(0, 1)]))
    assert report.tau_per_component == (1, 1)
    assert report.component_sizes == (2, 1)


def test_deletion_contraction_examples():
    assert tau_deletion_contraction(FiniteMultigraph.complete(2)) == 1
    assert tau_deletion_contraction(FiniteMultigraph.from_edges(2, [(0, 1), (0, 1)])) == 2
    assert tau_deletion_contraction(FiniteMultigraph.complete(4)) == 16
    with_loop = FiniteMultigraph.from_edges(3, [(0, 1), (1, 2), (2, 0), (1, 1)])
    assert tau_deletion_contraction(with_loop) == 3


def test_deletion_contraction_guards():
    with pytest.raises(ValueError):
        tau_deletion_contraction(FiniteMultigraph.complete(8))
    with pytest.raises(ValueError):
        tau_deletion_contraction(FiniteMultigraph.from_edges(3, [(0, 1)]))


def test_eigenvalue_product_examples():
    assert eigenvalue_product(FiniteMultigraph.complete(2)) == pytest.approx(1, rel=1e-12)
    assert eigenvalue_product(FiniteMultigraph.cycle(4)) == pytest.approx(4, rel=1e-12)
    two_k2 = FiniteMultigraph.from_edges(4, [(0, 1), (2, 3)])
    assert eigenvalue_product(two_k2) == pytest.approx(1, rel=1e-12)


def test_upper_bound_examples():
    k5 = upper_bound_check(FiniteMultigraph.complete(5))
    assert (k5.tau, k5.bound, k5.holds) == (125, Fraction(256), True)
    c4 = upper_bound_check(FiniteMultigraph.cycle(4))
    assert (c4.tau, c4.bound, c4.holds) == (4, Fraction(8), True)
    k2 = upper_bound_check(FiniteMultigraph.complete(2))
    assert (k2.tau, k2.bound, k2.holds) == (1, Fraction(1), True)


def test_oracles_agree_on_random_multigraphs(rng):
    for _ in range(100):
        h = random_multigraph(rng)
        tau = spanning_tree_count(h).T
        assert tau_deletion_contraction(h) == tau
        assert eigenvalue_product(h) == pytest.approx(tau, rel=1e-8)
        assert upper_bound_check(h, tau).holds


def test_eigenvalue_product_on_larger_graphs(rng):
    for n in (20, 40, 64):
        edges = [(k, (k + 1) % n) for k in range(n)]
        edges += [tuple(int(v) for v in rng.choice(n, 2, replace=False)) for _ in range(n)]
        h = FiniteMultigraph.from_edges(n, edges)
        assert eigenvalue_product(h, log=True) == pytest.approx(spanning_tree_count(h).log_T(), rel=1e-8)


def test_quotients_of_the_line():
    g = grid_graph(1)
    for n in (3, 6):
        h = build_quotient(g, diagonal(1, n))
        assert np.array_equal(h.adjacency, FiniteMultigraph.cycle(n).adjacency)
    h2 = build_quotient(g, diagonal(1, 2))
    assert h2.adjacency.tolist() == [[0, 2], [2, 0]]
    h1 = build_quotient(g, diagonal(1, 1))
    # every translate of the one edge lands on the same loop
    assert (h1.vertex_count, h1.loops.tolist(), h1.edge_count) == (1, [1], 0)
    assert spanning_tree_count(h1).T == 1


def test_small_torus():
    h = build_quotient(grid_graph(2), diagonal(2, 2))
    assert h.vertex_count == 4
    assert h.degrees().tolist() == [4] * 4
    assert sorted(k for _, _, k in h.edges()) == [2, 2, 2, 2]


@pytest.mark.parametrize("N", [3, 5, 8])
def test_torus_is_four_regular(N):
    h = build_quotient(grid_graph(2), diagonal(2, N))
    assert h.vertex_count == N * N
    assert set(h.degrees().tolist()) == {4}
    assert h.is_connected()


def test_vertex_numbering():
    g = PeriodicGraph(1, 2, [(1, 2, (0,)), (2, 1, (1,))])
    h = build_quotient(g, diagonal(1, 3))
    assert h.labels[4] == (2, (1,))
    assert h.vertex_count == 6


def test_loop_orbits_become_loops():
    g = PeriodicGraph(1, 1, [(1, 1, (1,)), (1, 1, (0,))])
    h = build_quotient(g, diagonal(1, 4))
    assert h.loops.tolist() == [1, 1, 1, 1]
    assert spanning_tree_count(h).T == 4


def test_connected_quotient_normaliser(rng):
    # n_Lambda = n * index whenever the quotient is connected
    lattices = [diagonal(1, 5), diagonal(2, 3), parse_lattice("2,1;-1,3")]
    seen = 0
    for _ in range(200):
        g = random_periodic_graph(rng, d_max=2, n_max=3, m_max=6)
        lat = next(l for l in lattices if l.d == g.d)
        report = spanning_tree_count(build_quotient(g, lat))
        if report.component_count == 1:
            seen += 1
            assert report.n_lambda == g.n * lat.index
    assert seen > 20


def test_grid_without_vertical_edges():
    g = grid_graph(2).without(lambda e: e[2] == (0, 1))
    assert decompose(g).t == 1
    for N in (3, 6, 10):
        report = spanning_tree_count(build_quotient(g, diagonal(2, N)))
        assert report.tau_per_component == (N,) * N
        assert report.log_T() / N**2 == pytest.approx(math.log(N) / N, rel=1e-12)
