import cmath
import math

import numpy as np
import pytest
from conftest import random_periodic_graph

from treegrowth.periodic_graph import PeriodicGraph, doubled, grid_graph
from treegrowth.quotient import build_quotient, spanning_tree_count
from treegrowth.spectral import omega_points, product_formula
from treegrowth.sublattice import diagonal, parse_lattice

TWO_ORBIT = PeriodicGraph(1, 2, [(1, 2, (0,)), (2, 1, (1,))])
PATH_PAIR = PeriodicGraph(1, 2, [(1, 1, (1,)), (1, 2, (0,)), (2, 2, (1,))])


def _as_set(points, digits=9):
    return sorted(tuple((round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0) for z in p) for p in points)


def test_omega_examples():
    w = cmath.exp(2j * math.pi / 3)
    assert _as_set(omega_points(diagonal(1, 3)).points) == _as_set([[1], [w], [w * w]])
    assert _as_set(omega_points(diagonal(2, 2)).points) == _as_set(
        [[1, 1], [1, -1], [-1, 1], [-1, -1]]
    )
    assert _as_set(omega_points(parse_lattice("1,-1;1,1")).points) == _as_set([[1, 1], [-1, -1]])


@pytest.mark.parametrize(
    "a, b",
    [
        ("2,0;0,3", "2,2;0,3"),
        ("1,-1;1,1", "1,0;1,2"),
        ("3,1;-1,4", "3,4;-1,3"),
        ("2,0,0;0,2,0;0,0,2", "2,2,0;0,2,2;0,0,2"),
    ],
)
def test_omega_independent_of_basis(a, b):
    la, lb = parse_lattice(a), parse_lattice(b)
    assert la.same_lattice(lb)
    pa, pb = omega_points(la).points, omega_points(lb).points
    assert len(pa) == la.index
    assert _as_set(pa) == _as_set(pb)


def test_omega_points_are_characters_of_the_quotient():
    lat = parse_lattice("3,1;-1,4")
    pts = omega_points(lat).points
    for col in lat.columns:
        assert np.allclose(np.prod(pts ** np.asarray(col), axis=1), 1, atol=1e-12)
    assert len(_as_set(pts)) == lat.index


def _exact(g, lat):
    return spanning_tree_count(build_quotient(g, lat)).log_T()


@pytest.mark.parametrize("n", [1, 2, 3, 7, 12])
def test_cycle_counts(n):
    res = product_formula(grid_graph(1), diagonal(1, n))
    assert res.log_value == pytest.approx(math.log(n), abs=1e-9)
    assert res.skipped == 1


@pytest.mark.parametrize(
    "g, lat",
    [
        (grid_graph(2), diagonal(2, 2)),
        (grid_graph(2), diagonal(2, 5)),
        (grid_graph(2), parse_lattice("1,-1;1,1")),
        (grid_graph(2), parse_lattice("3,1;-1,4")),
        (grid_graph(3), diagonal(3, 3)),
        (doubled(grid_graph(1)), diagonal(1, 9)),
        (TWO_ORBIT, diagonal(1, 5)),
        (PATH_PAIR, diagonal(1, 6)),
    ],
)
def test_matches_exact_count(g, lat):
    assert abs(product_formula(g, lat).log_value - _exact(g, lat)) <= 1e-6


def test_trivial_cover():
    for g in (grid_graph(2), TWO_ORBIT):
        lat = diagonal(g.d, 1)
        res = product_formula(g, lat)
        report = spanning_tree_count(build_quotient(g, lat))
        assert res.skipped == 1
        assert res.n_lambda == report.n_lambda
        assert res.log_value == pytest.approx(report.log_T(), abs=1e-9)


def test_skipped_points_count_components():
    g = grid_graph(2).without(lambda e: e[2] == (0, 1))
    for N in (3, 5):
        res = product_formula(g, diagonal(2, N))
        assert res.skipped == N
        assert abs(res.log_value - _exact(g, diagonal(2, N))) <= 1e-6


@pytest.mark.parametrize("N", [2, 4, 8])
def test_skipped_is_one_on_the_grid(N):
    assert product_formula(grid_graph(2), diagonal(2, N)).skipped == 1


def test_uncorrected_product_misses_zero_character_factors():
    # two orbits joined by a rung: at c = 1 the Laplacian [[1,-1],[-1,1]] is
    # singular but has the nonzero eigenvalue 2, which the bare product drops
    res = product_formula(PATH_PAIR, diagonal(1, 6))
    exact = _exact(PATH_PAIR, diagonal(1, 6))
    assert res.zero_eigenvalues == 1
    assert res.uncorrected_log_value == pytest.approx(exact - math.log(2), abs=1e-9)


def test_single_orbit_needs_no_correction(rng):
    for _ in range(20):
        g = random_periodic_graph(rng, d_max=2, n_max=1, m_max=4)
        lat = diagonal(g.d, 3)
        if not g.edge_orbits:
            continue
        try:
            res = product_formula(g, lat)
        except ValueError:
            continue
        assert res.uncorrected_log_value == pytest.approx(res.log_value, abs=1e-12)


def test_random_graphs_match_exact(rng):
    lattices = {1: [diagonal(1, 4), diagonal(1, 7)], 2: [diagonal(2, 3), parse_lattice("2,1;-1,3")]}
    checked = 0
    for _ in range(60):
        g = random_periodic_graph(rng, d_max=2, n_max=3, m_max=6)
        for lat in lattices[g.d]:
            try:
                res = product_formula(g, lat)
            except ValueError:
                break
            assert abs(res.log_value - _exact(g, lat)) <= 1e-6
            checked += 1
    assert checked > 40


def test_zero_polynomial_is_rejected():
    with pytest.raises(ValueError, match="closed component"):
        product_formula(PeriodicGraph(1, 1, [(1, 1, (0,))]), diagonal(1, 3))


def test_index_guard():
    with pytest.raises(ValueError):
        omega_points(diagonal(2, 100), max_index=1000)
