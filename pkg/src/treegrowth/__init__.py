"""Spanning tree growth of periodic graphs and the Mahler measure of their
Laplacian polynomials."""

from .laplacian import crsf_polynomial, delta_is_zero, laplacian_matrix, laplacian_polynomial
from .laurent import LaurentMatrix, LaurentPoly, determinant, evaluate, from_text, reciprocal, to_text, unit_equivalent
from .mahler import (
    MahlerEstimate,
    gap_report,
    grid_bound_report,
    growth_rate_table,
    mahler_measure,
    mahler_jensen,
    mahler_quadrature,
    regular_lower_bound_check,
)
from .periodic_graph import PeriodicGraph, decompose, grid_graph, read_graph, write_graph
from .quotient import (
    FiniteMultigraph,
    build_quotient,
    eigenvalue_product,
    spanning_tree_count,
    tau_deletion_contraction,
    upper_bound_check,
)
from .spectral import omega_points, product_formula
from .sublattice import Sublattice, cosets, diagonal, from_basis

__version__ = "0.1.0"
