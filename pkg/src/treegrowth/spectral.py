"""Tree counts of torus quotients from Laplacian values at roots of unity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laplacian import laplacian_matrix
from .laurent import LaurentPoly, evaluate_rational_phases
from .periodic_graph import PeriodicGraph
from .quotient import build_quotient
from .sublattice import MAX_COSETS, Sublattice


@dataclass(frozen=True)
class OmegaSet:
    """Characters of Z^d trivial on a sublattice.

    Point ``k`` is ``exp(2*pi*i * numerators[k] / denominator)`` coordinatewise.
    """

    lattice: Sublattice
    numerators: np.ndarray
    denominator: int

    @property
    def points(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.numerators / self.denominator)

    def __len__(self) -> int:
        return len(self.numerators)


def omega_points(lattice: Sublattice, max_index: int = MAX_COSETS) -> OmegaSet:
    """All ``c`` with ``c^n = 1`` for every ``n`` in the lattice.

    With ``U B V = diag(r)`` the condition reads ``theta = U^T (k / r)`` for
    ``0 <= k_i < r_i`` (angles in turns).  Angles are kept as exact integer
    numerators over ``R = r_d`` so every point is a correctly rounded root of
    unity.
    """
    if lattice.index > max_index:
        raise ValueError(f"index {lattice.index} exceeds the guard {max_index}")
    r = lattice.invariant_factors
    R = r[-1]
    U = np.asarray(lattice.snf_left, dtype=np.int64)
    scale = np.asarray([R // ri for ri in r], dtype=np.int64)
    ks = np.asarray(_box(r), dtype=np.int64).reshape(-1, lattice.d)
    numerators = np.mod((ks * scale) @ U, R)
    omega = OmegaSet(lattice, numerators, R)
    _verify(omega)
    return omega


def _box(r):
    grids = np.meshgrid(*[np.arange(ri) for ri in r], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _verify(omega: OmegaSet) -> None:
    pts = omega.points
    for col in omega.lattice.columns:
        vals = np.prod(pts ** np.asarray(col), axis=1) if len(pts) else pts
        if len(vals) and np.max(np.abs(vals - 1)) > 1e-10:
            raise ArithmeticError("a generated character is not trivial on the lattice")


@dataclass(frozen=True)
class ProductFormulaResult:
    log_value: float
    uncorrected_log_value: float
    skipped: int
    zero_eigenvalues: int
    n_lambda: int
    index: int

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def _matrix_at(entries, numerators: np.ndarray, R: int) -> np.ndarray:
    n = len(entries)
    M = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            M[i, j] = evaluate_rational_phases(entries[i][j], numerators[None, :], R)[0]
    return M


def product_formula(
    g: PeriodicGraph,
    lattice: Sublattice,
    zero_tol: float | None = None,
    max_index: int = MAX_COSETS,
) -> ProductFormulaResult:
    """``log T(G_Lambda)`` from Laplacian values over the character group.

    The product of ``|Delta(c)|`` runs over characters with ``|Delta(c)|``
    above ``zero_tol`` (default: ``1e-9`` times the largest value).  When
    ``n > 1`` a character with ``Delta(c) = 0`` can still carry nonzero
    eigenvalues of ``L(c)``; their product is included, which is what makes
    the result equal the tree count for multi-orbit graphs.
    ``uncorrected_log_value`` omits those factors.  ``n_Lambda`` comes from
    the components of the exact quotient.
    """
    data = laplacian_matrix(g)
    delta: LaurentPoly = data.delta
    if delta.is_zero():
        raise ValueError("Laplacian polynomial is identically zero: the graph has a closed component")
    omega = omega_points(lattice, max_index)
    vals = np.abs(evaluate_rational_phases(delta, omega.numerators, omega.denominator))
    tol = 1e-9 * float(vals.max()) if zero_tol is None else zero_tol
    zero = vals <= tol

    logs = np.log(vals[~zero])
    uncorrected = math.fsum(logs.tolist())
    corrections = []
    zero_eigs = 0
    for a in omega.numerators[zero]:
        M = _matrix_at(data.L.entries, a, omega.denominator)
        ev = np.linalg.eigvalsh((M + M.conj().T) / 2)
        scale = max(1.0, float(np.max(np.abs(ev))))
        keep = np.abs(ev) > 1e-9 * scale
        zero_eigs += int(np.count_nonzero(~keep))
        corrections.extend(np.log(np.abs(ev[keep])).tolist())

    comps = build_quotient(g, lattice, max_index).components
    n_lambda = math.prod(len(c) for c in comps)
    log_n = math.log(n_lambda)
    return ProductFormulaResult(
        log_value=math.fsum([uncorrected, *corrections]) - log_n,
        uncorrected_log_value=uncorrected - log_n,
        skipped=int(np.count_nonzero(zero)),
        zero_eigenvalues=zero_eigs,
        n_lambda=n_lambda,
        index=lattice.index,
    )
