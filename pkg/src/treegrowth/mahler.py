"""Logarithmic Mahler measure: Jensen's formula in one variable, torus
quadrature in several, plus the growth-rate and bound tables built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .laplacian import delta_is_zero, laplacian_polynomial
from .laurent import LaurentPoly
from .periodic_graph import PeriodicGraph, grid_graph
from .quotient import build_quotient, spanning_tree_count
from .sublattice import Sublattice

MAX_GRID_NODES = 10**8
DEFAULT_GRID = {1: 4096, 2: 1024, 3: 160}
DEFAULT_SAMPLES = 2_000_000
_CHUNK_NODES = 1 << 20


@dataclass(frozen=True)
class MahlerEstimate:
    """Numeric ``m(f)`` in nats.

    ``error_bound`` is heuristic: Newton-step root uncertainty for Jensen,
    ``|m(M) - m(M/2)|`` for the midpoint grid, three standard errors for
    Monte Carlo.
    """

    value: float
    method: str
    error_bound: float
    samples_or_grid: int
    dropped: int = 0


def _ordinary_coefficients(f: LaurentPoly) -> list[int]:
    """Coefficients of ``x^-k f`` from the constant term up."""
    lo = min(e[0] for e in f.terms)
    hi = max(e[0] for e in f.terms)
    coeffs = [0] * (hi - lo + 1)
    for (e,), c in f.items():
        coeffs[e - lo] = c
    return coeffs


def _deflate(coeffs: list[int], root: int) -> tuple[list[int], int]:
    """Divide out ``(x - root)`` as often as it divides exactly, ``root`` in {1, -1}."""
    count = 0
    while len(coeffs) > 1:
        # synthetic division from the top
        q = [0] * (len(coeffs) - 1)
        carry = 0
        for k in range(len(coeffs) - 1, 0, -1):
            carry = coeffs[k] + carry * root
            q[k - 1] = carry
        if coeffs[0] + carry * root != 0:
            break
        coeffs = q
        count += 1
    return coeffs, count


def mahler_jensen(f: LaurentPoly) -> MahlerEstimate:
    """``m(f)`` for one variable as ``log|lead| + sum log max(1, |root|)``.

    Roots at ``+-1`` are removed by exact division first (they contribute
    nothing); the rest come from the companion-matrix eigenvalues.
    """
    if f.d != 1:
        raise ValueError("Jensen's formula needs a one-variable polynomial")
    if f.is_zero():
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    coeffs = _ordinary_coefficients(f)
    coeffs, _ = _deflate(coeffs, 1)
    coeffs, _ = _deflate(coeffs, -1)
    lead = coeffs[-1]
    if len(coeffs) == 1:
        return MahlerEstimate(math.log(abs(lead)), "jensen_roots", 0.0, 0)
    poly = np.asarray(coeffs[::-1], dtype=float)
    roots = np.roots(poly)
    deriv = np.polyder(poly)
    terms = [math.log(abs(lead))]
    err = 0.0
    for z in roots:
        a = float(abs(z))
        terms.append(math.log(a) if a > 1 else 0.0)
        slope = float(abs(np.polyval(deriv, z)))
        step = float(abs(np.polyval(poly, z))) / slope if slope > 0 else math.inf
        # only roots that may sit outside the unit circle move the sum
        if a + step >= 1:
            err += step / max(a, 1e-300)
    return MahlerEstimate(math.fsum(terms), "jensen_roots", err, len(roots))


def _axis_factors(exps: Sequence[int], M: int) -> dict[int, np.ndarray]:
    # z^e at nodes (j + 1/2)/M, phase reduced exactly as e*(2j+1) mod 2M
    j2 = 2 * np.arange(M, dtype=np.int64) + 1
    return {e: np.exp(1j * np.pi * (np.mod(e * j2, 2 * M) / M)) for e in set(exps)}


def _midpoint_mean(f: LaurentPoly, M: int) -> tuple[float, int]:
    d = f.d
    terms = sorted(f.items())
    factors = [_axis_factors([e[k] for e, _ in terms], M) for k in range(d)]
    rows_per_chunk = max(1, _CHUNK_NODES // (M ** (d - 1)))
    partials = []
    dropped = 0
    for start in range(0, M, rows_per_chunk):
        stop = min(M, start + rows_per_chunk)
        acc = np.zeros((stop - start,) + (M,) * (d - 1), dtype=complex)
        for exp, c in terms:
            block = np.asarray(float(c), dtype=complex)
            for k in range(d):
                fk = factors[k][exp[k]]
                if k == 0:
                    fk = fk[start:stop]
                shape = [1] * d
                shape[k] = len(fk)
                block = block * fk.reshape(shape)
            acc += block
        mag = np.abs(acc).ravel()
        good = mag > 0
        dropped += int(mag.size - np.count_nonzero(good))
        partials.append(float(np.sum(np.log(mag[good]))))
    count = M**d - dropped
    return math.fsum(partials) / count, dropped


def mahler_quadrature(f: LaurentPoly, grid: int | None = None) -> MahlerEstimate:
    """Midpoint rule on the torus with ``grid`` nodes per axis.

    Nodes sit at ``(k + 1/2)/grid`` so none hits ``(1, ..., 1)``.  Nodes where
    ``|f|`` underflows to zero are dropped and counted.  The error bound is
    the change from the half-resolution grid.
    """
    if f.is_zero():
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    M = DEFAULT_GRID.get(f.d, 32) if grid is None else int(grid)
    if M < 2:
        raise ValueError("grid needs at least 2 nodes per axis")
    if M**f.d > MAX_GRID_NODES:
        raise ValueError(f"grid {M}^{f.d} exceeds {MAX_GRID_NODES} nodes")
    value, dropped = _midpoint_mean(f, M)
    coarse, _ = _midpoint_mean(f, M // 2)
    return MahlerEstimate(value, "midpoint_grid", abs(value - coarse), M, dropped)


def mahler_monte_carlo(f: LaurentPoly, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> MahlerEstimate:
    """Uniform random torus sampling with a fixed seed."""
    if f.is_zero():
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    rng = np.random.default_rng(seed)
    terms = sorted(f.items())
    chunk = 1 << 18
    sums, sq, dropped = [], [], 0
    remaining = samples
    while remaining:
        k = min(chunk, remaining)
        theta = rng.random((k, f.d))
        acc = np.zeros(k, dtype=complex)
        for exp, c in terms:
            acc += float(c) * np.exp(2j * np.pi * (theta @ np.asarray(exp, dtype=float)))
        mag = np.abs(acc)
        good = mag > 0
        dropped += int(k - np.count_nonzero(good))
        logs = np.log(mag[good])
        sums.append(float(np.sum(logs)))
        sq.append(float(np.sum(logs * logs)))
        remaining -= k
    count = samples - dropped
    mean = math.fsum(sums) / count
    var = max(math.fsum(sq) / count - mean * mean, 0.0)
    return MahlerEstimate(mean, "monte_carlo", 3 * math.sqrt(var / count), samples, dropped)


def mahler_measure(f: LaurentPoly, grid: int | None = None, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> MahlerEstimate:
    """Jensen for one variable, midpoint grid up to three, Monte Carlo beyond."""
    if f.d == 1:
        return mahler_jensen(f)
    if f.d <= 3:
        return mahler_quadrature(f, grid)
    return mahler_monte_carlo(f, samples, seed)


# tables


@dataclass(frozen=True)
class GrowthRow:
    min_length: float
    index: int
    rate: float
    components: int


@dataclass(frozen=True)
class GrowthTable:
    rows: tuple[GrowthRow, ...]
    estimate: MahlerEstimate

    def discrepancies(self) -> list[float]:
        return [abs(r.rate - self.estimate.value) for r in self.rows]


def growth_rate_table(
    g: PeriodicGraph,
    lattices: Sequence[Sublattice],
    estimate: MahlerEstimate | None = None,
) -> GrowthTable:
    """``log T(G_Lambda) / index`` per lattice, next to ``m(Delta)``."""
    delta = laplacian_polynomial(g)
    if delta_is_zero(g, delta):
        raise ValueError("Laplacian polynomial is identically zero (closed component); growth rate undefined")
    if estimate is None:
        estimate = mahler_measure(delta)
    rows = []
    for lat in lattices:
        report = spanning_tree_count(build_quotient(g, lat))
        rows.append(GrowthRow(lat.min_length, lat.index, report.log_T() / lat.index, report.component_count))
    return GrowthTable(tuple(rows), estimate)


@dataclass(frozen=True)
class GridBoundRow:
    d: int
    estimate: MahlerEstimate
    log_2d: float

    @property
    def deficit(self) -> float:
        return self.log_2d - self.estimate.value


def grid_bound_report(d_max: int, grid: int | dict[int, int] | None = None, seed: int = 0) -> list[GridBoundRow]:
    """``m(Delta(G_d))`` against ``log 2d`` for ``d = 1..d_max``.

    Every dimension uses the midpoint grid (Monte Carlo for ``d >= 4``) so
    the values are comparable across ``d``.
    """
    if d_max > 4:
        raise ValueError("d_max is limited to 4")
    rows = []
    for d in range(1, d_max + 1):
        f = laplacian_polynomial(grid_graph(d))
        if d >= 4:
            est = mahler_monte_carlo(f, seed=seed)
        else:
            M = grid.get(d) if isinstance(grid, dict) else grid
            est = mahler_quadrature(f, M)
        rows.append(GridBoundRow(d, est, math.log(2 * d)))
    return rows


def is_nondecreasing(rows: Sequence[GridBoundRow]) -> bool:
    vals = [r.estimate.value for r in rows]
    return all(a <= b for a, b in zip(vals, vals[1:]))


def gap_polynomial(s: int, r: int = 1) -> LaurentPoly:
    """``4 - x^r - x^-r - x^s - x^-s``."""
    f = LaurentPoly(1, {(0,): 4})
    for e in (r, -r, s, -s):
        f = f - LaurentPoly(1, {(e,): 1})
    return f


@dataclass(frozen=True)
class GapRow:
    s: int
    estimate: MahlerEstimate

    @property
    def at_least_log2(self) -> bool:
        return self.estimate.value >= math.log(2) - 1e-9


def gap_report(s_max: int, s_min: int = 2) -> list[GapRow]:
    """Jensen values of ``m(4 - x - x^-1 - x^s - x^-s)`` for ``s_min..s_max``."""
    if s_max < s_min:
        raise ValueError("empty range of s")
    return [GapRow(s, mahler_jensen(gap_polynomial(s))) for s in range(s_min, s_max + 1)]


@dataclass(frozen=True)
class RegularBound:
    d: int
    index: int
    rate: float
    log_2d: float

    @property
    def deficit(self) -> float:
        return self.log_2d - self.rate


def regular_lower_bound_check(d: int, lattice: Sublattice) -> RegularBound:
    """``log tau((G_d)_Lambda) / index`` against ``log 2d``."""
    h = build_quotient(grid_graph(d), lattice)
    if not h.is_connected():
        raise ValueError("quotient is not connected")
    report = spanning_tree_count(h)
    return RegularBound(d, lattice.index, report.log_T() / lattice.index, math.log(2 * d))
