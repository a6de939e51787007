"""Finite-index sublattices of Z^d and their integer normal forms."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from ._exact import bareiss_determinant

IntMatrix = tuple[tuple[int, ...], ...]

MAX_COSETS = 10**6


def hermite_normal_form(rows: Sequence[Sequence[int]], d: int | None = None) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows in echelon order: each pivot is positive, and
    the entries above a pivot lie in ``[0, pivot)``.
    """
    A = [[int(v) for v in r] for r in rows]
    if d is None:
        if not A:
            return []
        d = len(A[0])
    out: list[list[int]] = []
    col = 0
    while A and col < d:
        nonzero = [r for r in A if r[col] != 0]
        rest = [r for r in A if r[col] == 0]
        if not nonzero:
            col += 1
            continue
        # Euclid on the column: keep reducing by the smallest entry
        while len(nonzero) > 1:
            nonzero.sort(key=lambda r: abs(r[col]))
            piv = nonzero[0]
            reduced = [piv]
            for r in nonzero[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[col] != 0:
                    reduced.append(r)
                elif any(r):
                    rest.append(r)
            nonzero = reduced
        piv = nonzero[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        A = [r for r in rest if any(r)]
        col += 1
    # reduce entries above each pivot
    for i, row in enumerate(out):
        c = next(j for j, v in enumerate(row) if v)
        for k in range(i):
            q = out[k][c] // row[c]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], row)]
    return out


def smith_normal_form(B: Sequence[Sequence[int]]):
    """Smith form ``U @ B @ V = diag(r)`` with ``r_1 | r_2 | ...``.

    Returns ``(r, U, V)`` as lists; ``U`` and ``V`` are unimodular.  ``B``
    must be square.
    """
    n = len(B)
    A = [[int(v) for v in row] for row in B]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(dst, src, q):
        # row_dst -= q * row_src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def col_op(dst, src, q):
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    for t in range(n):
        while True:
            entries = [(abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, n) if A[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            piv = A[t][t]
            done = True
            for i in range(t + 1, n):
                if A[i][t]:
                    row_op(i, t, A[i][t] // piv)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    col_op(j, t, A[t][j] // piv)
                    if A[t][j]:
                        done = False
            if not done:
                continue
            # divisibility: fold an offending row into row t and retry
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if A[i][j] % piv),
                None,
            )
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
            U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    r = [A[i][i] for i in range(n)]
    return r, U, V


def _matmul(X, Y):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*Y)] for row in X]


@dataclass(frozen=True)
class Sublattice:
    """A finite-index subgroup of Z^d.

    ``basis`` holds the generating vectors as columns.  ``hnf`` lists the
    same lattice as Hermite rows, which fixes the coset box
    ``prod [0, hnf[i][i])``.
    """

    d: int
    basis: IntMatrix
    index: int
    invariant_factors: tuple[int, ...]
    snf_left: IntMatrix
    snf_right: IntMatrix
    hnf: IntMatrix
    min_length_sq: int
    _shortest: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def min_length(self) -> float:
        return math.sqrt(self.min_length_sq)

    @property
    def shortest_vector(self) -> tuple[int, ...]:
        return self._shortest

    @property
    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(self.basis[i][j] for i in range(self.d)) for j in range(self.d)]

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        """Canonical coset representative of ``v`` in the Hermite box."""
        v = [int(a) for a in v]
        for i, row in enumerate(self.hnf):
            q = v[i] // row[i]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def cosets(self, max_index: int = MAX_COSETS) -> list[tuple[int, ...]]:
        return cosets(self, max_index)

    def same_lattice(self, other: Sublattice) -> bool:
        return self.d == other.d and self.hnf == other.hnf

    def __str__(self) -> str:
        rows = ";".join(",".join(str(v) for v in row) for row in self.basis)
        return rows


def _check_unimodular(M) -> None:
    if abs(bareiss_determinant(M)) != 1:
        raise ArithmeticError("Smith transform is not unimodular")


def _shortest_vector(hnf: list[list[int]], bound_sq: int):
    """Exhaustive search for a shortest nonzero vector with norm^2 <= bound_sq.

    Coefficients are enumerated row by row against the echelon form, pruning
    any branch whose fixed leading coordinates already exceed the bound.
    """
    d = len(hnf)
    best_sq = bound_sq
    best = None

    def rec(i, partial, acc_sq):
        nonlocal best_sq, best
        if i == d:
            if any(partial) and acc_sq <= best_sq:
                if acc_sq < best_sq or best is None or partial < list(best):
                    best_sq, best = acc_sq, tuple(partial)
            return
        h = hnf[i][i]
        # coordinate i is partial[i] + c*h; it must stay within the radius
        radius = math.isqrt(best_sq - acc_sq)
        lo = -((radius + partial[i]) // h)
        hi = (radius - partial[i]) // h
        for c in range(lo, hi + 1):
            nxt = [a + c * b for a, b in zip(partial, hnf[i])]
            sq = acc_sq + nxt[i] * nxt[i]
            if sq <= best_sq:
                rec(i + 1, nxt, sq)

    rec(0, [0] * d, 0)
    return best_sq, best


def from_basis(d: int, cols: Sequence[Sequence[int]]) -> Sublattice:
    """Build a sublattice from a ``d x d`` integer matrix whose columns generate it.

    ``cols`` is given row-wise (``cols[i][j]`` is entry ``i`` of column ``j``),
    matching the ``"a,b;c,d"`` lattice syntax.
    """
    B = [[int(v) for v in row] for row in cols]
    if len(B) != d or any(len(row) != d for row in B):
        raise ValueError(f"basis must be {d}x{d}")
    det = bareiss_determinant(B)
    if det == 0:
        raise ValueError("basis is singular; sublattice must have finite index")
    r, U, V = smith_normal_form(B)
    _check_unimodular(U)
    _check_unimodular(V)
    if _matmul(_matmul(U, B), V) != [[r[i] if i == j else 0 for j in range(d)] for i in range(d)]:
        raise ArithmeticError("Smith decomposition failed to reproduce the basis")
    index = abs(det)
    if math.prod(r) != index:
        raise ArithmeticError("invariant factors do not multiply to the index")
    columns = [[B[i][j] for i in range(d)] for j in range(d)]
    hnf = hermite_normal_form(columns, d)
    bound = min(sum(v * v for v in c) for c in columns + hnf)
    min_sq, shortest = _shortest_vector(hnf, bound)
    return Sublattice(
        d=d,
        basis=tuple(tuple(row) for row in B),
        index=index,
        invariant_factors=tuple(r),
        snf_left=tuple(tuple(row) for row in U),
        snf_right=tuple(tuple(row) for row in V),
        hnf=tuple(tuple(row) for row in hnf),
        min_length_sq=min_sq,
        _shortest=shortest,
    )


def diagonal(d: int, n: int | Sequence[int]) -> Sublattice:
    """``diag(n, ..., n)`` or ``diag(n_1, ..., n_d)``."""
    sizes = [n] * d if isinstance(n, int) else list(n)
    return from_basis(d, [[sizes[i] if i == j else 0 for j in range(d)] for i in range(d)])


def cosets(lat: Sublattice, max_index: int = MAX_COSETS) -> list[tuple[int, ...]]:
    """All coset representatives of Z^d / lattice, first coordinate fastest."""
    if lat.index > max_index:
        raise ValueError(f"index {lat.index} exceeds the coset guard {max_index}")
    ranges = [range(lat.hnf[i][i]) for i in range(lat.d)]
    return [tuple(reversed(p)) for p in itertools.product(*reversed(ranges))]


def parse_lattice(text: str) -> Sublattice:
    """Parse ``"a,b;c,d"`` (rows of the column-basis matrix) or ``"n"`` for d=1."""
    try:
        rows = [[int(v) for v in row.split(",")] for row in text.strip().split(";")]
    except ValueError as exc:
        raise ValueError(f"malformed lattice {text!r}: {exc}") from None
    return from_basis(len(rows), rows)
