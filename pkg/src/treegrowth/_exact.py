"""Fraction-free integer determinants."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def bareiss_determinant(matrix: Sequence[Sequence[int]] | np.ndarray) -> int:
    """Exact determinant of a square integer matrix by Bareiss elimination.

    Every intermediate value is a minor of the input, so all divisions are
    exact.  Rows whose pivot-column entry is zero are not touched; they are
    rescaled lazily (``a * p_k / p_t`` is again a minor) the next time they
    take part in an update, which keeps banded and sparse Laplacians cheap.
    Pivoting picks the first row with a nonzero entry in the pivot column.
    """
    A = np.array(matrix, dtype=object)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    n = A.shape[0]
    if n == 0:
        return 1
    A = np.vectorize(int, otypes=[object])(A)

    # pivots[s] is the divisor used at step s (pivots[0] = 1)
    pivots = [1]
    level = [0] * n
    # last nonzero column of each row; an upper bound under fill-in
    hi = [0] * n
    for i in range(n):
        nz = np.flatnonzero(A[i] != 0)
        hi[i] = int(nz[-1]) if nz.size else -1
    sign = 1

    def lift(i: int, k: int) -> None:
        t = level[i]
        if t != k:
            if hi[i] >= k:
                seg = A[i, k : hi[i] + 1]
                A[i, k : hi[i] + 1] = (seg * pivots[k]) // pivots[t]
            level[i] = k

    for k in range(n):
        col = A[k:, k]
        nz = np.flatnonzero(col != 0)
        if nz.size == 0:
            return 0
        p = k + int(nz[0])
        if p != k:
            lift(p, k)
            lift(k, k)
            A[[k, p]] = A[[p, k]]
            hi[k], hi[p] = hi[p], hi[k]
            level[k], level[p] = level[p], level[k]
            sign = -sign
        lift(k, k)
        piv = A[k, k]
        if k == n - 1:
            return sign * piv
        rows = k + 1 + np.flatnonzero(A[k + 1 :, k] != 0)
        for i in rows:
            lift(int(i), k)
        if rows.size:
            end = max(hi[k], max(hi[int(i)] for i in rows)) + 1
            block = A[np.ix_(rows, range(k + 1, end))]
            prow = A[k, k + 1 : end]
            lead = A[rows, k]
            block = (block * piv - np.multiply.outer(lead, prow)) // pivots[k]
            A[np.ix_(rows, range(k + 1, end))] = block
            A[rows, k] = 0
            for i in rows:
                i = int(i)
                level[i] = k + 1
                hi[i] = end - 1
        pivots.append(piv)
    raise AssertionError("unreachable")
