"""Laplacian matrices and Laplacian polynomials of periodic graphs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .laurent import LaurentMatrix, LaurentPoly, determinant
from .periodic_graph import ComponentPart, PeriodicGraph, decompose

MAX_CRSF_EDGES = 16


@dataclass(frozen=True)
class LaplacianData:
    L: LaurentMatrix
    delta: LaurentPoly


def laplacian_matrix(g: PeriodicGraph) -> LaplacianData:
    """``L = D - A`` over the Laurent ring, and ``delta = det L``.

    An orbit ``(i, j, s)`` with ``i != j`` puts ``x^s`` in ``A[i, j]`` and
    ``x^-s`` in ``A[j, i]``.  A self-orbit ``(i, i, s)`` with ``s != 0`` gives
    ``v_{i,0}`` two edges, to ``v_{i,s}`` and ``v_{i,-s}``, so it adds 2 to the
    degree and ``x^s + x^-s`` to ``A[i, i]``.  Loop orbits are ignored.
    """
    d, n = g.d, g.n
    zero = (0,) * d
    cells: list[list[dict]] = [[{} for _ in range(n)] for _ in range(n)]

    def bump(i, j, exp, c):
        cell = cells[i][j]
        cell[exp] = cell.get(exp, 0) + c

    for i, j, s in g.edge_orbits:
        if g.is_loop((i, j, s)):
            continue
        i0, j0 = i - 1, j - 1
        neg_s = tuple(-v for v in s)
        bump(i0, i0, zero, 1)
        bump(j0, j0, zero, 1)
        bump(i0, j0, s, -1)
        bump(j0, i0, neg_s, -1)
    L = LaurentMatrix([[LaurentPoly(d, cells[i][j]) for j in range(n)] for i in range(n)], d)
    return LaplacianData(L=L, delta=determinant(L))


def laplacian_polynomial(g: PeriodicGraph) -> LaurentPoly:
    return laplacian_matrix(g).delta


def _cycle_factor(d: int, w) -> LaurentPoly:
    w = tuple(w)
    if not any(w):
        return LaurentPoly(d, {})
    return LaurentPoly(d, {(0,) * d: 2, w: -1, tuple(-v for v in w): -1})


@dataclass(frozen=True)
class CRSFTerm:
    forest: tuple[int, ...]
    cycle_monodromies: tuple[tuple[int, ...], ...]


def cycle_rooted_spanning_forests(g: PeriodicGraph):
    """Yield every cycle-rooted spanning forest of the quotient graph.

    A forest is a set of ``n`` edge orbits in which every connected component
    has exactly one cycle.  Components are tracked with a union-find that
    stores each vertex's translation relative to its root, so closing a
    cycle reads off its monodromy directly.
    """
    n, d = g.n, g.d
    edges = g.edge_orbits
    if len(edges) > MAX_CRSF_EDGES:
        raise ValueError(
            f"{len(edges)} edge orbits exceed the CRSF enumeration guard ({MAX_CRSF_EDGES})"
        )
    for subset in itertools.combinations(range(len(edges)), n):
        parent = list(range(n))
        offset = [(0,) * d for _ in range(n)]
        has_cycle = [False] * n
        monodromy: list[tuple[int, ...]] = []

        def find(v):
            path = []
            while parent[v] != v:
                path.append(v)
                v = parent[v]
            root = v
            # compress; offset[u] is phi(u) - phi(root)
            for u in reversed(path):
                p = parent[u]
                if p != root:
                    offset[u] = tuple(a + b for a, b in zip(offset[u], offset[p]))
                parent[u] = root
            return root

        ok = True
        for idx in subset:
            i, j, s = edges[idx]
            a, b = i - 1, j - 1
            ra, rb = find(a), find(b)
            if ra == rb:
                if has_cycle[ra]:
                    ok = False
                    break
                has_cycle[ra] = True
                # phi(b) should equal phi(a) + s; the mismatch is the monodromy
                w = tuple(oa + sv - ob for oa, sv, ob in zip(offset[a], s, offset[b]))
                monodromy.append(w)
            else:
                if has_cycle[ra] and has_cycle[rb]:
                    ok = False
                    break
                # attach rb under ra with phi(b) = phi(a) + s
                parent[rb] = ra
                offset[rb] = tuple(oa + sv - ob for oa, sv, ob in zip(offset[a], s, offset[b]))
                has_cycle[ra] = has_cycle[ra] or has_cycle[rb]
        if not ok:
            continue
        # n edges on n vertices with at most one cycle per component forces
        # exactly one cycle in each
        if all(has_cycle[find(v)] for v in range(n)):
            yield CRSFTerm(forest=subset, cycle_monodromies=tuple(monodromy))


def crsf_polynomial(g: PeriodicGraph) -> LaurentPoly:
    """Sum over cycle-rooted spanning forests of prod (2 - x^w - x^-w)."""
    total = LaurentPoly(g.d, {})
    for term in cycle_rooted_spanning_forests(g):
        prod = LaurentPoly.constant(g.d, 1)
        for w in term.cycle_monodromies:
            prod = prod * _cycle_factor(g.d, w)
            if prod.is_zero():
                break
        total = total + prod
    return total


@dataclass(frozen=True)
class ZeroTest:
    is_zero: bool
    witness: ComponentPart | None

    def __bool__(self) -> bool:
        return self.is_zero


def delta_is_zero(g: PeriodicGraph, delta: LaurentPoly | None = None) -> ZeroTest:
    """Whether the Laplacian polynomial vanishes, with a closed part as witness."""
    if delta is None:
        delta = laplacian_polynomial(g)
    closed = decompose(g).closed_parts()
    if delta.is_zero():
        if not closed:
            raise ArithmeticError("zero Laplacian polynomial without a closed component")
        return ZeroTest(True, closed[0])
    return ZeroTest(False, None)


def factor_blocks(g: PeriodicGraph) -> list[tuple[ComponentPart, LaurentPoly]]:
    """Laplacian polynomial of each component orbit, in orbit order."""
    return [(part, laplacian_polynomial(g.restrict(part.orbits))) for part in decompose(g).parts]


def block_product(g: PeriodicGraph) -> LaurentPoly:
    return math.prod((f for _, f in factor_blocks(g)), start=LaurentPoly.constant(g.d, 1))
