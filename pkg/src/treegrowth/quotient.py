"""Finite torus quotients and exact spanning tree counts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, reverse_cuthill_mckee

from ._exact import bareiss_determinant
from .periodic_graph import PeriodicGraph
from .sublattice import MAX_COSETS, Sublattice, cosets

MAX_DC_EDGES = 24


@dataclass(frozen=True, eq=False)
class FiniteMultigraph:
    """Undirected multigraph on vertices ``0..vertex_count-1``.

    ``adjacency[u, v]`` counts the edges between distinct ``u`` and ``v``;
    ``loops[u]`` counts loops at ``u``.  Loops never enter a Laplacian.
    """

    vertex_count: int
    adjacency: np.ndarray
    loops: np.ndarray = field(default=None)
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        A = np.asarray(self.adjacency, dtype=np.int64)
        if A.shape != (self.vertex_count, self.vertex_count):
            raise ValueError("adjacency shape does not match vertex count")
        if (A != A.T).any():
            raise ValueError("adjacency must be symmetric")
        if (A < 0).any():
            raise ValueError("multiplicities must be non-negative")
        if np.diag(A).any():
            raise ValueError("loops belong in `loops`, not on the adjacency diagonal")
        loops = np.zeros(self.vertex_count, dtype=np.int64) if self.loops is None else np.asarray(self.loops, dtype=np.int64)
        A.setflags(write=False)
        loops.setflags(write=False)
        object.__setattr__(self, "adjacency", A)
        object.__setattr__(self, "loops", loops)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]]) -> FiniteMultigraph:
        A = np.zeros((vertex_count, vertex_count), dtype=np.int64)
        loops = np.zeros(vertex_count, dtype=np.int64)
        for u, v in edges:
            if u == v:
                loops[u] += 1
            else:
                A[u, v] += 1
                A[v, u] += 1
        return cls(vertex_count, A, loops)

    @classmethod
    def complete(cls, n: int) -> FiniteMultigraph:
        return cls(n, np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))

    @classmethod
    def cycle(cls, n: int) -> FiniteMultigraph:
        return cls.from_edges(n, [(k, (k + 1) % n) for k in range(n)])

    def edges(self) -> list[tuple[int, int, int]]:
        """Non-loop edges as ``(u, v, multiplicity)`` with ``u < v``."""
        iu, iv = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(u), int(v), int(self.adjacency[u, v])) for u, v in zip(iu, iv)]

    @property
    def edge_count(self) -> int:
        """Number of non-loop edges, with multiplicity."""
        return int(np.triu(self.adjacency, 1).sum())

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def laplacian(self) -> np.ndarray:
        return np.diag(self.degrees()) - self.adjacency

    @cached_property
    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest vertex."""
        if self.vertex_count == 0:
            return []
        k, labels = connected_components(csr_matrix(self.adjacency), directed=False)
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(v)
        return sorted(groups.values(), key=lambda c: c[0])

    def subgraph(self, vertices: Sequence[int]) -> FiniteMultigraph:
        idx = np.asarray(vertices, dtype=np.int64)
        return FiniteMultigraph(len(idx), self.adjacency[np.ix_(idx, idx)], self.loops[idx])

    def is_connected(self) -> bool:
        return len(self.components) == 1


def build_quotient(g: PeriodicGraph, lattice: Sublattice, max_index: int = MAX_COSETS) -> FiniteMultigraph:
    """The finite cover ``G_Lambda``: vertex ``(i, c)`` for orbit ``i`` and coset ``c``.

    Vertex ``(i, c)`` gets number ``(i - 1) * index + position(c)``.
    """
    if g.d != lattice.d:
        raise ValueError("graph and lattice dimensions differ")
    reps = cosets(lattice, max_index)
    pos = {c: k for k, c in enumerate(reps)}
    r = len(reps)
    N = g.n * r
    A = np.zeros((N, N), dtype=np.int64)
    loops = np.zeros(N, dtype=np.int64)
    for i, j, s in g.edge_orbits:
        for k, c in enumerate(reps):
            u = (i - 1) * r + k
            v = (j - 1) * r + pos[lattice.reduce(tuple(a + b for a, b in zip(c, s)))]
            if u == v:
                loops[u] += 1
            else:
                A[u, v] += 1
                A[v, u] += 1
    labels = tuple((i, c) for i in range(1, g.n + 1) for c in reps)
    return FiniteMultigraph(N, A, loops, labels)


@dataclass(frozen=True)
class ComplexityReport:
    tau_per_component: tuple[int, ...]
    component_sizes: tuple[int, ...]

    @property
    def T(self) -> int:
        return math.prod(self.tau_per_component)

    @property
    def n_lambda(self) -> int:
        return math.prod(self.component_sizes)

    @property
    def component_count(self) -> int:
        return len(self.tau_per_component)

    def log_T(self) -> float:
        return sum(_log_int(t) for t in self.tau_per_component)


def _log_int(x: int) -> float:
    # math.log handles arbitrarily large ints exactly enough for float output
    return math.log(x)


def component_tree_count(L: np.ndarray) -> int:
    """Spanning trees of a connected graph from its integer Laplacian.

    Vertices are put in reverse Cuthill-McKee order so the reduced Laplacian
    is banded, then the last vertex is deleted and the cofactor is computed
    exactly.
    """
    n = L.shape[0]
    if n <= 1:
        return 1
    order = reverse_cuthill_mckee(csr_matrix(L), symmetric_mode=True)
    P = L[np.ix_(order, order)]
    return bareiss_determinant(P[:-1, :-1])


def spanning_tree_count(h: FiniteMultigraph) -> ComplexityReport:
    """Matrix-Tree count per connected component, exact."""
    L = h.laplacian()
    taus, sizes = [], []
    for comp in h.components:
        idx = np.asarray(comp)
        taus.append(component_tree_count(L[np.ix_(idx, idx)]))
        sizes.append(len(comp))
    return ComplexityReport(tuple(taus), tuple(sizes))


def _canonical(n: int, edges: dict[tuple[int, int], int]):
    return (n, tuple(sorted(edges.items())))


def tau_deletion_contraction(h: FiniteMultigraph, max_edges: int = MAX_DC_EDGES) -> int:
    """Spanning trees by deletion and contraction, for small connected graphs.

    A bundle of ``k`` parallel edges ``uv`` is handled at once:
    ``tau(G) = tau(G - uv) + k * tau(G / uv)``.  Pendant vertices are
    stripped first (``tau(G) = k * tau(G - v)``), and subresults are cached
    on the multigraph's edge multiset.
    """
    if h.edge_count > max_edges:
        raise ValueError(f"{h.edge_count} edges exceed the deletion-contraction guard ({max_edges})")
    if not h.is_connected():
        raise ValueError("deletion-contraction needs a connected graph")
    edges = {(u, v): k for u, v, k in h.edges()}
    cache: dict = {}
    return _dc(h.vertex_count, edges, cache)


def _dc(n: int, edges: dict[tuple[int, int], int], cache: dict) -> int:
    if n == 1:
        return 1
    key = _canonical(n, edges)
    hit = cache.get(key)
    if hit is not None:
        return hit
    adj: dict[int, dict[int, int]] = {}
    for (u, v), k in edges.items():
        adj.setdefault(u, {})[v] = k
        adj.setdefault(v, {})[u] = k
    if len(adj) < n:
        cache[key] = 0
        return 0
    if n == 2:
        (k,) = edges.values()
        cache[key] = k
        return k
    # pendant vertex: exactly one neighbour
    for v, nbrs in adj.items():
        if len(nbrs) == 1:
            (u, k), = nbrs.items()
            rest = {e: m for e, m in edges.items() if v not in e}
            result = k * _dc(n - 1, _relabel_removed(rest, v), cache)
            cache[key] = result
            return result
    # branch on the heaviest bundle at a minimum-degree vertex
    v = min(adj, key=lambda x: (len(adj[x]), x))
    u = max(adj[v], key=lambda x: (adj[v][x], -x))
    a, b = min(u, v), max(u, v)
    k = edges[(a, b)]
    deleted = {e: m for e, m in edges.items() if e != (a, b)}
    result = _dc(n, deleted, cache) if _connected(n, deleted) else 0
    result += k * _dc(n - 1, _contract(edges, a, b), cache)
    cache[key] = result
    return result


def _relabel_removed(edges, v):
    def f(x):
        return x - 1 if x > v else x

    return {(f(a), f(b)): m for (a, b), m in edges.items()}


def _contract(edges, a, b):
    # merge b into a (a < b), drop the a-b bundle, renumber vertices above b
    out: dict[tuple[int, int], int] = {}
    for (x, y), m in edges.items():
        if {x, y} == {a, b}:
            continue
        x = a if x == b else x
        y = a if y == b else y
        x = x - 1 if x > b else x
        y = y - 1 if y > b else y
        key = (min(x, y), max(x, y))
        out[key] = out.get(key, 0) + m
    return out


def _connected(n, edges) -> bool:
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def eigenvalue_product(h: FiniteMultigraph, log: bool = False) -> float:
    """``T`` from the nonzero Laplacian eigenvalues, divided by ``n_Lambda``.

    The number of zero eigenvalues equals the number of components, so the
    smallest that many eigenvalues are dropped.
    """
    comps = h.components
    n_log = sum(math.log(len(c)) for c in comps)
    if h.vertex_count == 0:
        return 0.0 if log else 1.0
    ev = np.linalg.eigvalsh(h.laplacian().astype(float))
    nonzero = np.sort(ev)[len(comps):]
    value = float(np.sum(np.log(nonzero))) - n_log
    return value if log else math.exp(value)


@dataclass(frozen=True)
class UpperBound:
    tau: int
    bound: Fraction
    holds: bool


def upper_bound_check(h: FiniteMultigraph, tau: int | None = None) -> UpperBound:
    """Compare ``tau`` with ``((2|E| - delta) / (|V| - 1))^(|V| - 1)``.

    ``|E|`` counts non-loop edges with multiplicity and ``delta`` is the
    maximum degree.  The comparison is done in exact rationals.
    """
    if not h.is_connected():
        raise ValueError("the upper bound applies to connected graphs")
    if tau is None:
        tau = spanning_tree_count(h).T
    nv = h.vertex_count
    if nv == 1:
        bound = Fraction(1)
    else:
        delta = int(h.degrees().max())
        bound = Fraction(2 * h.edge_count - delta, nv - 1) ** (nv - 1)
    return UpperBound(tau=tau, bound=bound, holds=tau <= bound)
