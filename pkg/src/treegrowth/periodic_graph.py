"""Graphs with a cofinite free Z^d-symmetry, described by their quotient data.

A periodic graph has ``n`` vertex orbits ``v_{i,s}`` (``s`` in Z^d).  An edge
orbit ``(i, j, s)`` is the Z^d-orbit of one edge from ``v_{i,0}`` to
``v_{j,s}``.  Orbit indices are 1-based in files and in this API.

File format (YAML; JSON is accepted too)::

    d: 2
    n: 1
    edges:
      - [1, 1, [1, 0]]
      - [1, 1, [0, 1]]

Repeated edge entries are parallel edge orbits.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import yaml

from .sublattice import hermite_normal_form

EdgeOrbit = tuple[int, int, tuple[int, ...]]


def canonical_edge(i: int, j: int, s: Sequence[int]) -> EdgeOrbit:
    """Orient an edge orbit: smaller orbit index first; for self-orbits the
    translation whose first nonzero entry is positive."""
    s = tuple(int(v) for v in s)
    i, j = int(i), int(j)
    if i > j or (i == j and any(s) and next(v for v in s if v) < 0):
        return (j, i, tuple(-v for v in s))
    return (i, j, s)


@dataclass(frozen=True)
class PeriodicGraph:
    """Quotient description of a graph with free cofinite Z^d-symmetry."""

    d: int
    n: int
    edge_orbits: tuple[EdgeOrbit, ...]

    def __init__(self, d: int, n: int, edge_orbits: Iterable[Sequence] = ()):
        if d < 1:
            raise ValueError("symmetry rank d must be at least 1")
        if n < 1:
            raise ValueError("need at least one vertex orbit")
        edges = []
        for e in edge_orbits:
            i, j, s = e
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"edge orbit {tuple(e)} references a vertex orbit outside 1..{n}")
            if len(s) != d:
                raise ValueError(f"translation {tuple(s)} must have {d} entries")
            edges.append(canonical_edge(i, j, s))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edge_orbits", tuple(sorted(edges)))

    @property
    def m(self) -> int:
        return len(self.edge_orbits)

    @staticmethod
    def is_loop(edge: EdgeOrbit) -> bool:
        i, j, s = edge
        return i == j and not any(s)

    def without(self, predicate) -> PeriodicGraph:
        """Drop every edge orbit for which ``predicate(edge)`` holds."""
        return PeriodicGraph(self.d, self.n, [e for e in self.edge_orbits if not predicate(e)])

    def restrict(self, orbits: Sequence[int]) -> PeriodicGraph:
        """Subgraph on the given vertex orbits, renumbered 1..len(orbits) in order."""
        relabel = {v: k + 1 for k, v in enumerate(orbits)}
        edges = [
            (relabel[i], relabel[j], s)
            for i, j, s in self.edge_orbits
            if i in relabel and j in relabel
        ]
        return PeriodicGraph(self.d, len(orbits), edges)

    def relabel(self, perm: Sequence[int]) -> PeriodicGraph:
        """Rename orbit ``i`` to ``perm[i-1]``."""
        return PeriodicGraph(
            self.d, self.n, [(perm[i - 1], perm[j - 1], s) for i, j, s in self.edge_orbits]
        )

    @classmethod
    def disjoint_union(cls, *graphs: PeriodicGraph) -> PeriodicGraph:
        d = graphs[0].d
        edges, offset = [], 0
        for g in graphs:
            if g.d != d:
                raise ValueError("all parts must share the symmetry rank")
            edges += [(i + offset, j + offset, s) for i, j, s in g.edge_orbits]
            offset += g.n
        return cls(d, offset, edges)


def grid_graph(d: int) -> PeriodicGraph:
    """The nearest-neighbour grid on Z^d: one vertex orbit, one edge orbit per axis."""
    if d < 1:
        raise ValueError("grid graph needs d >= 1")
    return PeriodicGraph(d, 1, [(1, 1, tuple(int(k == a) for k in range(d))) for a in range(d)])


def doubled(g: PeriodicGraph) -> PeriodicGraph:
    """Every edge orbit duplicated."""
    return PeriodicGraph(g.d, g.n, list(g.edge_orbits) * 2)


@dataclass(frozen=True)
class ComponentPart:
    orbits: tuple[int, ...]
    monodromy_basis: tuple[tuple[int, ...], ...]
    closed: bool
    full_rank: bool

    @property
    def rank(self) -> int:
        return len(self.monodromy_basis)


@dataclass(frozen=True)
class ComponentOrbitDecomposition:
    d: int
    parts: tuple[ComponentPart, ...]

    @property
    def t(self) -> int:
        return len(self.parts)

    @property
    def finitely_many_components(self) -> bool:
        return all(p.full_rank for p in self.parts)

    def closed_parts(self) -> list[ComponentPart]:
        return [p for p in self.parts if p.closed]


def decompose(g: PeriodicGraph) -> ComponentOrbitDecomposition:
    """Split the quotient graph into components and compute each monodromy lattice.

    A BFS tree of each quotient component fixes a potential ``phi`` on its
    vertex orbits; every non-tree edge ``(i, j, s)`` then contributes the
    cycle translation ``phi(i) + s - phi(j)``.  The Hermite form of those
    vectors is independent of the tree chosen.
    """
    adj: dict[int, list[tuple[int, tuple[int, ...], int]]] = {v: [] for v in range(1, g.n + 1)}
    for idx, (i, j, s) in enumerate(g.edge_orbits):
        adj[i].append((j, s, idx))
        if i != j:
            adj[j].append((i, tuple(-v for v in s), idx))

    seen: dict[int, tuple[int, ...]] = {}
    parts = []
    for root in range(1, g.n + 1):
        if root in seen:
            continue
        seen[root] = (0,) * g.d
        members = [root]
        tree_edges = set()
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w, s, idx in adj[u]:
                if w not in seen:
                    seen[w] = tuple(a + b for a, b in zip(seen[u], s))
                    tree_edges.add(idx)
                    members.append(w)
                    queue.append(w)
        member_set = set(members)
        gens = []
        for idx, (i, j, s) in enumerate(g.edge_orbits):
            if i in member_set and idx not in tree_edges:
                w = tuple(a + b - c for a, b, c in zip(seen[i], s, seen[j]))
                if any(w):
                    gens.append(w)
        basis = tuple(tuple(r) for r in hermite_normal_form(gens, g.d))
        parts.append(
            ComponentPart(
                orbits=tuple(sorted(members)),
                monodromy_basis=basis,
                closed=not basis,
                full_rank=len(basis) == g.d,
            )
        )
    return ComponentOrbitDecomposition(g.d, tuple(parts))


# file IO


def graph_from_dict(data: dict) -> PeriodicGraph:
    try:
        d, n, edges = int(data["d"]), int(data["n"]), data.get("edges") or []
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"graph description needs integer keys 'd' and 'n': {exc}") from None
    parsed = []
    for e in edges:
        if not (isinstance(e, (list, tuple)) and len(e) == 3 and isinstance(e[2], (list, tuple))):
            raise ValueError(f"edge entry {e!r} must look like [i, j, [s_1, ..., s_d]]")
        parsed.append((int(e[0]), int(e[1]), tuple(int(v) for v in e[2])))
    return PeriodicGraph(d, n, parsed)


def graph_to_dict(g: PeriodicGraph) -> dict:
    return {"d": g.d, "n": g.n, "edges": [[i, j, list(s)] for i, j, s in g.edge_orbits]}


def loads(text: str) -> PeriodicGraph:
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ValueError("graph file must be a mapping with keys d, n, edges")
    return graph_from_dict(data)


def dumps(g: PeriodicGraph) -> str:
    lines = [f"d: {g.d}", f"n: {g.n}", "edges:"]
    for i, j, s in g.edge_orbits:
        lines.append(f"  - [{i}, {j}, [{', '.join(str(v) for v in s)}]]")
    if not g.edge_orbits:
        lines[-1] = "edges: []"
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> PeriodicGraph:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_graph(g: PeriodicGraph, path: str | Path) -> None:
    Path(path).write_text(dumps(g), encoding="utf-8")
