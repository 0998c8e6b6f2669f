"""Labeled DAG representation and the structural transforms built on it.

Vertices are labeled 1..n.  Labels carry no ordering guarantee: a valid DAG
may have edges going from higher to lower labels, and the uniform counting
machinery relies on ranging over all labelings.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Base class for DAG construction and validation failures."""


class VertexRangeError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class CycleError(GraphError):
    """Raised when the edge set admits a directed cycle.

    ``cycle`` lists one offending cycle as a vertex sequence whose last
    element equals the first.
    """

    def __init__(self, cycle: Sequence[int]):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(map(str, self.cycle)))


class TooLargeError(ValueError):
    """Input exceeds a documented brute-force size cap."""


class Dag:
    """Immutable directed acyclic graph on vertices {1, ..., n}.

    Both adjacency directions are materialized at construction time and the
    instance never mutates afterwards, so it is safe to share across
    concurrent workers.  Adjacency lists are sorted, which keeps every
    downstream algorithm deterministic regardless of input edge order.
    """

    __slots__ = ("n", "edges", "succ", "pred", "_topo")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise VertexRangeError(f"vertex count must be >= 1, got {n}")
        pairs = list(edges)
        seen: set[tuple[int, int]] = set()
        for u, v in pairs:
            if not (1 <= u <= n) or not (1 <= v <= n):
                raise VertexRangeError(f"edge ({u}, {v}) outside 1..{n}")
            if u == v:
                raise SelfLoopError(f"self-loop on vertex {u}")
            if (u, v) in seen:
                raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        succ: list[list[int]] = [[] for _ in range(n + 1)]
        pred: list[list[int]] = [[] for _ in range(n + 1)]
        for u, v in sorted(seen):
            succ[u].append(v)
            pred[v].append(u)
        self.n = n
        self.edges = frozenset(seen)
        self.succ = tuple(tuple(s) for s in succ)
        self.pred = tuple(tuple(p) for p in pred)
        self._topo = self._toposort()

    def _toposort(self) -> tuple[int, ...]:
        indeg = [len(self.pred[v]) for v in range(self.n + 1)]
        queue = deque(v for v in range(1, self.n + 1) if indeg[v] == 0)
        order: list[int] = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in self.succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        if len(order) < self.n:
            raise CycleError(self._find_cycle(set(range(1, self.n + 1)) - set(order)))
        return tuple(order)

    def _find_cycle(self, remaining: set[int]) -> list[int]:
        # Every remaining vertex has a predecessor in `remaining`; walking
        # backwards must therefore revisit a vertex.
        start = min(remaining)
        path = [start]
        position = {start: 0}
        v = start
        while True:
            u = min(p for p in self.pred[v] if p in remaining)
            if u in position:
                cycle = path[position[u]:] + [u]
                cycle.reverse()
                return cycle
            position[u] = len(path)
            path.append(u)
            v = u

    @property
    def m(self) -> int:
        return len(self.edges)

    def topological_order(self) -> tuple[int, ...]:
        return self._topo

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, m={self.m})"


def from_edge_list(n: int, pairs: Iterable[tuple[int, int]]) -> Dag:
    """Build a validated DAG from (u, v) pairs; input order is irrelevant."""
    return Dag(n, pairs)


def reversal(d: Dag) -> Dag:
    """Flip every edge.  Involution: reversal(reversal(d)) == d."""
    return Dag(d.n, ((v, u) for u, v in d.edges))


def depths(d: Dag) -> list[int]:
    """Depth per vertex (1-indexed list; index 0 unused).

    Sources have depth 1; otherwise depth is one plus the maximum depth
    among predecessors.
    """
    dep = [0] * (d.n + 1)
    for v in d._topo:
        preds = d.pred[v]
        dep[v] = 1 + max((dep[u] for u in preds), default=0)
    return dep


@dataclass(frozen=True)
class ShapeDecomposition:
    """Partition of the vertices into depth layers X_1..X_k."""

    n: int
    layers: tuple[tuple[int, ...], ...]
    shape: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.shape)


def shape_decomposition(d: Dag) -> ShapeDecomposition:
    dep = depths(d)
    k = max(dep[1:])
    layers: list[list[int]] = [[] for _ in range(k)]
    for v in range(1, d.n + 1):
        layers[dep[v] - 1].append(v)
    layer_tuples = tuple(tuple(layer) for layer in layers)
    return ShapeDecomposition(d.n, layer_tuples, tuple(len(t) for t in layer_tuples))


def descendant_masks(d: Dag) -> list[int]:
    """Strict-descendant bitmask per vertex (bit v-1 set when v is reachable).

    Index 0 is unused.  Computed in reverse topological order with word-packed
    unions, so the whole table costs O(n * m / wordsize).
    """
    masks = [0] * (d.n + 1)
    for v in reversed(d._topo):
        acc = 0
        for w in d.succ[v]:
            acc |= masks[w] | (1 << (w - 1))
        masks[v] = acc
    return masks


def transitive_closure(d: Dag) -> Dag:
    """DAG with an edge (u, v) exactly when d has a directed path u to v."""
    masks = descendant_masks(d)
    edges = []
    for u in range(1, d.n + 1):
        mask = masks[u]
        while mask:
            low = mask & -mask
            edges.append((u, low.bit_length()))
            mask ^= low
    return Dag(d.n, edges)


def transitive_reduction(d: Dag) -> Dag:
    """Unique minimal DAG with the same reachability relation as d.

    An edge (u, v) is redundant exactly when v is reachable from some other
    direct successor of u.
    """
    masks = descendant_masks(d)
    kept = []
    for u in range(1, d.n + 1):
        reachable_indirect = 0
        for w in d.succ[u]:
            reachable_indirect |= masks[w]
        for w in d.succ[u]:
            if not (reachable_indirect >> (w - 1)) & 1:
                kept.append((u, w))
    return Dag(d.n, kept)
