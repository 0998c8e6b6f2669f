"""Random DAG generation: four methods plus their closed-form predictors.

All generators take an explicit ``random.Random`` stream and are pure given
that stream; concurrent instance generation must use disjoint derived streams
(see :func:`derive_rng`).  Reproducibility is bit-exact within one build of
this package.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

from .core import Dag

DEFAULT_COUNT_CAP = 300

EXACT = "exact"
PAPER = "paper"
_MODES = (EXACT, PAPER)


class CapExceededError(ValueError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"count table capped at n={cap}, got {n}")


def derive_rng(seed: int, index: int, label: str = "") -> random.Random:
    """Independent deterministic stream for one instance.

    String seeding hashes through SHA-512, so streams for distinct indices
    are unrelated and identical (seed, index) pairs replay exactly.
    """
    return random.Random(f"{label}:{seed}:{index}")


class CountTable:
    """Labeled-DAG counts a_i and a_{i,k} up to n (Robinson's recurrence).

    a_{i,k} counts the DAGs on i labeled vertices with exactly k source
    vertices; a_i is the row sum.  Entries are exact big integers.  The
    table is built once and then shared read-only; the sampling caches are
    filled lazily and only ever grow.
    """

    __slots__ = ("n", "a", "a_nk", "_layer_cum", "_row_cum")

    def __init__(self, n: int):
        self.n = n
        self.a: list[int] = [1] * (n + 1)  # a[0] unused sentinel
        self.a_nk: list[list[int]] = [[0]]
        for i in range(1, n + 1):
            row = [0] * (i + 1)
            row[i] = 1
            for k in range(1, i):
                row[k] = comb(i, k) * self._b(i, k)
            self.a_nk.append(row)
            self.a[i] = sum(row)
        self._layer_cum: dict[tuple[int, int], list[int]] = {}
        self._row_cum: dict[int, list[int]] = {}

    def _b(self, i: int, k: int) -> int:
        # sum over s of (2^k - 1)^s * 2^(k*(i-k-s)) * a_{i-k,s}
        rest = i - k
        base = (1 << k) - 1
        prev = self.a_nk[rest]
        power = 1
        total = 0
        for s in range(1, rest + 1):
            power *= base
            total += (power << (k * (rest - s))) * prev[s]
        return total

    def first_layer_cum(self, n: int) -> list[int]:
        cum = self._row_cum.get(n)
        if cum is None:
            cum = []
            acc = 0
            for k in range(1, n + 1):
                acc += self.a_nk[n][k]
                cum.append(acc)
            self._row_cum[n] = cum
        return cum

    def layer_cum(self, remaining: int, prev_size: int) -> list[int]:
        """Cumulative weights for the next layer size, conditioned on the
        previous layer having ``prev_size`` vertices and ``remaining``
        vertices being left below it.

        The weight of size s is (2^k - 1)^s * 2^(k*(remaining-s)) * a_{remaining,s}
        with k = prev_size; the total equals b_{remaining+k,k}.
        """
        key = (remaining, prev_size)
        cum = self._layer_cum.get(key)
        if cum is None:
            base = (1 << prev_size) - 1
            row = self.a_nk[remaining]
            cum = []
            acc = 0
            power = 1
            for s in range(1, remaining + 1):
                power *= base
                acc += (power << (prev_size * (remaining - s))) * row[s]
                cum.append(acc)
            self._layer_cum[key] = cum
        return cum


@lru_cache(maxsize=8)
def _cached_table(n: int) -> CountTable:
    return CountTable(n)


def dag_count_table(n: int, cap: int = DEFAULT_COUNT_CAP) -> CountTable:
    """Exact counts up to n; O(n^3) big-integer work, hence the cap."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > cap:
        raise CapExceededError(n, cap)
    return _cached_table(n)


def save_count_table(table: CountTable, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"dagforge-count-table 1 n={table.n}\n")
        for i in range(1, table.n + 1):
            for k in range(1, i + 1):
                fh.write(f"{i} {k} {table.a_nk[i][k]}\n")


def load_count_table(path) -> CountTable:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[:2] != ["dagforge-count-table", "1"]:
            raise ValueError(f"unrecognized count-table header in {path}")
        n = int(header[2].removeprefix("n="))
        table = CountTable.__new__(CountTable)
        table.n = n
        table.a_nk = [[0]] + [[0] * (i + 1) for i in range(1, n + 1)]
        for line in fh:
            i_s, k_s, value = line.split()
            table.a_nk[int(i_s)][int(k_s)] = int(value)
        table.a = [1] + [sum(table.a_nk[i]) for i in range(1, n + 1)]
        table._layer_cum = {}
        table._row_cum = {}
    return table


def _draw_from_cum(cum: list[int], rng: random.Random) -> int:
    # Arbitrary-precision uniform draw, then binary search; returns 1-based size.
    return bisect_right(cum, rng.randrange(cum[-1])) + 1


def random_shape(n: int, table: CountTable, mode: str = EXACT,
                 rng: random.Random | None = None) -> list[int]:
    """Sample a shape (layer-size vector summing to n).

    ``exact`` conditions every layer size on the previous layer so that the
    induced distribution matches the shape marginals of the uniform
    distribution over all labeled DAGs.  ``paper`` is the literal recursion
    that redraws each suffix unconditioned, which is measurably biased.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if table.n < n:
        raise CapExceededError(n, table.n)
    rng = rng or random.Random()
    shape: list[int] = []
    remaining = n
    prev = 0
    while remaining:
        if not shape:
            size = _draw_from_cum(table.first_layer_cum(remaining), rng)
        elif mode == EXACT:
            size = _draw_from_cum(table.layer_cum(remaining, prev), rng)
        else:
            size = _draw_from_cum(table.first_layer_cum(remaining), rng)
        shape.append(size)
        remaining -= size
        prev = size
    return shape


def _bits(mask: int, pool: Sequence[int]) -> list[int]:
    picked = []
    while mask:
        low = mask & -mask
        picked.append(pool[low.bit_length() - 1])
        mask ^= low
    return picked


def shape_to_dag(shape: Sequence[int], mode: str = EXACT,
                 rng: random.Random | None = None) -> Dag:
    """Connect layered slots according to the shape, then relabel uniformly.

    ``exact``: each vertex of layer i > 1 draws a uniformly random non-empty
    predecessor subset of layer i-1, and every vertex of layers < i-1
    independently with probability 1/2.  ``paper``: one uniformly chosen
    mandatory parent in layer i-1, every other previous vertex with
    probability 1/2.  Either way the depth of every vertex equals its layer,
    and the final uniform relabeling spreads the result over all labelings.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if any(s < 1 for s in shape):
        raise ValueError("shape entries must be >= 1")
    rng = rng or random.Random()
    n = sum(shape)
    edges_slots: list[tuple[int, int]] = []
    level_slots: list[list[int]] = []
    nxt = 0
    for size in shape:
        level_slots.append(list(range(nxt, nxt + size)))
        nxt += size
    earlier: list[int] = []
    for i, slots in enumerate(level_slots):
        if i > 0:
            prev = level_slots[i - 1]
            q = len(prev)
            e = len(earlier)
            for v in slots:
                if mode == EXACT:
                    mask = 0
                    while not mask:
                        mask = rng.getrandbits(q)
                    parents = _bits(mask, prev)
                    if e:
                        parents.extend(_bits(rng.getrandbits(e), earlier))
                else:
                    mandatory = prev[rng.randrange(q)]
                    parents = [mandatory]
                    others = [w for w in prev if w != mandatory] + earlier
                    if others:
                        parents.extend(_bits(rng.getrandbits(len(others)), others))
                edges_slots.extend((u, v) for u in parents)
            earlier.extend(prev)
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    return Dag(n, ((labels[u], labels[v]) for u, v in edges_slots))


def uniform_dag(n: int, mode: str = EXACT, rng: random.Random | None = None,
                table: CountTable | None = None) -> Dag:
    """Uniform sample over all labeled DAGs on n vertices (``exact`` mode)."""
    if table is None:
        table = dag_count_table(n)
    rng = rng or random.Random()
    return shape_to_dag(random_shape(n, table, mode, rng), mode, rng)


def erdos_renyi(n: int, p: float, rng: random.Random | None = None) -> Dag:
    """Upper-triangular coin flips: edge (i, j), i < j, with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    rng = rng or random.Random()
    edges = [
        (i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        if rng.random() < p
    ]
    return Dag(n, edges)


def random_orders(n: int, K: int, rng: random.Random | None = None) -> Dag:
    """Intersection of K uniform total orders.

    Edge (u, v) is present when u precedes v in all K permutations; the
    result is transitively closed by construction and no final reduction is
    applied.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    rng = rng or random.Random()
    positions = []
    for _ in range(K):
        perm = list(range(n))
        rng.shuffle(perm)
        pos = [0] * n
        for idx, v in enumerate(perm):
            pos[v] = idx
        positions.append(pos)
    edges = []
    first = positions[0]
    rest = positions[1:]
    for u in range(n):
        for v in range(u + 1, n):
            if first[u] < first[v]:
                if all(pos[u] < pos[v] for pos in rest):
                    edges.append((u + 1, v + 1))
            else:
                if all(pos[v] < pos[u] for pos in rest):
                    edges.append((v + 1, u + 1))
    return Dag(n, edges)


def layer_by_layer(n: int, k: int, p: float,
                   rng: random.Random | None = None) -> Dag:
    """Balls-into-bins layering with guaranteed depth-equals-layer.

    One seed vertex per layer prevents empty layers; the other n - k vertices
    pick layers uniformly.  Every vertex below the first layer receives one
    mandatory parent from the previous layer, then each ordered pair from
    distinct layers (any distance) gains an edge with probability p.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    rng = rng or random.Random()
    layers: list[list[int]] = [[i + 1] for i in range(k)]
    for v in range(k + 1, n + 1):
        layers[rng.randrange(k)].append(v)
    edges: set[tuple[int, int]] = set()
    for i in range(1, k):
        prev = layers[i - 1]
        for v in layers[i]:
            edges.add((prev[rng.randrange(len(prev))], v))
    for i in range(k):
        for j in range(i + 1, k):
            for u in layers[i]:
                for v in layers[j]:
                    if (u, v) not in edges and rng.random() < p:
                        edges.add((u, v))
    return Dag(n, edges)


@dataclass(frozen=True)
class GeneratorSpec:
    """Tagged generator choice plus its parameters and the base seed."""

    method: str  # er | uniform | orders | layer
    p: float | None = None
    K: int | None = None
    layers: int | None = None
    mode: str = EXACT
    seed: int = 0

    def sample(self, n: int, rng: random.Random,
               table: CountTable | None = None) -> Dag:
        if self.method == "er":
            return erdos_renyi(n, self.p if self.p is not None else 0.5, rng)
        if self.method == "uniform":
            return uniform_dag(n, self.mode, rng, table)
        if self.method == "orders":
            return random_orders(n, self.K or 1, rng)
        if self.method == "layer":
            return layer_by_layer(n, self.layers or 1,
                                  self.p if self.p is not None else 0.5, rng)
        raise ValueError(f"unknown generation method {self.method!r}")

    def label(self) -> str:
        parts = [self.method]
        if self.method == "er":
            parts.append(f"p={self.p}")
        elif self.method == "uniform":
            parts.append(self.mode)
        elif self.method == "orders":
            parts.append(f"K={self.K}")
        elif self.method == "layer":
            parts.append(f"k={self.layers},p={self.p}")
        return ":".join(parts)


def er_expected_edges(n: int, p: float) -> float:
    return p * n * (n - 1) / 2


def er_mean_shape_bound(p: float) -> float:
    """Upper bound on the expected size of every depth layer; unbounded at p=0."""
    if p == 0.0:
        return math.inf
    return 1.0 / p


def er_tr_edges_bound(n: int, p: float) -> float:
    """Upper bound on the expected transitive-reduction edge count.

    Counts edges (i, j) with no two-step bypass i -> r -> j; every reduction
    edge is of that form, so the expectation bounds E(m(D^T)) from above.
    """
    if p == 0.0:
        return 0.0
    q = 1.0 - p * p
    return (n - 1) / p - (q / p**3) * (1.0 - q ** (n - 1))


def layer_expected_edges(n: int, k: int, p: float) -> float:
    """Expected edges of the regular layered model (n a multiple of k)."""
    return n * (1 - 1 / k) * (p * (n / 2 - 1) + 1)


def layer_tr_edges_lower_bound(n: int, k: int, p: float) -> float:
    """Lower bound on expected reduction edges in the regular layered model;
    consecutive-layer edges can never become redundant."""
    return p * (k - 1) * (n / k) ** 2 + (1 - p) * n * (1 - 1 / k)


def closed_form_predictions(spec: GeneratorSpec, n: int) -> dict[str, float]:
    """Reference curves for overlaying on experiment output."""
    if spec.method == "er":
        p = spec.p if spec.p is not None else 0.5
        return {
            "mean_edges": er_expected_edges(n, p),
            "mean_shape_upper": er_mean_shape_bound(p),
            "tr_edges_upper": er_tr_edges_bound(n, p),
        }
    if spec.method == "layer":
        k = spec.layers or 1
        p = spec.p if spec.p is not None else 0.5
        return {
            "mean_edges": layer_expected_edges(n, k, p),
            "tr_edges_lower": layer_tr_edges_lower_bound(n, k, p),
        }
    if spec.method == "uniform":
        return {"mean_edges": n * n / 4}
    return {}
