"""Ground-truth enumeration of small labeled-DAG spaces and the statistical
machinery used to audit generator distributions.

Enumeration proceeds layer by layer (first choosing each depth layer's vertex
set, then the admissible edge sets), so exactly the valid DAGs are produced
instead of filtering all directed graphs.
"""
from __future__ import annotations

import warnings
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterator, Sequence

from scipy.special import gammaincc

from .core import Dag, TooLargeError, transitive_reduction
from .generators import CountTable, GeneratorSpec, dag_count_table, derive_rng

ENUMERATION_CAP = 5
ISOMORPHISM_CAP = 8

LABELED = "labeled"
CLASSES = "classes"


class EmptyCellsWarning(UserWarning):
    """Some expected cell counts fall below the rule-of-thumb minimum of 5."""


def _subsets(pool: Sequence[int]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for size in range(1, len(pool) + 1):
        out.extend(combinations(pool, size))
    return out


def _edge_sets(n: int) -> Iterator[frozenset[tuple[int, int]]]:
    """Yield the edge set of every labeled DAG on vertices 1..n exactly once.

    Each DAG decomposes uniquely into depth layers where every vertex below
    the first layer has at least one predecessor in the layer directly above
    it; enumerating (layer partition, admissible edges) pairs therefore
    covers the space without duplicates.
    """

    def build(remaining: tuple[int, ...], prev: tuple[int, ...],
              earlier: tuple[int, ...],
              edges: list[tuple[int, int]]) -> Iterator[frozenset]:
        if not remaining:
            yield frozenset(edges)
            return
        earlier_subsets = _subsets(earlier)
        for size in range(1, len(remaining) + 1):
            for layer in combinations(remaining, size):
                rest = tuple(v for v in remaining if v not in layer)
                if not prev:
                    yield from build(rest, layer, (), edges)
                    continue
                prev_nonempty = _subsets(prev)[1:]
                choices_per_vertex = []
                for v in layer:
                    options = []
                    for ps in prev_nonempty:
                        for es in earlier_subsets:
                            options.append([(u, v) for u in ps] + [(u, v) for u in es])
                    choices_per_vertex.append(options)

                def attach(i: int) -> Iterator[frozenset]:
                    if i == len(layer):
                        yield from build(rest, layer, earlier + prev, edges)
                        return
                    for option in choices_per_vertex[i]:
                        edges.extend(option)
                        yield from attach(i + 1)
                        del edges[len(edges) - len(option):]

                yield from attach(0)

    yield from build(tuple(range(1, n + 1)), (), (), [])


def canonical_class(d: Dag) -> int:
    """Isomorphism-invariant code: minimal adjacency bitmap over all
    vertex permutations.  Equal codes iff isomorphic; brute force, n <= 8."""
    if d.n > ISOMORPHISM_CAP:
        raise TooLargeError(
            f"isomorphism canonicalization capped at n={ISOMORPHISM_CAP}, got {d.n}")
    n = d.n
    edges = list(d.edges)
    best: int | None = None
    for perm in permutations(range(n)):
        code = 0
        for u, v in edges:
            code |= 1 << (perm[u - 1] * n + perm[v - 1])
        if best is None or code < best:
            best = code
    assert best is not None or not edges
    return best if best is not None else 0


class ClassCatalog:
    """Complete labeled universe for one n, with isomorphism classes and
    own-transitive-reduction flags computed on demand."""

    def __init__(self, n: int, labeled: list[Dag]):
        self.n = n
        self.labeled = labeled
        self.index = {d.edges: i for i, d in enumerate(labeled)}

    def labeled_index(self, d: Dag) -> int:
        return self.index[d.edges]

    @cached_property
    def class_of(self) -> list[int]:
        codes = [canonical_class(d) for d in self.labeled]
        order = sorted(set(codes))
        code_index = {c: i for i, c in enumerate(order)}
        return [code_index[c] for c in codes]

    @cached_property
    def classes(self) -> list[dict]:
        buckets: dict[int, list[int]] = {}
        for i, cls in enumerate(self.class_of):
            buckets.setdefault(cls, []).append(i)
        return [
            {"id": cls, "representative": members[0], "size": len(members)}
            for cls, members in sorted(buckets.items())
        ]

    @cached_property
    def tr_flags(self) -> list[bool]:
        return [
            transitive_reduction(d).edges == d.edges for d in self.labeled
        ]

    @property
    def num_classes(self) -> int:
        return len(self.classes)


def enumerate_labeled_dags(n: int) -> ClassCatalog:
    if not 1 <= n <= ENUMERATION_CAP:
        raise TooLargeError(
            f"labeled enumeration capped at n={ENUMERATION_CAP}, got {n}")
    labeled = [Dag(n, edges) for edges in _edge_sets(n)]
    labeled.sort(key=lambda d: sorted(d.edges))
    return ClassCatalog(n, labeled)


def chi_square_test(observed: Sequence[int],
                    expected: Sequence[float]) -> tuple[float, int, float]:
    """Goodness of fit: (statistic, degrees of freedom, p-value).

    ``expected`` holds cell probabilities; the p-value is the regularized
    upper incomplete gamma function at (df/2, statistic/2).
    """
    if len(observed) != len(expected):
        raise ValueError("observed and expected must have equal length")
    if not observed:
        raise ValueError("no cells")
    total = sum(observed)
    exp_counts = [total * p for p in expected]
    if any(e <= 0 for e in exp_counts):
        raise ValueError("expected probabilities must be positive")
    if min(exp_counts) < 5:
        warnings.warn(
            f"minimum expected cell count {min(exp_counts):.2f} < 5",
            EmptyCellsWarning, stacklevel=2)
    stat = sum((o - e) ** 2 / e for o, e in zip(observed, exp_counts))
    df = len(observed) - 1
    p_value = float(gammaincc(df / 2, stat / 2)) if df > 0 else 1.0
    return stat, df, p_value


def empirical_class_distribution(spec: GeneratorSpec, n: int, samples: int,
                                 universe: str = LABELED,
                                 catalog: ClassCatalog | None = None,
                                 table: CountTable | None = None) -> list[int]:
    """Histogram of generator output over the catalog cells."""
    if universe not in (LABELED, CLASSES):
        raise ValueError(f"unknown universe {universe!r}")
    if catalog is None:
        catalog = enumerate_labeled_dags(n)
    if table is None and spec.method == "uniform":
        table = dag_count_table(n)
    cells = len(catalog.labeled) if universe == LABELED else catalog.num_classes
    counts = [0] * cells
    class_of = catalog.class_of if universe == CLASSES else None
    for i in range(samples):
        rng = derive_rng(spec.seed, i, spec.label())
        d = spec.sample(n, rng, table)
        idx = catalog.labeled_index(d)
        if class_of is not None:
            idx = class_of[idx]
        counts[idx] += 1
    return counts


def er_class_probabilities(catalog: ClassCatalog, p: float) -> list[float]:
    """Per-class probability under upper-triangular coin flips.

    Only label-increasing DAGs receive mass; their class totals give the
    reference column for auditing that generator.
    """
    max_m = catalog.n * (catalog.n - 1) // 2
    probs = [0.0] * catalog.num_classes
    for i, d in enumerate(catalog.labeled):
        if all(u < v for u, v in d.edges):
            probs[catalog.class_of[i]] += p ** d.m * (1 - p) ** (max_m - d.m)
    return probs
