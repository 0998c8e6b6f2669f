"""Measured DAG properties: degrees, shape statistics, width, and mass.

Standard deviations are population SDs (divide by n).  Width is computed via
Dilworth's theorem: the largest antichain has size n minus a maximum matching
in the bipartite comparability graph of the transitive closure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from statistics import pstdev

from .core import Dag, ShapeDecomposition, descendant_masks, shape_decomposition, transitive_reduction

_UNMATCHED = 0
_INF = -1


def _hopcroft_karp(adj: list[list[int]], n: int) -> int:
    """Maximum matching size of the bipartite graph left 1..n -> right 1..n."""
    match_left = [_UNMATCHED] * (n + 1)
    match_right = [_UNMATCHED] * (n + 1)
    dist = [0] * (n + 1)

    def bfs() -> bool:
        queue = []
        for u in range(1, n + 1):
            if match_left[u] == _UNMATCHED:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = match_right[v]
                if w == _UNMATCHED:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_right[v]
            if w == _UNMATCHED or (dist[w] == dist[u] + 1 and dfs(w)):
                match_left[u] = v
                match_right[v] = u
                return True
        dist[u] = _INF
        return False

    matching = 0
    while bfs():
        for u in range(1, n + 1):
            if match_left[u] == _UNMATCHED and dfs(u):
                matching += 1
    return matching


def width(d: Dag) -> int:
    """Size of the largest antichain (minimum chain cover by Dilworth)."""
    masks = descendant_masks(d)
    adj: list[list[int]] = [[] for _ in range(d.n + 1)]
    for u in range(1, d.n + 1):
        mask = masks[u]
        row = adj[u]
        while mask:
            low = mask & -mask
            row.append(low.bit_length())
            mask ^= low
    return d.n - _hopcroft_karp(adj, d.n)


@dataclass(frozen=True)
class Block:
    """Maximal run of consecutive non-singleton layers.

    ``start`` is the index of the left delimiting layer (0 when the run
    touches the front of the shape) and ``span`` the distance to the right
    delimiter, so the run itself covers layers start+1 .. start+span-1
    (1-indexed).
    """

    start: int
    span: int
    vertices: tuple[int, ...]
    size: int


@dataclass(frozen=True)
class BlockReport:
    bottlenecks: tuple[int, ...]
    blocks: tuple[Block, ...]
    n_c: int
    mass_abs: int
    mass: float


def mass_and_blocks(sd: ShapeDecomposition) -> BlockReport:
    """Blocks, bottleneck vertices, and the absolute/relative mass.

    A bottleneck is the sole vertex of a singleton layer.  The absolute mass
    is the size of the largest block, 0 when every layer is a singleton.
    """
    bottlenecks = tuple(
        layer[0] for layer, size in zip(sd.layers, sd.shape) if size == 1
    )
    blocks: list[Block] = []
    i = 0
    k = sd.k
    while i < k:
        if sd.shape[i] == 1:
            i += 1
            continue
        j = i
        while j < k and sd.shape[j] != 1:
            j += 1
        verts: list[int] = []
        for idx in range(i, j):
            verts.extend(sd.layers[idx])
        blocks.append(Block(start=i, span=j - i + 1, vertices=tuple(verts), size=len(verts)))
        i = j
    mass_abs = max((b.size for b in blocks), default=0)
    return BlockReport(
        bottlenecks=bottlenecks,
        blocks=tuple(blocks),
        n_c=len(bottlenecks),
        mass_abs=mass_abs,
        mass=mass_abs / sd.n,
    )


PROPERTY_FIELDS = (
    "n", "m", "m_tr",
    "deg_max", "deg_in_max", "deg_out_max", "deg_min",
    "deg_mean", "deg_sd", "deg_in_sd", "deg_out_sd",
    "deg_max_tr", "deg_in_max_tr", "deg_out_max_tr", "deg_min_tr",
    "deg_mean_tr", "deg_sd_tr", "deg_in_sd_tr", "deg_out_sd_tr",
    "len", "width", "sh_max", "sh_min", "sh_mean", "sh_sd",
    "sh_first", "sh_last", "mass_abs", "mass", "nonsingleton_run_max",
)


@dataclass(frozen=True)
class DagProperties:
    n: int
    m: int
    m_tr: int
    deg_max: int
    deg_in_max: int
    deg_out_max: int
    deg_min: int
    deg_mean: float
    deg_sd: float
    deg_in_sd: float
    deg_out_sd: float
    deg_max_tr: int
    deg_in_max_tr: int
    deg_out_max_tr: int
    deg_min_tr: int
    deg_mean_tr: float
    deg_sd_tr: float
    deg_in_sd_tr: float
    deg_out_sd_tr: float
    len: int
    width: int
    sh_max: int
    sh_min: int
    sh_mean: float
    sh_sd: float
    sh_first: int
    sh_last: int
    mass_abs: int
    mass: float
    nonsingleton_run_max: int

    def as_row(self) -> list:
        return [getattr(self, name) for name in PROPERTY_FIELDS]


assert PROPERTY_FIELDS == tuple(f.name for f in fields(DagProperties))


def _degree_stats(d: Dag) -> dict:
    indeg = [len(d.pred[v]) for v in range(1, d.n + 1)]
    outdeg = [len(d.succ[v]) for v in range(1, d.n + 1)]
    total = [a + b for a, b in zip(indeg, outdeg)]
    return {
        "max": max(total),
        "in_max": max(indeg),
        "out_max": max(outdeg),
        "min": min(total),
        "mean": 2 * d.m / d.n,
        "sd": pstdev(total),
        "in_sd": pstdev(indeg),
        "out_sd": pstdev(outdeg),
    }


def nonsingleton_run_max(shape: tuple[int, ...]) -> int:
    best = run = 0
    for size in shape:
        if size >= 2:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best


def measure_all(d: Dag) -> DagProperties:
    """Populate the full property set, including transitive-reduction variants."""
    sd = shape_decomposition(d)
    tr = transitive_reduction(d)
    # Depth is determined by reachability alone, so the reduction must not
    # change the shape.
    assert shape_decomposition(tr).shape == sd.shape
    deg = _degree_stats(d)
    deg_tr = _degree_stats(tr)
    report = mass_and_blocks(sd)
    shape = sd.shape
    return DagProperties(
        n=d.n,
        m=d.m,
        m_tr=tr.m,
        deg_max=deg["max"],
        deg_in_max=deg["in_max"],
        deg_out_max=deg["out_max"],
        deg_min=deg["min"],
        deg_mean=deg["mean"],
        deg_sd=deg["sd"],
        deg_in_sd=deg["in_sd"],
        deg_out_sd=deg["out_sd"],
        deg_max_tr=deg_tr["max"],
        deg_in_max_tr=deg_tr["in_max"],
        deg_out_max_tr=deg_tr["out_max"],
        deg_min_tr=deg_tr["min"],
        deg_mean_tr=deg_tr["mean"],
        deg_sd_tr=deg_tr["sd"],
        deg_in_sd_tr=deg_tr["in_sd"],
        deg_out_sd_tr=deg_tr["out_sd"],
        len=sd.k,
        width=width(d),
        sh_max=max(shape),
        sh_min=min(shape),
        sh_mean=d.n / sd.k,
        sh_sd=pstdev(shape) if sd.k > 1 else 0.0,
        sh_first=shape[0],
        sh_last=shape[-1],
        mass_abs=report.mass_abs,
        mass=report.mass,
        nonsingleton_run_max=nonsingleton_run_max(shape),
    )
