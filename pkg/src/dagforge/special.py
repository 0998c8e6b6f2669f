"""Deterministic constructors for the classic benchmark DAG families, plus
exact closed-form property values usable as test baselines.

Labeling is layer-major, left to right, so repeated builds are byte-stable.
The reversed kinds (in-tree, reversed comb) are literal reversals of their
base kinds and inherit the base labeling.
"""
from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .core import Dag, reversal
from .metrics import DagProperties


class SpecialKind(str, Enum):
    EMPTY = "empty"
    COMPLETE = "complete"
    CHAIN = "chain"
    OUT_TREE = "out-tree"
    IN_TREE = "in-tree"
    COMB = "comb"
    COMB_REVERSED = "comb-reversed"
    BIPARTITE = "bipartite"
    SQUARE = "square"
    TRIANGULAR = "triangular"


class InadmissibleSizeError(ValueError):
    def __init__(self, kind: SpecialKind, n: int, nearest: int):
        self.kind = kind
        self.n = n
        self.nearest = nearest
        super().__init__(
            f"{kind.value} admits no DAG with n={n}; nearest admissible size is {nearest}"
        )


def _is_power_of_two_minus_one(n: int) -> bool:
    return n >= 1 and (n + 1) & n == 0


def _is_square(n: int) -> bool:
    return n >= 1 and math.isqrt(n) ** 2 == n


def _triangular_k(n: int) -> int | None:
    k = int((math.isqrt(8 * n + 1) - 1) // 2)
    for cand in (k - 1, k, k + 1):
        if cand >= 1 and cand * (cand + 1) // 2 == n:
            return cand
    return None


def admissible(kind: SpecialKind, n: int) -> bool:
    if n < 1:
        return False
    if kind in (SpecialKind.OUT_TREE, SpecialKind.IN_TREE):
        return _is_power_of_two_minus_one(n)
    if kind in (SpecialKind.COMB, SpecialKind.COMB_REVERSED):
        return n % 2 == 1
    if kind is SpecialKind.BIPARTITE:
        return n % 2 == 0 and n >= 2
    if kind is SpecialKind.SQUARE:
        return _is_square(n)
    if kind is SpecialKind.TRIANGULAR:
        return _triangular_k(n) is not None
    return True


def nearest_admissible(kind: SpecialKind, n: int) -> int:
    if admissible(kind, n):
        return n
    for delta in range(1, max(4, n) + 4):
        for cand in (n - delta, n + delta):
            if cand >= 1 and admissible(kind, cand):
                return cand
    return 1


def _check(kind: SpecialKind, n: int) -> None:
    if not admissible(kind, n):
        raise InadmissibleSizeError(kind, n, nearest_admissible(kind, n))


def _layered_complete(layer_sizes: list[int]) -> Dag:
    """Layers of the given sizes, consecutive layers completely connected."""
    n = sum(layer_sizes)
    ids: list[list[int]] = []
    nxt = 1
    for size in layer_sizes:
        ids.append(list(range(nxt, nxt + size)))
        nxt += size
    edges = [
        (u, v)
        for a, b in zip(ids, ids[1:])
        for u in a
        for v in b
    ]
    return Dag(n, edges)


def build_special(kind: SpecialKind, n: int) -> Dag:
    """Construct the requested family member; deterministic across runs."""
    _check(kind, n)
    if kind is SpecialKind.EMPTY:
        return Dag(n)
    if kind is SpecialKind.COMPLETE:
        return Dag(n, ((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)))
    if kind is SpecialKind.CHAIN:
        return Dag(n, ((v, v + 1) for v in range(1, n)))
    if kind is SpecialKind.OUT_TREE:
        # Heap indexing doubles as layer-major labeling.
        return Dag(n, [(v, c) for v in range(1, n // 2 + 1) for c in (2 * v, 2 * v + 1)])
    if kind is SpecialKind.IN_TREE:
        return reversal(build_special(SpecialKind.OUT_TREE, n))
    if kind is SpecialKind.COMB:
        return _build_comb(n)
    if kind is SpecialKind.COMB_REVERSED:
        return reversal(_build_comb(n))
    if kind is SpecialKind.BIPARTITE:
        return _layered_complete([n // 2, n // 2])
    if kind is SpecialKind.SQUARE:
        r = math.isqrt(n)
        return _layered_complete([r] * r)
    if kind is SpecialKind.TRIANGULAR:
        k = _triangular_k(n)
        assert k is not None
        return _layered_complete(list(range(1, k + 1)))
    raise AssertionError(kind)


def _build_comb(n: int) -> Dag:
    """Spine of (n+1)/2 vertices; every non-final spine vertex also grows a leaf.

    Layer-major ids: layer 1 is the spine head; layer i >= 2 holds the spine
    vertex (id 2i-2) then the leaf hanging off the previous spine vertex
    (id 2i-1).
    """
    if n == 1:
        return Dag(1)
    length = (n + 1) // 2
    spine = [1] + [2 * i - 2 for i in range(2, length + 1)]
    edges = []
    for i in range(length - 1):
        edges.append((spine[i], spine[i + 1]))
        edges.append((spine[i], 2 * (i + 2) - 1))
    return Dag(n, edges)


class OracleProperties(NamedTuple):
    props: DagProperties
    measured: frozenset[str]


def _sqrt(x: Fraction | int) -> float:
    return math.sqrt(float(x))


def _chain_degrees(n: int) -> dict:
    return {
        "max": 2 if n >= 3 else (1 if n == 2 else 0),
        "in_max": 1 if n >= 2 else 0,
        "out_max": 1 if n >= 2 else 0,
        "min": 1 if n >= 2 else 0,
        "mean": Fraction(2 * (n - 1), n),
        "sd": _sqrt(Fraction(2, n) * (1 - Fraction(2, n))) if n >= 2 else 0.0,
        "in_sd": _sqrt(Fraction(1, n) * (1 - Fraction(1, n))),
        "out_sd": _sqrt(Fraction(1, n) * (1 - Fraction(1, n))),
    }


def _tree_degrees(n: int) -> dict:
    """Degree statistics shared by the binary out-tree and the comb."""
    return {
        "max": 3 if n >= 5 else (2 if n == 3 else 0),
        "in_max": 1 if n >= 3 else 0,
        "out_max": 2 if n >= 3 else 0,
        "min": 1 if n >= 3 else 0,
        "mean": Fraction(2 * (n - 1), n),
        "sd": _sqrt(1 - Fraction(1, n) - Fraction(4, n * n)) if n >= 3 else 0.0,
        "in_sd": _sqrt(Fraction(1, n) * (1 - Fraction(1, n))),
        "out_sd": _sqrt(Fraction(n * n - 1, n * n)),
    }


def _swap_in_out(deg: dict) -> dict:
    out = dict(deg)
    out["in_max"], out["out_max"] = deg["out_max"], deg["in_max"]
    out["in_sd"], out["out_sd"] = deg["out_sd"], deg["in_sd"]
    return out


def _zero_degrees() -> dict:
    return {"max": 0, "in_max": 0, "out_max": 0, "min": 0,
            "mean": Fraction(0), "sd": 0.0, "in_sd": 0.0, "out_sd": 0.0}


def _vertex_block(length: int, wid: int, sh_max: int, sh_min: int,
                  sh_mean, sh_sd: float, sh1: int, shk: int,
                  mass_abs: int, n: int, run: int) -> dict:
    return {
        "len": length, "width": wid, "sh_max": sh_max, "sh_min": sh_min,
        "sh_mean": sh_mean, "sh_sd": sh_sd, "sh_first": sh1, "sh_last": shk,
        "mass_abs": mass_abs, "mass": Fraction(mass_abs, n), "run": run,
    }


def oracle_properties(kind: SpecialKind, n: int) -> OracleProperties:
    """Exact property values from closed forms.

    Every field is backed by a formula validated against direct measurement
    of the constructed DAG (see the test suite), so the measured set is
    empty.  Degenerate sizes are handled by explicit guards rather than by
    falling back to measurement.
    """
    _check(kind, n)
    out_tree_like = {SpecialKind.OUT_TREE, SpecialKind.IN_TREE}
    comb_like = {SpecialKind.COMB, SpecialKind.COMB_REVERSED}

    if kind is SpecialKind.EMPTY:
        m = 0
        deg = _zero_degrees()
        deg_tr = deg
        m_tr = 0
        vb = _vertex_block(1, n, n, n, Fraction(n), 0.0, n, n,
                           n if n >= 2 else 0, n, 1 if n >= 2 else 0)
    elif kind is SpecialKind.COMPLETE:
        m = n * (n - 1) // 2
        d = n - 1
        deg = {
            "max": d, "in_max": d, "out_max": d, "min": d,
            "mean": Fraction(d), "sd": 0.0,
            "in_sd": _sqrt(Fraction(n * n - 1, 12)),
            "out_sd": _sqrt(Fraction(n * n - 1, 12)),
        }
        m_tr = n - 1
        deg_tr = _chain_degrees(n)
        vb = _vertex_block(n, 1, 1, 1, Fraction(1), 0.0, 1, 1, 0, n, 0)
    elif kind is SpecialKind.CHAIN:
        m = n - 1
        deg = _chain_degrees(n)
        deg_tr, m_tr = deg, m
        vb = _vertex_block(n, 1, 1, 1, Fraction(1), 0.0, 1, 1, 0, n, 0)
    elif kind in out_tree_like:
        m = n - 1
        h = (n + 1).bit_length() - 1
        base = _tree_degrees(n)
        half = (n + 1) // 2
        mean_sh = Fraction(n, h)
        var_sh = Fraction(n * (n + 2), 3 * h) - mean_sh * mean_sh
        vb = _vertex_block(h, half, half, 1, mean_sh, _sqrt(var_sh),
                           1, half, n - 1 if n >= 3 else 0, n,
                           h - 1 if h >= 2 else 0)
        if kind is SpecialKind.IN_TREE:
            base = _swap_in_out(base)
            vb["sh_first"], vb["sh_last"] = vb["sh_last"], vb["sh_first"]
        deg, deg_tr, m_tr = base, base, m
    elif kind in comb_like:
        m = n - 1
        length = (n + 1) // 2
        base = _tree_degrees(n)
        if kind is SpecialKind.COMB:
            mean_sh = Fraction(2 * n, n + 1)
            sh_sd = _sqrt(Fraction(2 * (n - 1), (n + 1) ** 2))
            vb = _vertex_block(length, length, 2 if n >= 3 else 1, 1,
                               mean_sh, sh_sd, 1, 2 if n >= 3 else 1,
                               n - 1 if n >= 3 else 0, n,
                               length - 1 if n >= 3 else 0)
        else:
            base = _swap_in_out(base)
            mean_sh = Fraction(2 * n, n + 1)
            sh_sd = float(Fraction(n - 1, n + 1)) * _sqrt(Fraction(n - 1, 2))
            vb = _vertex_block(length, length, length, 1,
                               mean_sh, sh_sd, length, 1,
                               length if n >= 3 else 0, n,
                               1 if n >= 3 else 0)
        deg, deg_tr, m_tr = base, base, m
    elif kind is SpecialKind.BIPARTITE:
        half = n // 2
        m = half * half
        deg = {
            "max": half, "in_max": half, "out_max": half, "min": half,
            "mean": Fraction(half), "sd": 0.0,
            "in_sd": float(Fraction(n, 4)), "out_sd": float(Fraction(n, 4)),
        }
        deg_tr, m_tr = deg, m
        vb = _vertex_block(2, half, half, half, Fraction(half), 0.0,
                           half, half, n if n >= 4 else 0, n,
                           2 if n >= 4 else 0)
    elif kind is SpecialKind.SQUARE:
        r = math.isqrt(n)
        m = n * (r - 1)
        deg = {
            "max": 2 * r if r >= 3 else (r if r == 2 else 0),
            "in_max": r if r >= 2 else 0,
            "out_max": r if r >= 2 else 0,
            "min": r if r >= 2 else 0,
            "mean": Fraction(2 * (r - 1)),
            "sd": _sqrt(2 * r - 4) if r >= 2 else 0.0,
            "in_sd": _sqrt(r - 1),
            "out_sd": _sqrt(r - 1),
        }
        deg_tr, m_tr = deg, m
        vb = _vertex_block(r, r, r, r, Fraction(r), 0.0, r, r,
                           n if r >= 2 else 0, n, r if r >= 2 else 0)
    elif kind is SpecialKind.TRIANGULAR:
        k = _triangular_k(n)
        assert k is not None
        m = k * (k + 1) * (k - 1) // 3
        deg = {
            "max": 2 * (k - 1),
            "in_max": k - 1,
            "out_max": k if k >= 2 else 0,
            "min": 2 if k >= 3 else (1 if k == 2 else 0),
            "mean": Fraction(4 * (k - 1), 3),
            "sd": (k - 1) * math.sqrt(2) / 3,
            "in_sd": _sqrt(Fraction((k - 1) * (k + 2), 18)),
            "out_sd": _sqrt(Fraction((k - 1) * (k + 14), 18)),
        }
        deg_tr, m_tr = deg, m
        mean_sh = Fraction(k + 1, 2)
        vb = _vertex_block(k, k, k, 1, mean_sh,
                           _sqrt(Fraction(k * k - 1, 12)), 1, k,
                           n - 1 if k >= 2 else 0, n,
                           k - 1 if k >= 2 else 0)
    else:  # pragma: no cover
        raise AssertionError(kind)

    props = DagProperties(
        n=n,
        m=m,
        m_tr=m_tr,
        deg_max=deg["max"],
        deg_in_max=deg["in_max"],
        deg_out_max=deg["out_max"],
        deg_min=deg["min"],
        deg_mean=float(deg["mean"]),
        deg_sd=float(deg["sd"]),
        deg_in_sd=float(deg["in_sd"]),
        deg_out_sd=float(deg["out_sd"]),
        deg_max_tr=deg_tr["max"],
        deg_in_max_tr=deg_tr["in_max"],
        deg_out_max_tr=deg_tr["out_max"],
        deg_min_tr=deg_tr["min"],
        deg_mean_tr=float(deg_tr["mean"]),
        deg_sd_tr=float(deg_tr["sd"]),
        deg_in_sd_tr=float(deg_tr["in_sd"]),
        deg_out_sd_tr=float(deg_tr["out_sd"]),
        len=vb["len"],
        width=vb["width"],
        sh_max=vb["sh_max"],
        sh_min=vb["sh_min"],
        sh_mean=float(vb["sh_mean"]),
        sh_sd=float(vb["sh_sd"]),
        sh_first=vb["sh_first"],
        sh_last=vb["sh_last"],
        mass_abs=vb["mass_abs"],
        mass=float(vb["mass"]),
        nonsingleton_run_max=vb["run"],
    )
    return OracleProperties(props, frozenset())
