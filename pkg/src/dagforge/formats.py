"""Text interchange formats: edge list (canonical), DOT, and STG.

Edge list: first line ``n``, then one ``u v`` line per edge, 1-indexed;
``#`` starts a comment.  STG task lines read ``id cost n_pred pred...`` with
unit costs; exports add the conventional zero-cost dummy source and sink,
imports strip them again.
"""
from __future__ import annotations

import re
import warnings

from .core import Dag

EDGELIST = "edgelist"
DOT = "dot"
STG = "stg"
FORMATS = (EDGELIST, DOT, STG)


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownFormatError(ValueError):
    def __init__(self, fmt: str):
        super().__init__(f"unknown format {fmt!r}; expected one of {FORMATS}")


class StgDummyWarning(UserWarning):
    """Dummy source/sink tasks were removed while importing an STG file."""


def write_edge_list(d: Dag) -> str:
    lines = [str(d.n)]
    lines.extend(f"{u} {v}" for u, v in d.sorted_edges())
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> Dag:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1 or not parts[0].isdigit():
                raise ParseError(lineno, f"expected vertex count, got {raw!r}")
            n = int(parts[0])
            continue
        if len(parts) != 2:
            raise ParseError(lineno, f"expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex in {raw!r}") from None
        edges.append((u, v))
    if n is None:
        raise ParseError(1, "empty input")
    return Dag(n, edges)


def write_dot(d: Dag) -> str:
    lines = ["digraph g {"]
    lines.extend(f"  {v};" for v in range(1, d.n + 1))
    lines.extend(f"  {u} -> {v};" for u, v in d.sorted_edges())
    lines.append("}")
    return "\n".join(lines) + "\n"


_DOT_EDGE = re.compile(r"^(\d+)\s*->\s*(\d+);?$")
_DOT_NODE = re.compile(r"^(\d+);?$")


def read_dot(text: str) -> Dag:
    """Parse the digraph subset emitted by :func:`write_dot`."""
    vertices: set[int] = set()
    edges = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if line.startswith("digraph"):
            saw_header = True
            continue
        if line == "}":
            continue
        m = _DOT_EDGE.match(line)
        if m:
            u, v = int(m.group(1)), int(m.group(2))
            vertices.update((u, v))
            edges.append((u, v))
            continue
        m = _DOT_NODE.match(line)
        if m:
            vertices.add(int(m.group(1)))
            continue
        raise ParseError(lineno, f"unrecognized dot statement {raw!r}")
    if not saw_header:
        raise ParseError(1, "missing 'digraph' header")
    if not vertices:
        raise ParseError(1, "no vertices")
    return Dag(max(vertices), edges)


def write_stg(d: Dag) -> str:
    """Unit-cost STG with dummy source task 0 and sink task n + 1."""
    n = d.n
    lines = [str(n + 2), "0 0 0"]
    for v in range(1, n + 1):
        preds = sorted(d.pred[v])
        lines.append(" ".join([str(v), "1", str(len(preds))] + [str(u) for u in preds]))
    sinks = [v for v in range(1, n + 1) if not d.succ[v]]
    lines.append(" ".join([str(n + 1), "0", str(len(sinks))] + [str(v) for v in sinks]))
    return "\n".join(lines) + "\n"


def read_stg(text: str) -> Dag:
    """Parse STG task lines; boundary zero-cost dummies are dropped.

    Costs other than 1 on real tasks are parsed and ignored (structure only).
    """
    rows: list[tuple[int, int, int, list[int]]] = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if declared is None:
            if len(parts) != 1:
                raise ParseError(lineno, f"expected task count, got {raw!r}")
            try:
                declared = int(parts[0])
            except ValueError:
                raise ParseError(lineno, f"non-integer task count {raw!r}") from None
            continue
        if len(parts) < 3:
            raise ParseError(lineno, f"expected 'id cost n_pred ...', got {raw!r}")
        try:
            task, cost, npred = int(parts[0]), int(parts[1]), int(parts[2])
            preds = [int(x) for x in parts[3:]]
        except ValueError:
            raise ParseError(lineno, f"non-integer field in {raw!r}") from None
        if len(preds) != npred:
            raise ParseError(
                lineno, f"declared {npred} predecessors but found {len(preds)}")
        rows.append((lineno, task, cost, preds))
    if declared is None or not rows:
        raise ParseError(1, "empty input")
    ids = [task for _, task, _, _ in rows]
    dummy: set[int] = set()
    if rows[0][2] == 0 and rows[0][1] == min(ids):
        dummy.add(rows[0][1])
    if rows[-1][2] == 0 and rows[-1][1] == max(ids):
        dummy.add(rows[-1][1])
    if dummy:
        warnings.warn(
            f"removed {len(dummy)} dummy boundary task(s) on import",
            StgDummyWarning, stacklevel=2)
    real = [(lineno, task, preds) for lineno, task, _, preds in rows
            if task not in dummy]
    relabel = {task: i + 1 for i, (_, task, _) in enumerate(sorted(real, key=lambda r: r[1]))}
    edges = []
    for lineno, task, preds in real:
        for u in preds:
            if u in dummy:
                continue
            if u not in relabel:
                raise ParseError(lineno, f"unknown predecessor {u}")
            edges.append((relabel[u], relabel[task]))
    return Dag(len(real), edges)


_WRITERS = {EDGELIST: write_edge_list, DOT: write_dot, STG: write_stg}
_READERS = {EDGELIST: read_edge_list, DOT: read_dot, STG: read_stg}


def write_graph(d: Dag, fmt: str) -> str:
    if fmt not in _WRITERS:
        raise UnknownFormatError(fmt)
    return _WRITERS[fmt](d)


def read_graph(text: str, fmt: str) -> Dag:
    if fmt not in _READERS:
        raise UnknownFormatError(fmt)
    return _READERS[fmt](text)


def convert(text: str, in_fmt: str, out_fmt: str) -> str:
    """Structure-lossless format conversion."""
    return write_graph(read_graph(text, in_fmt), out_fmt)
