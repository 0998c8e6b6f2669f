"""Unit-cost multiprocessor list scheduling with precedence constraints.

Covers schedule validation, the HEFT / HCPT / MinMin heuristics, an exact
brute-force baseline, the bottleneck decomposition, and the two adversarial
instance builders.  All tie-breaking is explicit: priority ties fall back to
the smaller task id, and processor ties to the smallest processor index that
achieves the earliest start.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import Dag, TooLargeError, depths, shape_decomposition

BRUTE_FORCE_CAP = 20

LOWEST_ID = "lowest"
ADVERSARIAL = "adversarial"


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    """Task -> (processor, start time) assignment for unit-cost tasks."""

    assignments: dict[int, tuple[int, int]]
    makespan: int


def validate_schedule(d: Dag, s: Schedule, procs: int) -> list[str]:
    """Return violation messages; an empty list means the schedule is valid."""
    violations: list[str] = []
    slots: dict[tuple[int, int], int] = {}
    for v in range(1, d.n + 1):
        if v not in s.assignments:
            violations.append(f"task {v} is unscheduled")
            continue
        proc, start = s.assignments[v]
        if not 1 <= proc <= procs:
            violations.append(f"task {v} on processor {proc} outside 1..{procs}")
        if start < 0:
            violations.append(f"task {v} starts at negative time {start}")
        key = (proc, start)
        if key in slots:
            violations.append(
                f"tasks {slots[key]} and {v} share processor {proc} at time {start}"
            )
        else:
            slots[key] = v
    for u, v in sorted(d.edges):
        if u in s.assignments and v in s.assignments:
            if s.assignments[v][1] < s.assignments[u][1] + 1:
                violations.append(f"edge ({u}, {v}) violated: "
                                  f"{v} starts before {u} completes")
    if s.assignments:
        actual = max(start + 1 for _, start in s.assignments.values())
        if actual != s.makespan:
            violations.append(f"makespan {s.makespan} != last completion {actual}")
    return violations


def upward_rank(d: Dag) -> list[int]:
    """Longest path (in vertices) from each task to a sink; HEFT's priority.

    Equals the task's depth in the reversed DAG.  1-indexed list, index 0
    unused.
    """
    rank = [0] * (d.n + 1)
    for v in reversed(d.topological_order()):
        rank[v] = 1 + max((rank[w] for w in d.succ[v]), default=0)
    return rank


def _ready_time(d: Dag, v: int, finish: list[int]) -> int:
    return max((finish[u] for u in d.pred[v]), default=0)


def heft(d: Dag, procs: int) -> Schedule:
    """Decreasing upward rank, earliest-finish placement with gap insertion.

    With unit tasks, insertion means taking the first free integer slot at or
    after the ready time on each processor's timeline.
    """
    if procs < 1:
        raise ParameterError(f"processor count must be >= 1, got {procs}")
    rank = upward_rank(d)
    order = sorted(range(1, d.n + 1), key=lambda v: (-rank[v], v))
    busy: list[set[int]] = [set() for _ in range(procs + 1)]
    finish = [0] * (d.n + 1)
    assignments: dict[int, tuple[int, int]] = {}
    for v in order:
        ready = _ready_time(d, v, finish)
        best_proc, best_start = 1, None
        for proc in range(1, procs + 1):
            t = ready
            taken = busy[proc]
            while t in taken:
                t += 1
            if best_start is None or t < best_start:
                best_proc, best_start = proc, t
        busy[best_proc].add(best_start)
        finish[v] = best_start + 1
        assignments[v] = (best_proc, best_start)
    makespan = max(finish[1:], default=1) if d.n else 0
    return Schedule(assignments, makespan)


def _critical_nodes(d: Dag, dep: list[int], rank: list[int], length: int) -> list[int]:
    # Earliest and latest start coincide exactly on critical-path tasks.
    return [v for v in range(1, d.n + 1) if dep[v] - 1 == length - rank[v]]


def hcpt_priority_list(d: Dag) -> list[int]:
    """Critical-path tasks in earliest-start order, ancestors injected first,
    followed by the remaining tasks in (depth, id) order."""
    dep = depths(d)
    rank = upward_rank(d)
    length = max(dep[1:])
    alst = [0] * (d.n + 1)
    for v in range(1, d.n + 1):
        alst[v] = length - rank[v]
    critical = _critical_nodes(d, dep, rank, length)
    stack = sorted(critical, key=lambda v: (alst[v], v), reverse=True)
    listed: list[int] = []
    in_list = [False] * (d.n + 1)
    while stack:
        top = stack[-1]
        parents = [u for u in d.pred[top] if not in_list[u]]
        if parents:
            stack.append(min(parents, key=lambda u: (alst[u], u)))
            continue
        stack.pop()
        if not in_list[top]:
            in_list[top] = True
            listed.append(top)
    rest = sorted((v for v in range(1, d.n + 1) if not in_list[v]),
                  key=lambda v: (dep[v], v))
    return listed + rest


def hcpt(d: Dag, procs: int) -> Schedule:
    """Critical-parent listing plus earliest-finish placement without insertion.

    Since there is no backfilling, a listed task whose ready time lies
    strictly inside the already-committed span cannot be slotted into that
    region: it re-enters at the current schedule end.  Critical-path tasks
    are listed in nondecreasing start order, so only off-critical tasks are
    ever deferred this way.
    """
    if procs < 1:
        raise ParameterError(f"processor count must be >= 1, got {procs}")
    dep = depths(d)
    rank = upward_rank(d)
    length = max(dep[1:])
    critical = set(_critical_nodes(d, dep, rank, length))
    avail = [0] * (procs + 1)
    finish = [0] * (d.n + 1)
    assignments: dict[int, tuple[int, int]] = {}
    frontier = 0
    makespan = 0
    for v in hcpt_priority_list(d):
        ready = _ready_time(d, v, finish)
        if v not in critical and ready < frontier:
            ready = max(ready, makespan)
        best_proc, best_start = 1, None
        for proc in range(1, procs + 1):
            t = max(ready, avail[proc])
            if best_start is None or t < best_start:
                best_proc, best_start = proc, t
        avail[best_proc] = best_start + 1
        finish[v] = best_start + 1
        assignments[v] = (best_proc, best_start)
        frontier = max(frontier, best_start)
        makespan = max(makespan, best_start + 1)
    return Schedule(assignments, makespan)


def minmin(d: Dag, procs: int, tie_policy: str = LOWEST_ID) -> Schedule:
    """Event-driven simulation: at every time step the available tasks are
    assigned to the free processors.

    With unit costs all earliest-finish values coincide, so the tie policy
    decides the order: ``lowest`` takes ascending task ids; ``adversarial``
    defers critical-chain work by preferring tasks with the smallest upward
    rank first.
    """
    if procs < 1:
        raise ParameterError(f"processor count must be >= 1, got {procs}")
    if tie_policy not in (LOWEST_ID, ADVERSARIAL):
        raise ParameterError(f"unknown tie policy {tie_policy!r}")
    rank = upward_rank(d)
    if tie_policy == ADVERSARIAL:
        def sort_key(v: int):
            return (rank[v], v)
    else:
        def sort_key(v: int):
            return v
    remaining_preds = [len(d.pred[v]) for v in range(d.n + 1)]
    available = [v for v in range(1, d.n + 1) if remaining_preds[v] == 0]
    assignments: dict[int, tuple[int, int]] = {}
    t = 0
    while available:
        batch = sorted(available, key=sort_key)[:procs]
        batch_set = set(batch)
        available = [v for v in available if v not in batch_set]
        for proc, v in enumerate(batch, start=1):
            assignments[v] = (proc, t)
        for v in batch:
            for w in d.succ[v]:
                remaining_preds[w] -= 1
                if remaining_preds[w] == 0:
                    available.append(w)
        t += 1
    return Schedule(assignments, t)


def lower_bound(d: Dag, procs: int) -> int:
    """max(length, ceil(n / procs)); never exceeds any valid makespan."""
    if procs < 1:
        raise ParameterError(f"processor count must be >= 1, got {procs}")
    dep = depths(d)
    return max(max(dep[1:]), -(-d.n // procs))


def _interchangeable_classes(d: Dag) -> tuple[list[list[int]], list[list[int]]]:
    """Group tasks sharing both predecessor and successor sets.

    Members of one class are mutually unordered and fully interchangeable in
    any schedule, so exact search only needs per-class completion counts.
    Classes are returned with, per class, the list of member-required classes.
    """
    signature: dict[tuple[frozenset, frozenset], int] = {}
    members: list[list[int]] = []
    class_of = [0] * (d.n + 1)
    for v in range(1, d.n + 1):
        sig = (frozenset(d.pred[v]), frozenset(d.succ[v]))
        idx = signature.get(sig)
        if idx is None:
            idx = len(members)
            signature[sig] = idx
            members.append([])
        members[idx].append(v)
        class_of[v] = idx
    pred_classes: list[list[int]] = []
    for group in members:
        # All members share the same predecessor set, which meets any other
        # class either fully or not at all.
        preds = sorted({class_of[u] for u in d.pred[group[0]]})
        pred_classes.append(preds)
    return members, pred_classes


def _compositions(avail: list[int], total: int):
    """All ways to pick `total` items across classes, bounded per class."""
    picks = [0] * len(avail)

    def rec(i: int, left: int):
        if left == 0:
            yield tuple(picks)
            return
        if i == len(avail):
            return
        if sum(avail[i:]) < left:
            return
        for c in range(min(avail[i], left), -1, -1):
            picks[i] = c
            yield from rec(i + 1, left - c)
        picks[i] = 0

    yield from rec(0, total)


def brute_force_optimal(d: Dag, procs: int) -> int:
    """Exact minimum makespan by breadth-first search over completion states.

    States are per-class completion counts (interchangeable tasks collapsed),
    advanced one unit step at a time; at each step exactly
    min(procs, available) tasks run, which is optimal for unit costs.
    """
    if procs < 1:
        raise ParameterError(f"processor count must be >= 1, got {procs}")
    if d.n > BRUTE_FORCE_CAP:
        raise TooLargeError(
            f"exact search capped at n={BRUTE_FORCE_CAP}, got {d.n}")
    members, pred_classes = _interchangeable_classes(d)
    sizes = [len(g) for g in members]
    full = tuple(sizes)
    frontier = {tuple([0] * len(sizes))}
    seen = set(frontier)
    t = 0
    while True:
        if full in frontier:
            return t
        next_frontier = set()
        for state in frontier:
            avail = [
                sizes[c] - state[c]
                if all(state[pc] == sizes[pc] for pc in pred_classes[c]) else 0
                for c in range(len(sizes))
            ]
            run = min(procs, sum(avail))
            for picks in _compositions(avail, run):
                new_state = tuple(s + p for s, p in zip(state, picks))
                if new_state not in seen:
                    seen.add(new_state)
                    next_frontier.add(new_state)
        frontier = next_frontier
        t += 1


@dataclass(frozen=True)
class Segment:
    """Induced sub-DAG covering one run of layers between bottlenecks."""

    dag: Dag
    vertices: tuple[int, ...]  # segment label -> original label


@dataclass(frozen=True)
class DecompositionResult:
    segments: tuple[Segment, ...]
    n_c: int
    shared: tuple[int, ...]


def _induced(d: Dag, vertices: list[int]) -> Segment:
    index = {v: i + 1 for i, v in enumerate(vertices)}
    keep = set(vertices)
    edges = [(index[u], index[v]) for u, v in d.edges if u in keep and v in keep]
    return Segment(Dag(len(vertices), edges), tuple(vertices))


def decompose_at_bottlenecks(d: Dag) -> DecompositionResult:
    """Cut the shape at every singleton layer.

    Each segment spans the layers between two consecutive bottlenecks (or a
    bottleneck and the shape's end) and includes its delimiting bottleneck
    vertices, so adjacent segments share exactly one vertex.
    """
    sd = shape_decomposition(d)
    bottleneck_layers = [i for i, size in enumerate(sd.shape) if size == 1]
    n_c = len(bottleneck_layers)
    spans: list[tuple[int, int]] = []
    if not bottleneck_layers:
        spans.append((0, sd.k - 1))
    else:
        first, last = bottleneck_layers[0], bottleneck_layers[-1]
        if first > 0:
            spans.append((0, first))
        for a, b in zip(bottleneck_layers, bottleneck_layers[1:]):
            spans.append((a, b))
        if last < sd.k - 1:
            spans.append((last, sd.k - 1))
        if not spans:  # single layer, itself a bottleneck (n == 1)
            spans.append((0, sd.k - 1))
    segments = []
    for a, b in spans:
        verts: list[int] = []
        for idx in range(a, b + 1):
            verts.extend(sd.layers[idx])
        segments.append(_induced(d, sorted(verts)))
    shared = tuple(
        sd.layers[i][0]
        for i in bottleneck_layers
        if sum(1 for a, b in spans if a <= i <= b) == 2
    )
    return DecompositionResult(tuple(segments), n_c, shared)


def composed_optimal(d: Dag, procs: int) -> int:
    """Sum of per-segment exact optima minus the shared bottleneck count."""
    decomposition = decompose_at_bottlenecks(d)
    total = sum(brute_force_optimal(seg.dag, procs)
                for seg in decomposition.segments)
    return total - len(decomposition.shared)


def hcpt_trap(k: int, procs: int) -> Dag:
    """Chain of k with a width-``procs`` fork-join near its end, plus a
    disjoint chain of k - 1; n = 2k + procs - 2.

    Without backfilling the disjoint chain runs only after the fork-join
    element completes, which costs k - 1 extra steps over the optimum k.
    """
    if k < 3 or procs < 2:
        raise ParameterError(f"need k >= 3 and procs >= 2, got k={k}, procs={procs}")
    n = 2 * k + procs - 2
    edges = [(i, i + 1) for i in range(1, k)]
    extras = range(k + 1, k + procs)
    for e in extras:
        edges.append((k - 2, e))
        edges.append((e, k))
    second = range(k + procs, n + 1)
    edges.extend((a, a + 1) for a in second[:-1])
    return Dag(n, edges)


def minmin_trap(k: int, procs: int) -> Dag:
    """Chain of k plus k * (procs - 1) independent tasks; n = k * procs.

    Deferring the chain behind the independent tasks stretches the makespan
    to 2k - 1 against an optimum of k.
    """
    if k < 1 or procs < 2:
        raise ParameterError(f"need k >= 1 and procs >= 2, got k={k}, procs={procs}")
    return Dag(k * procs, ((i, i + 1) for i in range(1, k)))
