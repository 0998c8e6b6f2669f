"""Experiment presets and CSV output.

Each preset is a list of independently generated instances; instance i of a
preset draws from its own derived random stream, so results are identical no
matter how the work is scheduled across processes.  Output is CSV only.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import Dag, shape_decomposition
from .generators import (
    GeneratorSpec,
    dag_count_table,
    derive_rng,
    erdos_renyi,
    layer_by_layer,
    random_orders,
    uniform_dag,
)
from .metrics import PROPERTY_FIELDS, measure_all, width
from .scheduling import heft, hcpt, lower_bound, minmin
from .special import SpecialKind, build_special

CSV_VERSION = 1


class UnknownPresetError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown preset {name!r}; available: {sorted(PRESETS)}")


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class BoxplotStats:
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def _quantile(ordered: Sequence[float], q: float) -> float:
    # Linear interpolation between order statistics (the common type-7 rule).
    h = (len(ordered) - 1) * q
    lo = math.floor(h)
    if lo + 1 >= len(ordered):
        return float(ordered[-1])
    frac = h - lo
    return ordered[lo] + frac * (ordered[lo + 1] - ordered[lo])


def boxplot_stats(values: Iterable[float]) -> BoxplotStats:
    """Median, quartiles, 1.5*IQR whiskers, and outliers."""
    ordered = sorted(float(v) for v in values)
    if not ordered:
        raise EmptyInputError("no values")
    q1 = _quantile(ordered, 0.25)
    med = _quantile(ordered, 0.5)
    q3 = _quantile(ordered, 0.75)
    iqr = q3 - q1
    low_fence = q1 - 1.5 * iqr
    high_fence = q3 + 1.5 * iqr
    inside = [v for v in ordered if low_fence <= v <= high_fence]
    return BoxplotStats(
        median=med,
        q1=q1,
        q3=q3,
        whisker_low=inside[0],
        whisker_high=inside[-1],
        outliers=tuple(v for v in ordered if v < low_fence or v > high_fence),
    )


@dataclass(frozen=True)
class ExperimentSpec:
    preset: str
    seed: int = 0
    jobs: int = 1
    overrides: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Preset:
    name: str
    instances: int
    header: tuple[str, ...]
    instance_rows: Callable[[int, int], list[list]]
    description: str


PROPERTY_HEADER = ("preset", "method", "instance", "n", "p", "K", "layers",
                   *PROPERTY_FIELDS)

SCHEDULE_HEADER = ("preset", "method", "instance", "n", "procs", "heuristic",
                   "makespan", "best", "diff")

_HEURISTICS = (
    ("heft", lambda d, procs: heft(d, procs).makespan),
    ("hcpt", lambda d, procs: hcpt(d, procs).makespan),
    ("minmin", lambda d, procs: minmin(d, procs).makespan),
)


def _property_row(preset: str, method: str, instance: int, d: Dag,
                  p=None, K=None, layers=None) -> list:
    props = measure_all(d)
    return [preset, method, instance, d.n,
            "" if p is None else p,
            "" if K is None else K,
            "" if layers is None else layers] + props.as_row()


def _fig3(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig3")
    p = rng.random()
    return [_property_row("fig3", "er", i, erdos_renyi(100, p, rng), p=p)]


def _fig4(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig4")
    return [_property_row("fig4", "er", i, erdos_renyi(10 + i, 0.15, rng), p=0.15)]


def _fig5(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig5")
    n = 10 + i
    d = uniform_dag(n, rng=rng, table=dag_count_table(200))
    return [_property_row("fig5", "uniform", i, d)]


def _fig6(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig6")
    K = 2 + i // 30
    return [_property_row("fig6", "orders", i, random_orders(100, K, rng), K=K)]


def _fig7(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig7")
    return [_property_row("fig7", "orders", i, random_orders(10 + i, 3, rng), K=3)]


def _fig8(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig8")
    p = rng.random()
    d = layer_by_layer(100, 10, p, rng)
    return [_property_row("fig8", "layer", i, d, p=p, layers=10)]


def _fig9(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig9")
    k = min(100, int(math.exp(rng.uniform(0.0, math.log(101.0)))))
    d = layer_by_layer(100, k, 0.5, rng)
    return [_property_row("fig9", "layer", i, d, p=0.5, layers=k)]


def _fig10(seed: int, i: int) -> list[list]:
    rng = derive_rng(seed, i, "fig10")
    n = 10 + i
    k = round(math.sqrt(n))
    d = layer_by_layer(n, k, 0.5, rng)
    return [_property_row("fig10", "layer", i, d, p=0.5, layers=k)]


FIG2_KINDS = (
    (SpecialKind.EMPTY, 128),
    (SpecialKind.COMPLETE, 128),
    (SpecialKind.CHAIN, 128),
    (SpecialKind.OUT_TREE, 127),
    (SpecialKind.IN_TREE, 127),
    (SpecialKind.COMB, 127),
    (SpecialKind.COMB_REVERSED, 127),
    (SpecialKind.BIPARTITE, 128),
    (SpecialKind.SQUARE, 121),
    (SpecialKind.TRIANGULAR, 120),
)

FIG2_PROCS = tuple(range(1, 129))


def _fig2(seed: int, i: int) -> list[list]:
    kind, n = FIG2_KINDS[i]
    d = build_special(kind, n)
    rows = []
    for procs in FIG2_PROCS:
        lb = lower_bound(d, procs)
        for name, run in _HEURISTICS:
            rows.append(["fig2", kind.value, n, procs, name, run(d, procs), lb])
    return rows


FIG11_METHODS = (
    GeneratorSpec("er", p=0.15),
    GeneratorSpec("uniform"),
    GeneratorSpec("orders", K=3),
    GeneratorSpec("layer", p=0.5, layers=10),
)

FIG11_PROCS = (2, 4, 8, 16)
_FIG11_PER_METHOD = 300


def _fig11(seed: int, i: int) -> list[list]:
    spec = FIG11_METHODS[i // _FIG11_PER_METHOD]
    rng = derive_rng(seed, i, "fig11")
    table = dag_count_table(100) if spec.method == "uniform" else None
    d = spec.sample(100, rng, table)
    rows = []
    for procs in FIG11_PROCS:
        makespans = [(name, run(d, procs)) for name, run in _HEURISTICS]
        best = min(ms for _, ms in makespans)
        for name, ms in makespans:
            rows.append(["fig11", spec.label(), i, 100, procs, name, ms, best,
                         ms - best])
    return rows


TABLE1_HEADER = ("preset", "method", "n", "instance", "width", "sh_max", "gap")
_TABLE1_SIZES = (10, 20, 30)
_TABLE1_SAMPLES = 100


def _table1(seed: int, i: int) -> list[list]:
    method = "er" if i < 300 else "uniform"
    sub = i % 300
    n = _TABLE1_SIZES[sub // _TABLE1_SAMPLES]
    rng = derive_rng(seed, i, "table1")
    if method == "er":
        d = erdos_renyi(n, 0.5, rng)
    else:
        d = uniform_dag(n, rng=rng, table=dag_count_table(max(_TABLE1_SIZES)))
    w = width(d)
    sh_max = max(shape_decomposition(d).shape)
    return [["table1", method, n, sub % _TABLE1_SAMPLES, w, sh_max, w - sh_max]]


PRESETS: dict[str, Preset] = {
    "table1": Preset("table1", 600, TABLE1_HEADER, _table1,
                     "width vs maximum shape, 100 samples per method and size"),
    "fig2": Preset("fig2", len(FIG2_KINDS), ("preset", "kind", "n", "procs",
                                             "heuristic", "makespan",
                                             "lower_bound"), _fig2,
                   "heuristic makespans on the special DAGs, procs 1..128"),
    "fig3": Preset("fig3", 300, PROPERTY_HEADER, _fig3,
                   "Erdos-Renyi n=100, p uniform in (0,1)"),
    "fig4": Preset("fig4", 191, PROPERTY_HEADER, _fig4,
                   "Erdos-Renyi p=0.15, n=10..200"),
    "fig5": Preset("fig5", 191, PROPERTY_HEADER, _fig5,
                   "uniform sampler, n=10..200"),
    "fig6": Preset("fig6", 420, PROPERTY_HEADER, _fig6,
                   "random orders n=100, K=2..15, 30 draws each"),
    "fig7": Preset("fig7", 191, PROPERTY_HEADER, _fig7,
                   "random orders K=3, n=10..200"),
    "fig8": Preset("fig8", 300, PROPERTY_HEADER, _fig8,
                   "layer-by-layer n=100 k=10, p uniform in (0,1)"),
    "fig9": Preset("fig9", 300, PROPERTY_HEADER, _fig9,
                   "layer-by-layer n=100 p=0.5, k log-uniform in 1..100"),
    "fig10": Preset("fig10", 191, PROPERTY_HEADER, _fig10,
                    "layer-by-layer p=0.5, k=round(sqrt(n)), n=10..200"),
    "fig11": Preset("fig11", 1200, SCHEDULE_HEADER, _fig11,
                    "heuristic gap to per-instance best, four methods x 300"),
}


def _instance_rows(args: tuple[str, int, int]) -> tuple[int, list[list]]:
    name, seed, index = args
    return index, PRESETS[name].instance_rows(seed, index)


def run_experiment(spec: ExperimentSpec) -> tuple[tuple[str, ...], list[list]]:
    """Produce all rows for a preset; deterministic for a given seed."""
    preset = PRESETS.get(spec.preset)
    if preset is None:
        raise UnknownPresetError(spec.preset)
    count = preset.instances
    if "instances" in spec.overrides:
        count = min(count, int(spec.overrides["instances"]))
    tasks = [(spec.preset, spec.seed, i) for i in range(count)]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            produced = list(pool.map(_instance_rows, tasks,
                                     chunksize=max(1, count // (4 * spec.jobs))))
    else:
        produced = [_instance_rows(t) for t in tasks]
    produced.sort(key=lambda pair: pair[0])
    rows = [row for _, block in produced for row in block]
    return preset.header, rows


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence], fh,
              preset: str = "", seed: int | None = None) -> None:
    """Versioned CSV; floats use shortest round-trip formatting."""
    meta = f"# dagforge-csv {CSV_VERSION}"
    if preset:
        meta += f" preset={preset}"
    if seed is not None:
        meta += f" seed={seed}"
    fh.write(meta + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(x) for x in row])
