"""The ``forge`` command line: generate, special, analyze, schedule, audit,
experiment, convert.

Exit codes: 0 success, 2 validation failure, 3 parse error.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core import GraphError, TooLargeError
from .formats import (
    FORMATS,
    ParseError,
    UnknownFormatError,
    read_graph,
    write_graph,
)
from .generators import (
    DEFAULT_COUNT_CAP,
    EXACT,
    PAPER,
    CapExceededError,
    GeneratorSpec,
    dag_count_table,
    derive_rng,
    load_count_table,
    save_count_table,
)
from .metrics import PROPERTY_FIELDS, measure_all
from .scheduling import (
    ADVERSARIAL,
    LOWEST_ID,
    ParameterError,
    Schedule,
    brute_force_optimal,
    heft,
    hcpt,
    lower_bound,
    minmin,
    validate_schedule,
)
from .special import InadmissibleSizeError, SpecialKind, build_special
from .experiments import (
    ExperimentSpec,
    PRESETS,
    UnknownPresetError,
    run_experiment,
    write_csv,
)
from .uniformity import (
    CLASSES,
    LABELED,
    chi_square_test,
    empirical_class_distribution,
    enumerate_labeled_dags,
)

CACHE_ENV = "DAGFORGE_CACHE"

OK = 0
VALIDATION_FAILURE = 2
PARSE_FAILURE = 3


def _add_generator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", required=True,
                        choices=["er", "uniform", "orders", "layer"])
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--p", type=float, default=0.5,
                        help="connectivity probability (er, layer)")
    parser.add_argument("--K", type=int, default=2,
                        help="number of permutations (orders)")
    parser.add_argument("--layers", type=int, default=1,
                        help="layer count (layer)")
    parser.add_argument("--mode", choices=[EXACT, PAPER], default=EXACT,
                        help="uniform sampler variant")
    parser.add_argument("--seed", type=int, default=0)


def _generator_spec(args) -> GeneratorSpec:
    return GeneratorSpec(method=args.method, p=args.p, K=args.K,
                         layers=args.layers, mode=args.mode, seed=args.seed)


def _count_table_for(n: int):
    cache_dir = os.environ.get(CACHE_ENV)
    if cache_dir:
        path = Path(cache_dir) / f"counts-{DEFAULT_COUNT_CAP}.txt"
        if path.exists():
            table = load_count_table(path)
            if table.n >= n:
                return table
        table = dag_count_table(max(n, 1))
        path.parent.mkdir(parents=True, exist_ok=True)
        save_count_table(table, path)
        return table
    return dag_count_table(n)


def _cmd_generate(args) -> int:
    spec = _generator_spec(args)
    table = _count_table_for(args.n) if args.method == "uniform" else None
    outputs = []
    for i in range(args.count):
        rng = derive_rng(args.seed, i, spec.label())
        outputs.append(write_graph(spec.sample(args.n, rng, table), args.format))
    if args.count > 1:
        if not args.out_dir:
            print("--out-dir is required when --count > 1", file=sys.stderr)
            return VALIDATION_FAILURE
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        ext = {"edgelist": "txt", "dot": "dot", "stg": "stg"}[args.format]
        for i, text in enumerate(outputs):
            (out_dir / f"dag_{i:04d}.{ext}").write_text(text)
        print(f"wrote {len(outputs)} files to {out_dir}")
    elif args.out:
        Path(args.out).write_text(outputs[0])
    else:
        sys.stdout.write(outputs[0])
    return OK


def _cmd_special(args) -> int:
    d = build_special(SpecialKind(args.kind), args.n)
    text = write_graph(d, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def _cmd_analyze(args) -> int:
    d = read_graph(Path(args.input).read_text(), args.format)
    props = measure_all(d)
    if args.csv:
        print(",".join(PROPERTY_FIELDS))
        print(",".join(repr(x) if isinstance(x, float) else str(x)
                       for x in props.as_row()))
    else:
        for name, value in zip(PROPERTY_FIELDS, props.as_row()):
            print(f"{name} = {value}")
    return OK


_SCHEDULERS = {
    "heft": lambda d, procs, tie: heft(d, procs),
    "hcpt": lambda d, procs, tie: hcpt(d, procs),
    "minmin": lambda d, procs, tie: minmin(d, procs, tie),
}


def _cmd_schedule(args) -> int:
    d = read_graph(Path(args.input).read_text(), args.format)
    if args.heuristic == "bruteforce":
        print(f"optimal makespan {brute_force_optimal(d, args.procs)}")
        print(f"lower bound {lower_bound(d, args.procs)}")
        return OK
    schedule: Schedule = _SCHEDULERS[args.heuristic](d, args.procs, args.tie)
    print("task proc start")
    for task in range(1, d.n + 1):
        proc, start = schedule.assignments[task]
        print(f"{task} {proc} {start}")
    print(f"makespan {schedule.makespan}")
    print(f"lower bound {lower_bound(d, args.procs)}")
    if args.check:
        violations = validate_schedule(d, schedule, args.procs)
        if violations:
            for v in violations:
                print(f"violation: {v}", file=sys.stderr)
            return VALIDATION_FAILURE
        print("schedule valid")
    return OK


def _cmd_audit(args) -> int:
    spec = _generator_spec(args)
    catalog = enumerate_labeled_dags(args.n)
    table = _count_table_for(args.n) if args.method == "uniform" else None
    counts = empirical_class_distribution(
        spec, args.n, args.samples, args.universe, catalog, table)
    cells = len(counts)
    expected = [1.0 / cells] * cells
    stat, df, p_value = chi_square_test(counts, expected)
    print(f"universe {args.universe} cells {cells} samples {args.samples}")
    print("cell observed expected")
    for i, count in enumerate(counts):
        print(f"{i} {count} {repr(args.samples / cells)}")
    print(f"statistic {repr(stat)}")
    print(f"df {df}")
    print(f"p-value {repr(p_value)}")
    verdict = "UNIFORM" if p_value > args.alpha else "BIASED"
    print(f"verdict {verdict} (alpha {args.alpha})")
    return OK


def _parse_config(path: str) -> dict:
    overrides = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(1, f"expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        overrides[key] = value
    return overrides


def _cmd_experiment(args) -> int:
    overrides = _parse_config(args.config) if args.config else {}
    seed = int(overrides.pop("seed", args.seed))
    spec = ExperimentSpec(preset=args.preset, seed=seed, jobs=args.jobs,
                          overrides=overrides)
    header, rows = run_experiment(spec)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(header, rows, fh, preset=args.preset, seed=seed)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        write_csv(header, rows, sys.stdout, preset=args.preset, seed=seed)
    return OK


def _cmd_convert(args) -> int:
    text = Path(args.input).read_text()
    out_text = write_graph(read_graph(text, getattr(args, "from")), args.to)
    Path(args.output).write_text(out_text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forge",
        description="Random task graphs, DAG properties, and unit-cost scheduling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample random DAGs")
    _add_generator_args(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--out-dir")
    p.add_argument("--out-format", "--format", dest="format",
                   choices=list(FORMATS), default="edgelist")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("special", help="build a benchmark DAG family member")
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in SpecialKind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=list(FORMATS), default="edgelist")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_special)

    p = sub.add_parser("analyze", help="measure all properties of a DAG file")
    p.add_argument("input")
    p.add_argument("--format", choices=list(FORMATS), default="edgelist")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("schedule", help="run a scheduling heuristic")
    p.add_argument("input")
    p.add_argument("--format", choices=list(FORMATS), default="edgelist")
    p.add_argument("--heuristic", required=True,
                   choices=["heft", "hcpt", "minmin", "bruteforce"])
    p.add_argument("--procs", type=int, required=True)
    p.add_argument("--tie", choices=[LOWEST_ID, ADVERSARIAL], default=LOWEST_ID)
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("audit", help="chi-square audit of a generator")
    _add_generator_args(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--universe", choices=[LABELED, CLASSES], default=LABELED)
    p.add_argument("--alpha", type=float, default=0.001)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("experiment", help="run a preset and emit CSV")
    p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--config", help="key = value overrides")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("convert", help="convert between graph file formats")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--from", required=True, choices=list(FORMATS))
    p.add_argument("--to", required=True, choices=list(FORMATS))
    p.set_defaults(func=_cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UnknownFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_FAILURE
    except (GraphError, InadmissibleSizeError, ParameterError, TooLargeError,
            CapExceededError, UnknownPresetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_FAILURE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
