"""Command-line entry point.

Subcommands:
    train                 run a config file (one run per seed)
    reproduce-motorcycle  the five-config comparison grid on the bundled data
    selfcheck             built-in correctness checks
    emit-curve            sample a saved checkpoint over a dataset's range
    print-config          dump the fully resolved configuration

Exit codes: 0 success, 1 runtime or check failure, 2 configuration error.
The default output root comes from COUNTREG_OUTPUT_ROOT (falling back to
./runs).
"""

import argparse
import json
import os
import sys

from .alternation import AlternationAborted
from .data import load_csv, load_motorcycle, zscore_fit_transform
from .experiment import (
    ConfigError,
    apply_overrides,
    load_config,
    resolve_config,
    run_config,
    run_reproduction,
)
from .metrics import emit_curve
from .network import load_checkpoint
from .numeric import ContractViolation
from .optim import TrainingDiverged
from .selfcheck import run_all_checks

OUTPUT_ROOT_ENV = "COUNTREG_OUTPUT_ROOT"


def _default_output_root():
    return os.environ.get(OUTPUT_ROOT_ENV, "runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="countreg",
        description="Train regression networks under a hard count constraint.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run a config file across its seeds")
    train.add_argument("--config", required=True, help="path to a JSON run config")
    train.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE",
                       help="override a config field (dotted path), repeatable")
    train.add_argument("--output-dir", default=None,
                       help="output root (default: $%s or ./runs)" % OUTPUT_ROOT_ENV)
    train.add_argument("--jobs", type=int, default=1, help="parallel seeded runs")

    rep = sub.add_parser("reproduce-motorcycle",
                         help="constrained percentiles {10,25,75,90} plus the "
                              "unconstrained baseline on the bundled dataset")
    rep.add_argument("--output-dir", default=None)
    rep.add_argument("--seeds", default="0,1,2,3,4",
                     help="comma-separated seed list (default 0,1,2,3,4)")
    rep.add_argument("--jobs", type=int, default=1)
    rep.add_argument("--delta", type=int, default=1, help="count tolerance (default 1)")
    rep.add_argument("--percentiles", default="10,25,75,90",
                     help="comma-separated percentile list (default 10,25,75,90)")

    sub.add_parser("selfcheck", help="run the built-in correctness checks")

    curve = sub.add_parser("emit-curve", help="sample a checkpoint over a dataset range")
    curve.add_argument("--checkpoint", required=True)
    curve.add_argument("--out", required=True, help="output CSV path")
    curve.add_argument("--grid-size", type=int, default=500)
    curve.add_argument("--dataset", default="motorcycle",
                       help="'motorcycle' or a CSV path (default motorcycle)")
    curve.add_argument("--target", default=None,
                       help="target column name (CSV datasets)")
    curve.add_argument("--no-standardize", action="store_true",
                       help="treat the checkpoint as trained on raw units")

    pc = sub.add_parser("print-config", help="dump the resolved configuration")
    pc.add_argument("--config", default=None, help="config file (defaults alone if omitted)")
    pc.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE")
    return parser


def _parse_seeds(text: str):
    try:
        seeds = [int(s) for s in text.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"seeds: expected comma-separated ints, got {text!r}") from exc
    if not seeds:
        raise ConfigError("seeds: list is empty")
    return seeds


def _cmd_train(args) -> int:
    cfg = load_config(args.config)
    if args.overrides:
        cfg = apply_overrides(cfg, args.overrides)
    out_root = args.output_dir or _default_output_root()
    reports = run_config(cfg, out_root, jobs=args.jobs)
    ok = True
    for rep in reports:
        where = os.path.join(out_root, rep.label, f"seed{rep.seed}")
        if rep.count_gap is None:
            print(f"{rep.label} seed {rep.seed}: rmse {rep.rmse:.4f} -> {where}")
        else:
            print(f"{rep.label} seed {rep.seed}: rmse {rep.rmse:.4f} "
                  f"count {rep.achieved_count}/{rep.target_count} -> {where}")
            ok = ok and rep.count_gap <= rep.config["constraint"].get("delta", 1)
    return 0 if ok else 1


def _parse_percentiles(text: str):
    try:
        ps = [float(s) for s in text.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"percentiles: expected comma-separated numbers, got {text!r}") from exc
    if not ps or any(not 0 < p < 100 for p in ps):
        raise ConfigError(f"percentiles: values must lie in (0, 100), got {text!r}")
    return [int(p) if float(p).is_integer() else p for p in ps]


def _cmd_reproduce(args) -> int:
    out_root = args.output_dir or _default_output_root()
    seeds = _parse_seeds(args.seeds)
    reports, table = run_reproduction(out_root, seeds=seeds, jobs=args.jobs,
                                      delta=args.delta,
                                      percentiles=_parse_percentiles(args.percentiles))
    for label, row in table.items():
        gap = row["max_count_gap"]
        gap_txt = "" if gap is None else f"  max|count-m|={gap}"
        print(f"{label:<16} median rmse {row['rmse_median']:8.4f}{gap_txt}")
    print(f"table -> {os.path.join(out_root, 'table.json')}")
    bad = [r for r in reports if r.count_gap is not None and r.count_gap > args.delta]
    return 1 if bad else 0


def _cmd_selfcheck(_args) -> int:
    results = run_all_checks()
    for res in results:
        print(res.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _cmd_emit_curve(args) -> int:
    net = load_checkpoint(args.checkpoint)
    if args.dataset == "motorcycle":
        ds = load_motorcycle()
    else:
        if not args.target:
            raise ConfigError("target: required when --dataset is a CSV path")
        ds = load_csv(args.dataset, args.target)
    if not args.no_standardize:
        ds = zscore_fit_transform(ds)
    emit_curve(net, ds, args.out, args.grid_size)
    print(f"curve -> {args.out}")
    return 0


def _cmd_print_config(args) -> int:
    cfg = load_config(args.config) if args.config else resolve_config({})
    if args.overrides:
        cfg = apply_overrides(cfg, args.overrides)
    json.dump(cfg, sys.stdout, indent=2)
    print()
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "reproduce-motorcycle": _cmd_reproduce,
    "selfcheck": _cmd_selfcheck,
    "emit-curve": _cmd_emit_curve,
    "print-config": _cmd_print_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AlternationAborted as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    except (ContractViolation, TrainingDiverged, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
