"""Config-driven experiment runner.

A run config is a plain dict (usually parsed from JSON) describing the
dataset, network, loss, constraint, both operator budgets, and the
alternation settings. `resolve_config` merges user values over the
defaults and validates every field by name; `run_single` executes one
seeded run end to end and writes its artifacts.

All artifacts are deterministic functions of (config, seed): no
timestamps, no machine identifiers, full-precision floats.
"""

import copy
import json
import os
from concurrent.futures import ProcessPoolExecutor

from .alternation import AlternationConfig, run_alternation, save_trace
from .constraint import COMPARATORS, CountConstraint, PcConfig
from .data import DataSet, gen_heteroscedastic, load_csv, load_motorcycle, zscore_fit_transform
from .losses import parse_loss
from .metrics import assemble_table, emit_curve, make_report, save_report
from .network import ACTIVATIONS, NetworkSpec, init, save_checkpoint
from .numeric import ContractViolation, make_rng
from .optim import PmConfig, project_m


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


DEFAULT_CONFIG = {
    "label": None,
    "dataset": {"kind": "motorcycle", "path": None, "target": None, "n": 1000},
    "standardize": True,
    "network": {"hidden_dims": [50, 10], "activations": ["tanh", "relu", "identity"]},
    "loss": "mse",
    "constraint": None,
    "pm": {
        "lr": 1e-3,
        "max_epochs": 300,
        "rel_improve_tol": 1e-6,
        "patience": 20,
        "optimizer": "adam",
    },
    "pc": {"mu": 1e-3, "max_iter": 20000, "optimizer": "adam"},
    "alternation": {
        "max_alternations": 600,
        "distance_tol": 0.0,
        "stop_at": "constraint",
        "distance_lr_decay": False,
    },
    "unconstrained_pm": {
        "lr": 1e-3,
        "max_epochs": 20000,
        "rel_improve_tol": 1e-6,
        "patience": 50,
        "optimizer": "adam",
    },
    "seeds": [0],
    "emit": {"curve": True, "trace": True, "checkpoint": True, "grid_size": 500},
}

DATASET_KINDS = ("motorcycle", "csv", "synthetic")


def _expect(cond, field, message):
    if not cond:
        raise ConfigError(f"{field}: {message}")


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"{here}: unknown field")
        if isinstance(base[key], dict) and isinstance(val, dict):
            out[key] = _merge(base[key], val, here)
        else:
            out[key] = copy.deepcopy(val)
    return out


def resolve_config(raw: dict) -> dict:
    """Merge over defaults and validate; returns the full config dict."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object at top level")
    # constraint is polymorphic (None or dict); merge it manually
    raw = dict(raw)
    constraint = raw.pop("constraint", DEFAULT_CONFIG["constraint"])
    cfg = _merge(DEFAULT_CONFIG, raw)
    cfg["constraint"] = copy.deepcopy(constraint)

    ds = cfg["dataset"]
    _expect(ds["kind"] in DATASET_KINDS, "dataset.kind", f"must be one of {DATASET_KINDS}")
    if ds["kind"] == "csv":
        _expect(bool(ds["path"]), "dataset.path", "required for csv datasets")
        _expect(bool(ds["target"]), "dataset.target", "required for csv datasets")
        _expect(os.path.exists(ds["path"]), "dataset.path", f"no such file: {ds['path']}")
    if ds["kind"] == "synthetic":
        _expect(isinstance(ds["n"], int) and ds["n"] >= 2, "dataset.n", "must be an int >= 2")

    net = cfg["network"]
    _expect(
        isinstance(net["hidden_dims"], list) and len(net["hidden_dims"]) >= 1
        and all(isinstance(h, int) and h >= 1 for h in net["hidden_dims"]),
        "network.hidden_dims", "must be a nonempty list of positive ints",
    )
    _expect(
        isinstance(net["activations"], list)
        and len(net["activations"]) == len(net["hidden_dims"]) + 1
        and all(a in ACTIVATIONS for a in net["activations"]),
        "network.activations",
        f"must list one of {ACTIVATIONS} per hidden layer plus the output",
    )

    try:
        parse_loss(cfg["loss"])
    except (ContractViolation, TypeError) as exc:
        raise ConfigError(f"loss: {exc}") from exc

    con = cfg["constraint"]
    if con is not None:
        _expect(isinstance(con, dict), "constraint", "must be null or an object")
        unknown = set(con) - {"percentile", "m", "delta", "comparator"}
        _expect(not unknown, "constraint", f"unknown fields: {sorted(unknown)}")
        has_p, has_m = "percentile" in con, "m" in con
        _expect(has_p != has_m, "constraint", "give exactly one of percentile or m")
        if has_p:
            p = con["percentile"]
            _expect(isinstance(p, (int, float)) and 0 < p < 100,
                    "constraint.percentile", "must be in (0, 100)")
        else:
            _expect(isinstance(con["m"], int) and con["m"] >= 0, "constraint.m",
                    "must be a non-negative int")
        delta = con.get("delta", 1)
        _expect(isinstance(delta, int) and delta >= 0, "constraint.delta",
                "must be a non-negative int")
        comparator = con.get("comparator", "above_or_equal")
        _expect(comparator in COMPARATORS, "constraint.comparator",
                f"must be one of {COMPARATORS}")

    for block, factory in (("pm", PmConfig), ("unconstrained_pm", PmConfig), ("pc", PcConfig)):
        try:
            factory(**cfg[block])
        except (ContractViolation, TypeError) as exc:
            raise ConfigError(f"{block}: {exc}") from exc

    alt = cfg["alternation"]
    _expect(isinstance(alt["max_alternations"], int) and alt["max_alternations"] >= 1,
            "alternation.max_alternations", "must be an int >= 1")
    _expect(alt["distance_tol"] >= 0, "alternation.distance_tol", "must be >= 0")
    _expect(alt["stop_at"] in ("constraint", "minimum"), "alternation.stop_at",
            "must be 'constraint' or 'minimum'")

    seeds = cfg["seeds"]
    _expect(isinstance(seeds, list) and seeds and all(isinstance(s, int) for s in seeds),
            "seeds", "must be a nonempty list of ints")

    _expect(isinstance(cfg["emit"]["grid_size"], int) and cfg["emit"]["grid_size"] >= 2,
            "emit.grid_size", "must be an int >= 2")
    return cfg


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file: no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: invalid JSON ({exc})") from exc
    return resolve_config(raw)


def _parse_literal(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text  # bare strings need no quotes on the command line


def apply_overrides(cfg: dict, assignments) -> dict:
    """Apply `dotted.path=value` overrides, then re-validate."""
    out = copy.deepcopy(cfg)
    for item in assignments or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected dotted.path=value")
        dotted, _, text = item.partition("=")
        keys = dotted.strip().split(".")
        node = out
        for k in keys[:-1]:
            if not isinstance(node.get(k), dict):
                node[k] = {}
            node = node[k]
        node[keys[-1]] = _parse_literal(text)
    return resolve_config(out)


def build_dataset(cfg: dict, rng) -> DataSet:
    kind = cfg["dataset"]["kind"]
    if kind == "motorcycle":
        ds = load_motorcycle()
    elif kind == "csv":
        ds = load_csv(cfg["dataset"]["path"], cfg["dataset"]["target"])
    else:
        ds = gen_heteroscedastic(rng, cfg["dataset"]["n"])
    if cfg["standardize"]:
        ds = zscore_fit_transform(ds)
    return ds


def build_constraint(cfg: dict, n: int):
    con = cfg["constraint"]
    if con is None:
        return None
    m = con["m"] if "m" in con else round(con["percentile"] / 100.0 * n)
    constraint = CountConstraint(
        m=m,
        delta=con.get("delta", 1),
        comparator=con.get("comparator", "above_or_equal"),
    )
    try:
        constraint.check_against(n)
    except ContractViolation as exc:
        raise ConfigError(f"constraint: {exc}") from exc
    return constraint


def run_label(cfg: dict) -> str:
    if cfg["label"]:
        return cfg["label"]
    con = cfg["constraint"]
    if con is None:
        return "unconstrained"
    if "percentile" in con:
        return f"p{con['percentile']:g}"
    return f"m{con['m']}"


def run_single(cfg: dict, seed: int, out_dir=None):
    """One seeded run: data, init, train, report, artifacts.

    Returns the RunReport. The same (cfg, seed) always produces the same
    bytes in every emitted file.
    """
    rng = make_rng(seed)
    data = build_dataset(cfg, rng)
    net_cfg = cfg["network"]
    spec = NetworkSpec(
        (data.d, *net_cfg["hidden_dims"], 1),
        tuple(net_cfg["activations"]),
    )
    net = init(spec, rng)
    loss = parse_loss(cfg["loss"])
    constraint = build_constraint(cfg, data.n)
    trace = None
    if constraint is None:
        net, pm_rep = project_m(net, data, loss, PmConfig(**cfg["unconstrained_pm"]))
        losses = [pm_rep.final_loss]
    else:
        acfg = AlternationConfig(
            constraint=constraint,
            loss=loss,
            pm=PmConfig(**cfg["pm"]),
            pc=PcConfig(**cfg["pc"]),
            seed=seed,
            **cfg["alternation"],
        )
        net, trace = run_alternation(net, data, acfg)
        losses = None
    report = make_report(run_label(cfg), seed, cfg, net, data, constraint, trace)
    if losses is not None:
        report.loss_trajectory = losses
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        emit = cfg["emit"]
        save_report(report, os.path.join(out_dir, "report.json"))
        if emit["checkpoint"]:
            save_checkpoint(net, os.path.join(out_dir, "checkpoint.json"))
        if emit["trace"] and trace is not None:
            trace.checkpoint_ref = "checkpoint.json" if emit["checkpoint"] else None
            save_trace(trace, os.path.join(out_dir, "trace.jsonl"))
        if emit["curve"] and data.d == 1:
            emit_curve(net, data, os.path.join(out_dir, "curve.csv"), emit["grid_size"])
    return report


def _run_one(args):
    cfg, seed, out_dir = args
    return run_single(cfg, seed, out_dir)


def run_config(cfg: dict, out_root=None, jobs: int = 1):
    """Execute cfg across its seed list; returns the list of RunReports."""
    tasks = []
    for seed in cfg["seeds"]:
        out_dir = None
        if out_root is not None:
            out_dir = os.path.join(out_root, run_label(cfg), f"seed{seed}")
        tasks.append((cfg, seed, out_dir))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, tasks))
    return [_run_one(t) for t in tasks]


REPRODUCTION_PERCENTILES = (10, 25, 75, 90)


def reproduction_configs(seeds, delta: int = 1, percentiles=REPRODUCTION_PERCENTILES):
    """Per-percentile configs plus the unconstrained baseline."""
    out = []
    for percentile in (None, *percentiles):
        raw = {
            "dataset": {"kind": "motorcycle"},
            "loss": "mse",
            "seeds": list(seeds),
        }
        if percentile is not None:
            raw["constraint"] = {"percentile": percentile, "delta": delta}
        out.append(resolve_config(raw))
    return out


def run_reproduction(out_root, seeds=(0, 1, 2, 3, 4), jobs: int = 1, delta: int = 1,
                     percentiles=REPRODUCTION_PERCENTILES):
    """Run the full grid and assemble the summary table.

    Returns (reports, table dict). Artifacts land under
    out_root/<label>/seed<k>/, the table at out_root/table.json|.txt.
    """
    reports = []
    for cfg in reproduction_configs(seeds, delta, percentiles):
        reports.extend(run_config(cfg, out_root, jobs))
    table = assemble_table(reports, os.path.join(out_root, "table.json"))
    return reports, table
