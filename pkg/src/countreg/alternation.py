"""Alternate between loss minima and the count-feasible set.

One run looks like::

    theta_1_C = project_c(theta_0)            # establish feasibility
    repeat i = 1, 2, ...:
        theta_i_M   = project_m(theta_i_C)    # descend the loss
        d_i         = ||theta_i_C - theta_i_M||
        theta_i+1_C = project_c(theta_i_M)    # restore feasibility

and stops when the change in d_i between consecutive rounds drops below
``distance_tol`` (scaled by the current parameter norm) or the round
budget runs out. Under exact nearest-point projections the series d_i is
provably non-increasing; with the optimizer-based surrogates it is merely
expected to trend down, so the trace records everything for inspection.

The trace file is line-delimited JSON: a header line with the resolved
configuration, one line per completed round, and a footer naming the
final checkpoint (if one was written).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .constraint import CountConstraint, PcConfig, PcReport, project_c
from .losses import LossKind, parse_loss
from .network import Network
from .numeric import ContractViolation, Vector, l2_distance
from .optim import PmConfig, PmReport, project_m

TRACE_FORMAT = "countreg-trace"
TRACE_VERSION = 1

STOP_AT = ("constraint", "minimum")


@dataclass
class AlternationConfig:
    constraint: CountConstraint
    loss: LossKind
    pm: PmConfig = field(default_factory=PmConfig)
    pc: PcConfig = field(default_factory=PcConfig)
    max_alternations: int = 20
    distance_tol: float = 1e-4
    stop_at: str = "constraint"
    seed: int | None = None
    distance_lr_decay: bool = False

    def __post_init__(self):
        if self.max_alternations < 1:
            raise ContractViolation(
                f"max_alternations must be >= 1, got {self.max_alternations}"
            )
        if self.distance_tol < 0:
            raise ContractViolation(f"distance_tol must be >= 0, got {self.distance_tol}")
        if self.stop_at not in STOP_AT:
            raise ContractViolation(f"stop_at must be one of {STOP_AT}, got {self.stop_at!r}")

    def to_dict(self) -> dict:
        return {
            "constraint": {
                "m": self.constraint.m,
                "delta": self.constraint.delta,
                "comparator": self.constraint.comparator,
            },
            "loss": self.loss.label(),
            "pm": {k: getattr(self.pm, k) for k in self.pm.__dataclass_fields__},
            "pc": {k: getattr(self.pc, k) for k in self.pc.__dataclass_fields__},
            "max_alternations": self.max_alternations,
            "distance_tol": self.distance_tol,
            "stop_at": self.stop_at,
            "seed": self.seed,
            "distance_lr_decay": self.distance_lr_decay,
        }

    @staticmethod
    def from_dict(d: dict) -> "AlternationConfig":
        return AlternationConfig(
            constraint=CountConstraint(**d["constraint"]),
            loss=parse_loss(d["loss"]),
            pm=PmConfig(**d["pm"]),
            pc=PcConfig(**d["pc"]),
            max_alternations=d["max_alternations"],
            distance_tol=d["distance_tol"],
            stop_at=d["stop_at"],
            seed=d.get("seed"),
            distance_lr_decay=d.get("distance_lr_decay", False),
        )


@dataclass
class AlternationRecord:
    """One completed round: descend to a minimum, drift back to feasibility."""

    iteration: int
    distance: float
    loss_after_pm: float
    count_after_pc: int
    pm: PmReport
    pc: PcReport

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "distance": self.distance,
            "loss_after_pm": self.loss_after_pm,
            "count_after_pc": self.count_after_pc,
            "pm": self.pm.to_dict(),
            "pc": self.pc.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "AlternationRecord":
        return AlternationRecord(
            iteration=d["iteration"],
            distance=d["distance"],
            loss_after_pm=d["loss_after_pm"],
            count_after_pc=d["count_after_pc"],
            pm=PmReport(**d["pm"]),
            pc=PcReport(**d["pc"]),
        )


@dataclass
class AlternationTrace:
    config: AlternationConfig
    initial_pc: PcReport
    records: list
    checkpoint_ref: str | None = None


class AlternationAborted(RuntimeError):
    """The drift operator failed to reach the feasible set; carries the
    partial trace in ``.trace``."""

    def __init__(self, message: str, trace: AlternationTrace):
        super().__init__(message)
        self.trace = trace


def run_alternation(net0: Network, data, cfg: AlternationConfig):
    """Run the full scheme from a (possibly infeasible) starting network.

    Returns ``(network, trace)`` where the network is taken from the
    constraint side or the minimum side of the last completed round,
    per ``cfg.stop_at``. With ``stop_at='constraint'`` the returned
    network always satisfies the count constraint.
    """
    cfg.constraint.check_against(data.n)
    records = []

    def scaled(base_cfg, factory, lr_name, ratio):
        if not cfg.distance_lr_decay or ratio is None:
            return base_cfg
        kw = {k: getattr(base_cfg, k) for k in base_cfg.__dataclass_fields__}
        kw[lr_name] = getattr(base_cfg, lr_name) * min(1.0, ratio)
        return factory(**kw)

    net_c, pc0 = project_c(net0, data, cfg.constraint, cfg.pc)
    if not pc0.converged:
        trace = AlternationTrace(cfg, pc0, records)
        raise AlternationAborted(
            f"initial constraint drift stopped at count {pc0.final_count} "
            f"(target {cfg.constraint.m}+-{cfg.constraint.delta}) after "
            f"{pc0.iterations} iterations",
            trace,
        )
    net_m = net_c
    prev_distance = None
    first_distance = None
    for i in range(1, cfg.max_alternations + 1):
        ratio = None
        if first_distance is not None and first_distance > 0 and prev_distance is not None:
            ratio = prev_distance / first_distance
        net_m, pm_rep = project_m(net_c, data, cfg.loss, scaled(cfg.pm, PmConfig, "lr", ratio))
        d_i = l2_distance(net_c.params, net_m.params)
        if first_distance is None:
            first_distance = d_i
        new_net_c, pc_rep = project_c(net_m, data, cfg.constraint, scaled(cfg.pc, PcConfig, "mu", ratio))
        records.append(
            AlternationRecord(
                iteration=i,
                distance=d_i,
                loss_after_pm=pm_rep.final_loss,
                count_after_pc=pc_rep.final_count,
                pm=pm_rep,
                pc=pc_rep,
            )
        )
        if not pc_rep.converged:
            trace = AlternationTrace(cfg, pc0, records)
            raise AlternationAborted(
                f"constraint drift failed in round {i}: count {pc_rep.final_count} "
                f"(target {cfg.constraint.m}+-{cfg.constraint.delta})",
                trace,
            )
        net_c = new_net_c
        scale = max(1.0, float(np.linalg.norm(net_c.params)))
        if prev_distance is not None and abs(d_i - prev_distance) < cfg.distance_tol * scale:
            break
        prev_distance = d_i
    trace = AlternationTrace(cfg, pc0, records)
    final = net_c if cfg.stop_at == "constraint" else net_m
    return final, trace


def distance_series(trace: AlternationTrace) -> Vector:
    """The recorded round distances, in order."""
    if not trace.records:
        raise ContractViolation("trace has no records")
    return np.array([r.distance for r in trace.records], dtype=np.float64)


def save_trace(trace: AlternationTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        header = {
            "format": TRACE_FORMAT,
            "version": TRACE_VERSION,
            "config": trace.config.to_dict(),
            "initial_pc": trace.initial_pc.to_dict(),
        }
        f.write(json.dumps(header) + "\n")
        for rec in trace.records:
            f.write(json.dumps(rec.to_dict()) + "\n")
        f.write(json.dumps({"final_checkpoint": trace.checkpoint_ref}) + "\n")


def load_trace(path) -> AlternationTrace:
    with open(path, "r", encoding="utf-8") as f:
        lines = [json.loads(line) for line in f if line.strip()]
    if not lines or lines[0].get("format") != TRACE_FORMAT:
        raise ContractViolation(f"{path}: not a trace file")
    if lines[0].get("version") != TRACE_VERSION:
        raise ContractViolation(f"{path}: unsupported trace version {lines[0].get('version')}")
    header = lines[0]
    footer = lines[-1] if len(lines) > 1 and "final_checkpoint" in lines[-1] else {}
    body = lines[1:-1] if footer else lines[1:]
    return AlternationTrace(
        config=AlternationConfig.from_dict(header["config"]),
        initial_pc=PcReport(**header["initial_pc"]),
        records=[AlternationRecord.from_dict(d) for d in body],
        checkpoint_ref=footer.get("final_checkpoint"),
    )
