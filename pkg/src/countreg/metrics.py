"""Fit metrics and run reporting.

RMSE is always reported in the original target units: predictions made
on standardized data are mapped back through the stored affine transform
before comparing against the raw targets.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .constraint import count_above
from .data import DataSet
from .network import Network, forward
from .numeric import ContractViolation, Vector, as_vector


def rmse(preds, targets) -> float:
    p = as_vector(preds)
    t = as_vector(targets)
    if p.shape != t.shape:
        raise ContractViolation(f"shape mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise ContractViolation("rmse of empty arrays")
    return float(np.sqrt(np.mean((p - t) ** 2)))


def rmse_original_units(net: Network, data: DataSet) -> float:
    """RMSE against the raw targets, undoing any target standardization."""
    preds = forward(net, data.inputs)
    return rmse(data.denormalize_preds(preds), data.denormalize_preds(data.targets))


@dataclass
class RunReport:
    """Everything worth keeping from one training run."""

    label: str
    seed: int
    config: dict
    achieved_count: int | None
    target_count: int | None
    count_gap: int | None
    rmse: float
    loss_trajectory: list = field(default_factory=list)
    distance_series: list = field(default_factory=list)
    n: int = 0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "seed": self.seed,
            "config": self.config,
            "achieved_count": self.achieved_count,
            "target_count": self.target_count,
            "count_gap": self.count_gap,
            "rmse": self.rmse,
            "loss_trajectory": self.loss_trajectory,
            "distance_series": self.distance_series,
            "n": self.n,
        }

    @staticmethod
    def from_dict(d: dict) -> "RunReport":
        return RunReport(**d)


def save_report(report: RunReport, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2)
        f.write("\n")


def load_report(path) -> RunReport:
    with open(path, "r", encoding="utf-8") as f:
        return RunReport.from_dict(json.load(f))


def make_report(label, seed, config, net, data, constraint, trace=None) -> RunReport:
    """Assemble a RunReport from a finished network.

    Counts are evaluated on the training inputs; the constraint is None
    for unconstrained baselines.
    """
    achieved = target = gap = None
    if constraint is not None:
        preds = forward(net, data.inputs)
        achieved = count_above(preds, data.targets, constraint.comparator)
        target = constraint.m
        gap = abs(achieved - target)
    losses = []
    distances = []
    if trace is not None:
        losses = [r.loss_after_pm for r in trace.records]
        distances = [r.distance for r in trace.records]
    return RunReport(
        label=label,
        seed=seed,
        config=config,
        achieved_count=achieved,
        target_count=target,
        count_gap=gap,
        rmse=rmse_original_units(net, data),
        loss_trajectory=losses,
        distance_series=distances,
        n=data.n,
    )


def emit_curve(net: Network, data: DataSet, path, grid_size: int = 500) -> None:
    """Write the fitted curve over the observed input range to a CSV.

    Only defined for one-dimensional inputs. The grid is evenly spaced in
    original units; predictions are mapped back to original units too.
    """
    if data.d != 1:
        raise ContractViolation(f"curve export needs 1-d inputs, got d={data.d}")
    if grid_size < 2:
        raise ContractViolation(f"grid_size must be >= 2, got {grid_size}")
    raw_x = data.denormalize_inputs(data.inputs)[:, 0]
    grid = np.linspace(float(raw_x.min()), float(raw_x.max()), grid_size)
    norm_grid = grid[:, None]
    if data.feature_norm is not None:
        norm_grid = data.feature_norm.apply(norm_grid)
    preds = data.denormalize_preds(forward(net, norm_grid))
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow([data.feature_names[0], f"predicted_{data.target_name}"])
        for x, y in zip(grid, preds):
            w.writerow([repr(float(x)), repr(float(y))])


def assemble_table(reports, path=None) -> dict:
    """Aggregate per-label medians across seeds.

    Returns {label: {"rmse_median": ..., "rmse_all": [...], "max_count_gap": ...}}
    sorted by label, and optionally writes a JSON file plus a plain-text
    table next to it.
    """
    if not reports:
        raise ContractViolation("no reports to aggregate")
    by_label = {}
    for rep in reports:
        by_label.setdefault(rep.label, []).append(rep)
    table = {}
    for label in sorted(by_label):
        group = sorted(by_label[label], key=lambda r: r.seed)
        rmses = [r.rmse for r in group]
        gaps = [r.count_gap for r in group if r.count_gap is not None]
        table[label] = {
            "rmse_median": float(np.median(rmses)),
            "rmse_all": rmses,
            "seeds": [r.seed for r in group],
            "max_count_gap": max(gaps) if gaps else None,
        }
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(table, f, indent=2)
            f.write("\n")
        txt_path = str(path)
        txt_path = txt_path[: txt_path.rfind(".")] + ".txt" if "." in txt_path else txt_path + ".txt"
        with open(txt_path, "w", encoding="utf-8") as f:
            f.write(f"{'label':<20} {'median RMSE':>12} {'max |count-m|':>14}  seeds\n")
            for label, row in table.items():
                gap = row["max_count_gap"]
                f.write(
                    f"{label:<20} {row['rmse_median']:>12.4f} "
                    f"{gap if gap is not None else '-':>14}  {row['seeds']}\n"
                )
    return table
