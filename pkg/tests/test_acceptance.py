"""End-to-end acceptance runs.

Each test asserts one headline property of the package at its stated
tolerance and runtime budget; run with ``pytest -v tests/test_acceptance.py``
to get one pass/fail line per criterion. Criteria 4, 5 and 6 share one
module-scoped batch of motorcycle runs (5 configs x 5 seeds).
"""

import time

import numpy as np
import pytest

from countreg.experiment import (
    reproduction_configs,
    resolve_config,
    run_label,
    run_single,
)
from countreg.selfcheck import (
    check_alternation_oracle,
    check_gradients,
    check_pinball_identity,
)

SEEDS = (0, 1, 2, 3, 4)
DELTA = 1
PERCENTILE_LABELS = ("p10", "p25", "p75", "p90")


@pytest.fixture(scope="module")
def reproduction(tmp_path_factory):
    """The full motorcycle grid: unconstrained + four percentiles, 5 seeds."""
    out_root = tmp_path_factory.mktemp("repro")
    rows = []
    t_start = time.perf_counter()
    for cfg in reproduction_configs(seeds=SEEDS, delta=DELTA):
        label = run_label(cfg)
        for seed in cfg["seeds"]:
            t0 = time.perf_counter()
            report = run_single(cfg, seed, out_dir=str(out_root / label / f"seed{seed}"))
            rows.append(
                {
                    "label": label,
                    "seed": seed,
                    "report": report,
                    "seconds": time.perf_counter() - t0,
                }
            )
    total = time.perf_counter() - t_start
    medians = {}
    for label in ("unconstrained", *PERCENTILE_LABELS):
        medians[label] = float(
            np.median([r["report"].rmse for r in rows if r["label"] == label])
        )
    return {"rows": rows, "medians": medians, "total_seconds": total}


def test_criterion_1_gradient_check():
    t0 = time.perf_counter()
    result = check_gradients(cases=100)
    elapsed = time.perf_counter() - t0
    assert result.passed, result.line()
    assert result.detail["cases"] == 100
    assert elapsed < 30.0, f"gradient check took {elapsed:.1f}s"


def test_criterion_2_pinball_identity():
    t0 = time.perf_counter()
    result = check_pinball_identity(pairs=1000, rel_tol=1e-12)
    elapsed = time.perf_counter() - t0
    assert result.passed, result.line()
    assert elapsed < 1.0, f"pinball identity took {elapsed:.2f}s"


def test_criterion_3_analytic_alternation_oracle():
    t0 = time.perf_counter()
    result = check_alternation_oracle(tol=1e-6)
    elapsed = time.perf_counter() - t0
    assert result.passed, result.line()
    assert result.detail["monotone"]
    assert result.detail["max_iterate_gap"] <= 1e-6
    assert elapsed < 1.0, f"alternation oracle took {elapsed:.2f}s"


def test_criterion_4_constraint_satisfaction(reproduction):
    constrained = [r for r in reproduction["rows"] if r["label"] != "unconstrained"]
    assert len(constrained) == 20
    for row in constrained:
        rep = row["report"]
        assert rep.count_gap is not None
        assert rep.count_gap <= DELTA, (
            f"{row['label']} seed {row['seed']}: count {rep.achieved_count} "
            f"vs target {rep.target_count}"
        )
        assert row["seconds"] < 120.0, (
            f"{row['label']} seed {row['seed']} took {row['seconds']:.0f}s"
        )


def test_criterion_5_motorcycle_rmse_medians(reproduction):
    med = reproduction["medians"]
    anchor = 22.9
    assert 0.8 * anchor <= med["unconstrained"] <= 1.2 * anchor, med
    for label in PERCENTILE_LABELS:
        assert med["unconstrained"] <= med[label], med
    assert max(med["p25"], med["p75"]) <= min(med["p10"], med["p90"]), med
    assert reproduction["total_seconds"] < 1800.0, reproduction["total_seconds"]


def test_criterion_6_distance_trend_endpoint(reproduction):
    for label in PERCENTILE_LABELS:
        ratios = []
        for row in reproduction["rows"]:
            if row["label"] != label:
                continue
            series = row["report"].distance_series
            assert len(series) >= 2 and series[0] > 0
            ratios.append(series[-1] / series[0])
        assert float(np.median(ratios)) <= 1.0, (label, ratios)


def test_criterion_7_bit_determinism(tmp_path):
    cfg = resolve_config(
        {
            "dataset": {"kind": "motorcycle"},
            "constraint": {"percentile": 25, "delta": 1},
            "pm": {"max_epochs": 100},
            "alternation": {"max_alternations": 30},
        }
    )
    t0 = time.perf_counter()
    run_single(cfg, seed=0, out_dir=tmp_path / "a")
    run_single(cfg, seed=0, out_dir=tmp_path / "b")
    elapsed = time.perf_counter() - t0
    for name in ("report.json", "checkpoint.json", "trace.jsonl", "curve.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        b = (tmp_path / "b" / name).read_bytes()
        assert a == b, f"{name} differs between identical runs"
    assert elapsed < 300.0, f"determinism check took {elapsed:.0f}s"


def test_criterion_8_synthetic_coverage():
    cfg = resolve_config(
        {
            "dataset": {"kind": "synthetic", "n": 10000},
            "constraint": {"m": 5000, "delta": 150},
            "pm": {"max_epochs": 300, "patience": 20},
            "pc": {"mu": 5e-4, "max_iter": 4000},
            "alternation": {"max_alternations": 2, "distance_tol": 0.0},
            "emit": {"curve": False, "trace": False, "checkpoint": False},
        }
    )
    t0 = time.perf_counter()
    report = run_single(cfg, seed=0)
    elapsed = time.perf_counter() - t0
    fraction = report.achieved_count / report.n
    assert 0.48 <= fraction <= 0.52, f"fraction above = {fraction:.4f}"
    assert elapsed < 300.0, f"synthetic coverage took {elapsed:.0f}s"
