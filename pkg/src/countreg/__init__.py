"""Regression networks trained under a hard count constraint.

Fit a small feed-forward network to minimize any regression loss while
forcing an exact number of training predictions to land at or above
their labels, by alternating between loss descent and a count drift.
"""

from .alternation import (
    AlternationAborted,
    AlternationConfig,
    AlternationRecord,
    AlternationTrace,
    distance_series,
    load_trace,
    run_alternation,
    save_trace,
)
from .constraint import (
    COMPARATORS,
    CountConstraint,
    PcConfig,
    PcReport,
    count_above,
    is_feasible,
    project_c,
)
from .data import (
    DataSet,
    gen_heteroscedastic,
    load_csv,
    load_motorcycle,
    zscore_fit_transform,
)
from .experiment import (
    ConfigError,
    DEFAULT_CONFIG,
    apply_overrides,
    load_config,
    resolve_config,
    run_config,
    run_reproduction,
    run_single,
)
from .losses import LOSS_KINDS, LossKind, loss_grad_preds, loss_value, parse_loss
from .metrics import (
    RunReport,
    assemble_table,
    emit_curve,
    load_report,
    make_report,
    rmse,
    rmse_original_units,
    save_report,
)
from .network import (
    ACTIVATIONS,
    Network,
    NetworkSpec,
    canonical_spec,
    forward,
    grad,
    init,
    load_checkpoint,
    save_checkpoint,
)
from .numeric import ContractViolation, l2_distance, make_rng
from .optim import AdamState, PmConfig, PmReport, TrainingDiverged, adam_step, project_m
from .selfcheck import (
    CheckResult,
    alternation_oracle,
    analytic_instance,
    check_alternation_oracle,
    check_gradients,
    check_pinball_identity,
    run_all_checks,
)

__version__ = "0.1.0"

__all__ = [
    "ACTIVATIONS",
    "AdamState",
    "AlternationAborted",
    "AlternationConfig",
    "AlternationRecord",
    "AlternationTrace",
    "COMPARATORS",
    "CheckResult",
    "ConfigError",
    "ContractViolation",
    "CountConstraint",
    "DEFAULT_CONFIG",
    "DataSet",
    "LOSS_KINDS",
    "LossKind",
    "Network",
    "NetworkSpec",
    "PcConfig",
    "PcReport",
    "PmConfig",
    "PmReport",
    "RunReport",
    "TrainingDiverged",
    "adam_step",
    "alternation_oracle",
    "analytic_instance",
    "apply_overrides",
    "assemble_table",
    "canonical_spec",
    "check_alternation_oracle",
    "check_gradients",
    "check_pinball_identity",
    "count_above",
    "distance_series",
    "emit_curve",
    "forward",
    "gen_heteroscedastic",
    "grad",
    "init",
    "is_feasible",
    "l2_distance",
    "load_checkpoint",
    "load_config",
    "load_csv",
    "load_motorcycle",
    "load_report",
    "load_trace",
    "loss_grad_preds",
    "loss_value",
    "make_report",
    "make_rng",
    "parse_loss",
    "project_c",
    "project_m",
    "resolve_config",
    "rmse",
    "rmse_original_units",
    "run_all_checks",
    "run_alternation",
    "run_config",
    "run_reproduction",
    "run_single",
    "save_checkpoint",
    "save_report",
    "save_trace",
    "zscore_fit_transform",
]
