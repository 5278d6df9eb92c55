"""Adam optimizer and the descend-to-stagnation operator.

``project_m`` stands in for "move to the nearest local minimum": full-batch
descent on the chosen loss until the relative per-epoch improvement stays
below a tolerance for ``patience`` consecutive epochs (or the epoch budget
runs out). The exact nearest minimum is not computable for a non-convex
network; a stagnation rule on a small-step optimizer is the practical
surrogate, and every knob is exposed in :class:`PmConfig`.
"""

from dataclasses import dataclass, field

import numpy as np

from .losses import LossKind, loss_grad_preds, loss_value
from .network import Network, _forward_cached, grad
from .numeric import ContractViolation, ParamVector, as_vector

OPTIMIZERS = ("adam", "sgd")


class TrainingDiverged(RuntimeError):
    """Loss became non-finite during descent."""


@dataclass
class AdamState:
    """Standard Adam with bias-corrected moments."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray | None = None
    v: np.ndarray | None = None
    t: int = 0

    def __post_init__(self):
        if self.lr <= 0:
            raise ContractViolation(f"lr must be positive, got {self.lr}")
        for name, b in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not (0.0 < b < 1.0):
                raise ContractViolation(f"{name} must be in (0, 1), got {b}")
        if self.eps <= 0:
            raise ContractViolation(f"eps must be positive, got {self.eps}")


def adam_step(state: AdamState, params: ParamVector, g: ParamVector) -> ParamVector:
    """One Adam update; advances the state's moments and step counter."""
    params = as_vector(params)
    g = as_vector(g)
    if params.shape != g.shape:
        raise ContractViolation(
            f"params length {params.shape[0]} vs gradient length {g.shape[0]}"
        )
    if state.m is None:
        state.m = np.zeros_like(params)
        state.v = np.zeros_like(params)
    if state.m.shape != params.shape:
        raise ContractViolation("Adam state sized for a different parameter vector")
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * g
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    v_hat = state.v / (1.0 - state.beta2 ** state.t)
    return params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


@dataclass
class PmConfig:
    lr: float = 1e-3
    max_epochs: int = 20000
    rel_improve_tol: float = 1e-6
    patience: int = 50
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr <= 0:
            raise ContractViolation(f"lr must be positive, got {self.lr}")
        if self.max_epochs < 0:
            raise ContractViolation(f"max_epochs must be >= 0, got {self.max_epochs}")
        if self.rel_improve_tol < 0:
            raise ContractViolation(f"rel_improve_tol must be >= 0, got {self.rel_improve_tol}")
        if self.patience < 1:
            raise ContractViolation(f"patience must be >= 1, got {self.patience}")
        if self.optimizer not in OPTIMIZERS:
            raise ContractViolation(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")


@dataclass
class PmReport:
    epochs: int
    entry_loss: float
    final_loss: float
    stopped_by: str  # "stagnation" | "max_epochs"
    loss_increased: bool = False

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "entry_loss": self.entry_loss,
            "final_loss": self.final_loss,
            "stopped_by": self.stopped_by,
            "loss_increased": self.loss_increased,
        }


def _loss_of(kind, net, x, y):
    yhat, _, _, _ = _forward_cached(net, x)
    return yhat, loss_value(kind, yhat, y)


def project_m(net: Network, data, kind: LossKind, cfg: PmConfig) -> tuple[Network, PmReport]:
    """Full-batch descent on the loss until stagnation or the epoch budget.

    Returns the trained network and a report. ``max_epochs=0`` is the
    identity on the parameters. Raises :class:`TrainingDiverged` if the
    loss goes non-finite, naming the epoch.
    """
    x, y = data.inputs, data.targets
    current = net
    yhat, cur_loss = _loss_of(kind, current, x, y)
    entry_loss = cur_loss
    adam = AdamState(lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    stagnant = 0
    epochs = 0
    stopped_by = "max_epochs"
    for epoch in range(1, cfg.max_epochs + 1):
        upstream = loss_grad_preds(kind, yhat, y)
        g = grad(current, x, upstream)
        if cfg.optimizer == "adam":
            new_params = adam_step(adam, current.params, g)
        else:
            new_params = current.params - cfg.lr * g
        current = current.with_params(new_params)
        yhat, new_loss = _loss_of(kind, current, x, y)
        if not np.isfinite(new_loss):
            raise TrainingDiverged(f"non-finite loss {new_loss} at epoch {epoch}")
        rel_improve = (cur_loss - new_loss) / max(abs(cur_loss), 1e-300)
        stagnant = stagnant + 1 if rel_improve < cfg.rel_improve_tol else 0
        cur_loss = new_loss
        epochs = epoch
        if stagnant >= cfg.patience:
            stopped_by = "stagnation"
            break
    report = PmReport(
        epochs=epochs,
        entry_loss=entry_loss,
        final_loss=cur_loss,
        stopped_by=stopped_by if cfg.max_epochs > 0 else "max_epochs",
        loss_increased=bool(cur_loss > entry_loss + 1e-9),
    )
    return current, report
