"""Regression objectives and their gradients with respect to predictions.

All losses are *sums* over the batch, not means; the optimizer learning
rate absorbs the scale. Reporting metrics (see :mod:`countreg.metrics`)
use the 1/n convention instead.

The pinball loss for quantile level tau:

    L = (tau - 1) * sum_{y < yhat} (y - yhat) + tau * sum_{y >= yhat} (y - yhat)

Ties (y == yhat) sit on the ``y >= yhat`` branch, for the loss and for the
subgradient. At tau = 0.5 the pinball loss equals exactly half the l1 loss.
"""

from dataclasses import dataclass

import numpy as np

from .numeric import ContractViolation, Vector, as_vector

LOSS_KINDS = ("mse", "mae", "pinball")


@dataclass(frozen=True)
class LossKind:
    kind: str
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ContractViolation(f"unknown loss {self.kind!r}, want one of {LOSS_KINDS}")
        if self.kind == "pinball":
            if self.tau is None or not (0.0 < self.tau < 1.0):
                raise ContractViolation(f"pinball needs tau in (0, 1), got {self.tau}")
        elif self.tau is not None:
            raise ContractViolation(f"{self.kind} takes no tau")

    def label(self) -> str:
        """Config-file spelling: 'mse', 'mae' or 'pinball:<tau>'."""
        if self.kind == "pinball":
            return f"pinball:{self.tau:g}"
        return self.kind


def parse_loss(text: str) -> LossKind:
    """Inverse of :meth:`LossKind.label`."""
    text = text.strip().lower()
    if text in ("mse", "mae"):
        return LossKind(text)
    if text.startswith("pinball:"):
        try:
            tau = float(text.split(":", 1)[1])
        except ValueError:
            raise ContractViolation(f"bad pinball tau in {text!r}") from None
        return LossKind("pinball", tau)
    raise ContractViolation(f"cannot parse loss {text!r} (want mse, mae or pinball:<tau>)")


def _check_pair(preds, targets):
    preds = as_vector(preds)
    targets = as_vector(targets)
    if preds.shape[0] != targets.shape[0]:
        raise ContractViolation(
            f"preds length {preds.shape[0]} vs targets length {targets.shape[0]}"
        )
    if preds.shape[0] == 0:
        raise ContractViolation("empty prediction/target vectors")
    return preds, targets


def loss_value(kind: LossKind, preds: Vector, targets: Vector) -> float:
    preds, targets = _check_pair(preds, targets)
    if kind.kind == "mse":
        d = preds - targets
        return float(np.sum(d * d))
    if kind.kind == "mae":
        return float(np.sum(np.abs(targets - preds)))
    resid = targets - preds
    below = resid < 0.0  # y < yhat
    per_point = np.where(below, (kind.tau - 1.0) * resid, kind.tau * resid)
    return float(np.sum(per_point))


def loss_grad_preds(kind: LossKind, preds: Vector, targets: Vector) -> Vector:
    """d(loss)/d(preds_i), elementwise; kinks take the y >= yhat branch."""
    preds, targets = _check_pair(preds, targets)
    if kind.kind == "mse":
        return 2.0 * (preds - targets)
    resid = targets - preds
    below = resid < 0.0
    if kind.kind == "mae":
        return np.where(below, 1.0, -1.0)
    return np.where(below, 1.0 - kind.tau, -kind.tau)
