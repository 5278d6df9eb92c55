"""Count constraint: the feasibility predicate and the drift operator.

A network is feasible when ``|count_above(yhat, y) - m| <= delta``. The
count function has zero gradient almost everywhere, so ``project_c``
reaches the feasible set indirectly: it nudges the *mean prediction* in
the right direction until the count lands inside the tolerance band.

Drift direction: when the count is too high the mean prediction is pushed
*down* (descending L = mean(yhat)), and pushed up when too low. With the
default Adam steps an overshoot makes the sign flip, the momentum terms
cancel, and the effective step shrinks, which is what lets the count
settle inside a tight band instead of oscillating forever.
"""

from dataclasses import dataclass

import numpy as np

from .network import Network, _forward_cached, forward, grad
from .numeric import ContractViolation, Vector, as_vector
from .optim import OPTIMIZERS, AdamState, adam_step

COMPARATORS = ("above_or_equal", "strictly_above")


@dataclass(frozen=True)
class CountConstraint:
    """Target count m with tolerance delta; comparator picks >= or > semantics."""

    m: int
    delta: int = 1
    comparator: str = "above_or_equal"

    def __post_init__(self):
        if self.m < 0:
            raise ContractViolation(f"m must be >= 0, got {self.m}")
        if self.delta < 0:
            raise ContractViolation(f"delta must be >= 0, got {self.delta}")
        if self.comparator not in COMPARATORS:
            raise ContractViolation(
                f"comparator must be one of {COMPARATORS}, got {self.comparator!r}"
            )

    def check_against(self, n: int) -> None:
        """n-dependent validity: m within range, tolerance non-vacuous."""
        if self.m > n:
            raise ContractViolation(f"m={self.m} exceeds dataset size n={n}")
        if self.delta >= n:
            raise ContractViolation(
                f"delta={self.delta} with n={n} makes the constraint vacuous"
            )


@dataclass
class PcConfig:
    mu: float = 1e-2
    max_iter: int = 5000
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.mu <= 0:
            raise ContractViolation(f"mu must be positive, got {self.mu}")
        if self.max_iter < 1:
            raise ContractViolation(f"max_iter must be >= 1, got {self.max_iter}")
        if self.optimizer not in OPTIMIZERS:
            raise ContractViolation(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")


@dataclass
class PcReport:
    iterations: int
    final_count: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_count": self.final_count,
            "converged": self.converged,
        }


def count_above(preds: Vector, targets: Vector, comparator: str = "above_or_equal") -> int:
    """Number of predictions at-or-above (or strictly above) their targets."""
    preds = as_vector(preds)
    targets = as_vector(targets)
    if preds.shape[0] != targets.shape[0]:
        raise ContractViolation(
            f"preds length {preds.shape[0]} vs targets length {targets.shape[0]}"
        )
    if comparator not in COMPARATORS:
        raise ContractViolation(f"unknown comparator {comparator!r}")
    if comparator == "above_or_equal":
        return int(np.count_nonzero(preds >= targets))
    return int(np.count_nonzero(preds > targets))


def is_feasible(net: Network, data, c: CountConstraint) -> bool:
    c.check_against(data.n)
    count = count_above(forward(net, data.inputs), data.targets, c.comparator)
    return abs(count - c.m) <= c.delta


def project_c(
    net: Network, data, c: CountConstraint, cfg: PcConfig
) -> tuple[Network, PcReport]:
    """Drift the network into the count-feasible set.

    Iterates: recompute the count; if off target, take one optimizer step
    on +/- mean(yhat); stop when within tolerance or the iteration budget
    is exhausted. Non-convergence is reported (``converged=False``), not
    raised; the caller decides what to do with it.
    """
    x, y = data.inputs, data.targets
    n = data.n
    c.check_against(n)
    current = net
    yhat, _, _, _ = _forward_cached(current, x)
    mhat = count_above(yhat, y, c.comparator)
    adam = AdamState(lr=cfg.mu, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    i = 0
    while abs(mhat - c.m) > c.delta and i < cfg.max_iter:
        sign = 1.0 if mhat > c.m else -1.0  # too many above -> push mean down
        upstream = np.full(n, sign / n)
        g = grad(current, x, upstream)
        if cfg.optimizer == "adam":
            new_params = adam_step(adam, current.params, g)
        else:
            new_params = current.params - cfg.mu * g
        current = current.with_params(new_params)
        yhat, _, _, _ = _forward_cached(current, x)
        mhat = count_above(yhat, y, c.comparator)
        i += 1
    report = PcReport(iterations=i, final_count=mhat, converged=abs(mhat - c.m) <= c.delta)
    return current, report
