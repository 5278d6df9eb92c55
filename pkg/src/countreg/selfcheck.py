"""Built-in correctness checks.

Three independent oracles, runnable at any time from the CLI:

gradient-check
    Backpropagated gradients against central finite differences on
    randomized architectures. A coordinate passes when the difference
    is within max(abs_tol, rel_tol * |analytic|); the absolute floor is
    what a central difference at step h can actually certify for
    near-zero coordinates. Cases where a rectifier pre-activation sits
    within the probe step of its kink are redrawn, since a two-sided
    difference across a kink measures nothing.

pinball-identity
    The half-quantile loss must equal half the absolute loss.

alternation-oracle
    A one-parameter instance whose whole trajectory is computable by
    hand: a bias-only network on constant inputs with labels 1..10.
    Descent sees a pure quadratic (minimizer at the label mean) and the
    count drift walks a scalar in exact steps of mu toward the
    order-statistic interval, so every iterate, count, and distance has
    a closed form. The recorded distance series must match it and be
    non-increasing.
"""

from dataclasses import dataclass, field

import numpy as np

from .alternation import AlternationConfig, run_alternation
from .constraint import CountConstraint, PcConfig, count_above
from .data import DataSet
from .losses import LossKind, loss_value
from .network import ACTIVATIONS, Network, NetworkSpec, _forward_cached, forward, grad, init
from .numeric import ContractViolation, make_rng
from .optim import PmConfig


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extras = " ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"[{status}] {self.name}  {extras}".rstrip()


def _draw_case(rng, kink_guard, max_tries=50):
    for _ in range(max_tries):
        n_hidden = int(rng.integers(1, 4))
        widths = [int(w) for w in rng.integers(1, 51, size=n_hidden)]
        d = int(rng.integers(1, 6))
        acts = tuple(str(a) for a in rng.choice(ACTIVATIONS, size=n_hidden + 1))
        net = init(NetworkSpec((d, *widths, 1), acts), rng)
        b = int(rng.integers(1, 9))
        x = rng.uniform(0.3, 1.7, (b, d)) * np.where(rng.random((b, d)) < 0.5, -1.0, 1.0)
        u = rng.uniform(0.3, 1.7, b) * np.where(rng.random(b) < 0.5, -1.0, 1.0)
        _, pre, _, _ = _forward_cached(net, x)
        near_kink = any(
            float(np.abs(pre[l]).min()) < kink_guard
            for l in range(len(acts))
            if acts[l] == "relu" and pre[l].size
        )
        if not near_kink:
            return net, x, u
    raise ContractViolation("could not draw a kink-free case")


def check_gradients(cases=100, seed=0, h=1e-5, rel_tol=1e-5, abs_tol=1e-8,
                    grad_fn=None) -> CheckResult:
    """Compare grad() against central differences of the probe u . f(x)."""
    gfn = grad if grad_fn is None else grad_fn
    rng = make_rng(seed)
    worst_ratio = 0.0
    for _ in range(cases):
        net, x, u = _draw_case(rng, kink_guard=10 * h)
        analytic = gfn(net, x, u)
        base = net.params
        fd = np.empty_like(base)
        for j in range(base.size):
            p = base.copy()
            p[j] = base[j] + h
            s_plus = float(np.dot(u, forward(net.with_params(p), x)))
            p[j] = base[j] - h
            s_minus = float(np.dot(u, forward(net.with_params(p), x)))
            fd[j] = (s_plus - s_minus) / (2.0 * h)
        allowance = np.maximum(abs_tol, rel_tol * np.abs(analytic))
        worst_ratio = max(worst_ratio, float((np.abs(analytic - fd) / allowance).max()))
    return CheckResult(
        "gradient-check",
        worst_ratio <= 1.0,
        {"cases": cases, "worst_error_over_allowance": round(worst_ratio, 6)},
    )


def check_pinball_identity(pairs=1000, seed=0, rel_tol=1e-12, loss_fn=None) -> CheckResult:
    """pinball(tau=0.5) must equal 0.5 * absolute loss on every pair."""
    lfn = loss_value if loss_fn is None else loss_fn
    rng = make_rng(seed)
    half = LossKind("pinball", tau=0.5)
    mae = LossKind("mae")
    worst = 0.0
    for _ in range(pairs):
        k = int(rng.integers(1, 21))
        preds = 10.0 * rng.standard_normal(k)
        targets = 10.0 * rng.standard_normal(k)
        a = lfn(half, preds, targets)
        b = 0.5 * lfn(mae, preds, targets)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return CheckResult(
        "pinball-identity",
        worst <= rel_tol,
        {"pairs": pairs, "max_rel_gap": float(worst)},
    )


def analytic_instance():
    """The hand-checkable alternation problem: bias-only net, labels 1..10.

    All parameters start at zero and the inputs are all zero, so every
    gradient except the output bias vanishes identically; the model is a
    single scalar predicting a constant. Both operators run plain
    gradient steps so the trajectory is exactly reproducible.
    """
    spec = NetworkSpec((1, 1, 1), ("identity", "identity"))
    net = Network(spec, np.zeros(spec.n_params))
    data = DataSet(
        np.zeros((10, 1)),
        np.arange(1.0, 11.0),
        feature_names=["x"],
        target_name="y",
    )
    cfg = AlternationConfig(
        constraint=CountConstraint(m=3, delta=0, comparator="above_or_equal"),
        loss=LossKind("mse"),
        pm=PmConfig(lr=0.04, max_epochs=500, rel_improve_tol=1e-12, patience=25,
                    optimizer="sgd"),
        pc=PcConfig(mu=0.45, max_iter=1000, optimizer="sgd"),
        max_alternations=4,
        distance_tol=1e-4,
        stop_at="constraint",
    )
    return net, data, cfg


def alternation_oracle(labels, m, delta, mu, theta0, rounds):
    """Closed-form trajectory for a scalar constant predictor.

    Descent lands on the label mean (the quadratic's minimizer); the
    drift takes k equal steps of mu, with k determined by which side of
    the order-statistic interval [y_(m-delta), y_(m+delta+1)) the scalar
    starts on. Pure arithmetic over the sorted labels; shares no code
    with the training path.
    """
    y = np.sort(np.asarray(labels, dtype=np.float64))
    n = y.size
    if not (0 < m <= n and 0 <= delta and m + delta < n):
        raise ContractViolation("oracle needs 0 < m <= n and m + delta < n")
    theta_m = float(np.mean(y))
    loss_min = float(np.sum((theta_m - y) ** 2))

    def count(t):
        return int(np.count_nonzero(y <= t))

    def drift(t):
        c = count(t)
        if abs(c - m) <= delta:
            return t, 0
        if c < m:
            edge = float(y[m - delta - 1])
            k = int(np.ceil((edge - t) / mu))
            landing = t + k * mu
        else:
            edge = float(y[m + delta])
            k = int(np.floor((t - edge) / mu)) + 1
            landing = t - k * mu
        if abs(count(landing) - m) > delta:
            raise ContractViolation("drift step mu overshoots the feasible interval")
        return landing, k

    theta_c, k0 = drift(float(theta0))
    records = []
    for _ in range(rounds):
        d = abs(theta_c - theta_m)
        theta_c, k = drift(theta_m)
        records.append(
            {
                "distance": d,
                "loss_after_pm": loss_min,
                "theta_c": theta_c,
                "pc_iterations": k,
                "count": count(theta_c),
            }
        )
    return {"initial_iterations": k0, "theta_m": theta_m, "records": records}


def check_alternation_oracle(tol=1e-6, expected_rounds=3, run_fn=None) -> CheckResult:
    """Run the analytic instance and compare every iterate to the oracle."""
    run = run_alternation if run_fn is None else run_fn
    net0, data, cfg = analytic_instance()
    final_net, trace = run(net0, data, cfg)
    oracle = alternation_oracle(
        data.targets, cfg.constraint.m, cfg.constraint.delta, cfg.pc.mu,
        theta0=0.0, rounds=len(trace.records),
    )
    problems = []
    max_gap = 0.0

    def close(label, got, want):
        nonlocal max_gap
        gap = abs(got - want)
        max_gap = max(max_gap, gap)
        if gap > tol:
            problems.append(f"{label}: got {got!r}, oracle {want!r}")

    if len(trace.records) != expected_rounds:
        problems.append(f"rounds: got {len(trace.records)}, oracle {expected_rounds}")
    if trace.initial_pc.iterations != oracle["initial_iterations"]:
        problems.append(
            f"initial drift iterations: got {trace.initial_pc.iterations}, "
            f"oracle {oracle['initial_iterations']}"
        )
    for rec, want in zip(trace.records, oracle["records"]):
        close(f"round {rec.iteration} distance", rec.distance, want["distance"])
        close(f"round {rec.iteration} loss", rec.loss_after_pm, want["loss_after_pm"])
        if rec.count_after_pc != want["count"]:
            problems.append(
                f"round {rec.iteration} count: got {rec.count_after_pc}, "
                f"oracle {want['count']}"
            )
        if rec.pc.iterations != want["pc_iterations"]:
            problems.append(
                f"round {rec.iteration} drift iterations: got {rec.pc.iterations}, "
                f"oracle {want['pc_iterations']}"
            )
    if oracle["records"]:
        close("final scalar", float(final_net.params[-1]), oracle["records"][-1]["theta_c"])
    ds = [r.distance for r in trace.records]
    monotone = all(b <= a for a, b in zip(ds, ds[1:]))
    if not monotone:
        problems.append(f"distance series increased: {ds}")
    preds = forward(final_net, data.inputs)
    final_count = count_above(preds, data.targets, cfg.constraint.comparator)
    if abs(final_count - cfg.constraint.m) > cfg.constraint.delta:
        problems.append(f"final network infeasible: count {final_count}")
    detail = {"rounds": len(trace.records), "max_iterate_gap": float(max_gap),
              "monotone": monotone}
    if problems:
        detail["problems"] = problems
    return CheckResult("alternation-oracle", not problems, detail)


def run_all_checks() -> list:
    return [check_gradients(), check_pinball_identity(), check_alternation_oracle()]
