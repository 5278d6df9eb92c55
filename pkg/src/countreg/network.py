"""Feed-forward scalar-regression network with hand-rolled backprop.

The model is a plain MLP: ``x -> hidden layers -> single linear output``.
Parameters live in one flat float64 vector (see :mod:`countreg.numeric`
for the layout), which is what the projection operators move around.
"""

import json
from dataclasses import dataclass

import numpy as np

from .numeric import (
    ContractViolation,
    Matrix,
    ParamVector,
    Vector,
    as_matrix,
    as_vector,
    flatten_params,
    param_count,
    unflatten_params,
)

ACTIVATIONS = ("tanh", "relu", "identity")

CHECKPOINT_FORMAT = "countreg-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class NetworkSpec:
    """Layer dimensions (input, hidden..., output) and one activation per layer."""

    layer_dims: tuple
    activations: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        acts = tuple(str(a) for a in self.activations)
        object.__setattr__(self, "layer_dims", dims)
        object.__setattr__(self, "activations", acts)
        if len(dims) < 3:
            raise ContractViolation(
                f"need at least one hidden layer, got layer_dims={dims}"
            )
        if any(d < 1 for d in dims):
            raise ContractViolation(f"layer dims must be positive, got {dims}")
        if dims[-1] != 1:
            raise ContractViolation(
                f"output dimension must be 1 (scalar regression), got {dims[-1]}"
            )
        if len(acts) != len(dims) - 1:
            raise ContractViolation(
                f"need {len(dims) - 1} activation tags for {len(dims)} layer dims, "
                f"got {len(acts)}"
            )
        for a in acts:
            if a not in ACTIVATIONS:
                raise ContractViolation(f"unknown activation {a!r}, want one of {ACTIVATIONS}")

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def n_params(self) -> int:
        return param_count(self.layer_dims)


def canonical_spec(input_dim: int = 1) -> NetworkSpec:
    """The reference architecture: input -> 50 tanh -> 10 relu -> 1 linear."""
    return NetworkSpec((input_dim, 50, 10, 1), ("tanh", "relu", "identity"))


@dataclass
class Network:
    spec: NetworkSpec
    params: ParamVector

    def __post_init__(self):
        self.params = as_vector(self.params)
        if self.params.shape[0] != self.spec.n_params:
            raise ContractViolation(
                f"params length {self.params.shape[0]} does not match spec "
                f"({self.spec.n_params} params for dims {self.spec.layer_dims})"
            )

    def with_params(self, params: ParamVector) -> "Network":
        return Network(self.spec, params)


def init(spec: NetworkSpec, rng: np.random.Generator) -> Network:
    """Glorot-style init: W ~ N(0, 2/(fan_in+fan_out)), biases zero."""
    weights, biases = [], []
    dims = spec.layer_dims
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        std = np.sqrt(2.0 / (fan_in + fan_out))
        weights.append(rng.normal(0.0, std, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(spec, flatten_params(weights, biases))


def _apply_act(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "tanh":
        return np.tanh(z)
    if tag == "relu":
        return np.maximum(z, 0.0)
    return z


def _act_deriv(tag: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if tag == "tanh":
        return 1.0 - a * a
    if tag == "relu":
        # subgradient at 0 taken as 0
        return (z > 0.0).astype(np.float64)
    return np.ones_like(z)


def _forward_cached(net: Network, x_batch: Matrix):
    """Forward pass keeping pre- and post-activation values for backprop."""
    x = as_matrix(x_batch)
    if x.shape[1] != net.spec.input_dim:
        raise ContractViolation(
            f"input has {x.shape[1]} columns, network expects {net.spec.input_dim}"
        )
    weights, biases = unflatten_params(net.params, net.spec.layer_dims)
    pre, post = [], [x]
    a = x
    for w, b, tag in zip(weights, biases, net.spec.activations):
        z = a @ w.T + b
        a = _apply_act(tag, z)
        pre.append(z)
        post.append(a)
    return post[-1][:, 0], pre, post, weights


def forward(net: Network, x_batch: Matrix) -> Vector:
    """Predictions for a batch, one scalar per input row."""
    yhat, _, _, _ = _forward_cached(net, x_batch)
    return yhat


def grad(net: Network, x_batch: Matrix, upstream: Vector) -> ParamVector:
    """Gradient of sum_i upstream_i * yhat_i with respect to the flat params."""
    upstream = as_vector(upstream)
    yhat, pre, post, weights = _forward_cached(net, x_batch)
    if upstream.shape[0] != yhat.shape[0]:
        raise ContractViolation(
            f"upstream has length {upstream.shape[0]}, batch has {yhat.shape[0]} rows"
        )
    n_layers = len(weights)
    grads_w = [None] * n_layers
    grads_b = [None] * n_layers
    g = upstream[:, None]  # dL/d(post-activation of output layer)
    for l in range(n_layers - 1, -1, -1):
        dz = g * _act_deriv(net.spec.activations[l], pre[l], post[l + 1])
        grads_w[l] = dz.T @ post[l]
        grads_b[l] = dz.sum(axis=0)
        if l > 0:
            g = dz @ weights[l]
    return flatten_params(grads_w, grads_b)


def save_checkpoint(net: Network, path) -> None:
    """Write spec + params as versioned JSON; floats keep full precision."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_dims": list(net.spec.layer_dims),
        "activations": list(net.spec.activations),
        "params": [float(v) for v in net.params],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
        f.write("\n")


def load_checkpoint(path) -> Network:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ContractViolation(f"{path}: not a checkpoint file")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ContractViolation(f"{path}: unsupported checkpoint version {doc.get('version')}")
    spec = NetworkSpec(tuple(doc["layer_dims"]), tuple(doc["activations"]))
    return Network(spec, np.array(doc["params"], dtype=np.float64))
