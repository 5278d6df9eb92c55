"""Dense float64 array helpers, seeded randomness, parameter flattening.

Conventions used throughout the package:

* ``Matrix`` is a 2-d float64 ndarray (row-major), ``Vector`` a 1-d one.
* A flat parameter vector concatenates, per layer, the weight matrix
  (row-major, shape ``(fan_out, fan_in)``) followed by the bias vector.
* Randomness comes from numpy's PCG64 generator. For a fixed seed and
  numpy version the draw sequence is identical across platforms.
"""

import numpy as np

Matrix = np.ndarray
Vector = np.ndarray
ParamVector = np.ndarray


class ContractViolation(ValueError):
    """An argument broke a documented precondition (shape/length mismatch etc.)."""


def as_matrix(x) -> Matrix:
    """Coerce to a 2-d float64 array, copying only when needed."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ContractViolation(f"expected a 2-d array, got ndim={a.ndim}")
    return a


def as_vector(x) -> Vector:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise ContractViolation(f"expected a 1-d array, got ndim={a.ndim}")
    return a


def matvec(m: Matrix, v: Vector) -> Vector:
    """Matrix-vector product with an explicit dimension check."""
    m = as_matrix(m)
    v = as_vector(v)
    if m.shape[1] != v.shape[0]:
        raise ContractViolation(
            f"matvec dimension mismatch: matrix is {m.shape[0]}x{m.shape[1]}, "
            f"vector has length {v.shape[0]}"
        )
    return m @ v


def l2_distance(a: ParamVector, b: ParamVector) -> float:
    """Euclidean distance between two flat parameter vectors of equal length."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape[0] != b.shape[0]:
        raise ContractViolation(
            f"l2_distance length mismatch: {a.shape[0]} vs {b.shape[0]}"
        )
    return float(np.linalg.norm(a - b))


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; the single source of randomness in the package."""
    return np.random.Generator(np.random.PCG64(seed))


def rng_normal(rng: np.random.Generator, mean: float, stddev: float, n: int) -> Vector:
    """n gaussian draws; stddev may be 0 (constant output)."""
    if stddev < 0:
        raise ContractViolation(f"stddev must be >= 0, got {stddev}")
    return rng.normal(mean, stddev, size=n)


def param_count(layer_dims) -> int:
    """Number of parameters implied by a layer-dimension list (weights + biases)."""
    dims = list(layer_dims)
    return sum(dims[i] * dims[i + 1] + dims[i + 1] for i in range(len(dims) - 1))


def flatten_params(weights, biases) -> ParamVector:
    """Concatenate per-layer (weight matrix, bias vector) pairs into one flat vector."""
    parts = []
    for w, b in zip(weights, biases):
        parts.append(np.asarray(w, dtype=np.float64).ravel())
        parts.append(np.asarray(b, dtype=np.float64).ravel())
    return np.concatenate(parts)


def unflatten_params(theta: ParamVector, layer_dims):
    """Split a flat vector back into per-layer weight matrices and bias vectors.

    Exact inverse of :func:`flatten_params` for the given dimensions.
    """
    theta = as_vector(theta)
    dims = list(layer_dims)
    expected = param_count(dims)
    if theta.shape[0] != expected:
        raise ContractViolation(
            f"parameter vector has length {theta.shape[0]}, "
            f"layer dims {dims} imply {expected}"
        )
    weights, biases = [], []
    idx = 0
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w = theta[idx:idx + fan_out * fan_in].reshape(fan_out, fan_in)
        idx += fan_out * fan_in
        b = theta[idx:idx + fan_out]
        idx += fan_out
        weights.append(w)
        biases.append(b)
    return weights, biases
