"""Dataset container, CSV ingestion, standardization, synthetic generator.

The bundled motorcycle-impact data (``load_motorcycle``) is the classic
head-acceleration-versus-time series from a simulated motorcycle crash,
published by Silverman (1985, JRSS-B) and shipped with many statistics
packages: 133 rows of time after impact in milliseconds against head
acceleration in g. It is vendored here as a plain CSV so experiments do
not touch the network.
"""

import csv
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .numeric import ContractViolation, Matrix, Vector, as_matrix, as_vector


@dataclass(frozen=True)
class AffineColumns:
    """Per-column affine transform: standardized = (raw - shift) / scale."""

    shift: np.ndarray
    scale: np.ndarray

    def apply(self, a):
        return (a - self.shift) / self.scale

    def invert(self, a):
        return a * self.scale + self.shift


@dataclass
class DataSet:
    inputs: Matrix
    targets: Vector
    feature_names: list | None = None
    target_name: str | None = None
    feature_norm: AffineColumns | None = None
    target_norm: AffineColumns | None = None

    def __post_init__(self):
        self.inputs = as_matrix(self.inputs)
        self.targets = as_vector(self.targets)
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ContractViolation(
                f"{self.inputs.shape[0]} input rows vs {self.targets.shape[0]} targets"
            )
        if self.inputs.shape[0] < 1:
            raise ContractViolation("dataset must have at least one row")

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]

    def denormalize_preds(self, preds: Vector) -> Vector:
        """Map model outputs back to original target units (identity if
        the dataset was never standardized)."""
        if self.target_norm is None:
            return as_vector(preds)
        return self.target_norm.invert(as_vector(preds))

    def denormalize_inputs(self, x: Matrix) -> Matrix:
        if self.feature_norm is None:
            return as_matrix(x)
        return self.feature_norm.invert(as_matrix(x))


def load_csv(path, target_column: str, delimiter: str = ",") -> DataSet:
    """Read a numeric CSV (header required) into a DataSet.

    Every column except ``target_column`` becomes a feature; row order is
    preserved exactly as on disk.
    """
    try:
        f = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        raise ContractViolation(f"dataset file not found: {path}") from None
    with f:
        reader = csv.reader(f, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ContractViolation(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if target_column not in header:
            raise ContractViolation(
                f"{path}: target column {target_column!r} not in header {header}"
            )
        t_idx = header.index(target_column)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue  # skip blank lines
            if len(row) != len(header):
                raise ContractViolation(
                    f"{path}: row {lineno} has {len(row)} cells, header has {len(header)}"
                )
            vals = []
            for col, cell in zip(header, row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ContractViolation(
                        f"{path}: non-numeric cell at row {lineno}, column {col!r}: {cell!r}"
                    ) from None
            rows.append(vals)
    if not rows:
        raise ContractViolation(f"{path}: no data rows")
    arr = np.array(rows, dtype=np.float64)
    targets = arr[:, t_idx]
    inputs = np.delete(arr, t_idx, axis=1)
    names = [h for i, h in enumerate(header) if i != t_idx]
    return DataSet(inputs, targets, feature_names=names, target_name=target_column)


def load_motorcycle() -> DataSet:
    """The bundled 133-row motorcycle-impact dataset (times -> accel)."""
    path = resources.files("countreg").joinpath("assets/motorcycle.csv")
    with resources.as_file(path) as p:
        return load_csv(p, target_column="accel")


def zscore_fit_transform(ds: DataSet) -> DataSet:
    """Standardize features and targets to mean 0, stddev 1.

    Uses the population stddev (1/n). The fitted transforms are stored on
    the returned DataSet so predictions can be mapped back to original
    units. Standardization is affine with positive scale, so above/below
    relations between predictions and targets are unchanged.
    """
    if ds.feature_norm is not None or ds.target_norm is not None:
        raise ContractViolation("dataset is already standardized")
    x_mean = ds.inputs.mean(axis=0)
    x_std = ds.inputs.std(axis=0)
    for j, s in enumerate(x_std):
        if s == 0.0:
            name = ds.feature_names[j] if ds.feature_names else f"#{j}"
            raise ContractViolation(f"feature column {name} has zero variance")
    y_mean = float(ds.targets.mean())
    y_std = float(ds.targets.std())
    if y_std == 0.0:
        raise ContractViolation("target column has zero variance")
    fnorm = AffineColumns(x_mean, x_std)
    tnorm = AffineColumns(np.array([y_mean]), np.array([y_std]))
    return DataSet(
        fnorm.apply(ds.inputs),
        (ds.targets - y_mean) / y_std,
        feature_names=ds.feature_names,
        target_name=ds.target_name,
        feature_norm=fnorm,
        target_norm=tnorm,
    )


def default_noise_profile(x):
    """Input-dependent noise level for the synthetic generator."""
    return 0.1 + 0.3 * x


def gen_heteroscedastic(rng: np.random.Generator, n: int, noise_profile=None) -> DataSet:
    """Synthetic 1-d regression data y = sin(2*pi*x) + sigma(x) * eps.

    ``x`` is uniform on [0, 1); ``noise_profile`` may be a callable
    sigma(x), a constant, or None for the default ramp. Deterministic for
    a given generator state.
    """
    if n < 1:
        raise ContractViolation(f"n must be >= 1, got {n}")
    if noise_profile is None:
        noise_profile = default_noise_profile
    x = rng.uniform(0.0, 1.0, size=n)
    if callable(noise_profile):
        sigma = np.asarray(noise_profile(x), dtype=np.float64) * np.ones_like(x)
    else:
        sigma = float(noise_profile) * np.ones_like(x)
    if np.any(sigma < 0):
        raise ContractViolation("noise profile produced a negative stddev")
    eps = rng.normal(0.0, 1.0, size=n)
    y = np.sin(2.0 * math.pi * x) + sigma * eps
    return DataSet(x[:, None], y, feature_names=["x"], target_name="y")
