import numpy as np
import pytest

from countreg.data import (
    DataSet,
    default_noise_profile,
    gen_heteroscedastic,
    load_csv,
    load_motorcycle,
    zscore_fit_transform,
)
from countreg.numeric import ContractViolation, make_rng


def test_dataset_shape_validation():
    with pytest.raises(ContractViolation):
        DataSet(np.zeros((3, 1)), np.zeros(2))
    with pytest.raises(ContractViolation):
        DataSet(np.zeros((0, 1)), np.zeros(0))
    ds = DataSet(np.zeros((3, 2)), np.zeros(3))
    assert ds.n == 3 and ds.d == 2


def test_load_csv_hand_file(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text("a,b,y\n1,10,100\n2,20,200\n3,30,300\n")
    ds = load_csv(path, target_column="y")
    assert ds.n == 3 and ds.d == 2
    assert ds.feature_names == ["a", "b"]
    assert ds.target_name == "y"
    assert np.array_equal(ds.inputs, [[1, 10], [2, 20], [3, 30]])
    assert np.array_equal(ds.targets, [100, 200, 300])


def test_load_csv_preserves_row_order(tmp_path):
    path = tmp_path / "ordered.csv"
    lines = ["x,y"] + [f"{i},{100 - i}" for i in (5, 1, 4, 2, 3)]
    path.write_text("\n".join(lines) + "\n")
    ds = load_csv(path, target_column="y")
    assert np.array_equal(ds.inputs[:, 0], [5, 1, 4, 2, 3])
    assert np.array_equal(ds.targets, [95, 99, 96, 98, 97])


def test_load_csv_errors_name_the_problem(tmp_path):
    missing = tmp_path / "nope.csv"
    with pytest.raises(ContractViolation, match="nope.csv"):
        load_csv(missing, target_column="y")

    bad_col = tmp_path / "cols.csv"
    bad_col.write_text("x,y\n1,2\n")
    with pytest.raises(ContractViolation, match="'z'"):
        load_csv(bad_col, target_column="z")

    bad_cell = tmp_path / "cell.csv"
    bad_cell.write_text("x,y\n1,2\n3,oops\n")
    with pytest.raises(ContractViolation, match=r"row 3.*'y'.*oops"):
        load_csv(bad_cell, target_column="y")

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("x,y\n1,2,3\n")
    with pytest.raises(ContractViolation, match="row 2"):
        load_csv(ragged, target_column="y")

    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ContractViolation, match="empty"):
        load_csv(empty, target_column="y")


def test_motorcycle_is_bundled_and_stable():
    ds = load_motorcycle()
    assert ds.n == 133 and ds.d == 1
    assert ds.feature_names == ["times"] and ds.target_name == "accel"
    # frozen anchors for the vendored file
    assert ds.inputs[0, 0] == 2.4 and ds.targets[0] == 0.0
    assert ds.inputs[-1, 0] == 57.6 and ds.targets[-1] == 10.7
    assert abs(float(ds.inputs.mean()) - 25.178947368421056) < 1e-12
    assert abs(float(ds.targets.mean()) - (-25.54586466165414)) < 1e-12
    assert float(ds.targets.min()) == -134.0 and float(ds.targets.max()) == 75.0


def test_zscore_maps_known_range():
    # single feature 0..10 with matching targets: mean 5, pop-std 5 for
    # the endpoints check
    x = np.array([[0.0], [10.0]])
    y = np.array([0.0, 10.0])
    ds = zscore_fit_transform(DataSet(x, y))
    assert np.allclose(ds.inputs[:, 0], [-1.0, 1.0])
    assert np.allclose(ds.targets, [-1.0, 1.0])


def test_zscore_statistics_and_inverse_round_trip():
    rng = make_rng(8)
    raw = DataSet(rng.uniform(5, 9, size=(40, 2)), rng.normal(100, 7, size=40))
    ds = zscore_fit_transform(raw)
    assert np.allclose(ds.inputs.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(ds.inputs.std(axis=0), 1.0, atol=1e-12)
    assert abs(float(ds.targets.mean())) < 1e-12
    assert abs(float(ds.targets.std()) - 1.0) < 1e-12
    # inverse transforms recover the original values
    assert np.allclose(ds.denormalize_inputs(ds.inputs), raw.inputs, atol=1e-12)
    assert np.allclose(ds.denormalize_preds(ds.targets), raw.targets, atol=1e-12)


def test_zscore_on_already_standard_data_is_nearly_identity():
    rng = make_rng(9)
    x = rng.standard_normal((5000, 1))
    x = (x - x.mean()) / x.std()
    y = rng.standard_normal(5000)
    y = (y - y.mean()) / y.std()
    ds = zscore_fit_transform(DataSet(x.copy(), y.copy()))
    assert np.allclose(ds.inputs, x, atol=1e-12)
    assert np.allclose(ds.targets, y, atol=1e-12)


def test_zscore_double_application_rejected():
    ds = zscore_fit_transform(DataSet(np.array([[1.0], [2.0]]), np.array([3.0, 4.0])))
    with pytest.raises(ContractViolation, match="already"):
        zscore_fit_transform(ds)


def test_zscore_zero_variance_named():
    ds = DataSet(
        np.array([[1.0, 5.0], [1.0, 6.0]]),
        np.array([0.0, 1.0]),
        feature_names=["flat", "ok"],
    )
    with pytest.raises(ContractViolation, match="flat"):
        zscore_fit_transform(ds)
    with pytest.raises(ContractViolation, match="target"):
        zscore_fit_transform(DataSet(np.array([[1.0], [2.0]]), np.array([3.0, 3.0])))


def test_zscore_preserves_above_below_relations():
    rng = make_rng(10)
    raw = DataSet(rng.uniform(0, 50, size=(200, 1)), rng.normal(-20, 30, size=200))
    ds = zscore_fit_transform(raw)
    preds_raw = rng.normal(-20, 30, size=200)
    preds_std = (preds_raw - raw.targets.mean()) / raw.targets.std()
    assert np.array_equal(preds_std >= ds.targets, preds_raw >= raw.targets)


def test_gen_heteroscedastic_zero_noise_is_exact_sine():
    ds = gen_heteroscedastic(make_rng(3), 50, noise_profile=0.0)
    assert np.allclose(ds.targets, np.sin(2 * np.pi * ds.inputs[:, 0]), atol=1e-15)
    assert ds.inputs.min() >= 0.0 and ds.inputs.max() < 1.0


def test_gen_heteroscedastic_same_seed_identical():
    a = gen_heteroscedastic(make_rng(4), 100)
    b = gen_heteroscedastic(make_rng(4), 100)
    assert np.array_equal(a.inputs, b.inputs)
    assert np.array_equal(a.targets, b.targets)


def test_gen_heteroscedastic_noise_grows_with_x():
    # default profile 0.1 + 0.3x: residual spread on the right half must
    # exceed the left half for a large sample
    ds = gen_heteroscedastic(make_rng(5), 20000)
    x = ds.inputs[:, 0]
    resid = ds.targets - np.sin(2 * np.pi * x)
    left = resid[x < 0.5].std()
    right = resid[x >= 0.5].std()
    assert right > left * 1.5
    assert default_noise_profile(0.0) == 0.1
    assert abs(default_noise_profile(1.0) - 0.4) < 1e-15


def test_gen_heteroscedastic_validation():
    with pytest.raises(ContractViolation):
        gen_heteroscedastic(make_rng(0), 0)
    with pytest.raises(ContractViolation):
        gen_heteroscedastic(make_rng(0), 10, noise_profile=-0.1)
