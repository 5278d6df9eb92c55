import numpy as np
import pytest

from countreg.network import (
    Network,
    NetworkSpec,
    canonical_spec,
    forward,
    grad,
    init,
    load_checkpoint,
    save_checkpoint,
)
from countreg.numeric import ContractViolation, make_rng


def test_spec_validation():
    with pytest.raises(ContractViolation):
        NetworkSpec((1, 1), ("identity",))  # no hidden layer
    with pytest.raises(ContractViolation):
        NetworkSpec((1, 5, 2), ("tanh", "identity"))  # output dim != 1
    with pytest.raises(ContractViolation):
        NetworkSpec((1, 0, 1), ("tanh", "identity"))
    with pytest.raises(ContractViolation):
        NetworkSpec((1, 5, 1), ("tanh",))  # too few activations
    with pytest.raises(ContractViolation):
        NetworkSpec((1, 5, 1), ("tanh", "softmax"))


def test_canonical_spec_shape():
    spec = canonical_spec()
    assert spec.layer_dims == (1, 50, 10, 1)
    assert spec.activations == ("tanh", "relu", "identity")
    assert spec.n_params == 621
    assert canonical_spec(input_dim=4).n_params == 50 * 4 + 50 + 510 + 11


def test_init_glorot_stats():
    spec = NetworkSpec((100, 100, 1), ("tanh", "identity"))
    net = init(spec, make_rng(0))
    w = net.params[:10000].reshape(100, 100)
    b = net.params[10000:10100]
    assert np.all(b == 0.0)
    expected_std = np.sqrt(2.0 / 200)
    assert abs(w.std() - expected_std) < 0.005
    assert abs(w.mean()) < 0.005


def test_init_is_seed_deterministic():
    spec = canonical_spec()
    a = init(spec, make_rng(11))
    b = init(spec, make_rng(11))
    assert np.array_equal(a.params, b.params)


def test_network_rejects_wrong_param_length():
    with pytest.raises(ContractViolation):
        Network(canonical_spec(), np.zeros(620))


def test_forward_hand_computed():
    # 1 -> 2 (tanh) -> 1 (identity), all weights/biases chosen by hand
    spec = NetworkSpec((1, 2, 1), ("tanh", "identity"))
    # layer 1: W=[[1],[−1]], b=[0, 0.5]; layer 2: W=[[2, 3]], b=[−1]
    theta = np.array([1.0, -1.0, 0.0, 0.5, 2.0, 3.0, -1.0])
    net = Network(spec, theta)
    x = np.array([[0.25]])
    h = np.tanh(np.array([0.25, -0.25 + 0.5]))
    expected = 2.0 * h[0] + 3.0 * h[1] - 1.0
    got = forward(net, x)
    assert got.shape == (1,)
    assert abs(got[0] - expected) < 1e-15


def test_forward_identity_network_is_linear():
    spec = NetworkSpec((1, 1, 1), ("identity", "identity"))
    net = Network(spec, np.array([2.0, 1.0, 3.0, -4.0]))  # y = 3*(2x+1) - 4
    x = np.array([[0.0], [1.0], [-2.0]])
    assert np.allclose(forward(net, x), [-1.0, 5.0, -13.0])


def test_forward_batch_consistency():
    net = init(canonical_spec(3), make_rng(2))
    x = make_rng(3).standard_normal((8, 3))
    batch = forward(net, x)
    rows = np.array([forward(net, x[i:i + 1])[0] for i in range(8)])
    assert np.allclose(batch, rows, atol=1e-12)


def test_forward_rejects_wrong_width():
    net = init(canonical_spec(2), make_rng(0))
    with pytest.raises(ContractViolation):
        forward(net, np.zeros((4, 3)))


def _fd_grad(net, x, upstream, h=1e-6):
    base = net.params.copy()
    out = np.zeros_like(base)
    for j in range(base.shape[0]):
        p = base.copy()
        p[j] += h
        fp = float(upstream @ forward(net.with_params(p), x))
        p[j] -= 2 * h
        fm = float(upstream @ forward(net.with_params(p), x))
        out[j] = (fp - fm) / (2 * h)
    return out


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_grad_matches_finite_differences(seed):
    rng = make_rng(seed)
    spec = NetworkSpec((2, 4, 3, 1), ("tanh", "relu", "identity"))
    net = init(spec, rng)
    x = rng.uniform(0.3, 1.7, size=(5, 2)) * rng.choice([-1.0, 1.0], size=(5, 2))
    upstream = rng.uniform(0.3, 1.7, size=5) * rng.choice([-1.0, 1.0], size=5)
    an = grad(net, x, upstream)
    fd = _fd_grad(net, x, upstream)
    err = np.abs(an - fd)
    assert np.all(err <= np.maximum(1e-8, 1e-5 * np.abs(an)))


def test_grad_relu_subgradient_zero_at_kink():
    # 1 -> 1 relu -> 1 identity with the relu input pinned at exactly 0
    spec = NetworkSpec((1, 1, 1), ("relu", "identity"))
    net = Network(spec, np.array([1.0, 0.0, 1.0, 0.0]))
    g = grad(net, np.array([[0.0]]), np.array([1.0]))
    # d/dW1 and d/db1 must use derivative 0 at the kink
    assert g[0] == 0.0 and g[1] == 0.0
    # output-layer weight sees relu(0) = 0, bias passes gradient 1
    assert g[2] == 0.0 and g[3] == 1.0


def test_grad_rejects_upstream_length_mismatch():
    net = init(canonical_spec(), make_rng(0))
    with pytest.raises(ContractViolation):
        grad(net, np.zeros((3, 1)), np.zeros(2))


def test_checkpoint_round_trip(tmp_path):
    net = init(canonical_spec(2), make_rng(9))
    path = tmp_path / "ck.json"
    save_checkpoint(net, path)
    back = load_checkpoint(path)
    assert back.spec == net.spec
    assert np.array_equal(back.params, net.params)


def test_checkpoint_rejects_foreign_json(tmp_path):
    path = tmp_path / "other.json"
    path.write_text('{"format": "something-else", "version": 1}\n')
    with pytest.raises(ContractViolation):
        load_checkpoint(path)
    path.write_text('{"format": "countreg-checkpoint", "version": 99}\n')
    with pytest.raises(ContractViolation):
        load_checkpoint(path)
