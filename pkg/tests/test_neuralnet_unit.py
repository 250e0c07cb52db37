import numpy as np
import pytest

from scatternet.core.exceptions import (
    ScatternetConfigError,
    ScatternetDomainError,
    ScatternetShapeError,
)
from scatternet.harness.verify import brute_force_conv
from scatternet.neuralnet import (
    avg_pool,
    backward,
    conv2d,
    cross_entropy,
    entropy,
    forward,
    gradient_check,
    init_network,
    kl_divergence,
    load_network,
    loss,
    max_pool,
    mean_squared_error,
    predict,
    relu,
    save_network,
    sigmoid,
    soft_target_loss,
    softmax,
    softmax_cross_entropy,
    softmax_temperature,
    write_kernels_pgm,
    write_metrics_csv,
)
from scatternet.typing.network_types import (
    AvgPoolLayer,
    ConvLayer,
    DenseLayer,
    FeatureTensor,
    LossReport,
    MaxPoolLayer,
    ReluLayer,
)


def test_activations():
    assert relu(-3.2) == 0.0
    assert relu(3.2) == 3.2
    assert sigmoid(0.0) == 0.5
    assert np.allclose(softmax([2.0, 2.0, 2.0]), 1 / 3)


def test_softmax_temperature_examples():
    z = np.array([1.0, 0.0])
    assert np.allclose(softmax_temperature(z, 1.0), [0.731059, 0.268941], atol=1e-6)
    assert np.max(np.abs(softmax_temperature(z, 1.0) - softmax(z))) <= 1e-15
    flat = softmax_temperature(np.linspace(-1, 1, 7), 1e6)
    assert np.max(np.abs(flat - 1 / 7)) < 1e-5


@pytest.mark.parametrize("temperature", [0.0, -1.0])
def test_softmax_temperature_rejects(temperature):
    with pytest.raises(ScatternetDomainError):
        softmax_temperature([1.0, 2.0], temperature)


@pytest.mark.parametrize("temperature", [1e-310, 5e-324])
def test_softmax_temperature_tiny_temperature_is_one_hot(temperature):
    q = softmax_temperature([1.0, 0.0, -3.0], temperature)
    assert np.all(np.isfinite(q))
    assert q.tolist() == [1.0, 0.0, 0.0]


def test_softmax_temperature_tiny_temperature_splits_ties():
    q = softmax_temperature([2.0, 2.0, -1.0], 1e-310)
    assert q.tolist() == [0.5, 0.5, 0.0]


def test_softmax_shift_invariance_and_argmax(rng):
    for z in rng.normal(0, 3, (50, 5)):
        assert abs(softmax(z).sum() - 1) < 1e-12
        assert np.max(np.abs(softmax(z + 123.4) - softmax(z))) < 1e-12
        for T in (0.05, 1.0, 40.0, 1e5):
            assert np.argmax(softmax_temperature(z, T)) == np.argmax(z)


def test_entropy_rises_with_temperature(rng):
    z = rng.normal(0, 2, 6)
    entropies = [entropy(softmax_temperature(z, T)) for T in np.logspace(-1, 3, 20)]
    assert all(b >= a - 1e-12 for a, b in zip(entropies, entropies[1:]))


@pytest.mark.parametrize(
    "p, expected",
    [([0, 0, 1, 0], 0.0), ([0.25] * 4, np.log(4)), ([0.5, 0.5], np.log(2))],
)
def test_entropy_examples(p, expected):
    assert entropy(p) == pytest.approx(expected, abs=1e-12)


def test_entropy_rejects_invalid():
    with pytest.raises(ScatternetDomainError):
        entropy([0.5, 0.6])
    with pytest.raises(ScatternetDomainError):
        entropy([-0.1, 1.1])


def test_cross_entropy_examples():
    assert cross_entropy([0.25] * 4, [0.25] * 4) == pytest.approx(np.log(4), abs=1e-12)
    assert cross_entropy([0, 0, 1], [0.0010, 0.0001, 0.9989]) == pytest.approx(-np.log(0.9989), abs=1e-9)
    assert cross_entropy([0, 0, 1], [0.0010, 0.0001, 0.9989]) == pytest.approx(0.001101, abs=1e-6)
    assert cross_entropy([1, 0], [0.5, 0.5]) == pytest.approx(np.log(2))
    with pytest.raises(ScatternetDomainError):
        cross_entropy([0.5, 0.5], [1.0, 0.0])
    with pytest.raises(ScatternetShapeError):
        cross_entropy([0.5, 0.5], [1.0, 0.0, 0.0])


def test_kl_divergence(rng):
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == pytest.approx(0.0, abs=1e-15)
    assert kl_divergence([1, 0], [0.5, 0.5]) == pytest.approx(np.log(2))
    for _ in range(1000):
        p, q = rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5))
        assert kl_divergence(p, q) >= -1e-12


def test_mean_squared_error():
    assert mean_squared_error([1.0, 3.0], [1.0, 1.0]) == 2.0
    with pytest.raises(ScatternetShapeError):
        mean_squared_error([1.0], [1.0, 2.0])


def test_softmax_cross_entropy_gradient():
    report = softmax_cross_entropy([1.0, 2.0, 0.5], 1)
    q = softmax([1.0, 2.0, 0.5])
    assert isinstance(report, LossReport)
    assert np.allclose(report.logit_gradient, q - [0, 1, 0])
    assert report.loss == pytest.approx(-np.log(q[1]))
    with pytest.raises(ScatternetDomainError):
        softmax_cross_entropy([1.0, 2.0], 2)


def test_soft_target_loss_gradient():
    report = soft_target_loss([1.0, 0.0, -1.0], [0.0, 2.0, 0.0], 4.0)
    expected = (softmax_temperature([1.0, 0.0, -1.0], 4.0) - softmax_temperature([0.0, 2.0, 0.0], 4.0)) / 4.0
    assert np.allclose(report.logit_gradient, expected)


def test_loss_report_rejects_unnormalized():
    with pytest.raises(ScatternetDomainError):
        LossReport(loss=0.0, probabilities=np.array([0.5, 0.6]), logit_gradient=np.zeros(2))


def test_conv2d_delta_kernel_is_identity(rng):
    kernels = np.zeros((1, 1, 3, 3))
    kernels[0, 0, 1, 1] = 1.0
    x = rng.normal(size=(1, 7, 6))
    out = conv2d(FeatureTensor(x), ConvLayer(kernels, np.zeros(1)))
    assert out.values.shape == (1, 5, 4)
    assert np.array_equal(out.values, x[:, 1:-1, 1:-1])


def test_conv2d_single_pixel():
    out = conv2d(FeatureTensor(np.full((1, 1, 1), 3.0)), ConvLayer(np.full((1, 1, 1, 1), 2.0), np.array([0.5])))
    assert out.values.tolist() == [[[6.5]]]


def test_conv2d_two_tap_on_constant():
    kernels = np.array([[[[1.0, 1.0, 0.0]]]])
    out = conv2d(FeatureTensor(np.full((1, 3, 8), 1.75)), ConvLayer(kernels, np.zeros(1)))
    assert np.all(out.values == 3.5)


def test_conv2d_matches_brute_force_with_stride(rng):
    x = rng.integers(-4, 5, (3, 11, 9)).astype(float)
    kernels = rng.integers(-4, 5, (2, 3, 5, 3)).astype(float)
    bias = np.array([1.0, -2.0])
    out = conv2d(FeatureTensor(x), ConvLayer(kernels, bias, stride=2))
    assert out.values.shape == (2, 4, 4)
    assert np.array_equal(out.values, brute_force_conv(x, kernels, bias, 2))


def test_conv2d_translation_covariance(rng):
    layer = ConvLayer(rng.normal(size=(2, 1, 3, 3)), rng.normal(size=2))
    x = rng.normal(size=(1, 9, 9))
    shifted = np.roll(x, 1, axis=1)
    out, out_shifted = conv2d(FeatureTensor(x), layer).values, conv2d(FeatureTensor(shifted), layer).values
    assert np.array_equal(out_shifted[:, 1:, :], out[:, :-1, :])


def test_conv2d_errors():
    layer = ConvLayer(np.zeros((1, 2, 3, 3)), np.zeros(1))
    with pytest.raises(ScatternetShapeError):
        conv2d(FeatureTensor(np.zeros((1, 5, 5))), layer)
    with pytest.raises(ScatternetShapeError):
        conv2d(FeatureTensor(np.zeros((2, 2, 5))), layer)
    with pytest.raises(ScatternetDomainError):
        ConvLayer(np.zeros((1, 1, 2, 2)), np.zeros(1))


def test_max_pool_shapes_and_routes():
    x = np.arange(16, dtype=float).reshape(1, 4, 4)
    out, routes = max_pool(FeatureTensor(x), 2, 2)
    assert out.values.shape == (1, 2, 2)
    assert out.values.tolist() == [[[5.0, 7.0], [13.0, 15.0]]]
    assert routes.tolist() == [[[5, 7], [13, 15]]]


def test_max_pool_constant_and_ties():
    out, routes = max_pool(FeatureTensor(np.full((2, 4, 4), 1.5)), 2, 2)
    assert np.all(out.values == 1.5)
    # ties resolve to the first element of each window
    assert routes[0].tolist() == [[0, 2], [8, 10]]


def test_max_pool_brute_force(rng):
    x = rng.normal(size=(2, 6, 6))
    out, _ = max_pool(FeatureTensor(x), 3, 2)
    for c in range(2):
        for i in range(2):
            for j in range(2):
                assert out.values[c, i, j] == x[c, 2 * i : 2 * i + 3, 2 * j : 2 * j + 3].max()


def test_max_pool_composition(rng):
    x = FeatureTensor(rng.normal(size=(2, 8, 8)))
    twice, _ = max_pool(max_pool(x, 2, 2)[0], 2, 2)
    assert np.array_equal(twice.values, max_pool(x, 4, 4)[0].values)


def test_max_pool_rejects_large_window():
    with pytest.raises(ScatternetShapeError):
        max_pool(FeatureTensor(np.zeros((1, 3, 3))), 4, 1)


def test_avg_pool():
    out = avg_pool(FeatureTensor(np.arange(16, dtype=float).reshape(1, 4, 4)), 2, 2)
    assert out.values.tolist() == [[[2.5, 4.5], [10.5, 12.5]]]


def test_forward_and_predict(cnn, rng):
    image = rng.normal(size=(6, 6))
    logits, cache = forward(cnn, image)
    assert logits.shape == (3,)
    assert len(cache.inputs) == len(cnn)
    assert 2 in cache.routes
    assert predict(cnn, image) == int(np.argmax(logits))
    assert loss(cnn, image, 0) == pytest.approx(softmax_cross_entropy(logits, 0).loss)


def test_backward_single_dense_layer():
    layer = DenseLayer(np.eye(3), np.zeros(3))
    x = np.array([0.2, -0.1, 0.4]).reshape(1, 1, 3)
    logits, cache = forward([layer], x)
    report, grads = backward([layer], cache, 2)
    assert np.array_equal(logits, [0.2, -0.1, 0.4])
    assert np.allclose(grads[0]["bias"], softmax(logits) - [0, 0, 1])
    assert np.allclose(report.logit_gradient, grads[0]["bias"])


def test_backward_zero_net():
    net = [
        ConvLayer(np.zeros((2, 1, 3, 3)), np.zeros(2)),
        ReluLayer(),
        MaxPoolLayer(2, 2),
        DenseLayer(np.zeros((3, 8)), np.zeros(3)),
    ]
    report, grads = backward(net, forward(net, np.zeros((1, 6, 6)))[1], 1)
    assert np.allclose(grads[3]["bias"], np.full(3, 1 / 3) - [0, 1, 0])
    for name in ("kernels", "bias"):
        assert not grads[0][name].any()
    assert not grads[3]["weights"].any()


@pytest.mark.parametrize(
    "layers",
    [
        [{"type": "dense", "outputs": 3}],
        [{"type": "conv", "out_channels": 2, "kernel_size": 3}, {"type": "dense", "outputs": 3}],
        [{"type": "conv", "out_channels": 2, "kernel_size": 3, "stride": 2}, {"type": "dense", "outputs": 3}],
        [{"type": "avg_pool", "window": 2}, {"type": "dense", "outputs": 3}],
        [
            {"type": "conv", "out_channels": 2, "kernel_size": 3},
            {"type": "relu"},
            {"type": "conv", "out_channels": 2, "kernel_size": 3},
            {"type": "relu"},
            {"type": "max_pool", "window": 2, "stride": 2},
            {"type": "dense", "outputs": 3},
        ],
    ],
)
def test_gradient_check(layers, rng):
    net = init_network((1, 8, 8), layers, seed=11)
    for layer in net:
        if isinstance(layer, (ConvLayer, DenseLayer)):
            layer.bias = rng.normal(0, 0.1, layer.bias.shape)
    report = gradient_check(net, rng.normal(size=(1, 8, 8)), 2)
    assert report.checked > 0
    assert report.max_error < 1e-4


def test_gradient_check_restores_parameters(cnn, rng):
    before = [dict((k, v.copy()) for k, v in layer.params().items()) for layer in cnn]
    gradient_check(cnn, rng.normal(size=(1, 6, 6)), 0)
    for layer, saved in zip(cnn, before):
        for name, values in saved.items():
            assert np.array_equal(layer.params()[name], values)


def test_init_network_is_seeded_and_bounded():
    first = init_network((1, 6, 6), [{"type": "conv", "out_channels": 3, "kernel_size": 3}, {"type": "dense", "outputs": 2}], 4)
    second = init_network((1, 6, 6), [{"type": "conv", "out_channels": 3, "kernel_size": 3}, {"type": "dense", "outputs": 2}], 4)
    assert np.array_equal(first[0].kernels, second[0].kernels)
    assert first[1].weights.shape == (2, 48)
    assert np.abs(first[0].kernels).max() <= np.sqrt(6 / (9 + 27))
    assert not first[0].bias.any()


@pytest.mark.parametrize(
    "layers",
    [[{"type": "softmax"}], [{"type": "conv", "out_channels": 1, "kernel_size": 7}]],
)
def test_init_network_rejects(layers):
    with pytest.raises((ScatternetConfigError, ScatternetShapeError)):
        init_network((1, 4, 4), layers, 0)


def test_checkpoint_round_trip(tmp_path, rng):
    net = [
        ConvLayer(rng.normal(size=(2, 1, 3, 3)), rng.normal(size=2), stride=2),
        ReluLayer(),
        AvgPoolLayer(2, 1),
        MaxPoolLayer(1, 1),
        DenseLayer(rng.normal(size=(3, 8)), rng.normal(size=3)),
    ]
    path = save_network(str(tmp_path / "net.ckpt"), net)
    text = open(path).read()
    assert text.startswith("scatternet-checkpoint v1\n[layer 0] type=conv stride=2 param=kernels shape=2x1x3x3\n")

    loaded = load_network(path)
    assert [layer.kind for layer in loaded] == ["conv", "relu", "avg_pool", "max_pool", "dense"]
    assert loaded[0].stride == 2 and loaded[2].window == 2
    for original, restored in zip(net, loaded):
        for name, values in original.params().items():
            assert np.array_equal(restored.params()[name], values)
    x = rng.normal(size=(1, 7, 7))
    assert np.array_equal(forward(net, x)[0], forward(loaded, x)[0])


def test_kernel_and_metric_writers(tmp_path):
    layer = ConvLayer(np.ones((3, 1, 3, 3)), np.zeros(3))
    data = open(write_kernels_pgm(str(tmp_path / "k.pgm"), layer), "rb").read()
    assert data.startswith(b"P5\n11 3\n65535\n")
    metrics = open(write_metrics_csv(str(tmp_path / "m.csv"), [(1, 0.5, 0.75)])).read()
    assert metrics == "epoch,loss,accuracy\n1,0.5,0.75\n"
