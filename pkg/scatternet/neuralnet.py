"""
Convolution, pooling, activations, a dense classifier and the entropy-family
losses, with exact backpropagation for single examples.

The network is real valued. Convolution is a valid-region cross-correlation:
out[o, y, x] = sum_{c,i,j} K[o, c, i, j] * in[c, s*y + i, s*x + j] + b[o].
Every output element accumulates its terms in the same (c, i, j) order, so a
shifted input gives a bit-identical shifted output.
"""

import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray
from scipy.special import entr, expit, softmax as _softmax, xlogy

from scatternet.core.artifacts import (
    CheckpointSection,
    read_checkpoint,
    write_checkpoint,
    write_csv,
    write_pgm,
)
from scatternet.core.exceptions import (
    ScatternetConfigError,
    ScatternetDomainError,
    ScatternetShapeError,
)
from scatternet.core.helpers import require_distribution, require_finite, spawn_rng
from scatternet.typing.network_types import (
    AvgPoolLayer,
    ConvLayer,
    DenseLayer,
    FeatureTensor,
    ForwardCache,
    GradientCheckReport,
    Gradients,
    LayerSpec,
    LossReport,
    MaxPoolLayer,
    Network,
    ReluLayer,
)

logger = logging.getLogger(__name__)

GRADIENT_CHECK_STEP = 1e-3


def _output_size(size: int, window: int, stride: int) -> int:
    return (size - window) // stride + 1


# Activations and losses


def relu(x: ArrayLike) -> NDArray[np.float64]:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def sigmoid(x: ArrayLike) -> NDArray[np.float64]:
    return expit(np.asarray(x, dtype=np.float64))


def softmax(z: ArrayLike) -> NDArray[np.float64]:
    """Normalized exponentials, computed after subtracting max(z)."""
    return _softmax(np.asarray(require_finite(z, "logits"), dtype=np.float64))


def softmax_temperature(z: ArrayLike, temperature: float) -> NDArray[np.float64]:
    """q_i = exp(z_i/T) / sum_j exp(z_j/T). Large T flattens q towards 1/C."""
    if not temperature > 0:
        raise ScatternetDomainError(f"temperature must be > 0, got {temperature}")
    z = np.asarray(require_finite(z, "logits"), dtype=np.float64)
    # shifted before dividing: for tiny T the scaled logits reach -inf, never +inf
    with np.errstate(over="ignore"):
        scaled = (z - z.max()) / temperature
    return _softmax(scaled)


def entropy(p: ArrayLike) -> float:
    """-sum p log p in nats, with 0 log 0 = 0."""
    p = require_distribution(p, "p")
    return float(entr(p).sum())


def cross_entropy(p: ArrayLike, q: ArrayLike) -> float:
    """-sum p log q in nats. q must be positive wherever p is."""
    p = require_distribution(p, "p")
    q = require_distribution(q, "q")
    if p.shape != q.shape:
        raise ScatternetShapeError("p and q differ in length", p.shape, q.shape)
    if ((q == 0) & (p > 0)).any():
        raise ScatternetDomainError("q is zero where p is positive")
    return float(-xlogy(p, q).sum())


def kl_divergence(p: ArrayLike, q: ArrayLike) -> float:
    return cross_entropy(p, q) - entropy(p)


def mean_squared_error(y: ArrayLike, target: ArrayLike) -> float:
    y, target = np.asarray(y, dtype=np.float64), np.asarray(target, dtype=np.float64)
    if y.shape != target.shape:
        raise ScatternetShapeError("prediction and target differ", target.shape, y.shape)
    return float(np.mean((y - target) ** 2))


def _target_distribution(target: int | ArrayLike, classes: int) -> NDArray[np.float64]:
    if isinstance(target, (int, np.integer)):
        if not 0 <= target < classes:
            raise ScatternetDomainError(f"class index {target} outside [0, {classes})")
        p = np.zeros(classes)
        p[target] = 1.0
        return p
    p = require_distribution(target, "target")
    if p.size != classes:
        raise ScatternetShapeError("target does not match the logits", (classes,), p.shape)
    return p


def softmax_cross_entropy(logits: ArrayLike, target: int | ArrayLike) -> LossReport:
    """Cross entropy of softmax(logits) against a class index or distribution; gradient q - p."""
    logits = np.asarray(logits, dtype=np.float64)
    q = softmax(logits)
    p = _target_distribution(target, logits.size)
    # xlogy keeps p = 0 entries at 0 even when q underflows
    loss = float(-xlogy(p, q).sum())
    return LossReport(loss=loss, probabilities=q, logit_gradient=q - p)


def soft_target_loss(
    student_logits: ArrayLike, teacher_logits: ArrayLike, temperature: float
) -> LossReport:
    """Cross entropy between temperature-softened teacher and student distributions."""
    q_student = softmax_temperature(student_logits, temperature)
    q_teacher = softmax_temperature(teacher_logits, temperature)
    if q_student.shape != q_teacher.shape:
        raise ScatternetShapeError("logit vectors differ", q_teacher.shape, q_student.shape)
    loss = float(-xlogy(q_teacher, q_student).sum())
    return LossReport(
        loss=loss,
        probabilities=q_student,
        logit_gradient=(q_student - q_teacher) / temperature,
    )


# Layers on raw arrays


def _conv_forward(x: NDArray, layer: ConvLayer) -> NDArray[np.float64]:
    channels, height, width = x.shape
    kh, kw = layer.kernel_shape
    if channels != layer.in_channels:
        raise ScatternetShapeError(
            "input channels do not match the layer", (layer.in_channels,), (channels,)
        )
    if height < kh or width < kw:
        raise ScatternetShapeError("input smaller than the kernel", (kh, kw), (height, width))

    s = layer.stride
    out_h, out_w = _output_size(height, kh, s), _output_size(width, kw, s)
    out = np.zeros((layer.out_channels, out_h, out_w))
    for c in range(channels):
        for i in range(kh):
            for j in range(kw):
                patch = x[c, i : i + s * (out_h - 1) + 1 : s, j : j + s * (out_w - 1) + 1 : s]
                out += layer.kernels[:, c, i, j][:, None, None] * patch[None, :, :]
    return out + layer.bias[:, None, None]


def _conv_backward(
    x: NDArray, layer: ConvLayer, grad_out: NDArray
) -> tuple[NDArray, dict[str, NDArray]]:
    channels = x.shape[0]
    kh, kw = layer.kernel_shape
    s = layer.stride
    _, out_h, out_w = grad_out.shape
    grad_x = np.zeros_like(x)
    grad_k = np.zeros_like(layer.kernels)
    for c in range(channels):
        for i in range(kh):
            for j in range(kw):
                rows = slice(i, i + s * (out_h - 1) + 1, s)
                cols = slice(j, j + s * (out_w - 1) + 1, s)
                grad_k[:, c, i, j] = np.einsum("ohw,hw->o", grad_out, x[c, rows, cols])
                grad_x[c, rows, cols] += np.einsum("o,ohw->hw", layer.kernels[:, c, i, j], grad_out)
    return grad_x, {"kernels": grad_k, "bias": grad_out.sum(axis=(1, 2))}


def _pool_windows(x: NDArray, window: int, stride: int) -> NDArray:
    if window > x.shape[1] or window > x.shape[2]:
        raise ScatternetShapeError(
            "pool window exceeds the input", (window, window), x.shape[1:]
        )
    return sliding_window_view(x, (window, window), axis=(1, 2))[:, ::stride, ::stride]


def _max_pool_forward(x: NDArray, window: int, stride: int) -> tuple[NDArray, NDArray]:
    channels, height, width = x.shape
    windows = _pool_windows(x, window, stride)
    _, out_h, out_w = windows.shape[:3]
    flat = windows.reshape(channels, out_h, out_w, window * window)
    # argmax returns the first maximum: ties go to the lowest input index
    local = flat.argmax(axis=-1)
    values = np.take_along_axis(flat, local[..., None], axis=-1)[..., 0]

    rows = np.arange(out_h)[None, :, None] * stride + local // window
    cols = np.arange(out_w)[None, None, :] * stride + local % window
    chans = np.arange(channels)[:, None, None]
    routes = (chans * height + rows) * width + cols
    return values, routes.astype(np.int64)


def _max_pool_backward(x: NDArray, routes: NDArray, grad_out: NDArray) -> NDArray:
    grad_x = np.zeros(x.size)
    np.add.at(grad_x, routes.ravel(), grad_out.ravel())
    return grad_x.reshape(x.shape)


def _avg_pool_forward(x: NDArray, window: int, stride: int) -> NDArray:
    return _pool_windows(x, window, stride).mean(axis=(-2, -1))


def _avg_pool_backward(x: NDArray, layer: AvgPoolLayer, grad_out: NDArray) -> NDArray:
    w, s = layer.window, layer.stride
    _, out_h, out_w = grad_out.shape
    grad_x = np.zeros_like(x)
    share = grad_out / (w * w)
    for i in range(w):
        for j in range(w):
            grad_x[:, i : i + s * (out_h - 1) + 1 : s, j : j + s * (out_w - 1) + 1 : s] += share
    return grad_x


def _dense_forward(x: NDArray, layer: DenseLayer) -> NDArray:
    flat = x.ravel()
    if flat.size != layer.inputs:
        raise ScatternetShapeError("dense input size mismatch", (layer.inputs,), (flat.size,))
    return layer.weights @ flat + layer.bias


# Public layer operations


def conv2d(x: FeatureTensor, layer: ConvLayer) -> FeatureTensor:
    return FeatureTensor(_conv_forward(x.values, layer))


def max_pool(x: FeatureTensor, window: int, stride: int) -> tuple[FeatureTensor, NDArray]:
    """Per-window maxima and, for each output, the flat input index it came from."""
    values, routes = _max_pool_forward(x.values, window, stride)
    return FeatureTensor(values), routes


def avg_pool(x: FeatureTensor, window: int, stride: int) -> FeatureTensor:
    return FeatureTensor(_avg_pool_forward(x.values, window, stride))


# Network


def _as_input(x: FeatureTensor | ArrayLike) -> NDArray[np.float64]:
    if isinstance(x, FeatureTensor):
        return x.values
    array = np.asarray(x, dtype=np.float64)
    if array.ndim == 2:
        array = array[None, :, :]
    return FeatureTensor(array).values


def forward(net: Network, x: FeatureTensor | ArrayLike) -> tuple[NDArray, ForwardCache]:
    """Logits of one example and the cache backward() needs."""
    cache = ForwardCache()
    out = _as_input(x)
    for index, layer in enumerate(net):
        cache.inputs.append(out)
        match layer:
            case ConvLayer():
                if out.ndim != 3:
                    raise ScatternetShapeError("conv layers need a feature map", None, out.shape)
                out = _conv_forward(out, layer)
            case ReluLayer():
                out = relu(out)
            case MaxPoolLayer():
                out, cache.routes[index] = _max_pool_forward(out, layer.window, layer.stride)
            case AvgPoolLayer():
                out = _avg_pool_forward(out, layer.window, layer.stride)
            case DenseLayer():
                out = _dense_forward(out, layer)
            case _:
                raise ScatternetConfigError(f"Unknown layer {layer!r}")
    if out.ndim != 1:
        raise ScatternetShapeError("the last layer must produce a logit vector", None, out.shape)
    cache.logits = out
    return out, cache


def backward(
    net: Network, cache: ForwardCache, target: int | ArrayLike
) -> tuple[LossReport, Gradients]:
    """Cross-entropy loss of softmax(logits) and its gradient for every parameter."""
    report = softmax_cross_entropy(cache.logits, target)
    grads: Gradients = [{} for _ in net]
    grad = report.logit_gradient
    for index in reversed(range(len(net))):
        layer, x = net[index], cache.inputs[index]
        match layer:
            case DenseLayer():
                grads[index] = {"weights": np.outer(grad, x.ravel()), "bias": grad.copy()}
                grad = (layer.weights.T @ grad).reshape(x.shape)
            case ConvLayer():
                grad, grads[index] = _conv_backward(x, layer, grad)
            case ReluLayer():
                grad = grad * (x > 0)
            case MaxPoolLayer():
                grad = _max_pool_backward(x, cache.routes[index], grad)
            case AvgPoolLayer():
                grad = _avg_pool_backward(x, layer, grad)
    return report, grads


def loss(net: Network, x: FeatureTensor | ArrayLike, target: int | ArrayLike) -> float:
    logits, _ = forward(net, x)
    return softmax_cross_entropy(logits, target).loss


def predict(net: Network, x: FeatureTensor | ArrayLike) -> int:
    logits, _ = forward(net, x)
    return int(np.argmax(logits))


def _routing(net: Network, cache: ForwardCache) -> list[NDArray]:
    masks = [cache.inputs[i] > 0 for i, layer in enumerate(net) if isinstance(layer, ReluLayer)]
    return masks + [cache.routes[i] for i in sorted(cache.routes)]


def _same_routing(a: list[NDArray], b: list[NDArray]) -> bool:
    return all(np.array_equal(x, y) for x, y in zip(a, b))


def gradient_check(
    net: Network,
    x: FeatureTensor | ArrayLike,
    target: int | ArrayLike,
    step: float = GRADIENT_CHECK_STEP,
) -> GradientCheckReport:
    """
    Compares backward() against central differences for every parameter entry.

    Entries whose perturbation by +-step changes a ReLU mask or a max-pool
    route sit on a kink of the loss and are skipped. The error of a parameter
    array is |a - n| / (|a| + |n|) over its checked entries (0 when both vanish).
    """
    _, cache = forward(net, x)
    _, analytic = backward(net, cache, target)
    base_routing = _routing(net, cache)

    errors: dict[str, float] = {}
    skipped = checked = 0
    for index, layer in enumerate(net):
        for name, param in layer.params().items():
            numeric = np.zeros_like(param)
            keep = np.ones(param.shape, dtype=bool)
            for entry in np.ndindex(param.shape):
                original = param[entry]
                values = []
                for delta in (step, -step):
                    param[entry] = original + delta
                    logits, shifted = forward(net, x)
                    if not _same_routing(base_routing, _routing(net, shifted)):
                        keep[entry] = False
                    values.append(softmax_cross_entropy(logits, target).loss)
                param[entry] = original
                numeric[entry] = (values[0] - values[1]) / (2 * step)

            a, n = analytic[index][name][keep], numeric[keep]
            skipped += int((~keep).sum())
            checked += int(keep.sum())
            scale = np.linalg.norm(a) + np.linalg.norm(n)
            errors[f"layer{index}.{name}"] = (
                float(np.linalg.norm(a - n) / scale) if scale > 0 else 0.0
            )

    logger.debug("Gradient check", extra={"checked": checked, "skipped": skipped})
    return GradientCheckReport(errors=errors, skipped=skipped, checked=checked)


def _glorot(rng: np.random.Generator, shape: tuple, fan_in: int, fan_out: int) -> NDArray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_network(
    input_shape: tuple[int, int, int], specs: list[LayerSpec], seed: int
) -> Network:
    """
    Builds a layer stack for inputs of `input_shape` (channels, height, width).
    Kernels and weights are uniform in [-s, s], s = sqrt(6 / (fan_in + fan_out));
    biases start at zero.
    """
    rng = spawn_rng(seed)
    shape = tuple(input_shape)
    net: Network = []
    for spec in specs:
        kind = spec.get("type")
        if kind == "conv":
            size, out_ch, stride = spec["kernel_size"], spec["out_channels"], spec.get("stride", 1)
            in_ch = shape[0]
            kernels = _glorot(
                rng, (out_ch, in_ch, size, size), in_ch * size * size, out_ch * size * size
            )
            net.append(ConvLayer(kernels, np.zeros(out_ch), stride))
            shape = (out_ch, _output_size(shape[1], size, stride), _output_size(shape[2], size, stride))
        elif kind == "relu":
            net.append(ReluLayer())
        elif kind in ("max_pool", "avg_pool"):
            window = spec["window"]
            stride = spec.get("stride", window)
            layer_type = MaxPoolLayer if kind == "max_pool" else AvgPoolLayer
            net.append(layer_type(window, stride))
            shape = (shape[0], _output_size(shape[1], window, stride), _output_size(shape[2], window, stride))
        elif kind == "dense":
            inputs, outputs = int(np.prod(shape)), spec["outputs"]
            net.append(DenseLayer(_glorot(rng, (outputs, inputs), inputs, outputs), np.zeros(outputs)))
            shape = (outputs,)
        else:
            raise ScatternetConfigError(f"Unknown layer type {kind!r}")
        if min(shape) < 1:
            raise ScatternetConfigError(f"Layer {kind} leaves an empty feature map {shape}")
    return net


# Checkpoints and exports


def network_sections(net: Network) -> list[CheckpointSection]:
    sections = []
    for index, layer in enumerate(net):
        name = f"layer {index}"
        attrs = {"type": layer.kind}
        if isinstance(layer, (MaxPoolLayer, AvgPoolLayer)):
            attrs |= {"window": str(layer.window), "stride": str(layer.stride)}
        elif isinstance(layer, ConvLayer):
            attrs["stride"] = str(layer.stride)
        params = layer.params()
        if not params:
            sections.append(CheckpointSection(name, attrs))
        for param, values in params.items():
            sections.append(CheckpointSection(name, attrs | {"param": param}, values))
    return sections


def network_from_sections(sections: list[CheckpointSection]) -> Network:
    grouped: dict[str, list[CheckpointSection]] = {}
    for section in sections:
        grouped.setdefault(section.name, []).append(section)

    net: Network = []
    for name, parts in grouped.items():
        attrs = parts[0].attrs
        params = {part.attrs.get("param"): part.values for part in parts}
        match attrs.get("type"):
            case "conv":
                net.append(ConvLayer(params["kernels"], params["bias"], int(attrs["stride"])))
            case "dense":
                net.append(DenseLayer(params["weights"], params["bias"]))
            case "relu":
                net.append(ReluLayer())
            case "max_pool":
                net.append(MaxPoolLayer(int(attrs["window"]), int(attrs["stride"])))
            case "avg_pool":
                net.append(AvgPoolLayer(int(attrs["window"]), int(attrs["stride"])))
            case other:
                raise ScatternetConfigError(f"Section [{name}] has unknown type {other!r}")
    return net


def save_network(path: str, net: Network) -> str:
    return write_checkpoint(path, network_sections(net))


def load_network(path: str) -> Network:
    return network_from_sections(read_checkpoint(path))


def write_kernels_pgm(path: str, layer: ConvLayer) -> str:
    """First input channel of every kernel, side by side with a one-pixel gap."""
    _, kw = layer.kernel_shape
    tiles = [np.pad(k[0], ((0, 0), (0, 1))) for k in layer.kernels]
    strip = np.concatenate(tiles, axis=1)[:, : layer.out_channels * (kw + 1) - 1]
    return write_pgm(path, strip)


def write_metrics_csv(path: str, rows: list[tuple[int, float, float]]) -> str:
    return write_csv(path, ("epoch", "loss", "accuracy"), rows)
