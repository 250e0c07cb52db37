"""Layer and tensor types of the from-scratch CNN stack"""

from dataclasses import dataclass, field
from typing import Literal, TypedDict, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scatternet.core.exceptions import ScatternetDomainError, ScatternetShapeError
from scatternet.core.helpers import require_finite, require_odd

PROBABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FeatureTensor:
    """Real feature map with shape (channels, height, width)."""

    values: NDArray[np.float64]

    def __post_init__(self):
        values = np.asarray(require_finite(self.values, "feature tensor"), dtype=np.float64)
        if values.ndim != 3:
            raise ScatternetShapeError(
                "feature tensors are (channels, height, width)", None, values.shape
            )
        if min(values.shape) < 1:
            raise ScatternetShapeError("feature tensor dims must be >= 1", None, values.shape)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_image(cls, image: ArrayLike) -> "FeatureTensor":
        """A single-channel tensor from a 2D image."""
        return cls(np.asarray(image, dtype=np.float64)[None, :, :])

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


@dataclass
class ConvLayer:
    """
    Shared kernels (out_ch, in_ch, kh, kw) and one bias per output channel.
    Applied as a valid-region cross-correlation (no kernel flip).
    """

    kernels: NDArray[np.float64]
    bias: NDArray[np.float64]
    stride: int = 1
    kind: Literal["conv"] = field(default="conv", init=False)

    def __post_init__(self):
        self.kernels = np.array(require_finite(self.kernels, "kernels"), dtype=np.float64)
        self.bias = np.array(require_finite(self.bias, "conv bias"), dtype=np.float64)
        if self.kernels.ndim != 4:
            raise ScatternetShapeError(
                "conv kernels are (out_ch, in_ch, kh, kw)", None, self.kernels.shape
            )
        require_odd(self.kernels.shape[2], "kernel height")
        require_odd(self.kernels.shape[3], "kernel width")
        if self.bias.shape != (self.out_channels,):
            raise ScatternetShapeError(
                "one bias per output channel", (self.out_channels,), self.bias.shape
            )
        if self.stride < 1:
            raise ScatternetDomainError(f"stride must be >= 1, got {self.stride}")

    @property
    def out_channels(self) -> int:
        return self.kernels.shape[0]

    @property
    def in_channels(self) -> int:
        return self.kernels.shape[1]

    @property
    def kernel_shape(self) -> tuple[int, int]:
        return self.kernels.shape[2], self.kernels.shape[3]

    def params(self) -> dict[str, NDArray[np.float64]]:
        return {"kernels": self.kernels, "bias": self.bias}


@dataclass
class DenseLayer:
    """Fully connected classifier layer; inputs are flattened in C order."""

    weights: NDArray[np.float64]
    bias: NDArray[np.float64]
    kind: Literal["dense"] = field(default="dense", init=False)

    def __post_init__(self):
        self.weights = np.array(require_finite(self.weights, "weights"), dtype=np.float64)
        self.bias = np.array(require_finite(self.bias, "dense bias"), dtype=np.float64)
        if self.weights.ndim != 2:
            raise ScatternetShapeError("dense weights are (outputs, inputs)", None, self.weights.shape)
        if self.bias.shape != (self.weights.shape[0],):
            raise ScatternetShapeError(
                "one bias per output", (self.weights.shape[0],), self.bias.shape
            )

    @property
    def inputs(self) -> int:
        return self.weights.shape[1]

    @property
    def outputs(self) -> int:
        return self.weights.shape[0]

    def params(self) -> dict[str, NDArray[np.float64]]:
        return {"weights": self.weights, "bias": self.bias}


@dataclass
class ReluLayer:
    kind: Literal["relu"] = field(default="relu", init=False)

    def params(self) -> dict[str, NDArray[np.float64]]:
        return {}


@dataclass
class MaxPoolLayer:
    window: int
    stride: int
    kind: Literal["max_pool"] = field(default="max_pool", init=False)

    def __post_init__(self):
        if self.window < 1 or self.stride < 1:
            raise ScatternetDomainError("pool window and stride must be >= 1")

    def params(self) -> dict[str, NDArray[np.float64]]:
        return {}


@dataclass
class AvgPoolLayer:
    window: int
    stride: int
    kind: Literal["avg_pool"] = field(default="avg_pool", init=False)

    def __post_init__(self):
        if self.window < 1 or self.stride < 1:
            raise ScatternetDomainError("pool window and stride must be >= 1")

    def params(self) -> dict[str, NDArray[np.float64]]:
        return {}


Layer = Union[ConvLayer, DenseLayer, ReluLayer, MaxPoolLayer, AvgPoolLayer]
Network = list[Layer]
Gradients = list[dict[str, NDArray[np.float64]]]


class LayerSpec(TypedDict, total=False):
    """
    Layer description consumed by init_network.

    type: "conv" | "relu" | "max_pool" | "avg_pool" | "dense"
    out_channels, kernel_size, stride: conv layers
    window, stride: pooling layers
    outputs: dense layers
    """

    type: str
    out_channels: int
    kernel_size: int
    stride: int
    window: int
    outputs: int


@dataclass(frozen=True)
class LossReport:
    """Loss in nats, model class probabilities and the gradient w.r.t. the logits."""

    loss: float
    probabilities: NDArray[np.float64]
    logit_gradient: NDArray[np.float64]

    def __post_init__(self):
        probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if (probabilities < 0).any():
            raise ScatternetDomainError("class probabilities must be >= 0")
        total = float(probabilities.sum())
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ScatternetDomainError(f"class probabilities sum to {total!r}, not 1")


@dataclass
class ForwardCache:
    """Per-layer inputs and max-pool routes recorded by a forward pass."""

    inputs: list[NDArray[np.float64]] = field(default_factory=list)
    routes: dict[int, NDArray[np.int64]] = field(default_factory=dict)
    logits: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class GradientCheckReport:
    """Relative error per parameter array (keyed `layer<i>.<param>`) and skipped entries."""

    errors: dict[str, float]
    skipped: int
    checked: int

    @property
    def max_error(self) -> float:
        return max(self.errors.values(), default=0.0)


@dataclass(frozen=True)
class LabeledImages:
    """Single-channel images (n, height, width) with one integer class label each."""

    images: NDArray[np.float64]
    labels: NDArray[np.int64]

    def __post_init__(self):
        if self.images.ndim != 3:
            raise ScatternetShapeError("images must be (n, height, width)", (None, None, None), self.images.shape)
        if self.labels.shape != (self.images.shape[0],):
            raise ScatternetShapeError("one label per image", (self.images.shape[0],), self.labels.shape)

    def __len__(self) -> int:
        return len(self.labels)
