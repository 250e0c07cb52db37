"""Restricted Boltzmann machine and Markov chain types"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scatternet.core.exceptions import ScatternetDomainError, ScatternetShapeError
from scatternet.core.helpers import require_finite, spawn_rng

ROW_SUM_TOLERANCE = 1e-12


def _frozen(values: ArrayLike, dtype, name: str) -> NDArray:
    array = np.array(require_finite(values, name), dtype=dtype)
    array.flags.writeable = False
    return array


def _bits(values: ArrayLike, name: str) -> NDArray[np.uint8]:
    array = np.asarray(values)
    if array.ndim != 1 or not np.isin(array, (0, 1)).all():
        raise ScatternetDomainError(f"{name} must be a vector of 0/1 bits")
    bits = array.astype(np.uint8)
    bits.flags.writeable = False
    return bits


@dataclass(frozen=True)
class RbmParams:
    """Visible bias b (n_v), hidden bias c (n_h) and coupling W (n_v x n_h)."""

    b: NDArray[np.float64]
    c: NDArray[np.float64]
    W: NDArray[np.float64]

    def __post_init__(self):
        b = _frozen(self.b, np.float64, "visible bias")
        c = _frozen(self.c, np.float64, "hidden bias")
        W = _frozen(self.W, np.float64, "coupling")
        if b.ndim != 1 or c.ndim != 1 or W.shape != (b.size, c.size):
            raise ScatternetShapeError(
                "RBM parameter shapes disagree", (b.size, c.size), W.shape
            )
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "W", W)

    @classmethod
    def zeros(cls, n_visible: int, n_hidden: int) -> "RbmParams":
        return cls(np.zeros(n_visible), np.zeros(n_hidden), np.zeros((n_visible, n_hidden)))

    @classmethod
    def from_vector(cls, theta: ArrayLike, n_visible: int, n_hidden: int) -> "RbmParams":
        theta = np.asarray(theta, dtype=np.float64)
        b, c = theta[:n_visible], theta[n_visible : n_visible + n_hidden]
        return cls(b, c, theta[n_visible + n_hidden :].reshape(n_visible, n_hidden))

    @property
    def n_visible(self) -> int:
        return self.b.size

    @property
    def n_hidden(self) -> int:
        return self.c.size

    def as_vector(self) -> NDArray[np.float64]:
        """(b, c, W) concatenated, the layout optimizers update."""
        return np.concatenate([self.b, self.c, self.W.ravel()])


@dataclass(frozen=True)
class BinaryConfig:
    v: NDArray[np.uint8]
    h: NDArray[np.uint8]

    def __post_init__(self):
        object.__setattr__(self, "v", _bits(self.v, "visible units"))
        object.__setattr__(self, "h", _bits(self.h, "hidden units"))


@dataclass(frozen=True)
class ChainState:
    """
    A Gibbs chain: current configuration, sweeps done, the generator state
    (a PCG64 state dict) and the inverse temperature beta.
    """

    config: BinaryConfig
    steps: int
    rng_state: dict[str, Any]
    beta: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ScatternetDomainError(f"beta must be > 0, got {self.beta}")

    @classmethod
    def start(
        cls,
        v0: ArrayLike,
        n_hidden: int,
        seed: int,
        stream: int = 0,
        beta: float = 1.0,
    ) -> "ChainState":
        rng = spawn_rng(seed, stream)
        config = BinaryConfig(np.asarray(v0), np.zeros(n_hidden, dtype=np.uint8))
        return cls(config, 0, rng.bit_generator.state, beta)

    def generator(self) -> np.random.Generator:
        bit_generator = np.random.PCG64()
        bit_generator.state = self.rng_state
        return np.random.Generator(bit_generator)


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic matrix T[x, y] = P(next = y | current = x)."""

    matrix: NDArray[np.float64]

    def __post_init__(self):
        T = _frozen(self.matrix, np.float64, "transition matrix")
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
            raise ScatternetShapeError("transition matrices are square", None, T.shape)
        if (T < 0).any():
            raise ScatternetDomainError("transition probabilities must be >= 0")
        worst = float(np.abs(T.sum(axis=1) - 1.0).max())
        if worst > ROW_SUM_TOLERANCE:
            raise ScatternetDomainError(f"rows must sum to 1, worst deviation {worst!r}")
        object.__setattr__(self, "matrix", T)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SampleRun:
    """Visible/hidden samples kept at unit temperature, the joint energy after every sweep and the final chain."""

    visible: NDArray[np.uint8]
    hidden: NDArray[np.uint8]
    energies: NDArray[np.float64]
    final: ChainState


@dataclass(frozen=True)
class CdTrainingReport:
    """
    Trained parameters and one value per epoch: the exact KL(data || model)
    when the model is enumerable, else the mean squared reconstruction error
    (`metric` says which).
    """

    params: RbmParams
    trace: NDArray[np.float64]
    metric: str = field(default="exact_kl")
