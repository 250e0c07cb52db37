"""Synthetic grating images whose class is the wave vector of the pattern"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from scatternet.core.exceptions import ScatternetDomainError
from scatternet.core.helpers import spawn_rng
from scatternet.typing.network_types import LabeledImages

DATASET_STREAM = 3


@dataclass(frozen=True)
class GratingDataset:
    """
    image_size: side of the square images, in pixels.
    orientations: wave-vector direction per class, in degrees from the x axis.
    wavelength: grating period in pixels (|k| = 2 pi / wavelength).
    samples_per_class: images generated for each class.
    noise: standard deviation of the additive Gaussian noise.
    """

    image_size: int = 16
    orientations: tuple[float, ...] = (0.0, 45.0, 90.0, 135.0)
    wavelength: float = 4.0
    samples_per_class: int = 500
    noise: float = 0.3

    def __post_init__(self):
        if self.image_size < 3:
            raise ScatternetDomainError(f"image size must be >= 3, got {self.image_size}")
        if len(self.orientations) < 2:
            raise ScatternetDomainError("a grating dataset needs at least 2 classes")
        if self.wavelength <= 0 or self.samples_per_class < 1 or self.noise < 0:
            raise ScatternetDomainError("wavelength, sample count and noise must be positive")

    @property
    def classes(self) -> int:
        return len(self.orientations)

    def wave_vector(self, label: int) -> NDArray[np.float64]:
        angle = np.deg2rad(self.orientations[label])
        return 2 * np.pi / self.wavelength * np.array([np.cos(angle), np.sin(angle)])


def gen_gratings(cfg: GratingDataset, seed: int, stream: int = DATASET_STREAM) -> LabeledImages:
    """
    I(x, y) = sin(k.(x, y) + phase) + noise, with x the column and y the row
    index. The phase is uniform per image; images are shuffled across classes.
    """
    rng = spawn_rng(seed, stream)
    y, x = np.mgrid[0 : cfg.image_size, 0 : cfg.image_size].astype(np.float64)
    labels = np.repeat(np.arange(cfg.classes), cfg.samples_per_class)
    labels = labels[rng.permutation(labels.size)]
    phases = rng.uniform(0.0, 2 * np.pi, labels.size)

    k = np.stack([cfg.wave_vector(label) for label in range(cfg.classes)])[labels]
    argument = k[:, 0, None, None] * x[None] + k[:, 1, None, None] * y[None]
    images = np.sin(argument + phases[:, None, None])
    if cfg.noise > 0:
        images += rng.normal(0.0, cfg.noise, images.shape)
    return LabeledImages(images, labels.astype(np.int64))
