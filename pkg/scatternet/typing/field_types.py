"""Wave field and scattering types"""

from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scatternet.core.exceptions import ScatternetDomainError, ScatternetShapeError
from scatternet.core.helpers import require_finite, require_odd


def _frozen_array(values: ArrayLike, dtype) -> NDArray:
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class Grid:
    """
    Regular grid: `shape` sample counts, `spacing` per axis (dimensionless length
    units) and the coordinate of sample 0 on each axis (`origin`).
    Coordinates of sample i on an axis are origin + i * spacing.
    """

    shape: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...]
    NDIM: ClassVar[int | None] = None

    def __post_init__(self):
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        spacing = tuple(float(h) for h in np.atleast_1d(self.spacing))
        origin = tuple(float(o) for o in np.atleast_1d(self.origin))
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)

        if self.NDIM is not None and len(shape) != self.NDIM:
            raise ScatternetShapeError(
                f"{type(self).__name__} needs {self.NDIM} axes", (self.NDIM,), shape
            )
        if not len(shape) == len(spacing) == len(origin):
            raise ScatternetShapeError("shape, spacing and origin disagree in length")
        if any(n < 1 for n in shape):
            raise ScatternetDomainError(f"Sample counts must be >= 1, got {shape}")
        if any(not np.isfinite(h) or h <= 0 for h in spacing):
            raise ScatternetDomainError(f"Spacing must be > 0, got {spacing}")
        require_finite(origin, "grid origin")

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, i: int) -> NDArray[np.float64]:
        return self.origin[i] + np.arange(self.shape[i]) * self.spacing[i]

    def axes(self) -> list[NDArray[np.float64]]:
        return [self.axis(i) for i in range(self.ndim)]

    def coordinates(self) -> list[NDArray[np.float64]]:
        return np.meshgrid(*self.axes(), indexing="ij")


@dataclass(frozen=True)
class Grid1D(Grid):
    NDIM: ClassVar[int | None] = 1

    @classmethod
    def regular(cls, n: int, spacing: float = 1.0, origin: float = 0.0) -> "Grid1D":
        return cls((n,), (spacing,), (origin,))

    @classmethod
    def spanning(cls, start: float, stop: float, n: int) -> "Grid1D":
        """n samples from start to stop inclusive."""
        if n < 2:
            raise ScatternetDomainError("A spanning grid needs at least 2 samples")
        return cls((n,), ((stop - start) / (n - 1),), (start,))


@dataclass(frozen=True)
class Grid2D(Grid):
    NDIM: ClassVar[int | None] = 2

    @classmethod
    def regular(
        cls, nx: int, ny: int, spacing: float = 1.0, origin=(0.0, 0.0)
    ) -> "Grid2D":
        return cls((nx, ny), (spacing, spacing), tuple(origin))


@dataclass(frozen=True)
class Grid3D(Grid):
    NDIM: ClassVar[int | None] = 3

    @classmethod
    def regular(
        cls, nx: int, ny: int, nz: int, spacing: float = 1.0, origin=(0.0, 0.0, 0.0)
    ) -> "Grid3D":
        return cls((nx, ny, nz), (spacing,) * 3, tuple(origin))

    @classmethod
    def centered(cls, n: int, spacing: float = 1.0) -> "Grid3D":
        """n^3 cube whose middle voxel sits at the origin (n odd)."""
        half = (n // 2) * spacing
        return cls((n, n, n), (spacing,) * 3, (-half, -half, -half))


@dataclass(frozen=True)
class WaveField:
    """Complex amplitudes sampled on a grid. Values are read-only."""

    grid: Grid
    values: NDArray[np.complex128]

    def __post_init__(self):
        values = require_finite(self.values, "wave field")
        if values.shape != self.grid.shape:
            raise ScatternetShapeError(
                "wave field does not match its grid", self.grid.shape, values.shape
            )
        object.__setattr__(self, "values", _frozen_array(values, np.complex128))

    def intensity(self) -> NDArray[np.float64]:
        return np.abs(self.values) ** 2

    def modulus(self) -> NDArray[np.float64]:
        return np.abs(self.values)


@dataclass(frozen=True)
class WaveVector:
    """k components per axis, in reciprocal length units."""

    components: tuple[float, ...]

    def __post_init__(self):
        components = tuple(float(c) for c in np.atleast_1d(self.components))
        require_finite(components, "wave vector")
        object.__setattr__(self, "components", components)

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.components))

    def as_array(self) -> NDArray[np.float64]:
        return np.array(self.components, dtype=np.float64)


@dataclass(frozen=True)
class PhysConstants:
    """Natural units by default: hbar = 1 so momentum and wave vector coincide."""

    hbar: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.hbar) or self.hbar <= 0:
            raise ScatternetDomainError(f"hbar must be > 0, got {self.hbar}")


@dataclass(frozen=True)
class ScatterPotential:
    """Real interaction potential U on a 3D grid (energy units)."""

    grid: Grid3D
    values: NDArray[np.float64]

    def __post_init__(self):
        if not isinstance(self.grid, Grid3D):
            raise ScatternetShapeError("scatter potentials live on a Grid3D")
        values = require_finite(self.values, "potential")
        if np.iscomplexobj(values):
            raise ScatternetDomainError("potential must be real-valued")
        if values.shape != self.grid.shape:
            raise ScatternetShapeError(
                "potential does not match its grid", self.grid.shape, values.shape
            )
        object.__setattr__(self, "values", _frozen_array(values, np.float64))

    def support(self) -> NDArray[np.bool_]:
        return self.values != 0


@dataclass(frozen=True)
class Screen:
    """Observation plane: the (x, y) samples of `grid` at height z."""

    grid: Grid2D
    z: float

    def points(self) -> NDArray[np.float64]:
        x, y = self.grid.coordinates()
        return np.stack([x, y, np.full_like(x, self.z)], axis=-1)


@dataclass(frozen=True)
class SlitAperture:
    count: int
    width: float
    separation: float
    screen_distance: float

    def __post_init__(self):
        if self.count < 1:
            raise ScatternetDomainError("an aperture needs at least one slit")
        if self.width <= 0:
            raise ScatternetDomainError(f"slit width must be > 0, got {self.width}")
        if self.count >= 2 and self.separation <= self.width:
            raise ScatternetDomainError(
                f"slit separation {self.separation} must exceed width {self.width}"
            )
        if self.screen_distance <= 0:
            raise ScatternetDomainError("screen distance must be > 0")

    @property
    def total_width(self) -> float:
        return (self.count - 1) * self.separation + self.width

    def centers(self) -> NDArray[np.float64]:
        return (np.arange(self.count) - (self.count - 1) / 2) * self.separation


@dataclass(frozen=True)
class ScatterKernel:
    """Square odd-sided complex kernel K[x', y'] for wave vector k, with bias b."""

    values: NDArray[np.complex128]
    k: float
    bias: complex = 0j
    spacing: float = field(default=1.0)

    def __post_init__(self):
        values = require_finite(self.values, "scatter kernel")
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ScatternetShapeError("scatter kernels are square", None, values.shape)
        require_odd(values.shape[0], "kernel window")
        require_finite([self.bias], "kernel bias")
        object.__setattr__(self, "values", _frozen_array(values, np.complex128))
        object.__setattr__(self, "bias", complex(self.bias))

    @property
    def window(self) -> int:
        return self.values.shape[0]
