"""
Outgoing Green function, first Born scattering, slit interference and the
scattering-derived convolution kernel.

A neuron is modelled as a scatterer with potential U. An incident wave psi
scatters off it and the field at r is

    psi(r) = incident(r) - sum_{r'} G(r, r') U(r') incident(r') dV

with G(r, r') = -exp(i k |r - r'|) / (4 pi |r - r'|). Collapsing the sum over
z' at fixed (x', y') gives the kernel K[x', y'](k); the neuron's response to a
patch psi is s = |sum K psi + b| with intensity S = s^2.

All sums run over C-contiguous arrays with numpy's pairwise reduction, so
results do not depend on how callers batch the work.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import simpson

from scatternet.core.artifacts import write_csv, write_pgm
from scatternet.core.exceptions import ScatternetDomainError, ScatternetShapeError
from scatternet.core.helpers import require_finite, require_odd
from scatternet.typing.field_types import (
    Grid1D,
    Grid2D,
    ScatterKernel,
    ScatterPotential,
    Screen,
    SlitAperture,
    WaveField,
)

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_SIZES = (3, 5, 7, 9)
SAMPLES_PER_WAVELENGTH = 8
QUADRATURE_PANELS = 10_000
# Points per chunk when summing sources; bounds the (points x sources) buffer.
_CHUNK = 512
_GRID_TOLERANCE = 1e-9


def _green(distance: NDArray[np.float64], k: float) -> NDArray[np.complex128]:
    return -np.exp(1j * k * distance) / (4 * np.pi * distance)


def green_outgoing(r: ArrayLike, r_src: ArrayLike, k: float) -> complex:
    """-exp(i k |r - r_src|) / (4 pi |r - r_src|)."""
    r, r_src = np.asarray(r, dtype=np.float64), np.asarray(r_src, dtype=np.float64)
    distance = float(np.linalg.norm(r - r_src))
    if distance == 0:
        raise ScatternetDomainError("Green function is singular at coincident points")
    return complex(_green(np.float64(distance), k))


def scattered_amplitude(
    points: NDArray[np.float64],
    sources: NDArray[np.float64],
    strengths: NDArray[np.complex128],
    k: float,
) -> NDArray[np.complex128]:
    """sum_s G(point, source_s) * strength_s for every point (points and sources are (n, 3))."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    out = np.zeros(len(points), dtype=np.complex128)
    if len(sources) == 0:
        return out
    for start in range(0, len(points), _CHUNK):
        chunk = points[start : start + _CHUNK]
        delta = chunk[:, None, :] - sources[None, :, :]
        distance = np.sqrt((delta**2).sum(axis=-1))
        if (distance == 0).any():
            raise ScatternetDomainError("observation point coincides with a scatterer")
        out[start : start + _CHUNK] = (_green(distance, k) * strengths[None, :]).sum(axis=1)
    return out


def _screen_indices(screen: Screen, potential: ScatterPotential) -> tuple:
    """Voxel indices of every screen point; the screen must sit on the potential's grid."""
    grid = potential.grid
    points = screen.points().reshape(-1, 3)
    origin, spacing = np.array(grid.origin), np.array(grid.spacing)
    fractional = (points - origin) / spacing
    indices = np.rint(fractional).astype(int)
    off_grid = np.abs(fractional - indices) > _GRID_TOLERANCE
    outside = (indices < 0) | (indices >= np.array(grid.shape))
    if off_grid.any() or outside.any():
        raise ScatternetDomainError("screen points must be samples of the potential grid")
    return tuple(indices.T)


def born_scatter(
    incident: WaveField, potential: ScatterPotential, screen: Screen, k: float
) -> WaveField:
    """First Born approximation of the field on `screen` (a plane of the potential's grid)."""
    if incident.grid != potential.grid:
        raise ScatternetShapeError(
            "incident field must live on the potential grid",
            potential.grid.shape,
            incident.grid.shape,
        )
    index = _screen_indices(screen, potential)
    if potential.support()[index].any():
        raise ScatternetDomainError("screen intersects the potential support")

    support = potential.support()
    coordinates = np.stack([c[support] for c in potential.grid.coordinates()], axis=-1)
    strengths = (
        potential.values[support] * incident.values[support] * potential.grid.cell_volume
    )
    scattered = scattered_amplitude(screen.points(), coordinates, strengths, k)
    values = incident.values[index] - scattered
    return WaveField(screen.grid, values.reshape(screen.grid.shape))


def slit_sources(
    aperture: SlitAperture,
    k: float,
    samples_per_wavelength: int = SAMPLES_PER_WAVELENGTH,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    The slit mask as point scatterers on the x axis (z = 0): each opening is
    split into equal cells no wider than wavelength/samples_per_wavelength and
    sampled at the cell midpoints. Returns (positions (n, 3), cell widths).
    """
    wavelength = 2 * np.pi / k
    cells = max(1, int(np.ceil(aperture.width * samples_per_wavelength / wavelength - 1e-9)))
    cell = aperture.width / cells
    offsets = -aperture.width / 2 + (np.arange(cells) + 0.5) * cell
    x = (aperture.centers()[:, None] + offsets[None, :]).ravel()
    positions = np.stack([x, np.zeros_like(x), np.zeros_like(x)], axis=-1)
    return positions, np.full(x.size, cell)


def double_slit_intensity(
    aperture: SlitAperture,
    k: float,
    screen: Grid1D,
    samples_per_wavelength: int = SAMPLES_PER_WAVELENGTH,
) -> NDArray[np.float64]:
    """
    Normalized screen intensity of a unit plane wave (along +z) scattered by
    the slit mask.

    The screen is an arc of radius `aperture.screen_distance` centred on the
    aperture; its samples are direction sines u = sin(theta), so fringe
    positions read directly as d sin(theta) = n wavelength. Only the scattered
    wave reaches the screen (the direct beam is not added).
    """
    if k <= 0:
        raise ScatternetDomainError(f"wave number must be > 0, got {k}")
    u = screen.axis(0)
    if np.abs(u).max() > 1:
        raise ScatternetDomainError("screen samples are direction sines in [-1, 1]")

    wavelength = 2 * np.pi / k
    distance = aperture.screen_distance
    arc = distance * (np.arcsin(u[-1]) - np.arcsin(u[0]))
    if wavelength >= abs(arc):
        raise ScatternetDomainError(
            f"wavelength {wavelength} is not smaller than the screen extent {abs(arc)}"
        )
    fraunhofer = 2 * aperture.total_width**2 / wavelength
    if distance < fraunhofer:
        logger.warning(
            "Screen is inside the far-field distance",
            extra={"screen_distance": distance, "far_field_distance": fraunhofer},
        )

    positions, cells = slit_sources(aperture, k, samples_per_wavelength)
    points = np.stack([distance * u, np.zeros_like(u), distance * np.sqrt(1 - u**2)], axis=-1)
    amplitude = scattered_amplitude(points, positions, cells.astype(np.complex128), k)
    intensity = np.abs(amplitude) ** 2
    return intensity / intensity.max()


def scatter_kernel(
    potential: ScatterPotential, k: float, window: int, bias: complex = 0j
) -> ScatterKernel:
    """
    K[x', y'] = sum_z' G(0, (x', y', z'), k) U(x', y', z') with the neuron at the
    grid's middle voxel. The voxel at distance 0 contributes nothing.
    """
    require_odd(window, "kernel window")
    grid = potential.grid
    center = [n // 2 for n in grid.shape]
    half = window // 2
    for axis in (0, 1):
        if center[axis] - half < 0 or center[axis] + half >= grid.shape[axis]:
            raise ScatternetDomainError(
                f"window {window} does not fit the grid extent {grid.shape[axis]}"
            )

    xs = np.arange(center[0] - half, center[0] + half + 1)
    ys = np.arange(center[1] - half, center[1] + half + 1)
    zs = np.arange(grid.shape[2])
    dx = ((xs - center[0]) * grid.spacing[0])[:, None, None]
    dy = ((ys - center[1]) * grid.spacing[1])[None, :, None]
    dz = ((zs - center[2]) * grid.spacing[2])[None, None, :]
    distance = np.sqrt(dx**2 + dy**2 + dz**2)

    safe = np.where(distance > 0, distance, 1.0)
    green = np.where(distance > 0, _green(safe, k), 0)
    block = potential.values[np.ix_(xs, ys, zs)]
    return ScatterKernel((green * block).sum(axis=2), k=k, bias=bias, spacing=grid.spacing[0])


def neuron_response(kernel: ScatterKernel, patch: WaveField) -> tuple[float, float]:
    """(s, S) with s = |sum K psi + b| and S = s^2."""
    if patch.values.shape != kernel.values.shape:
        raise ScatternetShapeError(
            "patch must match the kernel window", kernel.values.shape, patch.values.shape
        )
    s = float(abs(np.sum(kernel.values * patch.values) + kernel.bias))
    return s, s * s


def window_intensity(patch: WaveField) -> float:
    """Integral form of a neuron's intensity: sum |psi|^2 dA over the window."""
    return float(patch.intensity().sum() * patch.grid.cell_volume)


def _require_positive(k: float, r: float):
    if k <= 0 or r <= 0:
        raise ScatternetDomainError(f"k and r must be > 0, got k={k} r={r}")


def box_conv_sine(k: float, r: float, x: float | NDArray) -> float | NDArray:
    """Integral over a in [0, r] of sin(k (x + a)), in closed form."""
    _require_positive(k, r)
    return (2 / k) * np.sin(k * r / 2) * np.sin(k * np.asarray(x) + k * r / 2)


def envelope_intensity(k: float, r: float) -> float:
    """Peak intensity 4/k^2 sin^2(kr/2) of the box-convolved sine."""
    _require_positive(k, r)
    return float(4 / k**2 * np.sin(k * r / 2) ** 2)


def box_conv_sine_quadrature(
    k: float, r: float, x: float, panels: int = QUADRATURE_PANELS
) -> float:
    """Composite Simpson evaluation of the same integral."""
    _require_positive(k, r)
    a = np.linspace(0.0, r, panels + 1)
    return float(simpson(np.sin(k * (x + a)), x=a))


def write_kernel_csv(path: str, kernel: ScatterKernel) -> str:
    half = kernel.window // 2
    rows = (
        (i - half, j - half, float(v.real), float(v.imag))
        for (i, j), v in np.ndenumerate(kernel.values)
    )
    return write_csv(path, ("x", "y", "re", "im"), rows)


def write_kernel_pgm(path: str, kernel: ScatterKernel) -> str:
    return write_pgm(path, np.abs(kernel.values))


def write_profile_csv(path: str, screen: Grid1D, intensity: ArrayLike) -> str:
    intensity = require_finite(intensity, "intensity")
    return write_csv(path, ("position", "intensity"), zip(screen.axis(0), intensity))


def screen_plane(nx: int, ny: int, spacing: float, origin_xy, z: float) -> Screen:
    return Screen(Grid2D((nx, ny), (spacing, spacing), tuple(origin_xy)), z)
