"""
Complex wave fields on regular grids, plane waves and the translation operator.

The translation operator D(a) = exp(i k.a) acts on a plane wave as a phase
factor and on a sampled function as the Taylor series
exp(a d/dx) f(x) = sum_n a^n/n! f^(n)(x) = f(x + a). Units are natural
(hbar = 1) and every field is a stationary snapshot (no exp(-i w t) factor).
"""

from math import factorial
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray

from scatternet.core.artifacts import write_csv, write_pgm
from scatternet.core.exceptions import ScatternetDomainError, ScatternetShapeError
from scatternet.core.helpers import require_finite
from scatternet.typing.field_types import (
    Grid,
    Grid1D,
    PhysConstants,
    WaveField,
    WaveVector,
)

# Higher finite-difference orders are dominated by rounding at double precision.
MAX_DERIVATIVE_ORDER = 8


def _as_vector(value: WaveVector | float | Sequence[float] | ArrayLike) -> NDArray:
    if isinstance(value, WaveVector):
        return value.as_array()
    return np.atleast_1d(np.asarray(value, dtype=np.float64))


def plane_wave(grid: Grid, k: WaveVector, amplitude: float = 1.0) -> WaveField:
    """amplitude * exp(i k.x) at every grid sample."""
    kv = _as_vector(k)
    if kv.size != grid.ndim:
        raise ScatternetShapeError(
            "wave vector and grid dimensions differ", (grid.ndim,), (kv.size,)
        )
    phase = sum(kv[i] * x for i, x in enumerate(grid.coordinates()))
    return WaveField(grid, amplitude * np.exp(1j * phase))


def translation_phase(
    k: WaveVector | float | Sequence[float], a: float | Sequence[float]
) -> complex:
    """exp(i k.a): the translation operator's eigenvalue on a plane wave."""
    kv, av = _as_vector(k), _as_vector(a)
    if kv.size != av.size:
        raise ScatternetShapeError(
            "wave vector and displacement dimensions differ", (kv.size,), (av.size,)
        )
    return complex(np.exp(1j * float(np.dot(kv, av))))


def momentum_translation_phase(
    p: float | Sequence[float],
    a: float | Sequence[float],
    constants: PhysConstants = PhysConstants(),
) -> complex:
    """exp(i a.p / hbar), the momentum form of the same operator."""
    return translation_phase(_as_vector(p) / constants.hbar, a)


def central_difference_weights(order: int, half_width: int) -> NDArray[np.float64]:
    """Weights w_j, j = -m..m, with sum_j w_j f(x + j h) ~ h^order f^(order)(x)."""
    if half_width * 2 < order:
        raise ScatternetDomainError(
            f"a {2 * half_width + 1}-point stencil cannot resolve order {order}"
        )
    offsets = np.arange(-half_width, half_width + 1, dtype=np.float64)
    powers = np.arange(offsets.size)
    vandermonde = offsets[None, :] ** powers[:, None]
    rhs = np.zeros(offsets.size)
    rhs[order] = factorial(order)
    return np.linalg.solve(vandermonde, rhs)


def stencil_half_width(order: int) -> int:
    """Central stencil matched to the derivative order (fourth-order accurate)."""
    return (order + 1) // 2 + 1


def series_margin(n_terms: int) -> int:
    """Samples at each end of a translate_series result that see edge padding."""
    return stencil_half_width(n_terms)


def derivative(f: WaveField, order: int) -> NDArray[np.complex128]:
    """order-th derivative of a 1D field by central differences (edge-padded)."""
    if f.grid.ndim != 1:
        raise ScatternetShapeError("derivatives are taken on 1D fields", (1,), (f.grid.ndim,))
    m = stencil_half_width(order)
    weights = central_difference_weights(order, m) / f.grid.spacing[0] ** order
    padded = np.pad(f.values, m, mode="edge")
    return sliding_window_view(padded, 2 * m + 1) @ weights


def translate_series(
    f: WaveField,
    a: float,
    n_terms: int,
    max_order: int = MAX_DERIVATIVE_ORDER,
) -> WaveField:
    """
    Truncated translation series f + sum_{n=1..n_terms} a^n/n! f^(n).

    Derivatives use central stencils; the `series_margin(n_terms)` samples at
    either end are contaminated by edge padding and carry no accuracy guarantee.
    """
    if n_terms < 1:
        raise ScatternetDomainError(f"n_terms must be >= 1, got {n_terms}")
    if n_terms > max_order:
        raise ScatternetDomainError(
            f"n_terms {n_terms} exceeds the derivative order cap {max_order}"
        )
    if f.grid.ndim != 1:
        raise ScatternetShapeError("translate_series needs a 1D field", (1,), (f.grid.ndim,))
    if a == 0:
        return f

    total = np.array(f.values, dtype=np.complex128)
    for n in range(1, n_terms + 1):
        total += (a**n / factorial(n)) * derivative(f, n)
    return WaveField(f.grid, total)


def shift_exact(f: WaveField, a: int) -> WaveField:
    """Moves samples by a whole number of positions: out[i] = f[i - a], zero filled."""
    if f.grid.ndim != 1:
        raise ScatternetShapeError("shift_exact needs a 1D field", (1,), (f.grid.ndim,))
    n = f.grid.shape[0]
    if abs(a) >= n:
        raise ScatternetDomainError(f"shift {a} is not smaller than {n} samples")

    out = np.zeros(n, dtype=np.complex128)
    if a >= 0:
        out[a:] = f.values[: n - a]
    else:
        out[:a] = f.values[-a:]
    return WaveField(f.grid, out)


def normalize(f: WaveField) -> WaveField:
    """Scales the field so that sum |psi|^2 = 1."""
    norm = float(np.sqrt(f.intensity().sum()))
    if norm == 0:
        raise ScatternetDomainError("cannot normalize a zero field")
    return WaveField(f.grid, f.values / norm)


def from_intensity(grid: Grid, image: ArrayLike) -> WaveField:
    """Reads a non-negative image as a real wave function, psi = sqrt(I)."""
    intensity = np.asarray(require_finite(image, "image"), dtype=np.float64)
    if (intensity < 0).any():
        raise ScatternetDomainError("image intensities must be >= 0")
    return WaveField(grid, np.sqrt(intensity))


def sampled(grid: Grid1D, values: ArrayLike) -> WaveField:
    return WaveField(grid, np.asarray(values, dtype=np.complex128))


def write_field_csv(path: str, f: WaveField) -> str:
    flat = f.values.ravel()
    rows = ((i, float(v.real), float(v.imag)) for i, v in enumerate(flat))
    return write_csv(path, ("index", "re", "im"), rows)


def write_field_pgm(path: str, f: WaveField) -> str:
    modulus = f.modulus()
    if modulus.ndim == 1:
        modulus = modulus[None, :]
    if modulus.ndim != 2:
        raise ScatternetShapeError("PGM export needs a 1D or 2D field", (2,), (modulus.ndim,))
    return write_pgm(path, modulus)
