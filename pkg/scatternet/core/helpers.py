import pathlib

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scatternet.core.exceptions import (
    ScatternetConfigError,
    ScatternetDomainError,
    ScatternetNonFiniteError,
)

UNIT_SUM_TOLERANCE = 1e-9


def require_finite(values: ArrayLike, name: str) -> NDArray:
    """Returns the values as an array, raising on the first NaN/inf (flat index)."""
    array = np.asarray(values)
    finite = np.isfinite(array)
    if not finite.all():
        index = int(np.flatnonzero(~finite.ravel())[0])
        raise ScatternetNonFiniteError(f"{name} must be finite", index)
    return array


def require_odd(size: int, name: str = "window") -> int:
    if size < 1 or size % 2 == 0:
        raise ScatternetDomainError(f"{name} size must be odd, got {size}")
    return size


def require_distribution(
    p: ArrayLike, name: str = "p", tolerance: float = UNIT_SUM_TOLERANCE
) -> NDArray[np.float64]:
    """Validates a discrete probability distribution: p >= 0 and sum(p) = 1 within tolerance."""
    array = np.asarray(require_finite(p, name), dtype=np.float64)
    if array.ndim != 1 or array.size == 0:
        raise ScatternetDomainError(f"{name} must be a non-empty 1D distribution")
    if (array < 0).any():
        raise ScatternetDomainError(f"{name} has negative entries")
    total = float(array.sum())
    if abs(total - 1.0) > tolerance:
        raise ScatternetDomainError(f"{name} sums to {total!r}, not 1")
    return array


def spawn_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator per stream id; same (seed, stream) gives the same draws."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def parse_float_list(text: str) -> list[float]:
    """Parses comma-separated numbers, as used for CLI beta schedules."""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise ScatternetConfigError(f"Invalid number list: {text}") from e


def parse_param_value(text: str) -> int | float | list[float] | str:
    if "," in text:
        return parse_float_list(text)
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_param_pairs(pairs: list[str] | None) -> dict:
    """Parses `key=value` CLI pairs into typed values."""
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ScatternetConfigError(f"Expected key=value, got {pair!r}")
        params[key.strip()] = parse_param_value(value.strip())
    return params


def save_bytes_to_file(content: bytes, file_path: str):
    path = pathlib.Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(content)
    return str(path)


def save_text_to_file(content: str, file_path: str):
    return save_bytes_to_file(content.encode("utf-8"), file_path)
