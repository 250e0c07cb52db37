"""
Artifact formats shared by every module.

- CSV: header row, one record per line, floats with 17 significant digits.
- PGM: binary P5, 16-bit big-endian samples, row-major. Non-negative images
  (moduli, intensities) are scaled by their max; signed images are min-max scaled.
- Checkpoint: versioned plain text. The first line is `scatternet-checkpoint v1`;
  each section starts with `[name] key=value ...` (always `shape=AxB...`) and is
  followed by one decimal value per line.

Nothing here writes timestamps: identical inputs give byte-identical files.
"""

from dataclasses import dataclass, field
from typing import Iterable, Sequence
import pathlib

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scatternet.core.exceptions import ScatternetConfigError
from scatternet.core.helpers import save_bytes_to_file, save_text_to_file

CHECKPOINT_MAGIC = "scatternet-checkpoint"
CHECKPOINT_VERSION = 1
PGM_MAXVAL = 65535


def format_value(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines += [",".join(format_value(v) for v in row) for row in rows]
    return save_text_to_file("\n".join(lines) + "\n", path)


def pgm_bytes(image: ArrayLike) -> bytes:
    array = np.asarray(image, dtype=np.float64)
    if array.ndim != 2:
        raise ScatternetConfigError(f"PGM images must be 2D, got {array.ndim}D")
    low = min(float(array.min()), 0.0)
    span = float(array.max()) - low
    scaled = np.zeros_like(array) if span <= 0 else (array - low) / span
    samples = np.rint(scaled * PGM_MAXVAL).astype(">u2")
    height, width = array.shape
    header = f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + samples.tobytes(order="C")


def write_pgm(path: str, image: ArrayLike) -> str:
    return save_bytes_to_file(pgm_bytes(image), path)


@dataclass
class CheckpointSection:
    name: str
    attrs: dict[str, str] = field(default_factory=dict)
    values: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))


def format_checkpoint(sections: Sequence[CheckpointSection]) -> str:
    lines = [f"{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}"]
    for section in sections:
        values = np.asarray(section.values, dtype=np.float64)
        attrs = dict(section.attrs)
        attrs["shape"] = "x".join(str(n) for n in values.shape) or "0"
        header = " ".join(f"{key}={value}" for key, value in attrs.items())
        lines.append(f"[{section.name}] {header}")
        lines += [f"{v:.17g}" for v in values.ravel()]
    return "\n".join(lines) + "\n"


def parse_checkpoint(text: str) -> list[CheckpointSection]:
    lines = text.splitlines()
    if not lines or lines[0] != f"{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}":
        raise ScatternetConfigError("Not a scatternet checkpoint (bad header line)")

    sections: list[CheckpointSection] = []
    pending: list[float] = []

    def close_section():
        if not sections:
            return
        section = sections[-1]
        shape = tuple(int(n) for n in section.attrs["shape"].split("x"))
        expected = int(np.prod(shape)) if shape != (0,) else 0
        if len(pending) != expected:
            raise ScatternetConfigError(
                f"Section [{section.name}] declares {expected} values, found {len(pending)}"
            )
        values = np.array(pending, dtype=np.float64)
        section.values = values.reshape(shape) if expected else np.zeros(0)
        pending.clear()

    for line in lines[1:]:
        if line.startswith("["):
            close_section()
            name, _, rest = line[1:].partition("]")
            attrs = dict(item.split("=", 1) for item in rest.split())
            if "shape" not in attrs:
                raise ScatternetConfigError(f"Section [{name}] has no shape")
            sections.append(CheckpointSection(name=name, attrs=attrs))
        elif line.strip():
            if not sections:
                raise ScatternetConfigError("Values found before the first section")
            pending.append(float(line))
    close_section()
    return sections


def write_checkpoint(path: str, sections: Sequence[CheckpointSection]) -> str:
    return save_text_to_file(format_checkpoint(sections), path)


def read_checkpoint(path: str) -> list[CheckpointSection]:
    return parse_checkpoint(pathlib.Path(path).read_text(encoding="utf-8"))
