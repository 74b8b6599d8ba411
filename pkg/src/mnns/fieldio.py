"""Flat binary serialization for sampled fields.

Format: a single ASCII header line

    MNF1 n m1 ... mn L1 ... Ln components\n

followed by raw little-endian float64 samples, component-major, each
component in C order with axis n varying slowest. Half-widths are written
with repr precision so grids round-trip exactly.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import FormatError
from .grid import ScalarField, TensorGrid, VectorField

MAGIC = "MNF1"

Field = Union[ScalarField, VectorField]


def _header(grid: TensorGrid, components: int) -> bytes:
    parts = [MAGIC, str(grid.n)]
    parts.extend(str(m) for m in grid.shape)
    parts.extend(repr(float(L)) for L in grid.half_widths)
    parts.append(str(components))
    return (" ".join(parts) + "\n").encode("ascii")


def write_components(fields: Sequence[ScalarField], path: Union[str, Path]) -> None:
    """Write any number of same-grid scalar blocks to one file."""
    if not fields:
        raise FormatError("cannot serialize an empty component list")
    grid = fields[0].grid
    for f in fields:
        f.grid.require_same(grid)
    with open(path, "wb") as fh:
        fh.write(_header(grid, len(fields)))
        for f in fields:
            fh.write(np.ascontiguousarray(f.samples, dtype="<f8").tobytes())


def write_field(field: Field, path: Union[str, Path]) -> None:
    if isinstance(field, VectorField):
        write_components(field.components, path)
    else:
        write_components((field,), path)


def _parse_header(line: bytes, where: str) -> tuple[TensorGrid, int]:
    try:
        text = line.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{where}: header is not ASCII") from exc
    tokens = text.split()
    if not tokens or tokens[0] != MAGIC:
        got = tokens[0] if tokens else "<empty>"
        raise FormatError(f"{where}: bad magic {got!r}, expected {MAGIC!r}")
    try:
        n = int(tokens[1])
        if len(tokens) != 2 + 2 * n + 1:
            raise ValueError("token count")
        shape = tuple(int(tok) for tok in tokens[2 : 2 + n])
        half_widths = tuple(float(tok) for tok in tokens[2 + n : 2 + 2 * n])
        components = int(tokens[2 + 2 * n])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{where}: malformed header {text.strip()!r}") from exc
    if components < 1:
        raise FormatError(f"{where}: component count must be positive")
    return TensorGrid(shape, half_widths), components


def read_components(
    path: Union[str, Path], periodic: bool = False
) -> tuple:
    """Read all scalar blocks from one file, in stored order.

    The periodic flag restores grid periodicity, which the byte layout does
    not encode.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.readline()
        grid, components = _parse_header(header, str(path))
        if periodic:
            grid = TensorGrid(grid.shape, grid.half_widths, periodic=True)
        count = components * int(np.prod(grid.numpy_shape))
        flat = np.fromfile(fh, dtype="<f8", count=count)
        if flat.size != count:
            raise FormatError(
                f"{path}: payload has {flat.size} samples, expected {count}"
            )
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after payload")
    blocks = flat.reshape((components,) + grid.numpy_shape)
    return tuple(ScalarField(grid, np.array(b)) for b in blocks)


def read_field(path: Union[str, Path], periodic: bool = False) -> Field:
    """Read one serialized field; one component gives a scalar, n a vector.

    Any other component count is a format error (use read_components for
    raw block access).
    """
    fields = read_components(path, periodic=periodic)
    grid = fields[0].grid
    if len(fields) == 1:
        return fields[0]
    if len(fields) == grid.n:
        return VectorField(grid, fields)
    raise FormatError(
        f"{path}: {len(fields)} components on an n={grid.n} grid is neither "
        f"scalar nor vector"
    )
