"""Padded 3D scalar fields and the on-disk snapshot format.

Fields are stored as one flat buffer with x innermost.  A zero fringe of
``pad`` cells surrounds the extended domain so stencils can read their
neighbours without boundary branches.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .errors import ConfigError, SnapshotFormatError

MAGIC = b"WVF1"
_HEADER = struct.Struct("<4s3IBQ")

PRECISIONS = {
    "single": np.dtype(np.float32),
    "double": np.dtype(np.float64),
}
_ALIASES = {"f32": "single", "float32": "single", "f64": "double", "float64": "double"}
_CODES = {4: "single", 8: "double"}


def resolve_precision(precision) -> str:
    """Normalize a precision spelling (``f32``, ``double``, a dtype...) to a canonical name."""
    if isinstance(precision, np.dtype) or isinstance(precision, type):
        dt = np.dtype(precision)
        for name, ref in PRECISIONS.items():
            if dt == ref:
                return name
        raise ConfigError(f"unsupported dtype {dt}")
    key = str(precision).lower()
    key = _ALIASES.get(key, key)
    if key not in PRECISIONS:
        raise ConfigError(f"unknown precision {precision!r} (expected f32/f64)")
    return key


def dtype_of(precision) -> np.dtype:
    return PRECISIONS[resolve_precision(precision)]


@dataclass(frozen=True)
class Extents:
    nx: int
    ny: int
    nz: int

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"extent {name} must be a positive integer, got {v!r}")

    @property
    def volume(self) -> int:
        return self.nx * self.ny * self.nz

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @classmethod
    def cube(cls, n: int) -> "Extents":
        return cls(n, n, n)


@dataclass
class Grid3:
    """A padded scalar field.

    ``data`` is the flat buffer; :attr:`array` is a ``(z, y, x)`` view over it
    in padded coordinates and :attr:`interior` the view without padding.
    """

    extents: Extents
    pad: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 1 or self.data.size != self.padded_volume:
            raise ValueError("data length must equal the padded volume")

    @property
    def precision(self) -> str:
        return resolve_precision(self.data.dtype)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def padded_shape(self) -> tuple[int, int, int]:
        p2 = 2 * self.pad
        e = self.extents
        return (e.nz + p2, e.ny + p2, e.nx + p2)

    @property
    def padded_volume(self) -> int:
        sz, sy, sx = self.padded_shape
        return sz * sy * sx

    @property
    def array(self) -> np.ndarray:
        return self.data.reshape(self.padded_shape)

    @property
    def interior(self) -> np.ndarray:
        p = self.pad
        e = self.extents
        return self.array[p : p + e.nz, p : p + e.ny, p : p + e.nx]

    def __getitem__(self, ijk):
        i, j, k = ijk
        return self.data[linear_index(self, i, j, k)]

    def __setitem__(self, ijk, value):
        i, j, k = ijk
        self.data[linear_index(self, i, j, k)] = value

    def copy(self) -> "Grid3":
        return Grid3(self.extents, self.pad, self.data.copy())

    def padding_is_zero(self) -> bool:
        mask = np.ones(self.padded_shape, dtype=bool)
        p = self.pad
        e = self.extents
        mask[p : p + e.nz, p : p + e.ny, p : p + e.nx] = False
        return not np.any(self.array[mask])


def alloc(extents: Extents, pad: int, precision="double") -> Grid3:
    if pad < 0:
        raise ConfigError(f"pad must be non-negative, got {pad}")
    dt = dtype_of(precision)
    p2 = 2 * pad
    n = (extents.nx + p2) * (extents.ny + p2) * (extents.nz + p2)
    try:
        data = np.zeros(n, dtype=dt)
    except MemoryError as exc:
        raise ConfigError(f"cannot allocate {n} cells of {dt}") from exc
    return Grid3(extents, pad, data)


def linear_index(g: Grid3, i: int, j: int, k: int) -> int:
    """Offset of cell ``(i, j, k)`` (extended-domain coordinates) in ``g.data``."""
    p = g.pad
    e = g.extents
    if not (-p <= i < e.nx + p and -p <= j < e.ny + p and -p <= k < e.nz + p):
        raise IndexError(f"cell {(i, j, k)} outside padded box of {e} with pad {p}")
    sy = e.ny + 2 * p
    sx = e.nx + 2 * p
    return ((k + p) * sy + (j + p)) * sx + (i + p)


def max_abs(g: Grid3) -> float:
    inner = g.interior
    if inner.size == 0:
        return 0.0
    return float(np.max(np.abs(inner)))


def snapshot_write(g: Grid3, step: int, sink: BinaryIO) -> None:
    code = g.dtype.itemsize
    e = g.extents
    sink.write(_HEADER.pack(MAGIC, e.nx, e.ny, e.nz, code, step))
    payload = np.ascontiguousarray(g.interior, dtype=g.dtype.newbyteorder("<"))
    sink.write(payload.tobytes())


def snapshot_read(source: BinaryIO, pad: int = 0) -> tuple[Grid3, int]:
    """Read one snapshot; returns ``(grid, step)``.  ``pad`` sets the fringe of the new grid."""
    head = source.read(_HEADER.size)
    if len(head) < _HEADER.size:
        raise SnapshotFormatError("truncated header", len(head))
    magic, nx, ny, nz, code, step = _HEADER.unpack(head)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}", 0)
    if code not in _CODES:
        raise SnapshotFormatError(f"unknown precision code {code}", 16)
    if min(nx, ny, nz) < 1:
        raise SnapshotFormatError("zero extent in header", 4)
    dt = PRECISIONS[_CODES[code]]
    n = nx * ny * nz
    body = source.read(n * dt.itemsize)
    if len(body) < n * dt.itemsize:
        raise SnapshotFormatError(
            f"payload truncated: expected {n * dt.itemsize} bytes, got {len(body)}",
            _HEADER.size + len(body),
        )
    g = alloc(Extents(nx, ny, nz), pad, _CODES[code])
    values = np.frombuffer(body, dtype=dt.newbyteorder("<")).reshape(nz, ny, nx)
    g.interior[...] = values
    return g, step


def save_snapshot(g: Grid3, step: int, path) -> None:
    with open(path, "wb") as fh:
        snapshot_write(g, step, fh)


def load_snapshot(path, pad: int = 0) -> tuple[Grid3, int]:
    with open(path, "rb") as fh:
        return snapshot_read(fh, pad)
