"""Variant identifiers, name parsing and per-variant configuration rules."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np

from ..decomp import RADIUS, Tiling2, Tiling3
from ..errors import ConfigError
from ..grid import dtype_of, resolve_precision

DEFAULT_SCRATCH_BUDGET = 512 * 1024  # bytes per worker


class VariantId(enum.Enum):
    REFERENCE = "reference"
    GLOBAL3D = "gmem"
    CACHED3D_U = "smem_u"
    PML_ETA3 = "smem_eta_3"
    PML_ETA1 = "smem_eta_1"
    SEMI = "semi"
    STREAM_PLANES = "st_smem"
    STREAM_SHIFT = "st_reg_shft"
    STREAM_FIXED = "st_reg_fixed"

    @property
    def streaming(self) -> bool:
        return self in (VariantId.STREAM_PLANES, VariantId.STREAM_SHIFT, VariantId.STREAM_FIXED)

    @property
    def tiled3(self) -> bool:
        return not self.streaming and self is not VariantId.REFERENCE


ALL_VARIANTS = tuple(VariantId)

DEFAULT_TILING3 = Tiling3(8, 8, 8)
DEFAULT_TILING2 = Tiling2(16, 16)

# longest prefixes first so "st_reg_fixed" is not read as "st_reg_shft" etc.
_PREFIXES = sorted(((v.value, v) for v in VariantId), key=lambda p: -len(p[0]))
_DIMS = re.compile(r"^(\d+)(?:[x_](\d+))?(?:[x_](\d+))?$")


def parse_variant(name: str) -> tuple[VariantId, Tiling3 | Tiling2 | None]:
    """Map a table-style identifier such as ``gmem_8x8x8`` or ``st_reg_fixed_32x16``.

    A missing tile suffix selects the default tiling.  Returns the tiling that
    applies to the variant (``None`` for the reference sweep).
    """
    s = name.strip().lower()
    for prefix, vid in _PREFIXES:
        if s == prefix or s.startswith(prefix + "_"):
            rest = s[len(prefix) + 1:]
            break
    else:
        known = ", ".join(v.value for v in VariantId)
        raise ConfigError(f"unknown variant {name!r}; expected one of {known}")
    if vid is VariantId.REFERENCE:
        if rest:
            raise ConfigError(f"reference variant takes no tile suffix: {name!r}")
        return vid, None
    if not rest:
        return vid, (DEFAULT_TILING2 if vid.streaming else DEFAULT_TILING3)
    m = _DIMS.match(rest)
    if not m:
        raise ConfigError(f"cannot parse tile dimensions in {name!r}")
    dims = [int(g) for g in m.groups() if g is not None]
    if vid.streaming:
        if len(dims) != 2:
            raise ConfigError(f"{vid.value} takes two tile dimensions DxXDy, got {name!r}")
        return vid, Tiling2(*dims)
    if len(dims) != 3:
        raise ConfigError(f"{vid.value} takes three tile dimensions DxXDyXDz, got {name!r}")
    return vid, Tiling3(*dims)


@dataclass(frozen=True)
class KernelConfig:
    variant: VariantId
    tiling3: Tiling3 = DEFAULT_TILING3
    tiling2: Tiling2 = DEFAULT_TILING2
    workers: int = 1
    precision: str = "double"
    instrument: bool = False
    scratch_budget: int = DEFAULT_SCRATCH_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "precision", resolve_precision(self.precision))

    @classmethod
    def from_name(cls, name: str, **kw) -> "KernelConfig":
        vid, tiling = parse_variant(name)
        if isinstance(tiling, Tiling2):
            kw.setdefault("tiling2", tiling)
        elif isinstance(tiling, Tiling3):
            kw.setdefault("tiling3", tiling)
        return cls(vid, **kw)

    @property
    def name(self) -> str:
        v = self.variant
        if v is VariantId.REFERENCE:
            return v.value
        if v.streaming:
            return f"{v.value}_{self.tiling2.Dx}x{self.tiling2.Dy}"
        t = self.tiling3
        return f"{v.value}_{t.Dx}x{t.Dy}x{t.Dz}"

    @property
    def tile_dims(self) -> tuple[int, int, int]:
        """``(Dx, Dy, Dz)`` for reporting; 0 where the axis is not tiled."""
        if self.variant is VariantId.REFERENCE:
            return (0, 0, 0)
        if self.variant.streaming:
            return (self.tiling2.Dx, self.tiling2.Dy, 0)
        return self.tiling3.as_tuple()

    @property
    def word_size(self) -> int:
        return np.dtype(dtype_of(self.precision)).itemsize

    def scratch_bytes(self) -> int:
        """Per-worker scratch footprint of the variant's tile buffers."""
        R = RADIUS
        v = self.variant
        dx, dy, dz = self.tiling3.as_tuple()
        cx, cy = self.tiling2.as_tuple()
        if v is VariantId.CACHED3D_U:
            words = (dx + 2 * R) * (dy + 2 * R) * (dz + 2 * R)
        elif v in (VariantId.PML_ETA3, VariantId.PML_ETA1):
            words = (dx + 2) * (dy + 2) * (dz + 2)
        elif v is VariantId.SEMI:
            words = (R + 1) * dx * dy
        elif v is VariantId.STREAM_PLANES:
            words = (2 * R + 1) * (cx + 2 * R) * (cy + 2 * R)
        elif v in (VariantId.STREAM_SHIFT, VariantId.STREAM_FIXED):
            words = (2 * R + 1) * cx * cy + (cx + 2 * R) * (cy + 2 * R)
        else:
            words = 0
        return words * self.word_size

    def validate(self) -> "KernelConfig":
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        R = RADIUS
        v = self.variant
        if v is VariantId.CACHED3D_U and min(self.tiling3.as_tuple()) < 2 * R:
            raise ConfigError(
                f"{self.name}: lane-balanced halo fetch needs tile dims >= 2R = {2 * R} on every axis"
            )
        if v is VariantId.PML_ETA1:
            t = self.tiling3
            if not (t.Dx == t.Dy == t.Dz):
                raise ConfigError(f"{self.name}: one-conditional eta halo fetch needs a cubic tile")
            if t.Dx < 6:
                raise ConfigError(f"{self.name}: one-conditional eta halo fetch needs tile edge >= 6 (six faces)")
        need = self.scratch_bytes()
        if need > self.scratch_budget:
            raise ConfigError(
                f"{self.name}: scratch footprint {need} bytes exceeds budget {self.scratch_budget}"
            )
        return self


def default_suite(precision: str = "double", workers: int = 1, instrument: bool = False) -> list[KernelConfig]:
    """One configuration per variant at the default tile shapes."""
    return [
        KernelConfig(v, workers=workers, precision=precision, instrument=instrument).validate()
        for v in ALL_VARIANTS
    ]
