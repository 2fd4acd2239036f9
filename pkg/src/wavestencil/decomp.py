"""Domain geometry: the seven-region split, tilings, and halo enumeration.

Coordinates are extended-domain cell indices ``(i, j, k)`` along ``(x, y, z)``.
Top/Bottom cut the z axis, Front/Back cut y, Left/Right cut x.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .errors import ConfigError
from .grid import Extents

RADIUS = 4  # half-width of the 25-point stencil
ETA_RADIUS = 1  # half-width of the 7-point eta star


class RegionKind(enum.Enum):
    INNER = "inner"
    TOP = "top"
    BOTTOM = "bottom"
    FRONT = "front"
    BACK = "back"
    LEFT = "left"
    RIGHT = "right"

    @property
    def is_pml(self) -> bool:
        return self is not RegionKind.INNER


@dataclass(frozen=True)
class Box:
    """Axis-aligned half-open cell box: ``lo`` origin and ``extents`` per axis (x, y, z)."""

    lo: tuple[int, int, int]
    extents: tuple[int, int, int]

    @property
    def hi(self) -> tuple[int, int, int]:
        return tuple(a + e for a, e in zip(self.lo, self.extents))

    @property
    def volume(self) -> int:
        ex, ey, ez = self.extents
        return ex * ey * ez

    def contains(self, i: int, j: int, k: int) -> bool:
        (i0, j0, k0), (i1, j1, k1) = self.lo, self.hi
        return i0 <= i < i1 and j0 <= j < j1 and k0 <= k < k1

    def cells(self):
        (i0, j0, k0), (i1, j1, k1) = self.lo, self.hi
        for k in range(k0, k1):
            for j in range(j0, j1):
                for i in range(i0, i1):
                    yield (i, j, k)


@dataclass(frozen=True)
class Region(Box):
    kind: RegionKind = RegionKind.INNER


@dataclass(frozen=True)
class Tiling3:
    Dx: int
    Dy: int
    Dz: int

    def __post_init__(self):
        if min(self.Dx, self.Dy, self.Dz) < 1:
            raise ConfigError(f"tile dimensions must be positive, got {self}")

    def as_tuple(self):
        return (self.Dx, self.Dy, self.Dz)


@dataclass(frozen=True)
class Tiling2:
    Dx: int
    Dy: int

    def __post_init__(self):
        if min(self.Dx, self.Dy) < 1:
            raise ConfigError(f"tile dimensions must be positive, got {self}")

    def as_tuple(self):
        return (self.Dx, self.Dy)


@dataclass(frozen=True)
class HaloMapEntry:
    global_: tuple[int, int, int]
    local: tuple[int, int, int]


def decompose(extents: Extents, w: int) -> list[Region]:
    """Split the extended domain into the inner region and six PML walls.

    The order is inner, top, bottom, front, back, left, right.  With ``w == 0``
    the walls have zero volume.
    """
    nx, ny, nz = extents.as_tuple()
    if w < 0 or 2 * w >= min(nx, ny, nz):
        raise ConfigError(
            f"PML width {w} too large for extents {extents.as_tuple()}: need 2w < min extent"
        )
    mx, my, mz = nx - 2 * w, ny - 2 * w, nz - 2 * w
    R = RegionKind
    return [
        Region((w, w, w), (mx, my, mz), R.INNER),
        Region((0, 0, 0), (nx, ny, w), R.TOP),
        Region((0, 0, nz - w), (nx, ny, w), R.BOTTOM),
        Region((0, 0, w), (nx, w, mz), R.FRONT),
        Region((0, ny - w, w), (nx, w, mz), R.BACK),
        Region((0, w, w), (w, my, mz), R.LEFT),
        Region((nx - w, w, w), (w, my, mz), R.RIGHT),
    ]


def _splits(lo: int, extent: int, d: int):
    return [(lo + s, min(d, extent - s)) for s in range(0, extent, d)]


def tile3(region: Box, t: Tiling3) -> list[Box]:
    """Partition ``region`` into ``ceil(e/D)`` blocks per axis, clipping edge blocks."""
    if region.volume == 0:
        return []
    xs = _splits(region.lo[0], region.extents[0], t.Dx)
    ys = _splits(region.lo[1], region.extents[1], t.Dy)
    zs = _splits(region.lo[2], region.extents[2], t.Dz)
    return [
        Box((x, y, z), (ex, ey, ez))
        for (z, ez), (y, ey), (x, ex) in itertools.product(zs, ys, xs)
    ]


def tile2(region: Box, t: Tiling2) -> list[Box]:
    """Partition ``region`` into columns spanning its full z range."""
    if region.volume == 0:
        return []
    xs = _splits(region.lo[0], region.extents[0], t.Dx)
    ys = _splits(region.lo[1], region.extents[1], t.Dy)
    z, ez = region.lo[2], region.extents[2]
    return [Box((x, y, z), (ex, ey, ez)) for (y, ey), (x, ex) in itertools.product(ys, xs)]


def tiles_array(boxes: list[Box], pad: int) -> np.ndarray:
    """Pack boxes into an ``(n, 6)`` int64 array of padded ``z0, z1, y0, y1, x0, x1``."""
    out = np.empty((len(boxes), 6), dtype=np.int64)
    for n, b in enumerate(boxes):
        (i0, j0, k0), (i1, j1, k1) = b.lo, b.hi
        out[n] = (k0 + pad, k1 + pad, j0 + pad, j1 + pad, i0 + pad, i1 + pad)
    return out


@lru_cache(maxsize=256)
def cached_tiles(region: Region, tiling, pad: int) -> np.ndarray:
    boxes = tile2(region, tiling) if isinstance(tiling, Tiling2) else tile3(region, tiling)
    arr = tiles_array(boxes, pad)
    arr.setflags(write=False)
    return arr


def halo_cells(box: Box, r: int) -> list[tuple[int, int, int]]:
    """Cells within ``r`` of ``box`` along exactly one axis: the six face slabs a star stencil reads."""
    if r <= 0:
        return []
    lo, hi = box.lo, box.hi
    out = []
    for axis in range(3):
        others = [a for a in range(3) if a != axis]
        rng_a = range(lo[others[0]], hi[others[0]])
        rng_b = range(lo[others[1]], hi[others[1]])
        depth = list(range(lo[axis] - r, lo[axis])) + list(range(hi[axis], hi[axis] + r))
        for d in depth:
            for a in rng_a:
                for b in rng_b:
                    c = [0, 0, 0]
                    c[axis] = d
                    c[others[0]] = a
                    c[others[1]] = b
                    out.append(tuple(c))
    return out


@njit(cache=True, nogil=True)
def eta_face_map(zidx, xidx, yidx, ex, ey, ez):
    """One-conditional face mapping for a width-1 halo on an ``ex x ey x ez`` tile.

    Returns ``(ok, gi, gj, gk, si, sj, sk)``.  Global coordinates are relative
    to the tile origin; local ones index the ``(e+2)``-wide scratch box.
    ``ok`` is false for lanes with ``zidx >= 6`` and for lanes whose indices
    fall beyond a clipped face.
    """
    if zidx < 6:
        z = zidx & 1
        xzswap = zidx <= 1
        yzswap = (zidx & 2) == 2
        # face coordinate on the swapped axis: -1 or e (scratch 0 or e+1)
        e = ex if xzswap else (ey if yzswap else ez)
        sz = z * (e + 1)
        gz = z * (e + 1) - 1
        si = sz if xzswap else xidx + 1
        sj = sz if yzswap else yidx + 1
        sk = xidx + 1 if xzswap else (yidx + 1 if yzswap else sz)
        gi = gz if xzswap else xidx
        gj = gz if yzswap else yidx
        gk = xidx if xzswap else (yidx if yzswap else gz)
        zface = not (xzswap or yzswap)
        ok = (xzswap or gi < ex) and (yzswap or gj < ey) and (zface or gk < ez)
        return ok, gi, gj, gk, si, sj, sk
    return False, 0, 0, 0, 0, 0, 0


def eta_halo_map(zidx: int, xidx: int, yidx: int, nt: int) -> HaloMapEntry | None:
    """Halo fetch assignment for lane ``(xidx, yidx, zidx)`` of a cubic ``nt`` tile.

    Lanes with ``zidx < 6`` each own one cell of a width-1 face; the face is
    picked by ``zidx``: 0/1 low/high x, 2/3 low/high y, 4/5 low/high z.
    """
    ok, gi, gj, gk, si, sj, sk = eta_face_map(zidx, xidx, yidx, nt, nt, nt)
    if not ok:
        return None
    return HaloMapEntry((gi, gj, gk), (si, sj, sk))


def eta_halo_map_3pass(axis: int, side: int, u: int, v: int, nt: int) -> HaloMapEntry:
    """Per-axis halo assignment: the lane at ``(u, v)`` on the ``axis`` face fetches one cell."""
    if axis not in (0, 1, 2) or side not in (0, 1):
        raise ValueError(f"axis must be 0..2 and side 0..1, got {axis}, {side}")
    face = nt if side else -1
    g = [u, v]
    g.insert(axis, face)
    return HaloMapEntry(tuple(g), tuple(c + 1 for c in g))


def halo_lane_assignment(D: int, R: int) -> dict[int, list[int]]:
    """Halo offsets fetched by each lane along one axis of a ``D``-wide tile.

    Lanes ``0..R-1`` take the low side (offsets ``-R..-1``), lanes ``R..2R-1``
    the high side (offsets ``D..D+R-1``).  Requires ``D >= 2R``.
    """
    if D < 2 * R:
        raise ConfigError(f"lane-balanced halo fetch needs at least 2R={2 * R} lanes, got {D}")
    out: dict[int, list[int]] = {lane: [] for lane in range(D)}
    for lane in range(2 * R):
        out[lane].append(lane - R if lane < R else D + lane - R)
    return out
