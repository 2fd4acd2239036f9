import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavestencil.decomp import (
    RADIUS,
    Box,
    RegionKind,
    Tiling2,
    Tiling3,
    decompose,
    eta_halo_map,
    eta_halo_map_3pass,
    halo_cells,
    halo_lane_assignment,
    tile2,
    tile3,
    tiles_array,
)
from wavestencil.errors import ConfigError
from wavestencil.grid import Extents


def membership_counts(extents, regions):
    """Per-cell count of owning regions, filled box by box."""
    nx, ny, nz = extents.as_tuple()
    cnt = np.zeros((nz, ny, nx), dtype=np.int32)
    for r in regions:
        (i0, j0, k0), (i1, j1, k1) = r.lo, r.hi
        cnt[k0:k1, j0:j1, i0:i1] += 1
    return cnt


def test_decompose_12_cubed_volumes():
    regs = decompose(Extents.cube(12), 2)
    assert len(regs) == 7
    vols = {r.kind: r.volume for r in regs}
    assert regs[0].kind is RegionKind.INNER and regs[0].lo == (2, 2, 2)
    assert vols[RegionKind.INNER] == 512
    assert vols[RegionKind.TOP] == vols[RegionKind.BOTTOM] == 288
    assert vols[RegionKind.FRONT] == vols[RegionKind.BACK] == 192
    assert vols[RegionKind.LEFT] == vols[RegionKind.RIGHT] == 128
    assert sum(vols.values()) == 1728


def test_decompose_zero_width():
    regs = decompose(Extents(5, 6, 7), 0)
    assert regs[0].volume == 210 and regs[0].lo == (0, 0, 0)
    assert all(r.volume == 0 for r in regs[1:])
    assert all(r.kind.is_pml for r in regs[1:])


def test_decompose_16_12_10_membership():
    e = Extents(16, 12, 10)
    regs = decompose(e, 2)
    assert sum(r.volume for r in regs) == 1920
    assert np.all(membership_counts(e, regs) == 1)


def test_decompose_rejects_wide_pml():
    with pytest.raises(ConfigError):
        decompose(Extents(10, 10, 8), 4)
    with pytest.raises(ConfigError):
        decompose(Extents(10, 10, 10), -1)


@given(st.data())
def test_decompose_partition_property(data):
    nx, ny, nz = (data.draw(st.integers(1, 32)) for _ in range(3))
    w = data.draw(st.integers(0, (min(nx, ny, nz) - 1) // 2))
    e = Extents(nx, ny, nz)
    regs = decompose(e, w)
    assert np.all(membership_counts(e, regs) == 1)
    inner = regs[0]
    assert inner.lo == (w, w, w) and inner.hi == (nx - w, ny - w, nz - w)


def test_tile3_examples():
    assert tile3(Box((0, 0, 0), (8, 8, 8)), Tiling3(8, 8, 8)) == [Box((0, 0, 0), (8, 8, 8))]
    t = tile3(Box((0, 0, 0), (10, 8, 8)), Tiling3(8, 8, 8))
    assert [b.extents[0] for b in t] == [8, 2]
    assert tile3(Box((0, 0, 0), (0, 8, 8)), Tiling3(8, 8, 8)) == []
    with pytest.raises(ConfigError):
        Tiling3(0, 8, 8)


def test_tile2_examples():
    assert len(tile2(Box((0, 0, 0), (16, 16, 64)), Tiling2(16, 16))) == 1
    cols = tile2(Box((0, 0, 0), (20, 16, 64)), Tiling2(16, 16))
    assert [c.extents for c in cols] == [(16, 16, 64), (4, 16, 64)]
    with pytest.raises(ConfigError):
        Tiling2(4, 0)


def _box_strategy():
    return st.tuples(
        st.tuples(*(st.integers(0, 5) for _ in range(3))),
        st.tuples(*(st.integers(1, 32) for _ in range(3))),
    ).map(lambda t: Box(*t))


def _assert_partition(region, tiles):
    cover = np.zeros(region.extents[::-1], dtype=np.int32)
    for b in tiles:
        (i0, j0, k0), (i1, j1, k1) = b.lo, b.hi
        assert region.contains(i0, j0, k0) and region.contains(i1 - 1, j1 - 1, k1 - 1)
        lo = region.lo
        cover[k0 - lo[2]:k1 - lo[2], j0 - lo[1]:j1 - lo[1], i0 - lo[0]:i1 - lo[0]] += 1
    assert np.all(cover == 1)


@given(_box_strategy(), st.tuples(*(st.integers(1, 12) for _ in range(3))))
def test_tile3_partition_property(region, d):
    t = Tiling3(*d)
    tiles = tile3(region, t)
    ex, ey, ez = region.extents
    assert len(tiles) == -(-ex // d[0]) * -(-ey // d[1]) * -(-ez // d[2])
    _assert_partition(region, tiles)


@given(_box_strategy(), st.tuples(st.integers(1, 20), st.integers(1, 20)))
def test_tile2_partition_property(region, d):
    tiles = tile2(region, Tiling2(*d))
    assert all(b.lo[2] == region.lo[2] and b.extents[2] == region.extents[2] for b in tiles)
    _assert_partition(region, tiles)


def test_tiles_array_padded_order():
    arr = tiles_array([Box((1, 2, 3), (4, 5, 6))], 4)
    assert arr.tolist() == [[7, 13, 6, 11, 5, 9]]


def _star_halo_oracle(box, r):
    """Cells outside the box whose star distance to it is <= r along one axis."""
    (i0, j0, k0), (i1, j1, k1) = box.lo, box.hi
    out = set()
    for i in range(i0 - r, i1 + r):
        for j in range(j0 - r, j1 + r):
            for k in range(k0 - r, k1 + r):
                outside = [not (i0 <= i < i1), not (j0 <= j < j1), not (k0 <= k < k1)]
                if sum(outside) == 1:
                    out.add((i, j, k))
    return out


def test_halo_cells_examples():
    b = Box((0, 0, 0), (8, 8, 8))
    assert len(halo_cells(b, 4)) == 1536
    assert halo_cells(b, 0) == []
    assert len(halo_cells(b, 1)) == 384


@given(st.integers(0, 4), st.tuples(*(st.integers(2, 16) for _ in range(3))))
def test_halo_cells_formula(r, dims):
    dx, dy, dz = dims
    cells = halo_cells(Box((0, 0, 0), dims), r)
    assert len(cells) == 2 * r * (dx * dy + dx * dz + dy * dz)
    assert len(set(cells)) == len(cells)


def test_halo_cells_matches_oracle():
    b = Box((3, 1, 2), (5, 7, 4))
    for r in (1, 2, 4):
        assert set(halo_cells(b, r)) == _star_halo_oracle(b, r)


def test_eta_halo_map_examples():
    e = eta_halo_map(0, 3, 5, 8)
    assert e.global_ == (-1, 5, 3) and e.local == (0, 6, 4)
    e = eta_halo_map(5, 3, 5, 8)
    assert e.global_ == (3, 5, 8) and e.local == (4, 6, 9)
    assert eta_halo_map(6, 0, 0, 8) is None
    assert eta_halo_map(7, 3, 3, 8) is None


def test_eta_halo_map_3pass_examples():
    assert eta_halo_map_3pass(0, 0, 0, 0, 8).global_ == (-1, 0, 0)
    assert eta_halo_map_3pass(2, 1, 1, 2, 8).global_ == (1, 2, 8)
    with pytest.raises(ValueError):
        eta_halo_map_3pass(3, 0, 0, 0, 8)


def _sweep_one(nt):
    return [eta_halo_map(z, x, y, nt) for z in range(8) for x in range(nt) for y in range(nt)]


def _sweep_three(nt):
    return [
        eta_halo_map_3pass(a, s, u, v, nt)
        for a in range(3) for s in range(2) for u in range(nt) for v in range(nt)
    ]


@pytest.mark.parametrize("nt", [4, 8, 16])
def test_eta_maps_bijection(nt):
    one = [e for e in _sweep_one(nt) if e is not None]
    three = _sweep_three(nt)
    ref = set(halo_cells(Box((0, 0, 0), (nt, nt, nt)), 1))
    for entries in (one, three):
        g = [e.global_ for e in entries]
        assert len(g) == 6 * nt * nt
        assert len(set(g)) == len(g)
        assert set(g) == ref
        # local coordinates are the global ones shifted into the (nt+2)^3 scratch box
        for e in entries:
            assert e.local == tuple(c + 1 for c in e.global_)
            faces = [c in (-1, nt) for c in e.global_]
            assert sum(faces) == 1


def test_eta_3pass_nt4_count():
    assert len(_sweep_three(4)) == 96


def test_halo_lane_assignment_balanced_at_2r():
    D = 2 * RADIUS
    m = halo_lane_assignment(D, RADIUS)
    assert all(len(v) == 1 for v in m.values())
    offsets = sorted(o for v in m.values() for o in v)
    assert offsets == list(range(-RADIUS, 0)) + list(range(D, D + RADIUS))


def test_halo_lane_assignment_wider_tile():
    m = halo_lane_assignment(16, RADIUS)
    assert sum(len(v) for v in m.values()) == 2 * RADIUS
    assert all(not m[lane] for lane in range(2 * RADIUS, 16))
    with pytest.raises(ConfigError):
        halo_lane_assignment(7, RADIUS)


def test_halo_lane_offsets_cover_all_axis_halo():
    for D in (8, 12):
        got = {o for v in halo_lane_assignment(D, RADIUS).values() for o in v}
        assert got == set(itertools.chain(range(-RADIUS, 0), range(D, D + RADIUS)))
