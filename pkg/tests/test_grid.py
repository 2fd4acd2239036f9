import io
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavestencil.errors import ConfigError, SnapshotFormatError
from wavestencil.grid import (
    Extents,
    alloc,
    linear_index,
    load_snapshot,
    max_abs,
    resolve_precision,
    save_snapshot,
    snapshot_read,
    snapshot_write,
)


def test_alloc_zero_filled():
    g = alloc(Extents(4, 4, 4), 4, "double")
    assert g.data.size == 12**3 == 1728
    assert not g.data.any()
    assert g.dtype == np.float64


def test_alloc_degenerate_single():
    g = alloc(Extents(1, 1, 1), 0, "single")
    assert g.data.size == 1 and g.data[0] == 0.0
    assert g.dtype == np.float32


def test_alloc_padded_volume():
    assert alloc(Extents(8, 8, 8), 4).data.size == 16**3


def test_extents_and_pad_validation():
    with pytest.raises(ConfigError):
        Extents(0, 4, 4)
    with pytest.raises(ConfigError):
        alloc(Extents(2, 2, 2), -1)


def test_precision_aliases():
    assert resolve_precision("f32") == "single"
    assert resolve_precision("f64") == "double"
    assert resolve_precision(np.float32) == "single"
    with pytest.raises(ConfigError):
        resolve_precision("f16")


@pytest.mark.parametrize(
    "ijk, expected",
    [((-4, -4, -4), 0), ((0, 0, 0), 4 * 144 + 4 * 12 + 4), ((3, 3, 3), 7 * 144 + 7 * 12 + 7)],
)
def test_linear_index_examples(ijk, expected):
    g = alloc(Extents(4, 4, 4), 4)
    assert linear_index(g, *ijk) == expected


def test_linear_index_out_of_bounds():
    g = alloc(Extents(4, 4, 4), 4)
    with pytest.raises(IndexError):
        linear_index(g, 8, 0, 0)
    with pytest.raises(IndexError):
        linear_index(g, 0, -5, 0)


@given(
    st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(0, 3)
)
def test_linear_index_bijective_unit_stride(nx, ny, nz, pad):
    g = alloc(Extents(nx, ny, nz), pad)
    seen = set()
    for k in range(-pad, nz + pad):
        for j in range(-pad, ny + pad):
            for i in range(-pad, nx + pad):
                off = linear_index(g, i, j, k)
                seen.add(off)
                if i + 1 < nx + pad:
                    assert linear_index(g, i + 1, j, k) == off + 1
    assert seen == set(range(g.padded_volume))


def test_indexing_matches_array_view():
    g = alloc(Extents(3, 4, 5), 2)
    g[1, 2, 3] = 7.0
    assert g.array[3 + 2, 2 + 2, 1 + 2] == 7.0
    assert g.interior[3, 2, 1] == 7.0


def test_max_abs_examples(rng):
    g = alloc(Extents(5, 5, 5), 4)
    assert max_abs(g) == 0.0
    g[2, 3, 1] = -3.5
    assert max_abs(g) == 3.5
    g.interior[...] = rng.standard_normal(g.interior.shape)
    # brute-force scan of the interior only
    best = 0.0
    for k in range(5):
        for j in range(5):
            for i in range(5):
                best = max(best, abs(float(g[i, j, k])))
    assert max_abs(g) == best


def test_max_abs_ignores_padding():
    g = alloc(Extents(2, 2, 2), 1)
    g.array[0, 0, 0] = 100.0
    assert max_abs(g) == 0.0
    assert not g.padding_is_zero()


@pytest.mark.parametrize("precision", ["single", "double"])
def test_snapshot_round_trip(precision, rng):
    g = alloc(Extents(8, 8, 8), 4, precision)
    g.interior[...] = rng.standard_normal(g.interior.shape)
    buf = io.BytesIO()
    snapshot_write(g, 42, buf)
    assert len(buf.getvalue()) == 4 + 12 + 1 + 8 + 512 * g.dtype.itemsize
    buf.seek(0)
    h, step = snapshot_read(buf, pad=4)
    assert step == 42
    assert h.extents == g.extents and h.precision == precision
    assert h.interior.tobytes() == g.interior.tobytes()
    assert h.padding_is_zero()


@given(
    st.integers(1, 6), st.integers(1, 6), st.integers(1, 6),
    st.sampled_from(["single", "double"]), st.integers(0, 2**40), st.integers(0, 2**32 - 1),
)
def test_snapshot_round_trip_property(nx, ny, nz, precision, step, seed):
    g = alloc(Extents(nx, ny, nz), 0, precision)
    g.interior[...] = np.random.default_rng(seed).standard_normal(g.interior.shape)
    buf = io.BytesIO()
    snapshot_write(g, step, buf)
    buf.seek(0)
    h, s = snapshot_read(buf)
    assert s == step and h.interior.tobytes() == g.interior.tobytes()


def test_snapshot_header_layout():
    g = alloc(Extents(2, 3, 4), 0, "double")
    buf = io.BytesIO()
    snapshot_write(g, 7, buf)
    raw = buf.getvalue()
    assert raw[:4] == b"WVF1"
    assert struct.unpack("<3I", raw[4:16]) == (2, 3, 4)
    assert raw[16] == 8
    assert struct.unpack("<Q", raw[17:25]) == (7,)


def _snapshot_bytes(precision="double"):
    g = alloc(Extents(2, 2, 2), 0, precision)
    g.interior[...] = 1.5
    buf = io.BytesIO()
    snapshot_write(g, 3, buf)
    return buf.getvalue()


def test_snapshot_truncated_payload():
    raw = _snapshot_bytes()
    with pytest.raises(SnapshotFormatError) as ei:
        snapshot_read(io.BytesIO(raw[:-3]))
    assert ei.value.offset == len(raw) - 3


def test_snapshot_truncated_header():
    with pytest.raises(SnapshotFormatError) as ei:
        snapshot_read(io.BytesIO(b"WVF1\x01"))
    assert ei.value.offset == 5


def test_snapshot_bad_magic():
    raw = bytearray(_snapshot_bytes())
    raw[:4] = b"XXXX"
    with pytest.raises(SnapshotFormatError) as ei:
        snapshot_read(io.BytesIO(bytes(raw)))
    assert ei.value.offset == 0


def test_snapshot_unknown_precision_code():
    raw = bytearray(_snapshot_bytes())
    raw[16] = 2
    with pytest.raises(SnapshotFormatError) as ei:
        snapshot_read(io.BytesIO(bytes(raw)))
    assert ei.value.offset == 16


def test_snapshot_file_helpers(tmp_path):
    g = alloc(Extents(3, 2, 1), 4, "single")
    g.interior[...] = 2.0
    p = tmp_path / "s.wvf"
    save_snapshot(g, 9, p)
    h, step = load_snapshot(p)
    assert step == 9 and np.array_equal(h.interior, g.interior)
