"""Grid, field, dyadic-scale and snapshot-format tests."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from b4nls.grid import (
    ComplexField,
    DyadicScale,
    Grid,
    GridError,
    as_scale,
    lattice_scales,
    read_snapshot,
    write_snapshot,
)


def test_grid_validation():
    with pytest.raises(GridError):
        Grid((32.0,), (0,))
    with pytest.raises(GridError):
        Grid((32.0,), (7,))  # odd
    with pytest.raises(GridError):
        Grid((32.0,), (2,))  # < 4
    with pytest.raises(GridError):
        Grid((-1.0,), (16,))
    with pytest.raises(GridError):
        Grid((32.0, 32.0), (16,))
    with pytest.raises(GridError):
        Grid((1.0,) * 3, (512, 512, 512))  # exceeds the point-count cap


def test_axis_symmetric_half_open():
    g = Grid((8.0,), (8,))
    x = g.axis(0)
    assert x[0] == -4.0 and x[-1] == 3.0
    assert np.allclose(np.diff(x), 1.0)


def test_freq_lattice_values():
    g = Grid((16.0,), (8,))
    xi = np.sort(g.freq_axis(0))
    expected = 2 * np.pi * np.arange(-4, 4) / 16.0
    assert np.allclose(xi, expected)


def test_spacing_and_volumes():
    g = Grid((4.0, 8.0), (4, 16))
    assert g.spacing == (1.0, 0.5)
    assert g.cell_volume == 0.5
    assert g.volume == 32.0


def test_field_validation_and_ops():
    g = Grid((8.0,), (8,))
    with pytest.raises(GridError):
        ComplexField(g, np.zeros(4, dtype=complex))
    with pytest.raises(GridError):
        ComplexField(g, np.zeros(8, dtype=complex), "banana")
    f = ComplexField(g, np.arange(8, dtype=complex))
    h = (f + f - f) * 2.0
    assert np.allclose(h.values, 2.0 * f.values)
    other = ComplexField(Grid((8.0,), (16,)), np.zeros(16, dtype=complex))
    with pytest.raises(GridError):
        f + other


def test_dyadic_scale():
    assert DyadicScale.from_value(8.0).k == 3
    assert DyadicScale.from_value(0.25).k == -2
    assert float(DyadicScale(5)) == 32.0
    with pytest.raises(ValueError):
        DyadicScale.from_value(3.0)
    assert DyadicScale(1) < DyadicScale(2)
    assert as_scale(4) == DyadicScale(2)
    assert as_scale(DyadicScale(7)) == DyadicScale(7)


def test_lattice_scales_cover_lattice():
    g = Grid((16.0,), (64,))
    scales = [s.value for s in lattice_scales(g)]
    assert min(scales) <= g.min_nonzero_freq()
    assert max(scales) >= g.max_freq()
    assert sorted(scales) == scales


def test_snapshot_round_trip(tmp_path):
    g = Grid((8.0, 4.0), (8, 4))
    rng = np.random.default_rng(0)
    f = ComplexField(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    path = tmp_path / "field.b4s"
    write_snapshot(path, f)
    back = read_snapshot(path)
    assert back.grid == g
    np.testing.assert_array_equal(back.values, f.values)


def test_snapshot_binary_layout(tmp_path):
    g = Grid((2.0,), (4,))
    f = ComplexField(g, np.array([1 + 2j, 3 + 4j, 5 + 6j, 7 + 8j]))
    path = tmp_path / "field.b4s"
    write_snapshot(path, f)
    raw = path.read_bytes()
    assert raw[:4] == b"B4NL"
    version, dim = struct.unpack_from("<II", raw, 4)
    assert version == 1 and dim == 1
    (points,) = struct.unpack_from("<I", raw, 12)
    assert points == 4
    (extent,) = struct.unpack_from("<d", raw, 16)
    assert extent == 2.0
    payload = struct.unpack_from("<8d", raw, 24)
    assert payload == (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0)


def test_snapshot_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.b4s"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(GridError):
        read_snapshot(path)


@settings(max_examples=25, deadline=None)
@given(
    dim=st.integers(1, 2),
    npts=st.sampled_from([4, 6, 8]),
    extent=st.floats(0.5, 100.0),
    seed=st.integers(0, 2**31 - 1),
)
def test_snapshot_round_trip_property(tmp_path_factory, dim, npts, extent, seed):
    g = Grid((extent,) * dim, (npts,) * dim)
    rng = np.random.default_rng(seed)
    f = ComplexField(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    path = tmp_path_factory.mktemp("snap") / "f.b4s"
    write_snapshot(path, f)
    back = read_snapshot(path)
    assert back.grid == g
    np.testing.assert_array_equal(back.values, f.values)
