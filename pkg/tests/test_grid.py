import numpy as np
import pytest

from spacetime_crystal.errors import GridMismatch
from spacetime_crystal.grid import (
    GridSpec,
    SpacetimeField,
    Units,
    inner,
    make_gaussian,
    norm2,
    normalize,
    plane_wave,
    point_field,
    random_field,
    transform,
)


@pytest.mark.parametrize("bad", [dict(nx=1), dict(nx=9), dict(nt=2), dict(nt=0), dict(lx=0.0), dict(lt=-1.0), dict(lx=np.inf)])
def test_gridspec_rejects_bad_sizes(bad):
    args = dict(nx=8, nt=8, lx=1.0, lt=1.0) | bad
    with pytest.raises(ValueError):
        GridSpec(**args)


def test_units_must_be_positive():
    with pytest.raises(ValueError):
        Units(hbar=0.0)
    with pytest.raises(ValueError):
        Units(m=-1.0)


def test_axes_and_frequencies(small_grid):
    g = small_grid
    assert g.dx == pytest.approx(0.5)
    assert g.dt == pytest.approx(0.5)
    assert g.k[1] == pytest.approx(2 * np.pi / g.lx)
    assert g.w[1] == pytest.approx(2 * np.pi / g.lt)
    assert g.q2().shape == g.shape


def test_plane_wave_sign_convention(small_grid):
    # e^{i(w t - k x)}
    g = small_grid
    f = plane_wave(g, 2, 3)
    X, T = g.mesh()
    expected = np.exp(1j * (g.w[3] * T - g.k[2] * X)) / np.sqrt(g.lx * g.lt)
    np.testing.assert_allclose(f.values, expected, atol=1e-13)


def test_plane_waves_are_orthonormal(small_grid):
    a, b = plane_wave(small_grid, 1, 2), plane_wave(small_grid, 1, 3)
    assert inner(a, a) == pytest.approx(1.0)
    assert abs(inner(a, b)) < 1e-13


def test_transform_round_trip(small_grid, rng):
    f = random_field(small_grid, rng)
    back = transform(transform(f, "momentum"), "position")
    np.testing.assert_allclose(back.values, f.values, atol=1e-13)
    assert norm2(f.momentum) == pytest.approx(norm2(f), rel=1e-13)


def test_values_are_read_only(small_grid):
    f = point_field(small_grid, 0, 0)
    with pytest.raises(ValueError):
        f.values[0, 0] = 2.0


def test_inner_rejects_mismatched_grids(small_grid):
    other = GridSpec(16, 24, 16.0, 12.0)
    with pytest.raises(GridMismatch):
        inner(point_field(small_grid, 0, 0), point_field(other, 0, 0))


def test_normalize_zero_field_raises(small_grid):
    with pytest.raises(ValueError):
        normalize(SpacetimeField(small_grid, np.zeros(small_grid.shape)))


def test_gaussian_widths_and_centre():
    g = GridSpec(256, 256, 40.0, 40.0)
    f = make_gaussian(g, 15.0, 22.0, 1.5, 2.0)
    rho = np.abs(f.values) ** 2 * g.cell
    X, T = g.mesh()
    assert np.sum(rho) == pytest.approx(1.0)
    assert np.sum(rho * X) == pytest.approx(15.0, abs=1e-8)
    assert np.sum(rho * T) == pytest.approx(22.0, abs=1e-8)
    assert np.sqrt(np.sum(rho * (X - 15) ** 2)) == pytest.approx(1.5, rel=1e-8)
    assert not f.flags


def test_gaussian_wraps_smoothly_across_the_edge():
    g = GridSpec(64, 64, 16.0, 16.0)
    f = make_gaussian(g, 0.0, 0.0, 1.0, 1.0)
    # the mirror sample across x = 0 has the same weight
    assert abs(f.values[1, 0]) == pytest.approx(abs(f.values[-1, 0]))


def test_gaussian_flags_unresolved_width(small_grid):
    f = make_gaussian(small_grid, 8.0, 6.0, 0.5, 2.0)
    assert "width-unresolvable" in f.flags


@pytest.mark.parametrize("args", [(np.nan, 1.0, 1.0, 1.0), (1.0, 1.0, 0.0, 1.0), (100.0, 1.0, 1.0, 1.0)])
def test_gaussian_rejects_bad_input(small_grid, args):
    with pytest.raises(ValueError):
        make_gaussian(small_grid, *args)


def test_gaussian_peak_sits_on_nearest_grid_point():
    g = GridSpec(64, 48, 16.0, 12.0)
    f = make_gaussian(g, 5.1, 7.3, 1.2, 1.0, k0=1.0, w0=-2.0)
    ix, it = np.unravel_index(np.argmax(np.abs(f.values)), g.shape)
    assert (ix, it) == g.nearest_index(5.1, 7.3)


def test_gaussian_carrier_lands_in_its_k_bin():
    g = GridSpec(64, 32, 32.0, 16.0)
    f = make_gaussian(g, 16.0, 8.0, 4.0, 3.0, k0=2 * np.pi / g.lx * 5)
    ik, iw = np.unravel_index(np.argmax(np.abs(f.momentum.values)), g.shape)
    assert (ik, iw) == (5, 0)
