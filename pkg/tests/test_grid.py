import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riccati_scattering.grid import Grid, GridFunction, SpectralFunction, same_grid


def test_cell_lattice_has_boundary_at_zero(grid):
    x = grid.x
    assert len(x) == grid.N
    assert np.isclose(x[grid.N // 2 - 1], -grid.h / 2)
    assert np.isclose(x[grid.N // 2], grid.h / 2)
    assert np.isclose(grid.k[grid.M], 0.0)


def test_kmax_is_a_floor():
    assert Grid.with_kmax(20, 2048, 40).M == 1024
    g = Grid.with_kmax(20, 2048, 200)
    assert g.k_max >= 200


def test_bad_grid_rejected():
    with pytest.raises(ValueError):
        Grid(N=7)
    with pytest.raises(ValueError):
        Grid(X=-1)


def test_grid_function_sampling():
    f = GridFunction(0.0, 0.5, np.array([0.0, 1.0, 2.0]))
    assert f.sample(0.25) == pytest.approx(0.5)
    assert f.sample(3.0) == 0.0
    with pytest.raises(ValueError):
        GridFunction(0.0, 0.0, np.zeros(3))
    with pytest.raises(ValueError):
        GridFunction(0.0, 1.0, np.array([np.nan]))


def test_from_samples_needs_uniform_spacing():
    with pytest.raises(ValueError):
        GridFunction.from_samples([0, 1, 3], [1, 2, 3])


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40),
       st.floats(-10, 10), st.floats(1e-3, 10), st.booleans())
def test_grid_function_csv_roundtrip(tmp_path_factory, vals, x0, dx, cplx):
    v = np.array(vals)
    if cplx:
        v = v + 1j * v[::-1]
    f = GridFunction(x0, dx, v)
    p = tmp_path_factory.mktemp("csv") / "f.csv"
    f.to_csv(p)
    g = GridFunction.from_csv(p)
    assert g.x_start == f.x_start and g.dx == f.dx
    np.testing.assert_array_equal(g.values, f.values)


def test_spectral_function_csv_roundtrip(tmp_path):
    k = np.arange(-3, 4) * 0.25
    s = SpectralFunction(k, 1 / (1j * k - 1), {"x": 1})
    s.to_csv(tmp_path / "s.csv")
    t = SpectralFunction.from_csv(tmp_path / "s.csv")
    np.testing.assert_array_equal(t.values, s.values)
    header = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert '"symmetric": true' in header and '"m": 3' in header


def test_spectral_symmetry_helpers():
    k = np.arange(-2, 3) * 1.0
    s = SpectralFunction(k, np.array([1, 2, 3, 4j, 5]))
    assert s.symmetry_defect() > 0
    assert s.symmetrized().symmetry_defect() == pytest.approx(0.0)
    assert same_grid(s, s.with_values(np.zeros(5)))
    with pytest.raises(ValueError):
        SpectralFunction(np.array([0.0, 1.0, 3.0]), np.zeros(3))
