import numpy as np
import pytest

from riccati_scattering.grid import GridFunction, SpectralFunction
from riccati_scattering.inverse_map import (build_F, dense_u, glm_solve_gamma, glm_system,
                                            gn_tail_check, jump_template, nested_right_solve,
                                            neumann_gamma, reconstruct_riccati)
from riccati_scattering.involution import involution


def exp_kernel(grid, c=1.0):
    return GridFunction(grid.x[0], grid.h, np.where(grid.x > 0, c * np.exp(-grid.x), 0.0))


def test_F_of_zero_and_gaussian(grid):
    k = grid.k
    assert not np.any(build_F(SpectralFunction(k, np.zeros(len(k))), grid).values)
    F = build_F(SpectralFunction(k, np.exp(-k ** 2)), grid)
    assert np.abs(F.values - np.exp(-grid.x ** 2) / np.sqrt(np.pi)).max() < 1e-12
    # direct-sum path agrees with the FFT path
    xs = np.linspace(-1, 1, 5)
    Fd = build_F(SpectralFunction(k, np.exp(-k ** 2)), grid, x=xs)
    np.testing.assert_allclose(Fd.values, np.exp(-xs ** 2) / np.sqrt(np.pi), atol=1e-12)


def test_F_rejects_asymmetric_r(grid):
    k = grid.k
    with pytest.raises(ValueError):
        build_F(SpectralFunction(k, np.exp(-k ** 2) * (1 + 1j * np.sign(k) + 0.1j)), grid)


@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_F_of_delta_reflection(grid, gamma):
    k, x = grid.k, grid.x
    exact = np.where(x < 0, -gamma * np.exp(gamma * x), 0.0)
    rs, Fs = jump_template(gamma, k, x)
    np.testing.assert_allclose(rs, gamma / (2j * k - gamma))
    np.testing.assert_allclose(Fs, exact)
    # plain quadrature converges away from the jump, up to Gibbs ringing
    F = build_F(SpectralFunction(k, gamma / (2j * k - gamma)), grid)
    away = (np.abs(x) > 1) & (np.abs(x) < 5)
    assert np.abs(F.values - exact)[away].max() < 1e-2


def test_neumann_matches_nystrom(grid):
    F = exp_kernel(grid, 0.5)
    sys = glm_system(F, x=1.0)
    assert sys.norm_L1 < 1
    g_dense, rep = glm_solve_gamma(sys)
    g_series, terms = neumann_gamma(sys)
    assert terms > 1 and rep["cond"] < 10
    assert np.abs(g_dense - g_series).max() < 1e-10


def test_first_tail_term_closed_form(grid):
    # G_1(x) = int int F(x+s) F(x+s+t) F(x+t) ds dt = exp(-3x)/4 for F = exp(-x) 1{x>0}
    rep = gn_tail_check(exp_kernel(grid), 1.0, 2, x_stride=16, x0=1.0)
    np.testing.assert_allclose(rep["G"][0], np.exp(-3 * rep["x"]) / 4, rtol=1e-3, atol=1e-12)
    assert rep["x0"] >= 1.0 and rep["pass"]
    assert all(o["lhs"] <= o["bound"] for o in rep["orders"])


def test_series_remainder_bound(grid):
    F = exp_kernel(grid, 0.8)
    rep0 = gn_tail_check(F, 1.0, 2, x_stride=32)
    G_full = np.zeros(F.n)
    for n in range(rep0["x"].size):
        idx = int(round((rep0["x"][n] - F.x_start) / F.dx))
        _, ufg, _ = dense_u(F, F.x[idx])
        G_full[idx] = ufg - F.values[idx]
    rep = gn_tail_check(F, 1.0, 2, x_stride=32, G_full=G_full)
    assert rep["remainder"]["pass"]


def test_dense_routes_and_nested_solver(grid, datas):
    d = datas["gaussian_0.5"]
    F = build_F(d.r_plus, grid)
    nested = nested_right_solve(F.values, grid.N // 2, grid.h)
    for n in range(grid.N // 2, grid.N, 256):
        ug, ufg, rep = dense_u(F, grid.x[n])
        assert abs(ug - ufg) < 1e-7
        assert abs(ug - nested[n - grid.N // 2]) < 1e-10
        assert rep["residual"] < 1e-10


def test_nested_solver_detects_indefinite_system(grid):
    F = np.full(grid.N, 100.0)
    with pytest.raises(np.linalg.LinAlgError):
        nested_right_solve(F, grid.N // 2, grid.h)


def test_zero_data_reconstructs_zero(grid):
    k = grid.k
    z = SpectralFunction(k, np.zeros(len(k)))
    rec = reconstruct_riccati(z, z, grid)
    assert not np.any(rec.u.values) and not np.any(rec.u_sharp.values) and rec.v0 == 0


@pytest.mark.parametrize("name", ["delta_1", "gaussian_0.5", "asymmetric"])
def test_reconstruction(grid, triples, datas, name):
    d, t = datas[name], triples[name]
    rec = reconstruct_riccati(d.r_plus, involution(d.r_plus, d.r_tilde), grid, r_tilde=d.r_tilde)
    um, up = t.on_grid(grid)
    scale = max(np.linalg.norm(up), np.linalg.norm(um), 1.0)
    assert np.linalg.norm(rec.u.values - up) / scale < 1e-3
    assert np.linalg.norm(rec.u_sharp.values - um) / scale < 1e-3
    assert rec.v0 == pytest.approx(t.v0, rel=0.05, abs=1e-6)
    assert rec.diagnostics["route_agreement"] < 1e-7


def test_mismatched_pair_rejected(grid, datas):
    d = datas["asymmetric"]
    with pytest.raises(ValueError):
        reconstruct_riccati(d.r_plus, d.r_plus.with_values(d.r_plus.values * 0.9), grid,
                            r_tilde=d.r_tilde)
