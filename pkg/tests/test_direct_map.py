import numpy as np
import pytest

from riccati_scattering.direct_map import (ScatteringData, ab_wronskian_oracle, direct_map,
                                           reflection_pair, tilde_r)
from riccati_scattering.grid import SpectralFunction
from riccati_scattering.potentials import make_delta_triple, zero_triple


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_delta_closed_form(grid, gamma):
    d = direct_map(make_delta_triple(gamma, grid), grid)
    k = d.k
    exact = gamma / (2j * k - gamma)
    assert np.abs(d.r_minus.values - exact).max() < 1e-12
    assert np.abs(d.r_plus.values - exact).max() < 1e-12
    assert np.abs(d.r_tilde.values.real - 4 / (4 * k ** 2 + gamma ** 2)).max() < 1e-12
    a_tilde = (2j * k - gamma) / (2j * (k + 1j))
    assert np.abs(d.a_tilde.values - a_tilde).max() < 1e-12
    assert d.passed()


def test_delta_point_value(grid):
    d = direct_map(make_delta_triple(2.0, grid), grid)
    i = int(np.argmin(np.abs(d.k - 1.0)))
    k = d.k[i]
    assert d.r_minus.values[i] == pytest.approx(2 / (2j * k - 2))
    if abs(k - 1) < 1e-12:
        assert d.r_minus.values[i] == pytest.approx(-0.5 - 0.5j)


def test_zero_triple(grid):
    d = direct_map(zero_triple(grid), grid)
    assert not np.any(d.r_minus.values) and not np.any(d.r_plus.values)
    k = d.k
    np.testing.assert_allclose(d.a_tilde.values, k / (k + 1j), atol=1e-15)
    i0 = np.argmin(np.abs(k))
    assert np.isinf(d.r_tilde.values[i0].real)
    nz = k != 0
    np.testing.assert_allclose(d.r_tilde.values.real[nz], 1 / k[nz] ** 2, rtol=1e-12)
    assert d.exceptional and d.passed()


def test_corpus_invariants(datas):
    for name, d in datas.items():
        checks = d.report["checks"]
        assert checks["unitarity"]["value"] < 1e-6, name
        assert checks["tilde_two_formula"]["value"] < 1e-8, name
        assert d.passed(), name


def test_generic_has_r0_minus_one_and_nonzero_a0(datas):
    for name, d in datas.items():
        i0 = int(np.argmin(np.abs(d.k)))
        if d.exceptional:
            assert np.abs(d.r_minus.values).max() < 1, name
        else:
            assert d.r_minus.values[i0] == pytest.approx(-1, abs=1e-10), name
            assert abs(d.a_tilde.values[i0]) > 1e-3, name


@pytest.mark.parametrize("name", ["asymmetric", "gaussian_0.5", "box", "delta_2"])
def test_wronskian_oracle(grid, triples, datas, name):
    d = datas[name]
    kk, a, b = d.ab()
    i = int(np.argmin(np.abs(kk - 1.3)))
    for xp in (-2.0, -1.0, 0.0):
        aw, bw = ab_wronskian_oracle(triples[name], float(kk[i]), xp, grid)
        assert abs(aw - a[i]) < 1e-6 * abs(a[i])
        assert abs(bw - b[i]) < 1e-6 * max(abs(b[i]), 1e-3)


def test_wronskian_oracle_guards(grid):
    t = zero_triple(grid)
    assert ab_wronskian_oracle(t, 1.0, 0.0, grid) == pytest.approx((1, 0))
    with pytest.raises(ZeroDivisionError):
        ab_wronskian_oracle(t, 0.0, 0.0, grid)
    with pytest.raises(ValueError):
        ab_wronskian_oracle(t, 1.0, 1.0, grid)


def test_reflection_pair_rejects_vanishing_a():
    k = np.array([-1.0, 0.0, 1.0])
    with pytest.raises(ZeroDivisionError):
        reflection_pair(SpectralFunction(k, np.array([1, 0, 1])), SpectralFunction(k, np.zeros(3)))


def test_bundle_roundtrip(tmp_path, datas):
    d = datas["asymmetric"]
    d.write_bundle(tmp_path)
    e = ScatteringData.read_bundle(tmp_path / "scattering.json")
    np.testing.assert_array_equal(e.r_minus.values, d.r_minus.values)
    np.testing.assert_array_equal(e.r_tilde.values, d.r_tilde.values)
    assert e.v0 == d.v0 and e.report["checks"]["unitarity"]["pass"]


def test_tolerance_override_can_fail_a_check(grid, triples):
    d = direct_map(triples["asymmetric"], grid, {"unitarity": 1e-30})
    assert not d.report["checks"]["unitarity"]["pass"] and not d.passed()
