import numpy as np
import pytest

from riccati_scattering.grid import SpectralFunction
from riccati_scattering.involution import (hilbert_transform, involute, involution, periodic_hilbert,
                                           r_tilde_from_r, transmission_boundary)


def test_line_hilbert_of_lorentzian():
    # (1/pi) PV int 1/((1+s^2)(k-s)) ds = k/(1+k^2)
    dk = 0.01
    k = np.arange(-4000, 4001) * dk
    H, c, _ = hilbert_transform(1 / (1 + k ** 2), dk)
    assert c == pytest.approx(1.0, rel=1e-3)
    err = np.abs(H - k / (1 + k ** 2))
    assert err[np.abs(k) < 30].max() < 1e-6
    # the c/s^2 continuation is only asymptotic, so the last samples are looser
    assert err.max() < 2e-4


def test_periodic_hilbert_of_cosine():
    n = np.arange(-64, 65)
    theta = np.pi * n / 64
    H = periodic_hilbert(np.cos(3 * theta))
    assert np.abs(H - np.sin(3 * theta)).max() < 1e-12


def test_delta_transmission_closed_form(grid, datas):
    d = datas["delta_2"]
    t = transmission_boundary(d.r_tilde)
    k = d.k
    assert np.abs(t.t.values - k / (k + 1j)).max() < 1e-8
    assert t.template_strength == pytest.approx(2.0)
    assert np.abs(t.t.values[::-1] - np.conj(t.t.values)).max() < 1e-8


def test_transmission_unitarity(datas):
    for name, d in datas.items():
        t = transmission_boundary(d.r_tilde, r=d.r_minus)
        assert np.abs(np.abs(t.t.values) ** 2 + np.abs(d.r_minus.values) ** 2 - 1).max() < 1e-4, name


def test_involution_maps_r_minus_to_r_plus(datas):
    for name, d in datas.items():
        err = np.abs(involution(d.r_minus, d.r_tilde).values - d.r_plus.values).max()
        assert err < 1e-4, (name, err)


def test_involution_is_an_involution(datas):
    for name, d in datas.items():
        once = involution(d.r_minus, d.r_tilde)
        twice = involution(once, d.r_tilde)
        assert np.abs(twice.values - d.r_minus.values).max() < 1e-10, name


def test_delta_is_self_dual(datas):
    d = datas["delta_1"]
    assert np.abs(involution(d.r_minus, d.r_tilde).values - d.r_minus.values).max() < 1e-8


def test_zero_r_maps_to_zero(datas):
    d = datas["gaussian_0.5"]
    z = d.r_minus.with_values(np.zeros(len(d.k)))
    t = transmission_boundary(d.r_tilde, exceptional=True, r=d.r_minus)
    assert not np.any(involute(z, t).values)


def test_r_tilde_from_r_exceptional_and_generic(datas):
    d = datas["gaussian_2"]
    rt = r_tilde_from_r(d.r_minus, exceptional=True)
    nz = d.k != 0
    np.testing.assert_allclose(rt.values.real[nz], d.r_tilde.values.real[nz], rtol=1e-8)
    g = datas["delta_2"]
    rt = r_tilde_from_r(g.r_minus)
    i0 = int(np.argmin(np.abs(g.k)))
    assert rt.values[i0].real == pytest.approx(1.0, rel=1e-3)


def test_bad_r_tilde_rejected():
    k = np.arange(-3, 4) * 0.5
    with pytest.raises(ValueError):
        transmission_boundary(SpectralFunction(k, -np.ones(7)))
    with pytest.raises(ValueError):
        involute(SpectralFunction(np.arange(-2, 3) * 1.0, np.zeros(5)),
                 transmission_boundary(SpectralFunction(k, np.ones(7))))
