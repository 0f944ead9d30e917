import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riccati_scattering.grid import Grid, GridFunction
from riccati_scattering.potentials import (RiccatiTriple, make_delta_triple, miura,
                                           quadratic_form_value, triple_distance,
                                           triple_from_functions, validate_triple, zero_triple)


def test_miura_of_tanh_is_one():
    x = np.linspace(-5, 5, 2001)
    q = miura(GridFunction.from_samples(x, np.tanh(x)))
    # tanh' + tanh^2 = sech^2 + tanh^2 = 1
    assert np.abs(q.values - 1).max() < 1e-4


def test_miura_needs_three_samples():
    with pytest.raises(ValueError):
        miura(GridFunction(0, 1, np.zeros(2)))


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(0.3, 3), st.floats(-1, 1))
def test_quadratic_form_is_nonnegative(a, w, c):
    x = np.linspace(-8, 8, 1601)
    u = GridFunction.from_samples(x, a * np.tanh(x) + c * np.exp(-x ** 2))
    phi = GridFunction.from_samples(x, np.exp(-(x / w) ** 2) * np.where(np.abs(x) < 7.9, 1, 0) * np.cos(x))
    vals = phi.values.copy()
    vals[[0, 1, -2, -1]] = 0
    assert quadratic_form_value(u, GridFunction(phi.x_start, phi.dx, vals)) >= 0


def test_quadratic_form_matches_integrated_form():
    # phi' - u phi vanishes for phi = exp(int u), so the form is zero up to quadrature
    x = np.linspace(-10, 10, 4001)
    u = GridFunction.from_samples(x, -x)
    phi = GridFunction.from_samples(x, np.exp(-x ** 2 / 2))
    assert quadratic_form_value(u, phi) < 1e-8


def test_quadratic_form_rejects_phi_not_vanishing():
    x = np.linspace(-1, 1, 11)
    with pytest.raises(ValueError):
        quadratic_form_value(GridFunction.from_samples(x, x), GridFunction.from_samples(x, np.ones(11)))


def test_validation_errors():
    g = Grid(N=64)
    good = zero_triple(g)
    with pytest.raises(ValueError):
        validate_triple(RiccatiTriple(good.u_minus, good.u_plus, -1.0))
    with pytest.raises(ValueError):
        validate_triple(RiccatiTriple(good.u_minus, GridFunction(good.u_plus.x_start, good.u_plus.dx,
                                                                 good.u_plus.values + 1j), 0.0))
    wrong = GridFunction(-1.0, 0.5, np.ones(5))  # reaches x = 1 > 0
    with pytest.raises(ValueError):
        validate_triple(RiccatiTriple(wrong, good.u_plus, 0.0))
    with pytest.raises(ValueError):
        make_delta_triple(0.0, g)


def test_norms_and_classes(grid):
    t = triple_from_functions(lambda x: np.exp(x), lambda x: np.exp(-x), 0.0, grid)
    assert t.exceptional and t.kind == "exceptional"
    assert t.norms["L1_plus"] == pytest.approx(1.0, rel=1e-3)
    assert t.norms["L2_minus"] == pytest.approx(np.sqrt(0.5), rel=1e-3)
    d = make_delta_triple(1.0, grid)
    assert d.kind == "generic" and d.v0 == 1.0


def test_triple_distance_is_a_metric(grid):
    a = triple_from_functions(lambda x: np.exp(-x ** 2), lambda x: np.exp(-x ** 2), 0.0, grid)
    b = make_delta_triple(1.0, grid)
    assert triple_distance(a, a, grid) == 0
    assert triple_distance(a, b, grid) == pytest.approx(triple_distance(b, a, grid))
    assert triple_distance(a, b, grid) > 1.0
