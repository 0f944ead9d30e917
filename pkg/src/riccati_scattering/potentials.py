"""Riccati triples (u_minus on x<0, u_plus on x>0, v0) and operations on them."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Grid, GridFunction


@dataclass(frozen=True)
class RiccatiTriple:
    u_minus: GridFunction  # left representative, restricted to x <= 0
    u_plus: GridFunction   # right representative, restricted to x >= 0
    v0: float
    norms: dict = field(default=None, compare=False)

    @property
    def exceptional(self) -> bool:
        return self.v0 == 0.0

    @property
    def kind(self) -> str:
        return "exceptional" if self.exceptional else "generic"

    def on_grid(self, grid: Grid):
        """(u_minus at the negative cell centres, u_plus at the positive ones)."""
        return self.u_minus.sample(grid.x_minus), self.u_plus.sample(grid.x_plus)


def _half_line_norms(f: GridFunction):
    v = np.abs(f.values)
    return float(f.dx * v.sum()), float(np.sqrt(f.dx * (v ** 2).sum()))


def validate_triple(t: RiccatiTriple) -> RiccatiTriple:
    """Check signs, reality and supports; attach L1/L2 norms of both halves."""
    v0 = float(t.v0)
    if not np.isfinite(v0) or v0 < 0:
        raise ValueError(f"v0 must be finite and non-negative, got {t.v0}")
    for name, f, bad in (("u_minus", t.u_minus, lambda x: x > 0),
                         ("u_plus", t.u_plus, lambda x: x < 0)):
        if f.is_complex:
            raise ValueError(f"{name} must be real-valued")
        wrong = bad(f.x) & (np.abs(f.x) > 1e-9 * f.dx)
        if np.any(f.values[wrong] != 0):
            raise ValueError(f"{name} has support on the wrong half-line")
    l1m, l2m = _half_line_norms(t.u_minus)
    l1p, l2p = _half_line_norms(t.u_plus)
    norms = {"L1_minus": l1m, "L2_minus": l2m, "L1_plus": l1p, "L2_plus": l2p}
    return replace(t, v0=v0, norms=norms)


def miura(u: GridFunction) -> GridFunction:
    """q = u' + u^2 by centred differences (second order, one-sided at the ends).

    For rough u the result is only a diagnostic: q is a distribution then.
    """
    if u.n < 3:
        raise ValueError("miura needs at least 3 samples")
    du = np.gradient(u.values, u.dx, edge_order=2)
    return GridFunction(u.x_start, u.dx, du + u.values ** 2)


def quadratic_form_value(u: GridFunction, phi: GridFunction) -> float:
    """Trapezoid value of the integral of |phi' - u phi|^2.

    Expanding the square and integrating 2 Re(conj(phi) phi') u by parts gives
    |phi'|^2 + (u' + u^2)|phi|^2, the form of q = u' + u^2, so the value is
    non-negative up to quadrature error.
    """
    vals = np.asarray(phi.values)
    if phi.n < 3:
        raise ValueError("phi needs at least 3 samples")
    scale = max(np.abs(vals).max(), 1e-300)
    if np.abs(vals[[0, 1, -2, -1]]).max() > 1e-10 * scale:
        raise ValueError("phi must vanish near the edges of its window")
    uu = u.sample(phi.x)
    dphi = np.gradient(vals, phi.dx, edge_order=2)
    dens = np.abs(dphi - uu * vals) ** 2
    return float(np.trapezoid(dens, dx=phi.dx))


def make_delta_triple(gamma: float, grid: Grid | None = None) -> RiccatiTriple:
    """Triple of q = gamma * delta_0: both representatives vanish off 0, v0 = gamma.

    The zero-energy solution 1 - gamma*x on x<0, 1 on x>0 has logarithmic
    derivative zero on x>0, which fixes u_plus = 0 and v0 = gamma.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return zero_triple(grid, v0=gamma)


def zero_triple(grid: Grid | None = None, v0: float = 0.0) -> RiccatiTriple:
    grid = grid or Grid()
    half = grid.N // 2
    um = GridFunction(grid.x_minus[0], grid.h, np.zeros(half))
    up = GridFunction(grid.x_plus[0], grid.h, np.zeros(half))
    return validate_triple(RiccatiTriple(um, up, float(v0)))


def triple_from_functions(u_minus, u_plus, v0, grid: Grid | None = None) -> RiccatiTriple:
    """Sample callables on the negative / positive cell centres of the grid."""
    grid = grid or Grid()
    xm, xp = grid.x_minus, grid.x_plus
    um = GridFunction(xm[0], grid.h, np.asarray(u_minus(xm), dtype=float) * np.ones_like(xm))
    up = GridFunction(xp[0], grid.h, np.asarray(u_plus(xp), dtype=float) * np.ones_like(xp))
    return validate_triple(RiccatiTriple(um, up, float(v0)))


def triple_from_values(u_minus, u_plus, v0, grid: Grid | None = None) -> RiccatiTriple:
    grid = grid or Grid()
    return validate_triple(RiccatiTriple(GridFunction(grid.x_minus[0], grid.h, u_minus),
                                         GridFunction(grid.x_plus[0], grid.h, u_plus),
                                         float(v0)))


def triple_distance(t1: RiccatiTriple, t2: RiccatiTriple, grid: Grid, s: float = 1.0) -> float:
    """Weighted-L2 distance between the representatives plus |v0 difference|."""
    m1, p1 = t1.on_grid(grid)
    m2, p2 = t2.on_grid(grid)
    wm = (1 + np.abs(grid.x_minus)) ** s
    wp = (1 + np.abs(grid.x_plus)) ** s
    dm = np.sqrt(grid.h * np.sum((wm * (m1 - m2)) ** 2))
    dp = np.sqrt(grid.h * np.sum((wp * (p1 - p2)) ** 2))
    return float(dm + dp + abs(t1.v0 - t2.v0))
