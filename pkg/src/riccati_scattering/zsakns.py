"""Half-line ZS-AKNS solutions and Jost values at x = 0.

With Psi = exp(ikx sigma3) N the system Psi' = (ik sigma3 + u sigma1) Psi becomes

    N' = u(x) [[0, exp(-2ikx)], [exp(2ikx), 0]] N,    N(+-inf) = I,

which has no oscillatory diagonal.  The production path ("cells") treats u as a
sum of point masses h*u_m at the cell centres, for which the transfer over a
cell is exactly cosh(h u_m) I +- sinh(h u_m) E(x_m).  This lattice model is
exactly unitary and is the one the inverse solver inverts.  The "rk" path
integrates the continuum ODE for the piecewise-constant u with an adaptive
Runge-Kutta method and serves as an independent oracle.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels
from .grid import Grid, GridFunction, SpectralFunction, same_grid


@dataclass(frozen=True)
class AknsState:
    x: float
    n11: np.ndarray
    n21: np.ndarray

    @property
    def n12(self):
        # real u: the coefficient matrix commutes with sigma1 o conj
        return np.conj(self.n21)

    @property
    def n22(self):
        return np.conj(self.n11)

    @property
    def det(self):
        return self.n11 * self.n22 - self.n12 * self.n21


def _cells(u: GridFunction, side: str, grid: Grid):
    if side == "plus":
        xc = grid.x_plus
    elif side == "minus":
        xc = grid.x_minus
    else:
        raise ValueError("side must be 'plus' or 'minus'")
    return xc, u.sample(xc)


def integrate_akns(u: GridFunction, side: str, k, grid: Grid | None = None,
                   method: str = "cells", rtol: float = 1e-10) -> AknsState:
    """N_plus(0, k) (integrating down from +X) or N_minus(0, k) (up from -X)."""
    grid = grid or Grid()
    xc, uc = _cells(u, side, grid)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if method == "cells":
        if side == "plus":
            n11, n21 = _kernels.propagate_cells(uc[::-1], xc[::-1], k, grid.h, -1.0)
        else:
            n11, n21 = _kernels.propagate_cells(uc, xc, k, grid.h, 1.0)
    elif method == "rk":
        n11, n21 = _rk_staircase(uc, xc, k, grid.h, side, rtol)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not (np.all(np.isfinite(n11)) and np.all(np.isfinite(n21))):
        raise FloatingPointError("non-finite ZS-AKNS solution")
    return AknsState(0.0, n11, n21)


def _rk_staircase(uc, xc, k, h, side, rtol):
    """DOP853 on the continuum N-equation with u constant on each cell."""
    nk = len(k)

    def rhs(x, y, uval):
        a, b = y[:nk], y[nk:]
        e = np.exp(2j * k * x)
        return np.concatenate([uval * np.conj(e) * b, uval * e * a])

    y = np.concatenate([np.ones(nk, complex), np.zeros(nk, complex)])
    order = range(len(uc) - 1, -1, -1) if side == "plus" else range(len(uc))
    for m in order:
        if uc[m] == 0.0:
            continue  # N is constant where u vanishes
        lo, hi = xc[m] - h / 2, xc[m] + h / 2
        span = (hi, lo) if side == "plus" else (lo, hi)
        sol = solve_ivp(rhs, span, y, method="DOP853", rtol=rtol, atol=rtol * 1e-2,
                        args=(uc[m],))
        if not sol.success:
            raise RuntimeError(f"Runge-Kutta integration failed: {sol.message}")
        y = sol.y[:, -1]
    return y[:nk], y[nk:]


def constant_block_transfer(c: float, L: float, k: float) -> np.ndarray:
    """Closed-form N(0, k) for u = c on [0, L] (continuum, integrated down from L).

    Psi' = M Psi with M = [[ik, c], [c, -ik]] and M^2 = (c^2 - k^2) I, so the
    transfer is a cosh/sinh combination; N(0) = Psi(0) Psi(L)^{-1} exp(ikL sigma3).
    """
    M = np.array([[1j * k, c], [c, -1j * k]])
    kap = np.sqrt(complex(c * c - k * k))
    if abs(kap) < 1e-14:
        back = np.eye(2) - L * M
    else:
        back = np.cosh(kap * L) * np.eye(2) - np.sinh(kap * L) / kap * M
    return back @ np.diag([np.exp(1j * k * L), np.exp(-1j * k * L)])


# ---------------------------------------------------------------- series path

@dataclass(frozen=True)
class SeriesKernel:
    """Order-resolved kernels: n11 - 1 = sum_n int A_n(z) exp(2ikz) dz, n21 likewise with B_n.

    A[n-1] holds A_n on zeta = qh/2 for even q, B[n-1] holds B_n on odd q;
    values are densities (lattice coefficient / h).
    """
    x: float
    h: float
    zeta: np.ndarray
    A: np.ndarray
    B: np.ndarray
    n_max: int

    @property
    def A_total(self):
        return self.A.sum(axis=0)

    @property
    def B_total(self):
        return self.B.sum(axis=0)

    def weighted_norms(self, s: float):
        """(||A||, ||B||) in L^{2,s} of the variable zeta.

        These are the H^s norms of n11 - 1 and n21 read through exp(2ik zeta).
        Taking them from the kernels rather than from k-samples avoids the
        periodicity of the lattice solution in k, which doubles the squared
        norm of a sampled spectrum.
        """
        w = (1 + np.abs(self.zeta)) ** (2 * s)
        a = np.sqrt(self.h * np.sum(w * np.abs(self.A_total) ** 2))
        b = np.sqrt(self.h * np.sum(w * np.abs(self.B_total) ** 2))
        return float(a), float(b)


def series_kernels(u_plus: GridFunction, x: float = 0.0, n_max: int = 6,
                   grid: Grid | None = None) -> SeriesKernel:
    """Expand N_plus(x, k) order by order in u on the cell lattice.

    x is snapped to the nearest cell boundary at or above 0.
    """
    grid = grid or Grid()
    if x < 0:
        raise ValueError("series kernels are defined for x >= 0")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    xc, uc = _cells(u_plus, "plus", grid)
    xb = round(x / grid.h) * grid.h
    # cells far below round-off relative to the peak only shuffle the last bit
    keep = (xc > xb) & (np.abs(uc) > 1e-18 * max(np.abs(uc).max(), 1e-300))
    xc, uc = xc[keep][::-1], uc[keep][::-1]
    shifts = np.rint(2 * xc / grid.h).astype(np.int64)
    qmax = int(shifts.max()) if len(shifts) else 1
    if n_max > 12:
        warnings.warn("series orders beyond 24 sit below double-precision round-off")
    alpha, beta = _kernels.series_propagate(grid.h * uc, shifts, -1.0, 2 * n_max, qmax)
    zeta = (np.arange(2 * qmax + 1) - qmax) * grid.h / 2
    A = np.stack([alpha[2 * n] for n in range(1, n_max + 1)]) / grid.h
    B = np.stack([beta[2 * n - 1] for n in range(1, n_max + 1)]) / grid.h
    return SeriesKernel(float(xb), grid.h, zeta, A, B, n_max)


def n_from_series(kernel: SeriesKernel, k) -> tuple[SpectralFunction, SpectralFunction]:
    """(n11 - 1, n21) on the k-grid from the summed kernels."""
    k = np.asarray(k, dtype=float)
    if np.abs(k).max() > np.pi / kernel.h + 1e-12:
        raise ValueError("k grid exceeds the lattice Nyquist bound pi/h")
    A, B = kernel.A_total * kernel.h, kernel.B_total * kernel.h
    nzA, nzB = np.nonzero(A)[0], np.nonzero(B)[0]
    n11m1 = np.exp(2j * np.outer(k, kernel.zeta[nzA])) @ A[nzA] if len(nzA) else np.zeros(k.shape, complex)
    n21 = np.exp(2j * np.outer(k, kernel.zeta[nzB])) @ B[nzB] if len(nzB) else np.zeros(k.shape, complex)
    return SpectralFunction(k, n11m1), SpectralFunction(k, n21)


def jost_at_zero(n_plus, n_minus, k=None):
    """f_plus(0,k) = n11+ + n21+ and f_minus(0,k) = conj(n11-) + conj(n21-).

    Pairs may be SpectralFunctions or plain arrays.
    """
    parts = list(n_plus) + list(n_minus)
    if all(isinstance(p, SpectralFunction) for p in parts):
        if not same_grid(*parts):
            raise ValueError("Jost inputs live on different k-grids")
        k = parts[0].k
        parts = [p.values for p in parts]
    p11, p21, m11, m21 = (np.asarray(p, dtype=complex) for p in parts)
    if not (p11.shape == p21.shape == m11.shape == m21.shape):
        raise ValueError("Jost inputs have mismatched shapes")
    fp = p11 + p21
    fm = np.conj(m11) + np.conj(m21)
    if k is None:
        return fp, fm
    return SpectralFunction(k, fp), SpectralFunction(k, fm)


def wronskian(g, g_quasi, h, h_quasi):
    """[g, h] = g h^[1] - g^[1] h with quasi-derivatives y^[1] = y' - u y."""
    return g * h_quasi - g_quasi * h


def half_line_data(u_minus: GridFunction, u_plus: GridFunction, grid: Grid, k=None):
    """N_plus(0,k) and N_minus(0,k) first columns on the grid's k values."""
    k = grid.k if k is None else k
    sp = integrate_akns(u_plus, "plus", k, grid)
    sm = integrate_akns(u_minus, "minus", k, grid)
    return sp, sm
