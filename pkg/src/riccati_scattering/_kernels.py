"""Hot loops: cell-by-cell transfer propagation and its order-by-order expansion.

Each kernel has a numba version and a plain numpy version with identical
semantics.  RICCATI_SCATTERING_BACKEND=numpy forces the numpy path;
RICCATI_SCATTERING_THREADS caps numba's thread pool.
"""
import os
from math import factorial

import numpy as np

# the bundled TBB is too old for numba; avoid the warning it triggers
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    import numba
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def backend() -> str:
    want = os.environ.get("RICCATI_SCATTERING_BACKEND", "numba").strip().lower()
    if want == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


def _configure_threads():
    n = os.environ.get("RICCATI_SCATTERING_THREADS")
    if HAVE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


_configure_threads()


# ---------------------------------------------------------------- propagation

def _propagate_numpy(u, xc, k, h, sign, n11, n21):
    n11 = n11.copy()
    n21 = n21.copy()
    for m in range(len(u)):
        c = np.cosh(h * u[m])
        s = sign * np.sinh(h * u[m])
        e = np.exp(2j * k * xc[m])
        n11, n21 = c * n11 + s * np.conj(e) * n21, c * n21 + s * e * n11
    return n11, n21


if HAVE_NUMBA:
    @njit(parallel=True, cache=True)
    def _propagate_numba(u, xc, k, h, sign, n11, n21):
        nk = k.shape[0]
        o11 = np.empty(nk, dtype=np.complex128)
        o21 = np.empty(nk, dtype=np.complex128)
        cs = np.cosh(h * u)
        sn = sign * np.sinh(h * u)
        for j in prange(nk):
            a = n11[j]
            b = n21[j]
            for m in range(u.shape[0]):
                ph = 2.0 * k[j] * xc[m]
                e = complex(np.cos(ph), np.sin(ph))
                a, b = cs[m] * a + sn[m] * e.conjugate() * b, cs[m] * b + sn[m] * e * a
            o11[j] = a
            o21[j] = b
        return o11, o21


def propagate_cells(u, xc, k, h, sign, n11=None, n21=None):
    """Apply exp(sign*h*u_m*E(x_m)) cell by cell, in the order the cells are given.

    E(x) = [[0, exp(-2ikx)], [exp(2ikx), 0]].  Returns the first column of the
    propagated matrix starting from (n11, n21), identity column by default.
    """
    u = np.ascontiguousarray(u, dtype=float)
    xc = np.ascontiguousarray(xc, dtype=float)
    k = np.ascontiguousarray(k, dtype=float)
    n11 = np.ones(k.shape, complex) if n11 is None else np.ascontiguousarray(n11, dtype=complex)
    n21 = np.zeros(k.shape, complex) if n21 is None else np.ascontiguousarray(n21, dtype=complex)
    if backend() == "numba":
        return _propagate_numba(u, xc, k, float(h), float(sign), n11, n21)
    return _propagate_numpy(u, xc, k, float(h), float(sign), n11, n21)


# ---------------------------------------------------------------- series

def _taylor_tables(hu, omax):
    """cosh/sinh Taylor terms per cell: table[m, j] = (h u_m)^j / j!."""
    j = np.arange(omax + 1)
    fact = np.array([float(factorial(i)) for i in j])
    return hu[:, None] ** j[None, :] / fact[None, :]


def _series_numpy(hu, shifts, sign, omax, qmax):
    nq = 2 * qmax + 1
    alpha = np.zeros((omax + 1, nq))
    beta = np.zeros((omax + 1, nq))
    alpha[0, qmax] = 1.0
    tab = _taylor_tables(hu, omax)
    for m in range(len(hu)):
        d = int(shifts[m])
        na = np.zeros_like(alpha)
        nb = np.zeros_like(beta)
        for o in range(omax + 1):
            for j in range(0, o + 1):
                w = tab[m, j]
                if w == 0.0 and j > 0:
                    break
                if j % 2 == 0:
                    na[o] += w * alpha[o - j]
                    nb[o] += w * beta[o - j]
                else:
                    # conj(e) * n21 lowers q by d; e * n11 raises it by d
                    na[o, : nq - d] += sign * w * beta[o - j, d:]
                    nb[o, d:] += sign * w * alpha[o - j, : nq - d]
        alpha, beta = na, nb
    return alpha, beta


if HAVE_NUMBA:
    @njit(cache=True)
    def _series_numba(hu, shifts, sign, omax, qmax, tab):
        nq = 2 * qmax + 1
        alpha = np.zeros((omax + 1, nq))
        beta = np.zeros((omax + 1, nq))
        alpha[0, qmax] = 1.0
        na = np.zeros_like(alpha)
        nb = np.zeros_like(beta)
        for m in range(hu.shape[0]):
            d = shifts[m]
            na[:, :] = 0.0
            nb[:, :] = 0.0
            for o in range(omax + 1):
                for j in range(o + 1):
                    w = tab[m, j]
                    if j % 2 == 0:
                        for q in range(nq):
                            na[o, q] += w * alpha[o - j, q]
                            nb[o, q] += w * beta[o - j, q]
                    else:
                        sw = sign * w
                        for q in range(nq - d):
                            na[o, q] += sw * beta[o - j, q + d]
                            nb[o, q + d] += sw * alpha[o - j, q]
            alpha[:, :] = na
            beta[:, :] = nb
        return alpha, beta


def series_propagate(hu, shifts, sign, omax, qmax):
    """Order-resolved version of propagate_cells.

    Coefficients live on the phase lattice z**q with z = exp(ikh), so a cell
    centred at x_m contributes the shift 2 x_m / h.  Returns alpha[o, q] and
    beta[o, q]: the order-o parts of n11 and n21 at lattice index q - qmax.
    """
    hu = np.ascontiguousarray(hu, dtype=float)
    shifts = np.ascontiguousarray(shifts, dtype=np.int64)
    if np.any(shifts < 0) or np.any(shifts > qmax):
        raise ValueError("phase shifts must lie in [0, qmax]")
    if backend() == "numba":
        return _series_numba(hu, shifts, float(sign), int(omax), int(qmax),
                             _taylor_tables(hu, omax))
    return _series_numpy(hu, shifts, float(sign), int(omax), int(qmax))
