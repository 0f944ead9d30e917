"""Weighted norms, the H^s / X-hat metrics, R_s membership and the 1 + H^s algebra.

Transform convention, used everywhere in the library:

    u_hat(k) = int u(x) exp(ikx) dx,   discretised as dx * sum_j u_j exp(ik x_j).

H^s is the image of L^{2,s} under this map, so ||g||_{H^s} is the L^{2,s} norm
of the preimage.  For a k-grid with 2m+1 points and step dk the preimage lives
on x_j = j dx, dx = pi/(m dk), j = -m..m-1, and the pair is an exact finite
Fourier transform once the two end samples k = +-m dk (which alias to the same
frequency) are folded together.  The GLM kernel F(x) = (1/pi) int r exp(2ikx) dk
is the preimage of r evaluated at 2x, scaled by 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridFunction, SpectralFunction, same_grid

FLAG_TOL = 1e-6
STABILITY_TOL = 0.01


def weighted_l2s_norm(f: GridFunction, s: float) -> float:
    """Trapezoid value of ||(1+|x|)^s f||_{L^2}."""
    if s < 0:
        raise ValueError("s must be non-negative")
    if f.n < 2:
        return float(np.sqrt(f.dx) * np.abs(f.values).sum()) if f.n else 0.0
    dens = (1 + np.abs(f.x)) ** (2 * s) * np.abs(f.values) ** 2
    return float(np.sqrt(np.trapezoid(dens, dx=f.dx)))


def preimage(g: SpectralFunction) -> GridFunction:
    """Inverse of forward_transform on the dual lattice x_j = j pi/(m dk)."""
    m, dk = g.m, g.dk
    dx = np.pi / (m * dk)
    vals = g.values.copy()
    folded = np.empty(2 * m, complex)
    folded[1:] = vals[1:-1]
    folded[0] = 0.5 * (vals[0] + vals[-1])
    # folded[l + m] holds k = l dk; f_j = sum_l g_l exp(-i pi l j/m) / (2 m dx)
    f = np.fft.fft(np.roll(folded, -m)) / (2 * m * dx)
    out = f[np.arange(-m, m) % (2 * m)]
    if np.all(np.abs(g.values[::-1] - np.conj(g.values)) <= 1e-12 * max(1.0, np.abs(g.values).max())):
        out = out.real
    return GridFunction(-m * dx, dx, out)


def forward_transform(f: GridFunction, k=None) -> SpectralFunction:
    """u_hat(k) = dx * sum_j u_j exp(ik x_j).

    Without k, f must sit on a lattice j dx (j = -m..m-1) and the dual k-grid
    dk = pi/(m dx) is used, on which hs_norm inverts this map exactly.
    """
    x = f.x
    if k is None:
        m = f.n // 2
        if f.n != 2 * m or abs(x[0] + m * f.dx) > 1e-9 * f.dx:
            raise ValueError("dual-grid transform needs samples at j dx, j = -m..m-1")
        dk = np.pi / (m * f.dx)
        k = np.arange(-m, m + 1) * dk
    k = np.asarray(k, dtype=float)
    vals = f.dx * (np.exp(1j * np.outer(k, x)) @ f.values)
    return SpectralFunction(k, vals)


def hs_norm(g: SpectralFunction, s: float, report: bool = False, scale: float = 1.0):
    """||g||_{H^s} = weighted L^{2,s} norm of the preimage of g.

    scale = c reads g as int v(z) exp(i c k z) dz and weights v in the variable z
    (c = 2 for the ZS-AKNS kernels, n - 1 = int A(z) exp(2ikz) dz).
    With report=True also returns the share of the squared norm carried by the
    outer quarter of the preimage lattice (an aliasing / truncation gauge).
    """
    if not np.all(np.isfinite(g.values)):
        raise ValueError("H^s norm of non-finite samples")
    f = preimage(g)
    z = f.x / scale
    wsq = (1 + np.abs(z)) ** (2 * s) * np.abs(scale * f.values) ** 2
    total = float(f.dx / scale * wsq.sum())
    norm = float(np.sqrt(total))
    if not report:
        return norm
    outer = np.abs(f.x) > 0.75 * np.abs(f.x).max()
    frac = float(f.dx / scale * wsq[outer].sum() / total) if total > 0 else 0.0
    return norm, {"outer_fraction": frac, "stable": frac < STABILITY_TOL}


def xhat_norm(g: SpectralFunction) -> float:
    """||g||_X-hat = ||v||_{L^1} + ||v||_{L^2} of the preimage v."""
    f = preimage(g)
    a = np.abs(f.values)
    return float(f.dx * a.sum() + np.sqrt(f.dx * (a ** 2).sum()))


def _finite_or_none(g):
    return g if g is not None and np.all(np.isfinite(g.values)) else None


def metric_ds(r1: SpectralFunction, rt1: SpectralFunction | None,
              r2: SpectralFunction, rt2: SpectralFunction | None, s: float) -> float:
    """d_s = ||r1 - r2||_{H^s} + ||r~1 - r~2||_{H^s}.

    The r~ term is dropped when either r~ is unbounded (exceptional data).
    """
    if not same_grid(r1, r2):
        raise ValueError("metric inputs are on different grids")
    d = hs_norm(r1.with_values(r1.values - r2.values), s)
    a, b = _finite_or_none(rt1), _finite_or_none(rt2)
    if a is not None and b is not None:
        d += hs_norm(a.with_values(a.values - b.values), s)
    return float(d)


def metric_d(r1, rt1, r2, rt2) -> float:
    """The coarser metric: X-hat norms in place of H^s."""
    if not same_grid(r1, r2):
        raise ValueError("metric inputs are on different grids")
    d = xhat_norm(r1.with_values(r1.values - r2.values))
    a, b = _finite_or_none(rt1), _finite_or_none(rt2)
    if a is not None and b is not None:
        d += xhat_norm(a.with_values(a.values - b.values))
    return float(d)


@dataclass
class MembershipReport:
    s: float
    flags: dict
    norms: dict = field(default_factory=dict)
    exceptional_flags: dict = field(default_factory=dict)

    @property
    def generic_member(self) -> bool:
        return all(self.flags.values())

    @property
    def exceptional_member(self) -> bool:
        return all(self.exceptional_flags.values())

    def to_dict(self):
        return {"s": self.s, "flags": self.flags, "norms": self.norms,
                "exceptional_flags": self.exceptional_flags,
                "generic_member": self.generic_member,
                "exceptional_member": self.exceptional_member}


def rs_membership(r: SpectralFunction, s: float, r_tilde: SpectralFunction | None = None,
                  tol: float = FLAG_TOL) -> MembershipReport:
    """Flags of the R_> definition plus H^s finiteness of r and r~.

    r~ comes from the scattering data when given, otherwise from (1-|r|^2)/k^2
    with an even extrapolation to k = 0.  Norm finiteness is judged by the
    outer-lattice share of the weighted norm.
    """
    from .involution import r_tilde_from_r
    if s <= 0.5:
        raise ValueError("s must exceed 1/2")
    k = r.k
    i0 = int(np.argmin(np.abs(k)))
    nz = np.arange(len(k)) != i0
    absr = np.abs(r.values)
    if r_tilde is None:
        r_tilde = r_tilde_from_r(r, exceptional=False)
    rt = r_tilde.values.real
    rt0 = float(rt[i0])
    r_norm, r_rep = hs_norm(r, s, report=True)
    norms = {"r_Hs": r_norm, "r_outer_fraction": r_rep["outer_fraction"]}
    rt_ok = bool(np.all(np.isfinite(rt)))
    if rt_ok:
        rt_norm, rt_rep = hs_norm(r_tilde.with_values(rt), s, report=True)
        norms.update(r_tilde_Hs=rt_norm, r_tilde_outer_fraction=rt_rep["outer_fraction"])
        rt_ok = rt_rep["stable"]
    flags = {
        "r0_is_minus_one": bool(abs(r.values[i0] + 1) < tol),
        "strictly_sub_unit": bool(np.all(absr[nz] < 1)),
        "r_tilde_regular": bool(rt_ok and r_rep["stable"]),
        "r_tilde_nonzero_at_0": bool(np.isfinite(rt0) and rt0 > tol),
    }
    exc = {"sup_below_one": bool(absr.max() < 1), "r_Hs_stable": bool(r_rep["stable"])}
    return MembershipReport(float(s), flags, norms, exc)


def algebra_reciprocal(g: SpectralFunction, s: float = 1.0, eps_inv: float = 1e-12) -> SpectralFunction:
    """1/g in 1 + H^s, where g = c + f with c the common value at the grid edges."""
    v = g.values
    c = 0.5 * (v[0] + v[-1])
    if np.min(np.abs(v)) <= eps_inv or abs(c) <= eps_inv:
        raise ZeroDivisionError("closure of the range of g contains 0: not invertible")
    inv = 1.0 / v
    cert = hs_norm(g.with_values(inv - 1.0 / c), s)
    return SpectralFunction(g.k, inv, {"limit": complex(1.0 / c), "Hs_of_remainder": cert})


def compose_analytic(coeffs, radius: float, g: SpectralFunction) -> SpectralFunction:
    """phi(g(k)) for phi = sum_n coeffs[n] z^n with radius of convergence `radius`."""
    coeffs = np.asarray(coeffs, dtype=complex)
    v = g.values
    if np.abs(v).max() >= radius:
        raise ValueError("range of g leaves the disk of convergence")
    out = np.zeros_like(v)
    for c in coeffs[::-1]:
        out = out * v + c
    return g.with_values(out)


def composition_lipschitz(coeffs, radius, g1: SpectralFunction, g2: SpectralFunction, s: float) -> float:
    """||phi(g1) - phi(g2)||_{H^s} / ||g1 - g2||_{H^s}."""
    p1 = compose_analytic(coeffs, radius, g1)
    p2 = compose_analytic(coeffs, radius, g2)
    den = hs_norm(g1.with_values(g1.values - g2.values), s)
    return hs_norm(p1.with_values(p1.values - p2.values), s) / den
