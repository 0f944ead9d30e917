"""Boundary values of the transmission coefficient and the left/right involution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .grid import SpectralFunction, same_grid


def hilbert_transform(f, dk, tail_fit: float = 0.1):
    """(1/pi) PV int f(s)/(k - s) ds at the grid points, for real even-decaying f.

    The sampled part is the exact transform of the sinc interpolant,
    H f(k_i) = sum_{i-j odd} 2 f_j / (pi (i-j)), done as an FFT convolution.
    Beyond the grid edge f is continued as c/s^2, with c fitted on the outer
    `tail_fit` fraction of the grid, and that piece is integrated in closed form.
    Returns (Hf, c, K_edge).
    """
    f = np.asarray(f, dtype=float)
    n = len(f)
    m = n // 2
    d = np.arange(-(n - 1), n)
    ker = np.zeros(len(d))
    odd = d % 2 == 1
    ker[odd] = 2.0 / (np.pi * d[odd])
    Hf = fftconvolve(f, ker, mode="full")[n - 1: 2 * n - 1]

    k = (np.arange(n) - m) * dk
    K = m * dk + dk / 2
    outer = np.abs(k) >= (1 - tail_fit) * m * dk
    c = float(np.mean(f[outer] * k[outer] ** 2)) if np.any(outer) else 0.0
    small = np.abs(k) < 1e-3 * K
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = 2 / (k * K) + np.log(np.abs((k - K) / (k + K))) / k ** 2
    tail[small] = -2 * k[small] / (3 * K ** 3)
    return Hf + c / np.pi * tail, c, K


def periodic_hilbert(f):
    """Conjugate function of samples covering one period (last sample = first).

    Fourier multiplier -i sign(n), the periodic counterpart of hilbert_transform.
    """
    f = np.asarray(f, dtype=float)
    m = len(f) // 2
    g = np.roll(f[:-1], -m)
    n = np.fft.fftfreq(2 * m, 1.0 / (2 * m))
    mult = -1j * np.sign(n)
    mult[np.abs(n) == m] = 0.0
    H = np.roll(np.fft.ifft(mult * np.fft.fft(g)).real, m)
    return np.append(H, H[0])


@dataclass(frozen=True)
class TransmissionData:
    """t(k) = T_J(k) exp(-L/2 - i H[L/2]) with T_J = 2ik/(2ik - J).

    L = -log(r~ (k^2 + J^2/4)) is the log-modulus left after dividing out the
    transmission of the delta potential of strength J; J = 2/sqrt(r~(0)) matches
    the pole of a(k) at k = 0, and J = 0 in the exceptional class.
    """
    t: SpectralFunction
    r_tilde: SpectralFunction
    phase: np.ndarray      # H[L/2]
    exceptional: bool
    template_strength: float
    tail_coefficient: float
    method: str

    def ratio(self) -> np.ndarray:
        """t(k)/t(-k), regular at k = 0 in both classes."""
        k = self.t.k
        J = self.template_strength
        rot = np.exp(-2j * self.phase)
        if J == 0.0:
            return rot
        return (2j * k + J) / (2j * k - J) * rot

    @property
    def tail_bound(self) -> float:
        """Size of the modelled log-modulus beyond the grid edge (|c|/K)."""
        return abs(self.tail_coefficient) / self.t.k[-1]


def _even_extrapolate_at_zero(v, i0):
    # quadratic in k^2 through the samples at dk, 2dk, 3dk
    return 3 * v[i0 + 1] - 3 * v[i0 + 2] + v[i0 + 3]


def transmission_boundary(r_tilde: SpectralFunction, k=None, exceptional: bool | None = None,
                          r: SpectralFunction | None = None):
    """Boundary values of t(z) = z/(z+i) exp(Cauchy integral of log((s^2+1) r~)/2).

    Generic class: the part log(4(k^2+1)/(4k^2+J^2)) of the integrand is the
    log-modulus of (k+i)/k * 2ik/(2ik-J), whose boundary phase is known, so only
    the remainder goes through the principal-value transform on the line.
    Exceptional class: r~ ~ 1/k^2 and the remainder is -log(1-|r|^2), a periodic
    function of k on the cell lattice, so its conjugate is taken periodically.
    The k = 0 sample then comes from r when given, else by even extrapolation.
    """
    k = r_tilde.k if k is None else np.asarray(k, dtype=float)
    rt = r_tilde.values.real
    i0 = int(np.argmin(np.abs(k)))
    if exceptional is None:
        exceptional = not np.isfinite(rt[i0])
    nz = np.arange(len(k)) != i0
    if np.any(rt[nz] <= 0) or not np.all(np.isfinite(rt[nz])):
        raise ValueError("r~ must be finite and strictly positive off k = 0")
    dk = k[1] - k[0]
    if exceptional:
        J = 0.0
        L = np.empty(len(k))
        L[nz] = -np.log(k[nz] ** 2 * rt[nz])
        if r is not None:
            L[i0] = -np.log(1 - abs(r.values[i0]) ** 2)
        else:
            L[i0] = _even_extrapolate_at_zero(L, i0)
        H, c, method = periodic_hilbert(0.5 * L), 0.0, "periodic"
        t = np.exp(-0.5 * L - 1j * H)
    else:
        if not (np.isfinite(rt[i0]) and rt[i0] > 0):
            raise ValueError("r~(0) must be finite and positive in the generic class")
        J = 2.0 / np.sqrt(rt[i0])
        L = -np.log(rt * (k ** 2 + J ** 2 / 4))
        H, c, _ = hilbert_transform(0.5 * L, dk)
        method = "line"
        t = 2j * k / (2j * k - J) * np.exp(-0.5 * L - 1j * H)
    return TransmissionData(SpectralFunction(k, t), r_tilde, H, bool(exceptional), J, c, method)


def involute(r: SpectralFunction, t: TransmissionData) -> SpectralFunction:
    """r#(k) = -t(k)/t(-k) r(-k)."""
    if not same_grid(r, t.t):
        raise ValueError("r and t are on different grids")
    tv = t.t.values
    nz = r.k != 0
    if np.any(np.abs(tv[::-1][nz]) < 1e-12):
        raise ZeroDivisionError("t(-k) vanishes away from k = 0")
    return SpectralFunction(r.k, -t.ratio() * r.values[::-1])


def r_tilde_from_r(r: SpectralFunction, exceptional: bool = False) -> SpectralFunction:
    """(1-|r|^2)/k^2; the generic k = 0 value extrapolates 1/r~ = (k^2+1)|a~|^2 evenly."""
    k = r.k
    i0 = int(np.argmin(np.abs(k)))
    v = np.ones(len(k))
    nz = np.arange(len(k)) != i0
    v[nz] = (1 - np.abs(r.values[nz]) ** 2) / k[nz] ** 2
    v[i0] = np.inf if exceptional else 1.0 / _even_extrapolate_at_zero(1.0 / v, i0)
    return SpectralFunction(k, v.astype(complex))


def involution(r: SpectralFunction, r_tilde: SpectralFunction | None = None,
               exceptional: bool | None = None) -> SpectralFunction:
    """The map r -> r# with t rebuilt from r~.

    Pass the r~ of the scattering data whenever it is known: deriving r~(0)
    from r alone is an extrapolation that a coarse k-grid resolves poorly when
    a(k) has a zero close to the real axis.
    """
    if r_tilde is None:
        if exceptional is None:
            i0 = int(np.argmin(np.abs(r.k)))
            exceptional = abs(abs(r.values[i0]) - 1) > 1e-6
        r_tilde = r_tilde_from_r(r, exceptional)
    return involute(r, transmission_boundary(r_tilde, exceptional=exceptional, r=r))
