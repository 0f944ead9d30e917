"""Uniform x- and k-grids, sampled-function carriers, and their CSV form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Cell lattice on [-X, X] plus the matching symmetric k-grid.

    Cell centres sit at -X + (n + 1/2) h, so x = 0 is a cell boundary.
    The k-step is pi / (2X), which makes exp(2ikx) periodic over the window.
    """

    X: float = 20.0
    N: int = 2048
    M: int | None = None  # number of positive k samples; defaults to N // 2

    def __post_init__(self):
        if self.X <= 0 or self.N < 4 or self.N % 2:
            raise ValueError("need X > 0 and an even N >= 4")
        if self.M is None:
            object.__setattr__(self, "M", self.N // 2)
        if self.M < 1:
            raise ValueError("M must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.X / self.N

    @property
    def dk(self) -> float:
        return np.pi / (2.0 * self.X)

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1) * self.dk

    @property
    def k_max(self) -> float:
        return self.M * self.dk

    @property
    def x(self) -> np.ndarray:
        return -self.X + (np.arange(self.N) + 0.5) * self.h

    @property
    def x_plus(self) -> np.ndarray:
        return self.x[self.N // 2:]

    @property
    def x_minus(self) -> np.ndarray:
        return self.x[: self.N // 2]

    @classmethod
    def with_kmax(cls, X=20.0, N=2048, k_max=None):
        """Grid whose k range reaches at least k_max (default: the full N/2 band)."""
        if k_max is None:
            return cls(X, N)
        dk = np.pi / (2.0 * X)
        return cls(X, N, max(N // 2, int(np.ceil(k_max / dk - 1e-9))))


@dataclass(frozen=True)
class GridFunction:
    x_start: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if not np.issubdtype(vals.dtype, np.complexfloating):
            vals = vals.astype(float)
        object.__setattr__(self, "values", vals)
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if not np.all(np.isfinite(vals)):
            raise ValueError("GridFunction samples must be finite")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.x_start + self.dx * np.arange(self.n)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def sample(self, x) -> np.ndarray:
        """Linear interpolation, zero outside the sampled window."""
        x = np.asarray(x, dtype=float)
        if self.n == 0:
            return np.zeros_like(x)
        xs = self.x
        tol = 1e-9 * self.dx
        inside = (x >= xs[0] - tol) & (x <= xs[-1] + tol)
        if self.is_complex:
            out = np.interp(x, xs, self.values.real) + 1j * np.interp(x, xs, self.values.imag)
        else:
            out = np.interp(x, xs, self.values)
        return np.where(inside, out, 0.0)

    @classmethod
    def from_samples(cls, x, values):
        x = np.asarray(x, dtype=float)
        if len(x) < 2:
            raise ValueError("need at least two samples")
        dx = x[1] - x[0]
        if not np.allclose(np.diff(x), dx, rtol=1e-9, atol=1e-12):
            raise ValueError("samples are not uniformly spaced")
        return cls(float(x[0]), float(dx), np.asarray(values))

    def to_csv(self, path):
        header = {"x_start": self.x_start, "dx": self.dx, "n": self.n,
                  "kind": "complex" if self.is_complex else "real"}
        _write_csv(path, header, self.x, self.values, "x")

    @classmethod
    def from_csv(cls, path):
        meta, cols = _read_csv(path)
        vals = cols[1] + 1j * cols[2] if meta.get("kind") == "complex" else cols[1]
        return cls(float(meta["x_start"]), float(meta["dx"]), vals)


@dataclass(frozen=True)
class SpectralFunction:
    k: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        if k.shape != vals.shape or k.ndim != 1 or len(k) % 2 == 0:
            raise ValueError("k grid and samples must be 1-d of equal odd length")
        if not np.allclose(k, -k[::-1], atol=1e-12 * max(1.0, abs(k[-1]))):
            raise ValueError("k grid must be symmetric about 0")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", vals)

    @property
    def dk(self) -> float:
        return float(self.k[1] - self.k[0])

    @property
    def m(self) -> int:
        return len(self.k) // 2

    def reflected(self) -> np.ndarray:
        """Samples at -k."""
        return self.values[::-1]

    def symmetry_defect(self) -> float:
        """max |s(-k) - conj s(k)|."""
        return float(np.max(np.abs(self.values[::-1] - np.conj(self.values))))

    def symmetrized(self) -> "SpectralFunction":
        v = 0.5 * (self.values + np.conj(self.values[::-1]))
        return SpectralFunction(self.k, v, dict(self.meta))

    def with_values(self, values) -> "SpectralFunction":
        return SpectralFunction(self.k, values, dict(self.meta))

    def to_csv(self, path):
        header = {"dk": self.dk, "m": self.m, "symmetric": True}
        _write_csv(path, header, self.k, self.values, "k", force_complex=True)

    @classmethod
    def from_csv(cls, path):
        meta, cols = _read_csv(path)
        return cls(cols[0], cols[1] + 1j * cols[2])


def same_grid(*fs: SpectralFunction) -> bool:
    k0 = fs[0].k
    return all(f.k.shape == k0.shape and np.allclose(f.k, k0, rtol=0, atol=1e-12) for f in fs[1:])


def _write_csv(path, header, coord, values, cname, force_complex=False):
    path = Path(path)
    lines = ["# " + json.dumps(header, sort_keys=True)]
    if np.iscomplexobj(values) or force_complex:
        values = np.asarray(values, dtype=complex)
        lines.append(f"{cname},re,im")
        lines += [f"{c:.17g},{v.real:.17g},{v.imag:.17g}" for c, v in zip(coord, values)]
    else:
        lines.append(f"{cname},value")
        lines += [f"{c:.17g},{v:.17g}" for c, v in zip(coord, values)]
    path.write_text("\n".join(lines) + "\n")


def _read_csv(path):
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing JSON header line")
        meta = json.loads(first[1:])
        fh.readline()
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return meta, data.T
