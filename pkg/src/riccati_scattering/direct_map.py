"""Forward map: Riccati triple -> (r_minus, r_plus, a~, b~, r~)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .grid import Grid, SpectralFunction, same_grid
from .potentials import RiccatiTriple, validate_triple
from .zsakns import half_line_data, jost_at_zero, wronskian

EPS_INV = 1e-12

TOLERANCES = {
    "unitarity": 1e-6,
    "symmetry_before": 1e-8,
    "tilde_two_formula": 1e-8,
    "r0_plus_one": 1e-6,
}


def _vals(x):
    return x.values if isinstance(x, SpectralFunction) else np.asarray(x, dtype=complex)


def scattering_ab(triple: RiccatiTriple, n_plus, n_minus, f_plus0, f_minus0, k):
    """Regularised coefficients a~ = k a/(k+i) and b~ = k b/(k+i), finite at k = 0.

    a = det[[n11+, conj n21-], [n21+, conj n11-]] - v0/(2ik) f+ f-
    b = det[[conj n11-(-k), n11+], [conj n21-(-k), n21+]] + v0/(2ik) f+(k) f-(-k)
    The raw determinants ride along in meta["det"] for the exceptional branch.
    """
    k = np.asarray(k, dtype=float)
    p11, p21 = (_vals(v) for v in n_plus)
    m11, m21 = (_vals(v) for v in n_minus)
    fp, fm = _vals(f_plus0), _vals(f_minus0)
    if not all(v.shape == k.shape for v in (p11, p21, m11, m21, fp, fm)):
        raise ValueError("spectral inputs are not on the common k-grid")
    v0 = float(triple.v0)
    det_a = p11 * np.conj(m11) - p21 * np.conj(m21)
    det_b = p21 * np.conj(m11[::-1]) - p11 * np.conj(m21[::-1])
    jump = v0 / (2j) / (k + 1j)
    a_t = k / (k + 1j) * det_a - jump * fp * fm
    b_t = k / (k + 1j) * det_b + jump * fp * fm[::-1]
    if not (np.all(np.isfinite(a_t)) and np.all(np.isfinite(b_t))):
        raise FloatingPointError("non-finite a~ or b~")
    return (SpectralFunction(k, a_t, {"det": det_a, "v0": v0}),
            SpectralFunction(k, b_t, {"det": det_b, "v0": v0}))


def reflection_pair(a_tilde: SpectralFunction, b_tilde: SpectralFunction):
    """r_minus = b~/a~ and r_plus = (i-k)/(i+k) b~(-k)/a~.

    When a~(0) = 0 (the exceptional class) the k = 0 value is taken from the
    ratio of the raw determinants, which stays regular there.
    """
    if not same_grid(a_tilde, b_tilde):
        raise ValueError("a~ and b~ are on different grids")
    k = a_tilde.k
    a, b = a_tilde.values, b_tilde.values
    small = np.abs(a) < EPS_INV
    zero = k == 0
    if np.any(small & ~zero):
        raise ZeroDivisionError("a~ vanishes away from k = 0: not invertible in the algebra")
    with np.errstate(divide="ignore", invalid="ignore"):
        r_minus = b / a
        r_plus = (1j - k) / (1j + k) * b[::-1] / a
    if np.any(small):
        det_a, det_b = a_tilde.meta.get("det"), b_tilde.meta.get("det")
        if det_a is None or abs(det_a[zero][0]) < EPS_INV:
            raise ZeroDivisionError("a~(0) = 0 and no regular determinant ratio is available")
        r_minus[zero] = det_b[zero] / det_a[zero]
        r_plus[zero] = -det_b[::-1][zero] / det_a[zero]
    return SpectralFunction(k, r_minus), SpectralFunction(k, r_plus)


def tilde_r(r: SpectralFunction, a_tilde: SpectralFunction):
    """r~ from 1/((k^2+1)|a~|^2), cross-checked against (1-|r|^2)/k^2 off k = 0.

    Returns (r~, report).  In the exceptional class r~ blows up like 1/k^2 and
    its k = 0 sample is +inf.
    """
    if not same_grid(r, a_tilde):
        raise ValueError("r and a~ are on different grids")
    k = r.k
    with np.errstate(divide="ignore"):
        rt = 1.0 / ((k ** 2 + 1) * np.abs(a_tilde.values) ** 2)
    nz = k != 0
    direct = (1 - np.abs(r.values[nz]) ** 2) / k[nz] ** 2
    disc = np.abs(direct - rt[nz]) / np.maximum(1.0, np.abs(rt[nz]))
    report = {"two_formula_discrepancy": float(disc.max()) if disc.size else 0.0,
              "r_tilde_at_0": float(rt[~nz][0]) if np.any(~nz) else None}
    return SpectralFunction(k, rt.astype(complex)), report


@dataclass
class ScatteringData:
    r_minus: SpectralFunction
    r_plus: SpectralFunction
    a_tilde: SpectralFunction
    b_tilde: SpectralFunction
    r_tilde: SpectralFunction
    v0: float
    report: dict = field(default_factory=dict)

    @property
    def k(self):
        return self.r_minus.k

    @property
    def exceptional(self):
        return self.v0 == 0.0

    def ab(self):
        """Un-regularised (a, b) on k != 0."""
        k = self.k
        nz = k != 0
        fac = (k[nz] + 1j) / k[nz]
        return k[nz], self.a_tilde.values[nz] * fac, self.b_tilde.values[nz] * fac

    def passed(self) -> bool:
        return all(c["pass"] for c in self.report.get("checks", {}).values())

    _FILES = {"r_minus": "r_minus.csv", "r_plus": "r_plus.csv", "a_tilde": "a_tilde.csv",
              "b_tilde": "b_tilde.csv", "r_tilde": "r_tilde.csv"}

    def write_bundle(self, out_dir, name="scattering.json"):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for attr, fname in self._FILES.items():
            getattr(self, attr).to_csv(out / fname)
        doc = {"v0": self.v0, "class": "exceptional" if self.exceptional else "generic",
               "dk": self.k[1] - self.k[0], "m": len(self.k) // 2,
               "files": dict(self._FILES), "report": _jsonable(self.report)}
        (out / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return out / name

    @classmethod
    def read_bundle(cls, path):
        path = Path(path)
        doc = json.loads(path.read_text())
        parts = {a: SpectralFunction.from_csv(path.parent / f) for a, f in doc["files"].items()}
        for a in ("r_tilde",):
            parts[a] = parts[a].with_values(parts[a].values.real)
        return cls(v0=float(doc["v0"]), report=doc.get("report", {}), **parts)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    return obj


def direct_map(triple: RiccatiTriple, grid: Grid | None = None,
               tolerances: dict | None = None) -> ScatteringData:
    """Scattering data of a triple on the grid's k-samples, with invariant checks."""
    grid = grid or Grid()
    tol = {**TOLERANCES, **(tolerances or {})}
    triple = validate_triple(triple)
    k = grid.k
    sp, sm = half_line_data(triple.u_minus, triple.u_plus, grid, k)
    fp, fm = jost_at_zero((sp.n11, sp.n21), (sm.n11, sm.n21))
    a_t, b_t = scattering_ab(triple, (sp.n11, sp.n21), (sm.n11, sm.n21), fp, fm, k)
    r_m, r_p = reflection_pair(a_t, b_t)

    sym_before = max(f.symmetry_defect() for f in (a_t, b_t, r_m, r_p) if np.all(np.isfinite(f.values)))
    a_s = SpectralFunction(k, a_t.symmetrized().values, a_t.meta)
    b_s = SpectralFunction(k, b_t.symmetrized().values, b_t.meta)
    r_m, r_p = r_m.symmetrized(), r_p.symmetrized()
    r_t, tilde_rep = tilde_r(r_m, a_s)

    nz = k != 0
    fac = (k[nz] + 1j) / k[nz]
    a, b = a_s.values[nz] * fac, b_s.values[nz] * fac
    unit = float(np.abs(np.abs(a) ** 2 - np.abs(b) ** 2 - 1).max())
    det_dev = float(max(np.abs(np.abs(sp.n11) ** 2 - np.abs(sp.n21) ** 2 - 1).max(),
                        np.abs(np.abs(sm.n11) ** 2 - np.abs(sm.n21) ** 2 - 1).max()))
    mod_gap = float(np.abs(np.abs(r_m.values) - np.abs(r_p.values)).max())
    sup_r = float(np.abs(r_m.values[nz]).max())
    checks = {
        "unitarity": {"value": unit, "tol": tol["unitarity"]},
        "symmetry_before": {"value": sym_before, "tol": tol["symmetry_before"]},
        "tilde_two_formula": {"value": tilde_rep["two_formula_discrepancy"],
                              "tol": tol["tilde_two_formula"]},
        "modulus_r_plus_vs_minus": {"value": mod_gap, "tol": 1e-8},
        "det_N": {"value": det_dev, "tol": 1e-8},
    }
    i0 = int(np.argmin(np.abs(k)))
    if triple.exceptional:
        checks["sup_r_below_one"] = {"value": float(np.abs(r_m.values).max()), "tol": 1.0,
                                     "strict": True}
    else:
        checks["r0_plus_one"] = {"value": float(max(abs(r_m.values[i0] + 1), abs(r_p.values[i0] + 1))),
                                 "tol": tol["r0_plus_one"]}
        checks["r_tilde0_positive"] = {"value": float(r_t.values[i0].real), "tol": 0.0, "lower": True}
        checks["sub_unit_off_zero"] = {"value": sup_r, "tol": 1.0, "strict": True}
    for c in checks.values():
        if c.get("lower"):
            c["pass"] = bool(c["value"] > c["tol"])
        elif c.get("strict"):
            c["pass"] = bool(c["value"] < c["tol"])
        else:
            c["pass"] = bool(c["value"] <= c["tol"])
    report = {"class": triple.kind, "backend": _kernels.backend(), "checks": checks,
              "r_tilde_at_0": tilde_rep["r_tilde_at_0"]}
    return ScatteringData(r_m, r_p, a_s, b_s, r_t, float(triple.v0), report)


def ab_wronskian_oracle(triple: RiccatiTriple, k: float, x_probe: float = 0.0,
                        grid: Grid | None = None):
    """(a, b) at one k != 0 from Wronskians of Jost solutions evaluated at x_probe <= 0.

    f_plus is carried across x = 0 by the quasi-derivative jump
    f^[1](0-) = f^[1](0+) - v0 f(0), then down through the left cells; f_minus(., +-k)
    come up from -X.  x_probe is snapped to a cell boundary.
    """
    grid = grid or Grid()
    if k == 0:
        raise ZeroDivisionError("the Wronskian denominator 2ik vanishes at k = 0")
    if x_probe > 0:
        raise ValueError("x_probe must be <= 0")
    h = grid.h
    xb = max(round(x_probe / h) * h, -grid.X)
    xm, xp = grid.x_minus, grid.x_plus
    um, up = triple.u_minus.sample(xm), triple.u_plus.sample(xp)
    kk = np.array([k, -k], dtype=float)

    p11, p21 = _kernels.propagate_cells(up[::-1], xp[::-1], kk[:1], h, -1.0)
    f0 = p11 + p21
    fq0 = 1j * k * (p11 - p21) - triple.v0 * f0
    psi11 = 0.5 * (f0 + fq0 / (1j * k))
    psi21 = 0.5 * (f0 - fq0 / (1j * k))
    above = xm > xb
    n11, n21 = _kernels.propagate_cells(um[above][::-1], xm[above][::-1], kk[:1], h, -1.0,
                                        psi11, psi21)
    e = np.exp(1j * k * xb)
    fplus = e * n11 + n21 / e
    fplus_q = 1j * k * (e * n11 - n21 / e)

    below = ~above
    m11, m21 = _kernels.propagate_cells(um[below], xm[below], kk, h, 1.0)
    ee = np.exp(1j * kk * xb)
    fminus = np.conj(ee * m11 + m21 / ee)
    fminus_q = np.conj(1j * kk * (ee * m11 - m21 / ee))

    a = wronskian(fplus[0], fplus_q[0], fminus[0], fminus_q[0]) / \
        wronskian(fminus[1], fminus_q[1], fminus[0], fminus_q[0])
    b = wronskian(fplus[0], fplus_q[0], fminus[1], fminus_q[1]) / \
        wronskian(fminus[0], fminus_q[0], fminus[1], fminus_q[1])
    return complex(a), complex(b)
