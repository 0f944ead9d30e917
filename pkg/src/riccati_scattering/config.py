"""Job configuration: one JSON document per run, every default in DEFAULTS.

| key                | default  | meaning                                               |
|--------------------|----------|-------------------------------------------------------|
| grid.X             | 20.0     | half-width of the x-window                            |
| grid.N             | 2048     | number of cells on [-X, X]                            |
| grid.k_max         | 40.0     | smallest acceptable k range; the grid keeps N/2 steps |
|                    |          | of pi/(2X) (about 80.4 at the defaults) if that is more|
| s                  | 1.0      | Sobolev index, must exceed 1/2                        |
| tolerances.*       | see below| invariant-check thresholds for the direct map         |
| corpus             | all      | corpus entries for `verify`                           |
| s_sweep            | [s]      | membership indices for `verify`                       |
| lipschitz_probes   | 20       | random perturbations per base triple in `verify`      |
| lipschitz_radius   | 0.1      | largest perturbation size                             |
| seed               | 0        | RNG seed (the --seed flag overrides it)               |

Potential specs ("potential" key):

    {"family": "delta", "gamma": 2}
    {"family": "zero", "v0": 0}
    {"family": "gaussian", "l1": 0.5, "centre": 0.3}
    {"family": "box", "height": 0.5, "lo": -1, "hi": 2}
    {"family": "corpus", "name": "asymmetric"}
    {"family": "files", "u_minus": "um.csv", "u_plus": "up.csv", "v0": 0.8}

`inverse` and `involute` read a scattering bundle named by "input"; `verify`
additionally audits that bundle when "input" is present.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .direct_map import TOLERANCES
from .grid import Grid

MODES = ("direct", "inverse", "roundtrip", "involute", "verify")

DEFAULTS = {
    "grid": {"X": 20.0, "N": 2048, "k_max": 40.0},
    "s": 1.0,
    "tolerances": dict(TOLERANCES),
    "corpus": None,
    "s_sweep": None,
    "lipschitz_probes": 20,
    "lipschitz_radius": 0.1,
    "seed": 0,
}

FAMILIES = {"delta", "zero", "gaussian", "box", "corpus", "files"}


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    mode: str
    grid: dict
    s: float
    tolerances: dict
    potential: dict | None = None
    input: str | None = None
    corpus: list | None = None
    s_sweep: list | None = None
    lipschitz_probes: int = 20
    lipschitz_radius: float = 0.1
    seed: int = 0
    base_dir: Path = field(default_factory=Path.cwd)

    def make_grid(self) -> Grid:
        g = self.grid
        return Grid.with_kmax(float(g["X"]), int(g["N"]), float(g["k_max"]))

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def _merge(base, extra):
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = {**out[key], **val}
        else:
            out[key] = val
    return out


def load_config(path, mode: str | None = None, seed: int | None = None) -> JobConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return parse_config(doc, mode, seed, base_dir=path.parent)


def parse_config(doc: dict, mode: str | None = None, seed: int | None = None,
                 base_dir: Path | None = None) -> JobConfig:
    cfg_mode = doc.get("mode")
    if mode and cfg_mode and cfg_mode != mode:
        raise ConfigError(f"config mode {cfg_mode!r} does not match command {mode!r}")
    mode = mode or cfg_mode
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    unknown = set(doc) - set(DEFAULTS) - {"mode", "potential", "input", "out"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = _merge(DEFAULTS, {k: v for k, v in doc.items() if k != "out"})
    if seed is not None:
        merged["seed"] = seed

    try:
        s = float(merged["s"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("s must be a number") from exc
    if not s > 0.5:
        raise ConfigError(f"s must exceed 1/2, got {s}")
    for s_i in merged["s_sweep"] or []:
        if not float(s_i) > 0.5:
            raise ConfigError(f"s_sweep entries must exceed 1/2, got {s_i}")
    g = merged["grid"]
    if not (float(g["X"]) > 0 and int(g["N"]) >= 4 and int(g["N"]) % 2 == 0 and float(g["k_max"]) > 0):
        raise ConfigError("grid needs X > 0, an even N >= 4 and k_max > 0")

    pot = merged.get("potential")
    if mode in ("direct", "roundtrip"):
        if not isinstance(pot, dict) or pot.get("family") not in FAMILIES:
            raise ConfigError(f"{mode} needs a potential with family in {sorted(FAMILIES)}")
    if mode in ("inverse", "involute") and not merged.get("input"):
        raise ConfigError(f"{mode} needs an 'input' scattering bundle")
    if int(merged["lipschitz_probes"]) < 1:
        raise ConfigError("lipschitz_probes must be positive")

    return JobConfig(mode=mode, grid=g, s=s, tolerances=merged["tolerances"], potential=pot,
                     input=merged.get("input"), corpus=merged["corpus"], s_sweep=merged["s_sweep"],
                     lipschitz_probes=int(merged["lipschitz_probes"]),
                     lipschitz_radius=float(merged["lipschitz_radius"]), seed=int(merged["seed"]),
                     base_dir=base_dir or Path.cwd())


def build_triple(cfg: JobConfig, grid: Grid):
    from .corpus import box_triple, corpus_triple, gaussian_triple
    from .grid import GridFunction
    from .potentials import make_delta_triple, triple_from_values, zero_triple

    pot = cfg.potential
    fam = pot["family"]
    try:
        if fam == "delta":
            return make_delta_triple(float(pot["gamma"]), grid)
        if fam == "zero":
            return zero_triple(grid, float(pot.get("v0", 0.0)))
        if fam == "gaussian":
            return gaussian_triple(float(pot["l1"]), grid, float(pot.get("centre", 0.3)))
        if fam == "box":
            return box_triple(grid, float(pot.get("height", 0.5)), float(pot.get("lo", -1.0)),
                              float(pot.get("hi", 2.0)))
        if fam == "corpus":
            return corpus_triple(pot["name"], grid)
        um = GridFunction.from_csv(cfg.resolve(pot["u_minus"]))
        up = GridFunction.from_csv(cfg.resolve(pot["u_plus"]))
        return triple_from_values(um.sample(grid.x_minus), up.sample(grid.x_plus),
                                  float(pot.get("v0", 0.0)), grid)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad {fam} potential spec: {exc}") from exc
