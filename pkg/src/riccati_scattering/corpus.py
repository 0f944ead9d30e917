"""Named test triples used by the acceptance suite, the CLI and the benchmarks."""
from __future__ import annotations

import numpy as np

from .grid import Grid
from .potentials import RiccatiTriple, make_delta_triple, triple_from_functions


def _gaussian(l1_norm, centre=0.3):
    # integral over the line is l1_norm; each half keeps its own side of it
    return lambda x: l1_norm / np.sqrt(np.pi) * np.exp(-(x - centre) ** 2)


def _box(height=0.5, lo=-1.0, hi=2.0):
    return lambda x: np.where((x > lo) & (x < hi), height, 0.0)


def gaussian_triple(l1_norm: float, grid: Grid, centre: float = 0.3) -> RiccatiTriple:
    """u = c e^{-(x-centre)^2} on the whole line (exceptional, one u serves both sides)."""
    g = _gaussian(l1_norm, centre)
    return triple_from_functions(g, g, 0.0, grid)


def box_triple(grid: Grid, height=0.5, lo=-1.0, hi=2.0) -> RiccatiTriple:
    b = _box(height, lo, hi)
    return triple_from_functions(b, b, 0.0, grid)


def asymmetric_triple(grid: Grid) -> RiccatiTriple:
    """Two unrelated half-line representatives glued by v0 = 0.8."""
    return triple_from_functions(lambda x: 0.4 * np.exp(-(x + 1) ** 2),
                                 lambda x: -0.3 * x * np.exp(-x), 0.8, grid)


def weak_jump_triple(grid: Grid) -> RiccatiTriple:
    """Generic triple with a small v0; a(k) has a zero near the real axis."""
    return triple_from_functions(lambda x: 0.4 * np.exp(-(x + 1) ** 2),
                                 lambda x: 0.3 * np.exp(-(x - 0.5) ** 2), 0.5, grid)


_BUILDERS = {
    "delta_0.5": lambda g: make_delta_triple(0.5, g),
    "delta_1": lambda g: make_delta_triple(1.0, g),
    "delta_2": lambda g: make_delta_triple(2.0, g),
    "gaussian_0.5": lambda g: gaussian_triple(0.5, g),
    "gaussian_2": lambda g: gaussian_triple(2.0, g),
    "box": box_triple,
    "asymmetric": asymmetric_triple,
}

STRESS = {"weak_jump": weak_jump_triple}


def corpus_names():
    return list(_BUILDERS)


def corpus_triple(name: str, grid: Grid | None = None) -> RiccatiTriple:
    grid = grid or Grid()
    if name in _BUILDERS:
        return _BUILDERS[name](grid)
    if name in STRESS:
        return STRESS[name](grid)
    raise KeyError(f"unknown corpus entry {name!r}; choose from {corpus_names() + list(STRESS)}")


def corpus(grid: Grid | None = None) -> dict:
    grid = grid or Grid()
    return {name: build(grid) for name, build in _BUILDERS.items()}
