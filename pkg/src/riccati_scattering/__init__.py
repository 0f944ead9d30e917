"""Direct and inverse scattering for Schroedinger operators with Miura potentials.

Potentials enter as Riccati triples (u_minus on x < 0, u_plus on x > 0, v0);
the direct map returns reflection data, the inverse map solves the GLM
equations for both representatives and recovers v0.
"""
from .corpus import corpus, corpus_triple
from .direct_map import ScatteringData, direct_map
from .grid import Grid, GridFunction, SpectralFunction
from .inverse_map import ReconstructionResult, reconstruct_riccati
from .involution import involution, transmission_boundary
from .potentials import RiccatiTriple, make_delta_triple, triple_from_functions, triple_from_values
from .sobolev import hs_norm, metric_d, metric_ds, rs_membership

__version__ = "0.1.0"

__all__ = [
    "Grid", "GridFunction", "SpectralFunction", "RiccatiTriple", "ScatteringData",
    "ReconstructionResult", "corpus", "corpus_triple", "direct_map", "reconstruct_riccati",
    "involution", "transmission_boundary", "make_delta_triple", "triple_from_functions",
    "triple_from_values", "hs_norm", "metric_d", "metric_ds", "rs_membership",
]
