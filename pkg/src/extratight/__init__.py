"""Extra-tight trails and tours in uniform hypergraphs, and the simplicial
complexes of large diameter built from them."""

from .complex import FacetFamily, certify_extremal, diameter, dual_graph, hs_bound, shadow
from .divisibility import compute_s, div_vector, is_divisible, tour_feasible, trail_feasible
from .hypergraph import DGraph, GraphFormatError, ParameterError, complete, link
from .trails import VertexSeq, covered_edges, edge_set, trail_degrees, validate

__all__ = [
    "DGraph", "FacetFamily", "GraphFormatError", "ParameterError", "VertexSeq",
    "certify_extremal", "complete", "compute_s", "covered_edges", "diameter", "div_vector",
    "dual_graph", "edge_set", "hs_bound", "is_divisible", "link", "shadow", "tour_feasible",
    "trail_degrees", "trail_feasible", "validate",
]
