"""Bond percolation thresholds from high-order non-backtracking matrices."""

from .generators import BaConfig, ForestFireConfig, barabasi_albert, forest_fire, ring, triangle_ring
from .graph import (
    Graph,
    GraphParseError,
    connected_components,
    degree_stats,
    largest_connected_component,
    load_edge_list,
    parse_edge_list,
    serialize_edge_list,
)
from .nbt import assemble_m, build_b, build_via_line_graph, enumerate_paths
from .percolation import (
    empirical_threshold,
    message_passing_s1,
    message_passing_theta,
    newman_ziff_run,
    percolation_curves,
)
from .spectral import SpectralResult, spectral_radius, spectral_radius_of_b2_via_m
from .thresholds import EstimateOptions, ThresholdEstimate, compare, estimate_pc

__version__ = "0.1.0"

__all__ = [
    "BaConfig", "ForestFireConfig", "barabasi_albert", "forest_fire", "ring", "triangle_ring",
    "Graph", "GraphParseError", "connected_components", "degree_stats",
    "largest_connected_component", "load_edge_list", "parse_edge_list", "serialize_edge_list",
    "assemble_m", "build_b", "build_via_line_graph", "enumerate_paths",
    "empirical_threshold", "message_passing_s1", "message_passing_theta", "newman_ziff_run",
    "percolation_curves", "SpectralResult", "spectral_radius", "spectral_radius_of_b2_via_m",
    "EstimateOptions", "ThresholdEstimate", "compare", "estimate_pc",
]
