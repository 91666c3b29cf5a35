"""Sublinear-time approximate k-clique counting in the degree/neighbor/pair query model."""

from .baseline import (
    CliqueCensus,
    count_cliques_exact,
    count_cliques_naive,
    gen_gnm,
    gen_path_plus_clique,
)
from .estimator import EstimateReport, approximate_cliques, unassigned_clique_mass
from .graph import Graph, QueryOracle, load_edge_list, precedes
from .params import Constants, Params, derive_params
from .search import approximate_cliques_auto, geometric_search, make_search_config

__all__ = [
    "CliqueCensus",
    "Constants",
    "EstimateReport",
    "Graph",
    "Params",
    "QueryOracle",
    "approximate_cliques",
    "approximate_cliques_auto",
    "count_cliques_exact",
    "count_cliques_naive",
    "derive_params",
    "gen_gnm",
    "gen_path_plus_clique",
    "geometric_search",
    "load_edge_list",
    "make_search_config",
    "precedes",
    "unassigned_clique_mass",
]

__version__ = "0.1.0"
