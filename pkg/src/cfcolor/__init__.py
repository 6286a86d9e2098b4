"""Conflict-free edge coloring: verifier, exact search, complete-graph and nearly-regular constructions."""

from .complete import cf_color_complete, color_complete_partial, log_bound
from .exact import SearchConfig, exact_cf_index, is_cf_colorable
from .graph import Graph, complete_graph, gnp_random, random_regular, read_graph, write_graph
from .nearly_regular import PipelineConfig, RunReport, color_nearly_regular, color_nearly_regular_best
from .verify import EdgeColoring, SatisfactionReport, verify

__all__ = [
    "Graph",
    "complete_graph",
    "gnp_random",
    "random_regular",
    "read_graph",
    "write_graph",
    "EdgeColoring",
    "SatisfactionReport",
    "verify",
    "SearchConfig",
    "exact_cf_index",
    "is_cf_colorable",
    "cf_color_complete",
    "color_complete_partial",
    "log_bound",
    "PipelineConfig",
    "RunReport",
    "color_nearly_regular",
    "color_nearly_regular_best",
]

__version__ = "0.1.0"
