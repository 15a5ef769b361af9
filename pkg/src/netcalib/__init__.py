"""Structural metric profiles of social networks and measurement-calibrated synthetic counterparts."""
from .calibration import ParamGrid, evaluation_distance, grid_search
from .graph import Graph, largest_connected_component, parse_edge_list, read_edge_list, simplify
from .metrics import METRIC_NAMES, DEFAULT_SELECTION, MetricVector, metric_vector, project
from .stats import canberra, select_metrics, spearman

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SELECTION", "Graph", "METRIC_NAMES", "MetricVector", "ParamGrid", "canberra",
    "evaluation_distance", "grid_search", "largest_connected_component", "metric_vector",
    "parse_edge_list", "project", "read_edge_list", "select_metrics", "simplify", "spearman",
]
