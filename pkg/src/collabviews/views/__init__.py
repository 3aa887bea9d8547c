"""Feature graphs, community detection and exhaustive partition search."""

from .community import (
    CommunityConfig,
    ViewPartition,
    bell_number,
    detect_views,
    enumerate_partitions,
    modularity,
)
from .exhaustive import ExhaustiveResult, exhaustive_view_search
from .graph import FeatureGraph, GraphError, build_graph

__all__ = [
    "CommunityConfig",
    "ExhaustiveResult",
    "FeatureGraph",
    "GraphError",
    "ViewPartition",
    "bell_number",
    "build_graph",
    "detect_views",
    "enumerate_partitions",
    "exhaustive_view_search",
    "modularity",
]
