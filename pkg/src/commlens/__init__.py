"""Community detection with instruments for its own instability.

The package implements modularity-based community detection (two-phase
greedy optimization over a weighted undirected graph), force-directed
rendering, and a diagnostics layer that treats the algorithm itself as
an object of study: seed ensembles, partition-similarity metrics,
co-classification matrices, an exhaustive small-graph oracle, the
ring-of-cliques resolution probe, and a detection/recommendation
feedback-loop simulation.
"""

from .diagnostics import (
    DiagnosticsReport,
    ResolutionProbeReport,
    brute_force_best_partition,
    partition_similarity,
    resolution_probe,
    run_ensemble,
)
from .echo import LoopConfig, LoopTrajectory, mixing_ratio, recommend_links, simulate_loop
from .errors import (
    CommlensError,
    ParseError,
    SizeLimitError,
    UndefinedModularityError,
    ValidationError,
)
from .graph import (
    Graph,
    MetaGraph,
    Partition,
    aggregate,
    load_edge_list,
    parse_edge_list,
    random_graph,
    ring_of_cliques,
)
from .layout import SvgOptions, coords_to_tsv, fruchterman_reingold, render_svg
from .louvain import LouvainResult, local_move_phase, louvain, project_partition
from .modularity import CommunityState, modularity, modularity_pairwise

__version__ = "0.1.0"

__all__ = [
    "CommlensError",
    "CommunityState",
    "DiagnosticsReport",
    "Graph",
    "LoopConfig",
    "LoopTrajectory",
    "LouvainResult",
    "MetaGraph",
    "ParseError",
    "Partition",
    "ResolutionProbeReport",
    "SizeLimitError",
    "SvgOptions",
    "UndefinedModularityError",
    "ValidationError",
    "aggregate",
    "brute_force_best_partition",
    "coords_to_tsv",
    "fruchterman_reingold",
    "load_edge_list",
    "local_move_phase",
    "louvain",
    "mixing_ratio",
    "modularity",
    "modularity_pairwise",
    "parse_edge_list",
    "partition_similarity",
    "project_partition",
    "random_graph",
    "recommend_links",
    "render_svg",
    "resolution_probe",
    "ring_of_cliques",
    "run_ensemble",
    "simulate_loop",
    "__version__",
]
