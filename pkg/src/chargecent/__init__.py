"""Charge-aware network centrality and validation simulators.

Centrality measures for networks where a commodity consumes one unit of a
resource per hop and refills at designated nodes: walk counting happens on a
directed state graph over (node, charge) pairs. Includes charge-aware Katz,
betweenness, and random-walk betweenness, the plain baselines, spreading and
traffic simulators for realized scores, and Kendall-tau comparison.
"""

__version__ = "0.1.0"

from .betweenness import (
    BcScores,
    DependencyState,
    bfs_shortest_paths,
    soc_betweenness,
    soc_betweenness_scores,
    standard_betweenness,
    target_restricted_dependency,
)
from .errors import NumericalError
from .graph import (
    Graph,
    GraphParseError,
    PowerIterationResult,
    RefillSet,
    SocInstance,
    load_edge_list,
    make_instance,
    spectral_radius,
    write_snap_tsv,
)
from .katz import AlphaBound, KatzParams, max_alpha, soc_katz, standard_katz
from .rwbc import (
    FlowSolution,
    StPair,
    WalkSubgraph,
    directed_rwbc_pair,
    rwbc_all_pairs,
    sample_feasible_pairs,
    soc_rwbc,
    walk_subgraph,
)
from .scores import ScoreVector, align_scores
from .simulate import (
    HoppingParams,
    SimOutcome,
    SirParams,
    particle_hopping,
    run_sir_episode,
    sir_influence,
)
from .statespace import (
    STAR,
    StateGraph,
    WalkCounts,
    apply_bkappa,
    build_state_graph,
    count_feasible_walks,
    shortest_feasible_walk_length,
)
from .stats import kendall_tau, kendall_tau_naive

__all__ = [
    "AlphaBound",
    "BcScores",
    "DependencyState",
    "FlowSolution",
    "Graph",
    "GraphParseError",
    "HoppingParams",
    "KatzParams",
    "NumericalError",
    "PowerIterationResult",
    "RefillSet",
    "STAR",
    "ScoreVector",
    "SimOutcome",
    "SirParams",
    "SocInstance",
    "StPair",
    "StateGraph",
    "WalkCounts",
    "WalkSubgraph",
    "align_scores",
    "apply_bkappa",
    "bfs_shortest_paths",
    "build_state_graph",
    "count_feasible_walks",
    "directed_rwbc_pair",
    "kendall_tau",
    "kendall_tau_naive",
    "load_edge_list",
    "make_instance",
    "max_alpha",
    "particle_hopping",
    "run_sir_episode",
    "rwbc_all_pairs",
    "sample_feasible_pairs",
    "shortest_feasible_walk_length",
    "sir_influence",
    "soc_betweenness",
    "soc_betweenness_scores",
    "soc_katz",
    "soc_rwbc",
    "spectral_radius",
    "standard_betweenness",
    "standard_katz",
    "target_restricted_dependency",
    "walk_subgraph",
    "write_snap_tsv",
]
