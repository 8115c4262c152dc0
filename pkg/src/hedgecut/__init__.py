"""Minimum-cost edge removal for causal-effect identifiability.

Given a mixed graph with edge existence probabilities and a target
vertex set, this package finds cheapest edge sets whose removal makes
the interventional query on the target identifiable, exactly or via
min-cut heuristics, under the most-probable-subgraph and the
most-plausible-removal objectives.  It also converts such problems to
and from minimum-cost intervention instances and ships a benchmark
harness plus a command line front end.
"""

from .admg import (
    Admg,
    Edge,
    EdgeKind,
    ancestors,
    districts,
    general_query_to_qy,
    hedge_hull,
    is_identifiable,
    maximal_hedge,
)
from .errors import (
    CycleDetected,
    EmptySet,
    EmptyTarget,
    GenerationExhausted,
    HedgecutError,
    Infeasible,
    InvalidBounds,
    NotADistrict,
    OverlappingSets,
    ParseError,
    TooLarge,
    UnknownEdge,
    UnknownVertex,
)
from .exact import (
    ExclusionConstraint,
    Solution,
    edge_id_exact,
    edge_id_exact_constrained,
    is_feasible,
    oracle_solve,
    rank_top_n,
)
from .heuristics import (
    FlowNetwork,
    HeuristicSolution,
    best_heuristic,
    heid1,
    heid2,
    min_cut,
)
from .mcip import (
    EdgeVertexMap,
    McipInstance,
    add_negative_correlation_gadget,
    constrained_pipeline,
    edge_id_to_mcip,
    intervened_graph,
    mcip_solve,
    mcip_solve_heuristic,
    mcip_to_edge_id,
)
from .probmodel import (
    Objective,
    ProbabilisticAdmg,
    WeightedInstance,
    free_drops,
    from_edge_id_weights,
    plausibility,
    score_solution,
    subgraph_probability,
    to_edge_id_weights,
)

__version__ = "0.1.0"

__all__ = [
    "Admg",
    "Edge",
    "EdgeKind",
    "ancestors",
    "districts",
    "general_query_to_qy",
    "hedge_hull",
    "is_identifiable",
    "maximal_hedge",
    "Objective",
    "ProbabilisticAdmg",
    "WeightedInstance",
    "subgraph_probability",
    "plausibility",
    "to_edge_id_weights",
    "from_edge_id_weights",
    "score_solution",
    "free_drops",
    "Solution",
    "ExclusionConstraint",
    "edge_id_exact",
    "edge_id_exact_constrained",
    "oracle_solve",
    "is_feasible",
    "rank_top_n",
    "FlowNetwork",
    "HeuristicSolution",
    "min_cut",
    "heid1",
    "heid2",
    "best_heuristic",
    "McipInstance",
    "EdgeVertexMap",
    "mcip_to_edge_id",
    "edge_id_to_mcip",
    "mcip_solve",
    "mcip_solve_heuristic",
    "add_negative_correlation_gadget",
    "constrained_pipeline",
    "intervened_graph",
    "HedgecutError",
    "CycleDetected",
    "UnknownVertex",
    "UnknownEdge",
    "NotADistrict",
    "OverlappingSets",
    "EmptyTarget",
    "EmptySet",
    "InvalidBounds",
    "TooLarge",
    "Infeasible",
    "GenerationExhausted",
    "ParseError",
    "__version__",
]
