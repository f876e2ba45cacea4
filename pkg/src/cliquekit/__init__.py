"""Maximum weight clique solvers and clique-based reductions for resource
allocation in wireless networks and network-coded broadcast."""

from .bpso import BpsoParams, bpso_max_weight_clique
from .errors import (
    ConstraintViolation,
    DimacsError,
    FilesTooMany,
    GraphError,
    GraphTooLarge,
    Infeasible,
)
from .graph import (
    Graph,
    build_graph,
    complete_graph,
    emit_dimacs,
    is_clique,
    is_independent_set,
    is_maximal_clique,
    parse_dimacs,
    random_graph,
)
from .ip import bnb_solve_binary, emit_lp_text, export_edge_formulation, parse_lp_text
from .mapping import ScenarioMapping
from .solvers import (
    SolveResult,
    enumerate_maximal_cliques,
    exact_max_weight_clique,
    greedy_max_weight_clique,
    max_weight_independent_set,
    oracle_max_weight_clique,
    prune_dominated,
    solve_clique,
)

__version__ = "0.1.0"
