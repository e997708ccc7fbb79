"""Eternal bounded-time Cops and Robbers: exact solver, bounds and reductions."""
from .bounds import (
    BoundReport,
    Decomposition,
    Part,
    applicable_bounds,
    cartesian_grid_bounds,
    cycle_value,
    ell,
    maxseq,
    path_value,
    recurrent_attack_bound,
    retract_parameter_bound,
    retract_sum_bound,
    strong_grid_bounds,
    strong_product_value,
    tree_bound,
    tree_lower_bound,
)
from .engine import (
    bounded_capture,
    c_t,
    capt_k,
    cop_number,
    enumerate_configs,
    eternal_cop_number,
    eternal_decision,
    eternal_win_set,
    solve_eternal,
)
from .errors import BoundError, BudgetExceeded, GraphError, IllegalMove, PursuitError, StrategyError
from .graph import (
    Graph,
    VertexMap,
    build_graph,
    cartesian_product,
    generate,
    load_graph,
    parse_edge_list,
    strong_product,
    subgrid_retraction,
    verify_retraction,
)
from .reduction import SetCoverInstance, build_reduction, verify_reduction
from .strategy import Session, StrategyTable, extract_strategy, replay

__version__ = "0.1.0"
