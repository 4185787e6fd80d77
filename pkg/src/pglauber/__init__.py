"""Parallel Glauber dynamics for the hard-core model on small graphs.

Simulation, exact stationary and mixing-time analysis, coupling experiments
and closed-form mixing bounds with numerical verifiers.
"""

from .bounds import (
    BoundReport,
    all_bounds,
    corollary1_bound,
    corollary2_bound,
    corollary3_bound,
    remark2_bound,
    theorem4_bound,
    theorem5_bound,
    theorem5_params,
    theta,
)
from .coupling import (
    CoupledPair,
    WeightFunction,
    coalescence_experiment,
    coupled_step,
    exact_adjacent_drift,
    weighted_hamming,
)
from .dynamics import (
    ExplicitDistribution,
    Fugacities,
    RandomGreedyDistribution,
    SingleSiteDistribution,
    as_explicit,
    local_minimum_schedule,
    run_chain,
    sample_update_set,
    step,
    transition_probability,
    update_marginals,
    validate,
)
from .errors import CapExceededError, GraphFormatError, PGlauberError, ReducibleChainError, ValidationError
from .exact import (
    build_matrix,
    check_detailed_balance,
    exact_mixing_time,
    product_form,
    tv_distance,
)
from .graph import (
    Graph,
    band_graph,
    cycle_graph,
    enumerate_independent_sets,
    erdos_renyi_graph,
    generate,
    grid_graph,
    is_independent,
    load_edge_list,
    path_graph,
    star_graph,
)
from .vigoda import VigodaMetric, blocked_neighbors, edge_length, lemma5_check, vigoda_distance

__version__ = "0.1.0"
