"""Simulation laboratory for sparse-action stochastic linear bandits."""

from .geometry import (
    ActionSetGeometry,
    SupportSet,
    axis_reach,
    best_action_on_support,
    boundary_scale,
    ellipsoid,
    euclidean_ball,
    hypercube,
    l1_ball,
    lp_ball,
    membership,
    value_on_support,
)
from .oracles import (
    GreedyTrace,
    RatioCertificate,
    brute_force,
    exact_top_h,
    greedy_select,
    submodularity_ratio,
)
from .estimation import (
    ExplorationBasis,
    OlsState,
    empirical_sort_gap,
    error_radius,
    initial_ols_state,
    make_basis,
    ols_update,
    warmup_bound_c0,
)
from .algorithms import (
    AlgorithmState,
    Environment,
    RunTrace,
    make_environment,
    make_state,
    observe,
    run_horizon,
    select_action,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    TrialRecord,
    build_geometry,
    export_csv,
    generate_theta,
    load_config,
    make_gap_controlled_theta,
    random_spd_matrix,
    run_experiment,
)

__version__ = "0.1.0"
