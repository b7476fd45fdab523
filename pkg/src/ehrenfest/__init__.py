"""Biased Ehrenfest chain toolkit: exact analysis and seeded simulation.

A genome of N binary sites evolves one uniformly picked site at a time;
0-sites flip up with probability p_up, 1-sites flip down with probability
p_down.  The package computes the closed-form behavior of the resulting
counting and spatial chains and cross-checks it with reproducible Monte
Carlo.
"""

from .chain import (
    ChainParams,
    GenomeConfig,
    TransitionTriple,
    count_ones,
    make_params,
    make_params_general,
    random_config,
    step_count,
    step_spatial,
    transition_probs,
)
from .exact import (
    absorption_expectation,
    aggregate_spatial_by_count,
    check_detailed_balance,
    delta_distribution,
    equilibrium_state,
    evolve_distribution,
    expected_return_time,
    expected_return_time_log,
    gaussian_deviation,
    return_time_asymptotic,
    stationary_count,
    stationary_count_log,
    stationary_site_probability,
    stationary_spatial_logmass,
    total_variation,
    uniform_distribution,
)
from .montecarlo import (
    EstimateWithCI,
    OccupancyHistogram,
    SpatialMarginals,
    default_burn_in,
    derive_replica_seed,
    estimate_absorption_time,
    estimate_return_time,
    run_occupancy,
    run_spatial_marginals,
    run_trajectory,
)
from .rng import SplitMix64, mix64

__version__ = "0.1.0"
