"""Seeded Monte Carlo estimation for both chains.

Every estimator is a pure function of its inputs and a 64-bit master seed:
replica r runs on its own SplitMix64 stream seeded with
``derive_replica_seed(master_seed, r)``, and replica results are reduced
with exactly rounded summation (`math.fsum`), so the reported mean and
standard error do not depend on accumulation order.  Repeated runs are
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .chain import ChainParams, GenomeConfig
from .exact import stationary_site_probability
from .rng import MASK64, derive_replica_seed

__all__ = [
    "EstimateWithCI",
    "OccupancyHistogram",
    "SpatialMarginals",
    "RETURN_TIME_STEP_CAP",
    "default_burn_in",
    "derive_replica_seed",
    "estimate_absorption_time",
    "estimate_return_time",
    "run_occupancy",
    "run_spatial_marginals",
    "run_trajectory",
]

#: Per-replica step budget; replicas that exhaust it are counted as truncated
#: and invalidate the estimate (mean and std_error become NaN) rather than
#: being dropped silently.
RETURN_TIME_STEP_CAP = 10**9


@dataclass(frozen=True)
class EstimateWithCI:
    """Replica-mean estimate with its standard error.

    ``std_error`` is the sample standard deviation over replicas divided by
    sqrt(replicas) (0 when there is a single replica).  ``truncated`` counts
    replicas that hit the step cap; any truncation makes mean and std_error
    NaN.
    """

    mean: float
    std_error: float
    replicas: int
    master_seed: int
    truncated: int = 0


@dataclass(frozen=True, eq=False)
class OccupancyHistogram:
    """Visit counts per state over the post-burn-in steps of one trajectory."""

    counts: np.ndarray
    total_steps: int


@dataclass(frozen=True, eq=False)
class SpatialMarginals:
    """Per-site statistics of thinned samples from one spatial trajectory.

    Beyond the marginal frequencies, carries the full pairwise sample
    covariance matrix, the histogram of ones-counts across samples (the
    empirical projection onto the counting chain), and the final
    configuration.
    """

    per_site_frequency: np.ndarray
    max_abs_pair_covariance: float
    samples: int
    ones_count_histogram: np.ndarray
    pair_covariance: np.ndarray
    final_config: GenomeConfig


def default_burn_in(n_sites: int) -> int:
    """Conservative default burn-in, 20 N ln(N + 1) steps."""
    return int(20 * n_sites * math.log(n_sites + 1))


def _check_count(n_sites: int, k: int, name: str = "count") -> int:
    if int(k) != k or not 0 <= k <= n_sites:
        raise ValueError(f"{name} must be an integer in [0, {n_sites}], got {k}")
    return int(k)


def _replica_seeds(master_seed: int, replicas: int) -> np.ndarray:
    return np.fromiter(
        (derive_replica_seed(master_seed, r) for r in range(replicas)),
        dtype=np.uint64,
        count=replicas,
    )


def _reduce(times: np.ndarray, replicas: int, master_seed: int) -> EstimateWithCI:
    truncated = int(np.count_nonzero(times < 0))
    if truncated > 0:
        return EstimateWithCI(
            mean=math.nan,
            std_error=math.nan,
            replicas=replicas,
            master_seed=master_seed,
            truncated=truncated,
        )
    values = [float(t) for t in times]
    mean = math.fsum(values) / replicas
    if replicas > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (replicas - 1)
        std_error = math.sqrt(var / replicas)
    else:
        std_error = 0.0
    return EstimateWithCI(
        mean=mean,
        std_error=std_error,
        replicas=replicas,
        master_seed=master_seed,
    )


def run_occupancy(
    params: ChainParams,
    init_k: int,
    steps: int,
    burn_in: int | None = None,
    seed: int = 0,
) -> OccupancyHistogram:
    """Simulate the counting chain and histogram the post-burn-in visits."""
    init_k = _check_count(params.n_sites, init_k, "init_k")
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    if burn_in is None:
        burn_in = default_burn_in(params.n_sites)
    if burn_in < 0:
        raise ValueError(f"burn_in must be non-negative, got {burn_in}")
    counts = _kernels.count_occupancy(
        params.n_sites, params.p_up, params.p_down, init_k, steps, burn_in,
        np.uint64(seed & MASK64),
    )
    return OccupancyHistogram(counts=counts, total_steps=max(steps - burn_in, 0))


def run_trajectory(
    params: ChainParams, init_k: int, steps: int, seed: int
) -> np.ndarray:
    """Counting-chain states at times 0..steps (length steps + 1)."""
    init_k = _check_count(params.n_sites, init_k, "init_k")
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    return _kernels.count_trajectory(
        params.n_sites, params.p_up, params.p_down, init_k, steps,
        np.uint64(seed & MASK64),
    )


def estimate_return_time(
    params: ChainParams,
    k: int,
    replicas: int,
    seed: int,
    step_cap: int = RETURN_TIME_STEP_CAP,
) -> EstimateWithCI:
    """Mean first return time to count k over independent replicas.

    The return time is min{t >= 1 : Y_t = k} starting from Y_0 = k, so a
    stay-step is a return at t = 1.
    """
    k = _check_count(params.n_sites, k)
    if replicas < 1:
        raise ValueError(f"replicas must be positive, got {replicas}")
    q = stationary_site_probability(params)
    absorbing = params.n_sites if q == 1.0 else 0
    if q in (0.0, 1.0) and k != absorbing:
        raise ValueError(
            f"return time to {k} is not finite for q={q}: the chain is "
            "absorbed elsewhere (non-recurrent params)"
        )
    master = seed & MASK64
    times = _kernels.count_hitting_times(
        params.n_sites, params.p_up, params.p_down, k, k,
        _replica_seeds(master, replicas), step_cap,
    )
    return _reduce(times, replicas, master)


def estimate_absorption_time(
    n_sites: int,
    init_k: int,
    replicas: int,
    seed: int,
    step_cap: int = RETURN_TIME_STEP_CAP,
) -> EstimateWithCI:
    """Mean first hitting time of the all-ones count under the pure-uphill chain.

    Simulates p_up = 1, p_down = 0; a start at N is already absorbed and
    contributes time 0.
    """
    if n_sites < 1:
        raise ValueError(f"n_sites must be a positive integer, got {n_sites}")
    init_k = _check_count(n_sites, init_k, "init_k")
    if replicas < 1:
        raise ValueError(f"replicas must be positive, got {replicas}")
    master = seed & MASK64
    if init_k == n_sites:
        times = np.zeros(replicas, dtype=np.int64)
    else:
        times = _kernels.count_hitting_times(
            n_sites, 1.0, 0.0, init_k, n_sites,
            _replica_seeds(master, replicas), step_cap,
        )
    return _reduce(times, replicas, master)


def run_spatial_marginals(
    params: ChainParams,
    steps: int,
    burn_in: int | None = None,
    sample_every: int | None = None,
    seed: int = 0,
) -> SpatialMarginals:
    """Simulate the spatial chain and summarize thinned configuration samples.

    Starts from a uniformly random configuration (drawn from the same
    stream), discards ``burn_in`` steps, then records one sample every
    ``sample_every`` steps (default: one per N steps).
    """
    q = stationary_site_probability(params)
    if not 0.0 < q < 1.0:
        raise ValueError(f"spatial sampling requires 0 < q < 1, got q={q}")
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    n = params.n_sites
    if burn_in is None:
        burn_in = default_burn_in(n)
    if burn_in < 0:
        raise ValueError(f"burn_in must be non-negative, got {burn_in}")
    if sample_every is None:
        sample_every = n
    if sample_every < 1:
        raise ValueError(f"sample_every must be positive, got {sample_every}")

    samples, final_bits, sample_counts = _kernels.spatial_run(
        n, params.p_up, params.p_down, steps, burn_in, sample_every,
        np.uint64(seed & MASK64),
    )
    n_samples = samples.shape[0]
    if n_samples < 1:
        raise ValueError(
            f"no samples: steps={steps} leaves nothing after burn_in={burn_in} "
            f"at sample_every={sample_every}"
        )
    freq = samples.mean(axis=0)
    if n >= 2 and n_samples >= 2:
        cov = np.atleast_2d(np.cov(samples.astype(np.float64), rowvar=False, ddof=1))
        off_diag = cov[~np.eye(n, dtype=bool)]
        max_abs_cov = float(np.max(np.abs(off_diag)))
    else:
        cov = np.zeros((n, n))
        max_abs_cov = 0.0
    hist = np.bincount(sample_counts, minlength=n + 1).astype(np.int64)
    return SpatialMarginals(
        per_site_frequency=freq,
        max_abs_pair_covariance=max_abs_cov,
        samples=n_samples,
        ones_count_histogram=hist,
        pair_covariance=cov,
        final_config=GenomeConfig(final_bits),
    )
