"""Closed-form and numerically exact analysis of the chains.

Everything here is deterministic: stationary laws, detailed-balance
residuals, expected return times with their large-N asymptotics, forward
evolution of the count distribution, total-variation distance, a
normal-approximation diagnostic, and the expected absorption time of the
pure-uphill (p_up = 1) chain.

Binomial masses are always computed in log-space through log-gamma and
only then exponentiated: direct factorials overflow near N = 170, and the
return times 1/mass can exceed the double range long before that.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .chain import ChainParams, GenomeConfig, count_ones
from . import _kernels

#: Exhaustive spatial enumeration walks all 2**N configurations; beyond this
#: default bound the aggregate identities should be checked through the
#: counting chain instead.
ENUMERATION_SITE_LIMIT = 20

_LOG_MAX = math.log(np.finfo(np.float64).max)


def stationary_site_probability(params: ChainParams) -> float:
    """Long-run probability that a given site is in state 1: p_up / (p_up + p_down)."""
    total = params.p_up + params.p_down
    if total == 0.0:
        raise ValueError(
            "stationary law undefined for degenerate params (p_up + p_down = 0)"
        )
    return params.p_up / total


def delta_distribution(n_sites: int, k: int) -> np.ndarray:
    """Point mass at count k."""
    if not 0 <= k <= n_sites:
        raise ValueError(f"k must be in [0, {n_sites}], got {k}")
    mass = np.zeros(n_sites + 1)
    mass[k] = 1.0
    return mass


def uniform_distribution(n_sites: int) -> np.ndarray:
    """Uniform law over counts 0..N."""
    return np.full(n_sites + 1, 1.0 / (n_sites + 1))


def stationary_count_log(params: ChainParams) -> np.ndarray:
    """Natural-log stationary masses of the counting chain (may contain -inf).

    The law is Binomial(N, q) with q = p_up / (p_up + p_down).
    """
    n = params.n_sites
    q = stationary_site_probability(params)
    k = np.arange(n + 1, dtype=np.float64)
    log_comb = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    with np.errstate(divide="ignore"):
        log_q = np.log(q) if q > 0.0 else -np.inf
        log_1q = np.log1p(-q) if q < 1.0 else -np.inf
    # 0 * log 0 = 0: the boundary terms vanish rather than poison the row.
    up_term = np.where(k > 0, k * log_q, 0.0)
    down_term = np.where(k < n, (n - k) * log_1q, 0.0)
    return log_comb + up_term + down_term


def stationary_count(params: ChainParams) -> np.ndarray:
    """Stationary distribution of the counting chain, renormalized in linear space."""
    log_mass = stationary_count_log(params)
    mass = np.exp(log_mass - np.max(log_mass))
    return mass / mass.sum()


def stationary_spatial_logmass(params: ChainParams, config: GenomeConfig) -> float:
    """Log stationary mass of one configuration: k log q + (N - k) log(1 - q).

    Depends on the configuration only through its ones-count, so any two
    configurations with equal counts carry identical mass (spatial
    exchangeability).  Returns -inf (not an error) for zero-mass
    configurations when q is 0 or 1.
    """
    if len(config) != params.n_sites:
        raise ValueError(
            f"config has {len(config)} sites, params expect {params.n_sites}"
        )
    q = stationary_site_probability(params)
    k = count_ones(config)
    n = params.n_sites
    term_up = 0.0 if k == 0 else (k * math.log(q) if q > 0.0 else -math.inf)
    term_down = 0.0 if k == n else ((n - k) * math.log1p(-q) if q < 1.0 else -math.inf)
    return term_up + term_down


def aggregate_spatial_by_count(
    params: ChainParams, site_limit: int = ENUMERATION_SITE_LIMIT
) -> np.ndarray:
    """Total spatial stationary mass per ones-count, by exhaustive enumeration.

    Walks all 2**N configurations explicitly (no binomial shortcut), so the
    result is an independent check of both the normalization of the spatial
    law and its projection onto the counting chain's Binomial(N, q).
    """
    n = params.n_sites
    if n > site_limit:
        raise ValueError(
            f"exhaustive enumeration over 2**{n} configs exceeds site_limit={site_limit}"
        )
    totals = np.zeros(n + 1)
    for pattern in range(1 << n):
        bits = [(pattern >> s) & 1 for s in range(n)]
        config = GenomeConfig(bits)
        totals[count_ones(config)] += math.exp(
            stationary_spatial_logmass(params, config)
        )
    return totals


def _transition_vectors(params: ChainParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = params.n_sites
    k = np.arange(n + 1, dtype=np.float64)
    up = params.p_up * (n - k) / n
    down = params.p_down * k / n
    return up, down, 1.0 - up - down


def check_detailed_balance(params: ChainParams, dist: np.ndarray) -> float:
    """Max residual of the balance equations dist(k) up(k) = dist(k+1) down(k+1).

    Where both masses are positive the residual is evaluated through
    log-space (exp/expm1), which stays accurate when the masses are far
    below the scale of the largest ones.
    """
    dist = np.asarray(dist, dtype=np.float64)
    n = params.n_sites
    if dist.shape != (n + 1,):
        raise ValueError(f"dist must have length {n + 1}, got shape {dist.shape}")
    up, down, _ = _transition_vectors(params)
    worst = 0.0
    for k in range(n):
        a, ua = dist[k], up[k]
        b, db = dist[k + 1], down[k + 1]
        if a > 0.0 and b > 0.0 and ua > 0.0 and db > 0.0:
            la = math.log(a) + math.log(ua)
            lb = math.log(b) + math.log(db)
            hi = max(la, lb)
            residual = math.exp(hi) * -math.expm1(-abs(la - lb))
        else:
            residual = abs(a * ua - b * db)
        if residual > worst:
            worst = residual
    return worst


def _log_stationary_mass_at(params: ChainParams, k: int) -> float:
    n = params.n_sites
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    q = stationary_site_probability(params)
    log_comb = float(gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0))
    term_up = 0.0 if k == 0 else (k * math.log(q) if q > 0.0 else -math.inf)
    term_down = 0.0 if k == n else ((n - k) * math.log1p(-q) if q < 1.0 else -math.inf)
    return log_comb + term_up + term_down


def expected_return_time(params: ChainParams, k: int) -> float:
    """Expected first return time to count k: 1 / stationary mass at k.

    States with zero stationary mass return the +inf sentinel, as do
    return times beyond the double range (use `expected_return_time_log`
    for those).
    """
    neg_log = expected_return_time_log(params, k)
    if neg_log > _LOG_MAX:
        return math.inf
    return math.exp(neg_log)


def expected_return_time_log(params: ChainParams, k: int) -> float:
    """Natural log of the expected return time, -log of the stationary mass."""
    return -_log_stationary_mass_at(params, k)


def return_time_asymptotic(params: ChainParams) -> float:
    """Large-N approximation sqrt(2 pi q (1-q) N) to the return time at the mode."""
    q = stationary_site_probability(params)
    if not 0.0 < q < 1.0:
        raise ValueError(f"asymptotic requires 0 < q < 1, got q={q}")
    return math.sqrt(2.0 * math.pi * q * (1.0 - q) * params.n_sites)


def equilibrium_state(params: ChainParams) -> float:
    """The real count where up- and down-rates balance: N q (not rounded)."""
    return params.n_sites * stationary_site_probability(params)


def _check_distribution(n_sites: int, dist: np.ndarray) -> np.ndarray:
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape != (n_sites + 1,):
        raise ValueError(f"dist must have length {n_sites + 1}, got shape {dist.shape}")
    if np.any(dist < 0.0):
        raise ValueError("dist entries must be non-negative")
    if abs(dist.sum() - 1.0) > 1e-12:
        raise ValueError(f"dist must sum to 1 within 1e-12, got {dist.sum()!r}")
    return dist


def evolve_distribution(params: ChainParams, dist: np.ndarray, steps: int) -> np.ndarray:
    """Push a count distribution forward by ``steps`` applications of the kernel.

    out(k) = in(k-1) up(k-1) + in(k) stay(k) + in(k+1) down(k+1), each step.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    dist = _check_distribution(params.n_sites, dist)
    if steps == 0:
        return dist.copy()
    up, down, stay = _transition_vectors(params)
    return _kernels.evolve_mass(dist, up, down, stay, steps)


def total_variation(a: np.ndarray, b: np.ndarray) -> float:
    """Half the L1 distance between two mass vectors of equal length."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return 0.5 * float(np.abs(a - b).sum())


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def gaussian_deviation(params: ChainParams) -> float:
    """Sup-distance between the stationary CDF and its Gaussian limit.

    Compares the CDF at each count k against the normal CDF at the
    continuity-corrected point (k + 0.5 - Nq) / sqrt(Nq(1-q)).
    """
    q = stationary_site_probability(params)
    if not 0.0 < q < 1.0:
        raise ValueError(f"gaussian_deviation requires 0 < q < 1, got q={q}")
    n = params.n_sites
    cdf = np.cumsum(stationary_count(params))
    sigma = math.sqrt(n * q * (1.0 - q))
    worst = 0.0
    for k in range(n + 1):
        z = (k + 0.5 - n * q) / sigma
        gap = abs(float(cdf[k]) - _normal_cdf(z))
        if gap > worst:
            worst = gap
    return worst


def absorption_expectation(n_sites: int, start_k: int) -> float:
    """Exact expected time for the pure-uphill chain to reach the all-ones state.

    With p_up = 1 and p_down = 0 the count moves up with probability
    (N - k)/N and otherwise stays, so the expected absorption time from
    count k is sum_{j=k}^{N-1} N / (N - j); from 0 this is N * H_N.
    """
    if n_sites < 1:
        raise ValueError(f"n_sites must be a positive integer, got {n_sites}")
    if not 0 <= start_k <= n_sites:
        raise ValueError(f"start_k must be in [0, {n_sites}], got {start_k}")
    return math.fsum(n_sites / (n_sites - j) for j in range(start_k, n_sites))
