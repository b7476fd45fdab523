"""Model parameters and one-step dynamics of both Markov chains.

The model: a genome of ``n_sites`` binary sites.  Each step picks one site
uniformly at random; a picked 0-site flips to 1 with probability ``p_up``,
a picked 1-site flips to 0 with probability ``p_down``.  The classic
one-parameter variant sets ``p_up = p`` and ``p_down = 1 - p``.

Two chains share this dynamic: the counting chain (the number of 1-sites,
a birth-death chain on {0, ..., N} with reflecting barriers) and the
spatial chain (the full configuration on {0, 1}^N).

Randomness contract: one step consumes exactly two uniform draws, in fixed
order -- first the site pick, then the flip decision -- so trajectories are
reproducible from the seed alone, and stay-steps still advance time by 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .rng import SplitMix64


@dataclass(frozen=True)
class ChainParams:
    """Genome length and flip probabilities.

    ``p_up + p_down = 0`` (the frozen chain) is constructible but rejected
    by every stationary-law operation.
    """

    n_sites: int
    p_up: float
    p_down: float

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites}")
        if not 0.0 <= self.p_up <= 1.0:
            raise ValueError(f"p_up must be in [0, 1], got {self.p_up}")
        if not 0.0 <= self.p_down <= 1.0:
            raise ValueError(f"p_down must be in [0, 1], got {self.p_down}")


def make_params(n_sites: int, p: float) -> ChainParams:
    """One-parameter model: an up-flip has probability ``p``, a down-flip ``1 - p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    return ChainParams(n_sites=n_sites, p_up=p, p_down=1.0 - p)


def make_params_general(n_sites: int, p_up: float, p_down: float) -> ChainParams:
    """Two-parameter model with independent up- and down-flip probabilities."""
    return ChainParams(n_sites=n_sites, p_up=p_up, p_down=p_down)


@dataclass(frozen=True)
class TransitionTriple:
    """One-step probabilities of the counting chain out of a given count."""

    up: float
    down: float
    stay: float


class GenomeConfig:
    """A length-N binary configuration with an incrementally maintained ones-count.

    Treat instances as immutable values; the step operation returns a new
    configuration.  Sites are stored 0-based internally; external output
    (the CLI) labels them 1-based.
    """

    __slots__ = ("bits", "ones")

    def __init__(self, bits: Iterable[int] | np.ndarray):
        arr = np.ascontiguousarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("bits must be a non-empty one-dimensional sequence")
        if np.any(arr > 1):
            raise ValueError("bits must contain only 0 and 1")
        object.__setattr__(self, "bits", arr)
        object.__setattr__(self, "ones", int(arr.sum()))

    @classmethod
    def all_zeros(cls, n_sites: int) -> "GenomeConfig":
        return cls(np.zeros(n_sites, dtype=np.uint8))

    @classmethod
    def all_ones(cls, n_sites: int) -> "GenomeConfig":
        return cls(np.ones(n_sites, dtype=np.uint8))

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenomeConfig):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __setattr__(self, name, value):
        raise AttributeError("GenomeConfig is immutable")

    def __repr__(self) -> str:
        return f"GenomeConfig({self.bits.tolist()})"


def random_config(n_sites: int, rng: SplitMix64) -> GenomeConfig:
    """Uniformly random configuration; consumes one draw per site, in site order."""
    bits = np.empty(n_sites, dtype=np.uint8)
    for s in range(n_sites):
        bits[s] = 1 if rng.random() < 0.5 else 0
    return GenomeConfig(bits)


def count_ones(config: GenomeConfig) -> int:
    """Number of sites in state 1."""
    return config.ones


def _check_count(params: ChainParams, k: int) -> int:
    if int(k) != k or not 0 <= k <= params.n_sites:
        raise ValueError(f"count must be an integer in [0, {params.n_sites}], got {k}")
    return int(k)


def transition_probs(params: ChainParams, k: int) -> TransitionTriple:
    """One-step transition probabilities of the counting chain at count ``k``.

    up = p_up * (N - k) / N, down = p_down * k / N, stay = remainder.
    The barriers reflect: down = 0 at k = 0 and up = 0 at k = N, exactly.
    """
    k = _check_count(params, k)
    n = params.n_sites
    up = params.p_up * (n - k) / n
    down = params.p_down * k / n
    # up + down can overshoot 1 by one ulp when p_up = p_down = 1.
    stay = max(1.0 - up - down, 0.0)
    return TransitionTriple(up=up, down=down, stay=stay)


def _pick_site(n_sites: int, rng: SplitMix64) -> int:
    site = int(rng.random() * n_sites)
    return n_sites - 1 if site >= n_sites else site


def step_count(params: ChainParams, k: int, rng: SplitMix64) -> int:
    """Advance the counting chain by one time step (stay-steps included).

    Consumes exactly two draws: the site pick, then the flip decision.
    Picking any of the k one-sites has probability k/N, so the picked
    site's state is decided by whether the picked index falls below k.
    """
    k = _check_count(params, k)
    picked_one = _pick_site(params.n_sites, rng) < k
    flip = rng.random()
    if picked_one:
        return k - 1 if flip < params.p_down else k
    return k + 1 if flip < params.p_up else k


def step_spatial(params: ChainParams, config: GenomeConfig, rng: SplitMix64) -> GenomeConfig:
    """Advance the spatial chain by one time step.

    Same two-draw contract as `step_count`; the output differs from the
    input in at most the picked site.
    """
    if len(config) != params.n_sites:
        raise ValueError(
            f"config has {len(config)} sites, params expect {params.n_sites}"
        )
    site = _pick_site(params.n_sites, rng)
    flip = rng.random()
    bits = config.bits
    if bits[site] == 1:
        if flip < params.p_down:
            new_bits = bits.copy()
            new_bits[site] = 0
            return GenomeConfig(new_bits)
    else:
        if flip < params.p_up:
            new_bits = bits.copy()
            new_bits[site] = 1
            return GenomeConfig(new_bits)
    return config
