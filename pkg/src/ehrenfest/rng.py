"""Deterministic random streams for reproducible simulation.

Every stochastic quantity in this package is a pure function of an explicit
64-bit seed.  The core stream is SplitMix64 (Steele, Lea & Flood's mixing
constants), chosen because it is fast, statistically solid at this scale,
and simple enough to restate bit-exactly:

    state   <- (state + 0x9E3779B97F4A7C15)            mod 2**64
    z       <- state
    z       <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9  mod 2**64
    z       <- (z XOR (z >> 27)) * 0x94D049BB133111EB  mod 2**64
    output  <- z XOR (z >> 31)

A uniform double in [0, 1) takes the top 53 bits of an output word:
``(output >> 11) * 2.0**-53``.

Replica seeds come from the same avalanche: replica ``r`` of master seed
``s`` uses ``mix64((s + (r + 1) * 0x9E3779B97F4A7C15) mod 2**64)``, i.e.
the ``r``-th output word of a SplitMix64 stream seeded with ``s``.  The
map is a bijection composed with distinct inputs, so distinct replica
indices always yield distinct seeds under a fixed master.

The Monte Carlo kernels in ``_kernels`` re-implement the identical stream
in compiled form; ``tests/test_rng.py`` pins the two implementations
against each other word by word.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_MUL_1 = 0xBF58476D1CE4E5B9
_MIX_MUL_2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(value: int) -> int:
    """SplitMix64 finalizer: a 64-bit avalanche bijection."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * _MIX_MUL_1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_MUL_2) & MASK64
    return z ^ (z >> 31)


def derive_replica_seed(master_seed: int, replica_index: int) -> int:
    """Seed for an independent replica stream.

    Deterministic, and injective in ``replica_index`` for a fixed master
    (the pre-mix inputs differ and ``mix64`` is a bijection).
    """
    if replica_index < 0:
        raise ValueError("replica_index must be non-negative")
    return mix64(master_seed + (replica_index + 1) * GOLDEN_GAMMA)


class SplitMix64:
    """Deterministic pseudo-random stream over 64-bit words.

    Identical seeds produce identical streams.  Each instance owns its
    state; never share one across concurrently advancing simulations.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    @property
    def state(self) -> int:
        return self._state

    def next_uint64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return mix64(self._state)

    def random(self) -> float:
        """Uniform double in [0, 1), consuming exactly one 64-bit word."""
        return (self.next_uint64() >> 11) * _INV_2_53

    def __repr__(self) -> str:
        return f"SplitMix64(state=0x{self._state:016x})"
