"""Compiled hot loops for simulation and distribution evolution.

Each kernel re-implements the SplitMix64 stream from `rng` word for word
(same constants, same draw order: site pick first, flip decision second),
so a kernel trajectory is bit-identical to one produced by the pure-Python
step operations under the same seed.  That equivalence is pinned by tests.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _next_state(state):
    return state + _GAMMA


@njit(cache=True, inline="always")
def _output(state):
    z = state
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    z = z ^ (z >> _S31)
    return z


@njit(cache=True, inline="always")
def _unit(state):
    """Advance and return (new_state, uniform double in [0, 1))."""
    state = _next_state(state)
    return state, (_output(state) >> _S11) * _INV_2_53


@njit(cache=True, inline="always")
def _step_count(state, n, k, p_up, p_down):
    state, u_site = _unit(state)
    site = int(u_site * n)
    if site >= n:
        site = n - 1
    state, u_flip = _unit(state)
    if site < k:
        if u_flip < p_down:
            k -= 1
    else:
        if u_flip < p_up:
            k += 1
    return state, k


@njit(cache=True)
def count_trajectory(n, p_up, p_down, init_k, steps, seed):
    """States of the counting chain after 0..steps steps (length steps + 1)."""
    path = np.empty(steps + 1, dtype=np.int64)
    path[0] = init_k
    state = seed
    k = init_k
    for t in range(1, steps + 1):
        state, k = _step_count(state, n, k, p_up, p_down)
        path[t] = k
    return path


@njit(cache=True)
def count_occupancy(n, p_up, p_down, init_k, steps, burn_in, seed):
    """Visit counts of the states reached by steps burn_in+1 .. steps."""
    counts = np.zeros(n + 1, dtype=np.int64)
    state = seed
    k = init_k
    for t in range(1, steps + 1):
        state, k = _step_count(state, n, k, p_up, p_down)
        if t > burn_in:
            counts[k] += 1
    return counts


@njit(cache=True)
def count_hitting_times(n, p_up, p_down, init_k, target, seeds, cap):
    """First time t >= 1 with state == target, one entry per seed; -1 if capped."""
    times = np.empty(seeds.shape[0], dtype=np.int64)
    for r in range(seeds.shape[0]):
        state = seeds[r]
        k = init_k
        hit = np.int64(-1)
        for t in range(1, cap + 1):
            state, k = _step_count(state, n, k, p_up, p_down)
            if k == target:
                hit = t
                break
        times[r] = hit
    return times


@njit(cache=True)
def spatial_run(n, p_up, p_down, steps, burn_in, sample_every, seed):
    """Spatial chain from a uniformly random initial configuration.

    The initial config consumes one draw per site (in site order), then each
    step consumes the usual two draws.  Configurations reached at steps
    burn_in + m*sample_every (m = 1, 2, ...) are recorded.  Returns the
    sample matrix, the final configuration, and the per-sample ones-count.
    """
    bits = np.empty(n, dtype=np.uint8)
    state = seed
    for s in range(n):
        state, u = _unit(state)
        bits[s] = 1 if u < 0.5 else 0

    n_samples = (steps - burn_in) // sample_every if steps > burn_in else 0
    samples = np.empty((n_samples, n), dtype=np.uint8)
    sample_counts = np.empty(n_samples, dtype=np.int64)
    ones = 0
    for s in range(n):
        ones += bits[s]

    taken = 0
    for t in range(1, steps + 1):
        state, u_site = _unit(state)
        site = int(u_site * n)
        if site >= n:
            site = n - 1
        state, u_flip = _unit(state)
        if bits[site] == 1:
            if u_flip < p_down:
                bits[site] = 0
                ones -= 1
        else:
            if u_flip < p_up:
                bits[site] = 1
                ones += 1
        if t > burn_in and (t - burn_in) % sample_every == 0 and taken < n_samples:
            samples[taken, :] = bits
            sample_counts[taken] = ones
            taken += 1
    return samples, bits, sample_counts


@njit(cache=True)
def evolve_mass(mass, up, down, stay, steps):
    """Apply the tridiagonal one-step kernel ``steps`` times; O(N) per step."""
    n1 = mass.shape[0]
    cur = mass.copy()
    nxt = np.empty(n1, dtype=np.float64)
    for _ in range(steps):
        for k in range(n1):
            acc = cur[k] * stay[k]
            if k > 0:
                acc += cur[k - 1] * up[k - 1]
            if k < n1 - 1:
                acc += cur[k + 1] * down[k + 1]
            nxt[k] = acc
        cur, nxt = nxt, cur
    return cur


def warmup():
    """Trigger JIT compilation of every kernel with tiny inputs."""
    seed = np.uint64(1)
    count_trajectory(2, 0.5, 0.5, 0, 4, seed)
    count_occupancy(2, 0.5, 0.5, 0, 4, 0, seed)
    count_hitting_times(2, 0.5, 0.5, 0, 2, np.array([1, 2], dtype=np.uint64), 1000)
    spatial_run(2, 0.5, 0.5, 8, 2, 2, seed)
    evolve_mass(np.array([1.0, 0.0, 0.0]), np.array([0.5, 0.25, 0.0]),
                np.array([0.0, 0.25, 0.5]), np.array([0.5, 0.5, 0.5]), 3)
