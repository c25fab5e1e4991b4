"""Numba kernels for the Glauber sampler.

The RNG here is the numba mirror of `_rng.SplitMix64`; both sides must
produce bit-identical streams (asserted by tests), so pure-Python chains and
the compiled batch sampler generate the same trajectories for the same
(seed, stream) pair.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_STREAM_SALT = np.uint64(0xD1B54A32D192ED03)
_ONE = np.uint64(1)
_INV_2_53 = 2.0 ** -53


@nb.njit(nb.uint64(nb.uint64), cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


@nb.njit(nb.uint64(nb.uint64, nb.uint64), cache=True, inline="always")
def _stream_state(seed, stream):
    return _mix64(seed + (stream + _ONE) * _GOLDEN)


@nb.njit(nb.uint64(nb.uint64, nb.uint64), cache=True, inline="always")
def _stream_gamma(seed, stream):
    return _mix64((seed ^ _STREAM_SALT) + stream * _MIX_A) | _ONE


@nb.njit(cache=True, inline="always")
def _next_float(state, gamma):
    state = state + gamma
    return state, (_mix64(state) >> np.uint64(11)) * _INV_2_53


@nb.njit(cache=True, inline="always")
def _run_one_chain(indptr, indices, weights, n, burn_in, state, gamma, spins):
    for i in range(n):
        state, u = _next_float(state, gamma)
        spins[i] = 1 if u < 0.5 else -1
    for _ in range(burn_in):
        state, u_site = _next_float(state, gamma)
        site = int(u_site * n)
        h = 0.0
        for p in range(indptr[site], indptr[site + 1]):
            h += weights[p] * spins[indices[p]]
        q_plus = 0.5 * (1.0 + math.tanh(h))
        state, u_spin = _next_float(state, gamma)
        spins[site] = 1 if u_spin < q_plus else -1
    return state


@nb.njit(cache=True, parallel=True)
def run_independent_chains(indptr, indices, weights, n, k, burn_in, seed, out):
    """One chain per output row; chain c uses stream c of the seed."""
    for c in nb.prange(k):
        state = _stream_state(np.uint64(seed), np.uint64(c))
        gamma = _stream_gamma(np.uint64(seed), np.uint64(c))
        _run_one_chain(indptr, indices, weights, n, burn_in, state, gamma, out[c])


@nb.njit(cache=True)
def run_thinned_chain(indptr, indices, weights, n, k, burn_in, thinning, seed, out):
    """Single chain on stream 0: burn in, then record every `thinning` steps."""
    spins = np.empty(n, np.int8)
    state = _stream_state(np.uint64(seed), np.uint64(0))
    gamma = _stream_gamma(np.uint64(seed), np.uint64(0))
    state = _run_one_chain(indptr, indices, weights, n, burn_in, state, gamma, spins)
    for row in range(k):
        for _ in range(thinning):
            state, u_site = _next_float(state, gamma)
            site = int(u_site * n)
            h = 0.0
            for p in range(indptr[site], indptr[site + 1]):
                h += weights[p] * spins[indices[p]]
            q_plus = 0.5 * (1.0 + math.tanh(h))
            state, u_spin = _next_float(state, gamma)
            spins[site] = 1 if u_spin < q_plus else -1
        out[row] = spins


@nb.njit(cache=True)
def reference_stream(seed, stream, count):
    """First `count` uniforms of a stream; used to cross-check the Python RNG."""
    out = np.empty(count, np.float64)
    state = _stream_state(np.uint64(seed), np.uint64(stream))
    gamma = _stream_gamma(np.uint64(seed), np.uint64(stream))
    for i in range(count):
        state, u = _next_float(state, gamma)
        out[i] = u
    return out
