"""Splittable counter-based random generator (SplitMix64 family).

Every chain/component gets its own stream identified by (seed, stream index).
A stream is a Weyl sequence ``state += gamma`` pushed through an avalanche
mixer, with a per-stream odd ``gamma`` — the construction used by
SplittableRandom.  Streams are therefore independent of thread scheduling:
the draws of stream ``s`` depend only on ``(seed, s)``.

The pure-Python implementation below is the reference; `_kernels` contains a
numba mirror that must produce bit-identical draws (covered by tests).
"""

from __future__ import annotations

import hashlib

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_STREAM_SALT = 0xD1B54A32D192ED03

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return z ^ (z >> 31)


def stream_state(seed: int, stream: int) -> int:
    """Initial Weyl state for a (seed, stream) pair."""
    return mix64((seed + (stream + 1) * _GOLDEN) & _MASK)


def stream_gamma(seed: int, stream: int) -> int:
    """Per-stream Weyl increment; forced odd so the sequence has period 2^64."""
    return mix64((seed ^ _STREAM_SALT) + stream * _MIX_A) | 1


class SplitMix64:
    """One stream of the generator. Not thread-safe; clone per worker."""

    __slots__ = ("state", "gamma")

    def __init__(self, seed: int, stream: int = 0):
        self.state = stream_state(seed, stream)
        self.gamma = stream_gamma(seed, stream)

    def next_u64(self) -> int:
        self.state = (self.state + self.gamma) & _MASK
        return mix64(self.state)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n). Uses the float path to match kernels."""
        return int(self.next_float() * n)


def derive_seed(master_seed: int, label: str) -> int:
    """Labeled substream seed: stable 64-bit hash of (master seed, label).

    Used by the CLI so every component draws from its own named stream of the
    single master seed.
    """
    digest = hashlib.sha256(f"{master_seed & _MASK}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")
