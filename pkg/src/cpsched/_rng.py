"""Deterministic 64-bit random-stream primitives.

SplitMix64 is counter-like: the state advances by a fixed odd increment and
every output is a bijective mix of the state.  Substreams are derived by
hashing (seed, tag) pairs, so the traffic stream of a run never depends on
which scheduler or predictor consumes it.

The compiled backend carries its own copy of ``rng_next`` in uint64
arithmetic; this module is the canonical pure-Python form and the two are
held bit-identical by the backend parity tests.
"""

from __future__ import annotations

from dataclasses import dataclass

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# A seed is a plain 64-bit unsigned integer.
RngSeed = int


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mix of one 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def rng_next(state: int) -> tuple[int, int]:
    """Advance one step; returns ``(output, new_state)``."""
    state = (state + GOLDEN) & MASK64
    return mix64(state), state


def hash2(a: int, b: int) -> int:
    """Order-sensitive hash of two words, used to key substreams."""
    return mix64((mix64(a) + (b & MASK64) * GOLDEN) & MASK64)


@dataclass
class SplitMix64:
    """Mutable stream handle around a raw SplitMix64 state word."""

    state: int

    def __post_init__(self) -> None:
        self.state = int(self.state) & MASK64

    def next_u64(self) -> int:
        out, self.state = rng_next(self.state)
        return out

    def substream(self, tag: int) -> "SplitMix64":
        """Independent stream keyed by (current state, tag); self unchanged."""
        return SplitMix64(hash2(self.state, tag))
