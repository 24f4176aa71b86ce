"""Ground-truth packet generation: a random walk on pattern cardinality.

Each frame the number of busy slots moves by +1, -1, or 0 with
probabilities (p_plus, p_minus, rest), clipped to [g_min, g_max]; the slot
added or removed is chosen uniformly.  An unchanged cardinality keeps the
pattern itself unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import RngSeed, SplitMix64
from .backend import kernels as _K
from .core import FrameConfig, SlotSet

__all__ = ["MarkovParams", "RngSeed", "SplitMix64",
           "initial_pattern", "step_traffic"]


@dataclass(frozen=True)
class MarkovParams:
    """Parameters of the cardinality walk."""

    p_plus: float
    p_minus: float
    g_min: int
    g_max: int

    def __post_init__(self) -> None:
        if self.p_plus < 0.0 or self.p_minus < 0.0:
            raise ValueError("step probabilities must be >= 0")
        if self.p_plus + self.p_minus > 1.0:
            raise ValueError("p_plus + p_minus must not exceed 1")
        if not 0 <= self.g_min <= self.g_max:
            raise ValueError("need 0 <= g_min <= g_max")

    def check_frame(self, config: FrameConfig) -> None:
        if self.g_max > config.num_slots:
            raise ValueError("g_max exceeds the number of slots per frame")


def initial_pattern(params: MarkovParams, config: FrameConfig,
                    rng: SplitMix64) -> SlotSet:
    """Uniformly random pattern of cardinality ``g_min``."""
    params.check_frame(config)
    mask, state = _K.traffic_init(
        config.num_slots, params.g_min, np.uint64(rng.state))
    rng.state = int(state)
    return SlotSet(int(mask))


def step_traffic(current: SlotSet, params: MarkovParams, config: FrameConfig,
                 rng: SplitMix64) -> SlotSet:
    """Advance the walk one frame from ``current``."""
    params.check_frame(config)
    if not current.fits(config.num_slots):
        raise ValueError("pattern does not fit the frame")
    if not params.g_min <= len(current) <= params.g_max:
        raise ValueError("cardinality out of range")
    mask, state = _K.traffic_step(
        np.uint64(current.mask), config.num_slots,
        params.p_plus, params.p_minus, params.g_min, params.g_max,
        np.uint64(rng.state))
    rng.state = int(state)
    return SlotSet(int(mask))
