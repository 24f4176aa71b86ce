"""Prediction-set construction, greedy slot allocation, and the two
schedulers built on them.

The naive scheduler trusts the predictor and always targets the fixed
unreliability rate.  The calibrated scheduler re-targets every frame
through a threshold that integrates past reliability feedback, which pins
the long-run reliability rate to the target regardless of predictor
quality.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Union

import numpy as np

from .backend import kernels as _K
from .core import FrameConfig, SlotSet
from .predictor import SparseDistribution

# Slack when deciding that a support genuinely cannot reach the requested
# mass, matching the predictor's normalization tolerance; keeps float dust
# on an exactly-normalized support from flagging a shortfall at alpha_f = 0.
SHORTFALL_EPS = 1e-9


@dataclass(frozen=True)
class GammaSet:
    """Selected traffic patterns, in selection order, plus their mass.

    ``shortfall`` marks the non-fatal condition where the whole support
    falls short of the requested mass and was returned in full.
    """

    patterns: tuple[SlotSet, ...]
    covered_mass: float
    shortfall: bool = False


@dataclass(frozen=True)
class CpState:
    """Calibration threshold plus the long-run target and update step."""

    theta: float
    alpha_target: float
    gamma_step: float

    def __post_init__(self) -> None:
        if self.gamma_step <= 0.0:
            raise ValueError("gamma_step must be > 0")
        if not 0.0 < self.alpha_target < 1.0:
            raise ValueError("alpha_target must lie strictly in (0, 1)")

    @classmethod
    def initial(cls, alpha_target: float, gamma_step: float) -> "CpState":
        """Start the threshold where the stretching map hits the target."""
        return cls(stretching_inverse(alpha_target), alpha_target, gamma_step)


def build_gamma(dist: SparseDistribution, alpha_f: float) -> GammaSet:
    """Shortest high-probability prefix of the support.

    Patterns are ranked by decreasing probability (ties broken by ascending
    bitmask, so the selection is reproducible) and the shortest prefix with
    cumulative mass >= 1 - alpha_f is returned.  At ``alpha_f == 1`` the
    prefix is empty; if even the full support cannot reach the target the
    whole support is returned with ``shortfall`` set.
    """
    if not 0.0 <= alpha_f <= 1.0:
        raise ValueError("alpha_f must lie in [0, 1]")
    n = len(dist.entries)
    masks = np.empty(n, np.uint64)
    probs = np.empty(n, np.float64)
    for i, (pattern, prob) in enumerate(dist.entries.items()):
        masks[i] = pattern.mask
        probs[i] = prob
    k, covered = _K.select_prefix(masks, probs, float(alpha_f))
    k = int(k)
    covered = float(covered)
    shortfall = covered < (1.0 - alpha_f) - SHORTFALL_EPS
    patterns = tuple(SlotSet(int(masks[i])) for i in range(k))
    return GammaSet(patterns, covered, shortfall)


def greedy_allocate(gamma: Union[GammaSet, Iterable[SlotSet]], latency: int,
                    num_slots: int) -> SlotSet:
    """Allocate a slot subset covering every pattern in ``gamma``.

    Scans slots from last to first; a slot still present in any working
    pattern is allocated, and each working pattern then drops its latest
    packet within ``latency`` of that slot.  The result covers every input
    pattern within the latency budget (it is a heuristic, not a
    minimum-cardinality cover).
    """
    patterns = gamma.patterns if isinstance(gamma, GammaSet) else tuple(gamma)
    if latency < 0:
        raise ValueError("latency must be >= 0")
    arr = np.empty(len(patterns), np.uint64)
    for i, pattern in enumerate(patterns):
        if not pattern.fits(num_slots):
            raise ValueError("pattern does not fit the frame")
        arr[i] = pattern.mask
    return SlotSet(int(_K.greedy_allocate(arr, latency, num_slots)))


def stretching(theta: float) -> float:
    """Monotone map from the raw threshold to a per-frame target in [0, 1]:
    ``0.5 * (1 + sin(pi * (clip(theta, 0, 1) - 0.5)))``."""
    return float(_K.stretching(float(theta)))


def stretching_inverse(alpha: float) -> float:
    """Unique theta in [0, 1] that the stretching map sends to ``alpha``."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return float(_K.stretching_inverse(float(alpha)))


def cp_update(state: CpState, reliability: int) -> CpState:
    """One feedback step: theta += gamma * (r - (1 - alpha)).

    The stored theta is deliberately unclipped; only the stretching map
    clips on read, so the update dynamics stay linear in the feedback.
    """
    if reliability not in (0, 1):
        raise ValueError("reliability must be 0 or 1")
    step = state.gamma_step * (reliability - (1.0 - state.alpha_target))
    return replace(state, theta=state.theta + step)


def naive_schedule_step(dist: SparseDistribution,
                        config: FrameConfig) -> SlotSet:
    """Allocation that trusts the predictor at the fixed target rate."""
    gamma = build_gamma(dist, config.target_unreliability)
    return greedy_allocate(gamma, config.latency, config.num_slots)


def cp_schedule_step(state: CpState, dist: SparseDistribution,
                     config: FrameConfig) -> tuple[SlotSet, float]:
    """Calibrated allocation for one frame.

    Returns the allocation and the per-frame target ``alpha_f`` derived
    from the current threshold.  The caller must feed the realized
    reliability indicator back through :func:`cp_update` afterwards.
    """
    alpha_f = stretching(state.theta)
    gamma = build_gamma(dist, alpha_f)
    return greedy_allocate(gamma, config.latency, config.num_slots), alpha_f
