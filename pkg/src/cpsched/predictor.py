"""Next-frame traffic predictors.

A predictor emits an explicit pattern -> probability map for the coming
frame and then ingests the realized pattern as feedback.  The shipped
predictor mirrors the traffic process's own transition law, optionally
with mismatched step probabilities; its output is the exact one-step
transition distribution, so support size never exceeds 1 + S.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, runtime_checkable

import numpy as np

from .backend import kernels as _K
from .core import FrameConfig, SlotSet
from .traffic import MarkovParams

NORMALIZATION_EPS = 1e-9


@dataclass(frozen=True)
class SparseDistribution:
    """Explicit probability map over slot subsets.

    Only non-negativity is enforced here; exact normalization is a
    property of the shipped predictor (see :meth:`is_normalized`), while
    user-supplied predictors may legitimately leave mass unaccounted and
    are handled downstream via the shortfall flag.
    """

    entries: Mapping[SlotSet, float]

    def __post_init__(self) -> None:
        for pattern, prob in self.entries.items():
            if prob < 0.0:
                raise ValueError(f"negative probability for {pattern!r}")

    @property
    def total_mass(self) -> float:
        return float(sum(self.entries.values()))

    def is_normalized(self, eps: float = NORMALIZATION_EPS) -> bool:
        return abs(self.total_mass - 1.0) <= eps


@runtime_checkable
class TrafficPredictor(Protocol):
    """Anything that proposes a next-frame distribution and learns from the
    realized pattern afterwards."""

    def predict_next(self) -> SparseDistribution: ...

    def observe_feedback(self, realized: SlotSet) -> None: ...


def predict_next(observed_prev: SlotSet, params_hat: MarkovParams,
                 config: FrameConfig) -> SparseDistribution:
    """Exact one-step transition distribution from the last observed
    pattern under (possibly mismatched) walk parameters.

    Mass ``p_minus/|G|`` sits on each single-slot removal, ``p_plus/(S-|G|)``
    on each single-slot addition, and the remainder on the unchanged
    pattern; branches clipped at the cardinality bounds fold into the
    unchanged-pattern mass.
    """
    params_hat.check_frame(config)
    if not observed_prev.fits(config.num_slots):
        raise ValueError("pattern does not fit the frame")
    if not params_hat.g_min <= len(observed_prev) <= params_hat.g_max:
        raise ValueError("cardinality out of range")
    masks, probs = _K.transition_support(
        np.uint64(observed_prev.mask), config.num_slots,
        params_hat.p_plus, params_hat.p_minus,
        params_hat.g_min, params_hat.g_max)
    entries = {SlotSet(int(m)): float(p) for m, p in zip(masks, probs)}
    return SparseDistribution(entries)


class MarkovPredictor:
    """Stateful wrapper around :func:`predict_next`.

    Feedback is the full realized pattern, which simply becomes the new
    chain state; the predictor is otherwise deterministic.
    """

    def __init__(self, params_hat: MarkovParams, config: FrameConfig,
                 initial_state: SlotSet = SlotSet()) -> None:
        params_hat.check_frame(config)
        self._params = params_hat
        self._config = config
        self._state = initial_state

    @property
    def state(self) -> SlotSet:
        return self._state

    def predict_next(self) -> SparseDistribution:
        return predict_next(self._state, self._params, self._config)

    def observe_feedback(self, realized: SlotSet) -> None:
        if not realized.fits(self._config.num_slots):
            raise ValueError("pattern does not fit the frame")
        self._state = realized
