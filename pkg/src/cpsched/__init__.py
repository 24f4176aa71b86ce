"""Deterministic simulator for dynamic URLLC slot allocation.

Frames of S slots carry sporadic high-priority packets that must be served
by a pre-allocated slot within a per-packet delay budget; whatever is not
reserved remains available to best-effort traffic.  The package ships a
seeded traffic process, an exact (optionally mismatched) one-step
predictor, a naive predictor-trusting scheduler, and a feedback-calibrated
scheduler whose long-run reliability tracks the target regardless of
predictor quality, plus a harness and CLI for trace and sweep experiments.
"""

from ._rng import RngSeed, SplitMix64
from .backend import BACKEND_NAME
from .core import (MAX_SLOTS, FrameConfig, FrameTrace, SimSummary, SlotSet,
                   embb_efficiency, l_covers, l_covers_oracle,
                   reliability_indicator, reliability_rate)
from .harness import (ConfigError, SchedulerKind, SimConfig, SweepRow,
                      SweepSpec, run_simulation, run_sweep)
from .predictor import (MarkovPredictor, SparseDistribution, TrafficPredictor,
                        predict_next)
from .scheduler import (CpState, GammaSet, build_gamma, cp_schedule_step,
                        cp_update, greedy_allocate, naive_schedule_step,
                        stretching, stretching_inverse)
from .traffic import MarkovParams, initial_pattern, step_traffic

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "MAX_SLOTS",
    "ConfigError",
    "CpState",
    "FrameConfig",
    "FrameTrace",
    "GammaSet",
    "MarkovParams",
    "MarkovPredictor",
    "RngSeed",
    "SchedulerKind",
    "SimConfig",
    "SimSummary",
    "SlotSet",
    "SparseDistribution",
    "SplitMix64",
    "SweepRow",
    "SweepSpec",
    "TrafficPredictor",
    "build_gamma",
    "cp_schedule_step",
    "cp_update",
    "embb_efficiency",
    "greedy_allocate",
    "initial_pattern",
    "l_covers",
    "l_covers_oracle",
    "naive_schedule_step",
    "predict_next",
    "reliability_indicator",
    "reliability_rate",
    "run_simulation",
    "run_sweep",
    "step_traffic",
    "stretching",
    "stretching_inverse",
    "__version__",
]
