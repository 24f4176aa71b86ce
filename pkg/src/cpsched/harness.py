"""Simulation harness: the per-frame loop and the mismatch sweep.

A run is fully determined by its configuration.  The traffic stream is
keyed by the run seed alone (and, inside a sweep, by the ground-truth
parameter index), so changing the scheduler or the predictor never
perturbs the realized traffic — paired comparisons stay paired.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ._rng import MASK64, RngSeed, hash2
from .backend import kernels as _K
from .core import FrameConfig, FrameTrace, SimSummary, SlotSet
from .scheduler import stretching_inverse
from .traffic import MarkovParams

# Substream tags within one run.  The predictor stream is reserved so that
# a sampling predictor could never steal draws from the traffic process.
TRAFFIC_STREAM = 0
PREDICTOR_STREAM = 1

TRAILING_WINDOW = 200


class SchedulerKind(str, Enum):
    NAIVE = "naive"
    CP = "cp"


class ConfigError(ValueError):
    """Invalid simulation configuration; raised before any frame runs."""


@dataclass(frozen=True)
class SimConfig:
    """Everything one reproducible run needs."""

    frame: FrameConfig
    gamma_step: float
    num_frames: int
    traffic: MarkovParams
    predictor_params: MarkovParams
    scheduler_kind: SchedulerKind
    seed: RngSeed

    def __post_init__(self) -> None:
        if isinstance(self.scheduler_kind, str) and not isinstance(
                self.scheduler_kind, SchedulerKind):
            object.__setattr__(
                self, "scheduler_kind", SchedulerKind(self.scheduler_kind))
        self.validate()

    def validate(self) -> None:
        if self.num_frames < 1:
            raise ConfigError("num_frames must be >= 1")
        if self.gamma_step <= 0.0:
            raise ConfigError("gamma_step must be > 0")
        if not isinstance(self.scheduler_kind, SchedulerKind):
            raise ConfigError(f"unknown scheduler_kind {self.scheduler_kind!r}")
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        try:
            self.traffic.check_frame(self.frame)
            self.predictor_params.check_frame(self.frame)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if (self.predictor_params.g_min != self.traffic.g_min
                or self.predictor_params.g_max != self.traffic.g_max):
            raise ConfigError(
                "predictor must share (g_min, g_max) with the traffic process")


@dataclass(frozen=True)
class SweepSpec:
    """Grid of ground-truth and predictor step probabilities (applied
    symmetrically: p_plus = p_minus = value) crossed with seeds."""

    base: SimConfig
    p_grid: tuple[float, ...]
    p_hat_grid: tuple[float, ...]
    seeds: tuple[RngSeed, ...]

    def validate(self) -> None:
        if not self.p_grid or not self.p_hat_grid or not self.seeds:
            raise ConfigError("sweep grids and seed list must be non-empty")
        for v in tuple(self.p_grid) + tuple(self.p_hat_grid):
            if not 0.0 <= v <= 0.5:
                raise ConfigError(f"sweep probability {v} outside [0, 0.5]")


@dataclass(frozen=True)
class SweepRow:
    p: float
    p_hat: float
    scheduler: SchedulerKind
    seed: RngSeed
    reliability_rate: float
    embb_efficiency: float


@dataclass(frozen=True)
class RawRun:
    """Array-level result of one run (masks use the slot-bit encoding)."""

    gen: np.ndarray
    alloc: np.ndarray
    rel: np.ndarray
    usize: np.ndarray
    alphas: np.ndarray
    thetas: np.ndarray
    theta_final: float


def traffic_stream_seed(seed: RngSeed) -> int:
    """Raw RNG state for a run's traffic substream."""
    return hash2(seed, TRAFFIC_STREAM)


def run_raw(config: SimConfig) -> RawRun:
    """Run the compiled (or pure) frame loop and return the raw arrays."""
    config.validate()
    theta_init = stretching_inverse(config.frame.target_unreliability)
    out = _K.simulate(
        config.frame.num_slots, config.frame.latency,
        config.frame.target_unreliability, config.gamma_step,
        config.num_frames,
        config.traffic.p_plus, config.traffic.p_minus,
        config.traffic.g_min, config.traffic.g_max,
        config.predictor_params.p_plus, config.predictor_params.p_minus,
        config.scheduler_kind is SchedulerKind.CP,
        theta_init,
        np.uint64(traffic_stream_seed(config.seed)))
    gen, alloc, rel, usize, alphas, thetas, theta_final = out
    return RawRun(gen, alloc, rel, usize, alphas, thetas, float(theta_final))


def summarize(raw: RawRun, config: SimConfig) -> SimSummary:
    frames = config.num_frames
    hits = int(raw.rel.sum(dtype=np.int64))
    used = int(raw.usize.sum(dtype=np.int64))
    window = min(TRAILING_WINDOW, frames)
    tail = int(raw.rel[frames - window:].sum(dtype=np.int64))
    return SimSummary(
        num_frames=frames,
        reliability_rate=hits / frames,
        embb_efficiency=1.0 - used / (frames * config.frame.num_slots),
        trailing_200_reliability=tail / window,
    )


def run_simulation(config: SimConfig) -> tuple[list[FrameTrace], SimSummary]:
    """Run one configuration and materialize the per-frame trace."""
    raw = run_raw(config)
    traces = [
        FrameTrace(
            frame_index=f + 1,
            generated=SlotSet(int(raw.gen[f])),
            allocated=SlotSet(int(raw.alloc[f])),
            reliability=int(raw.rel[f]),
            alpha_f=float(raw.alphas[f]),
            theta_f=float(raw.thetas[f]),
            allocated_count=int(raw.usize[f]),
        )
        for f in range(config.num_frames)
    ]
    return traces, summarize(raw, config)


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Run every (p, p_hat, scheduler, seed) cell of the sweep.

    Cell runs are keyed by hash2(seed, p-index), so the traffic a cell sees
    depends only on (p, seed): every predictor and both schedulers face
    identical packet sequences, and cells may be computed in any order.
    """
    spec.validate()
    rows = []
    for p_index, p in enumerate(spec.p_grid):
        for p_hat in spec.p_hat_grid:
            for kind in (SchedulerKind.NAIVE, SchedulerKind.CP):
                for seed in spec.seeds:
                    try:
                        config = replace(
                            spec.base,
                            traffic=replace(
                                spec.base.traffic, p_plus=p, p_minus=p),
                            predictor_params=replace(
                                spec.base.predictor_params,
                                p_plus=p_hat, p_minus=p_hat),
                            scheduler_kind=kind,
                            seed=hash2(seed, p_index),
                        )
                        raw = run_raw(config)
                    except ConfigError as exc:
                        raise ConfigError(
                            f"cell (p={p}, p_hat={p_hat}, "
                            f"scheduler={kind.value}, seed={seed}): {exc}"
                        ) from exc
                    summary = summarize(raw, config)
                    rows.append(SweepRow(
                        p=p, p_hat=p_hat, scheduler=kind, seed=seed,
                        reliability_rate=summary.reliability_rate,
                        embb_efficiency=summary.embb_efficiency))
    rows.sort(key=lambda r: (r.p, r.p_hat, r.scheduler.value, r.seed))
    return rows
