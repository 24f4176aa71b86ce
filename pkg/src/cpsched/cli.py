"""Command-line front end.

``cpsched run`` executes one configuration and writes a per-frame CSV
trace plus a JSON summary; ``cpsched sweep`` crosses ground-truth and
predictor parameter grids over both schedulers and writes one CSV row per
cell.  Exit codes are stable for scripting: 0 success, 2 configuration
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from ._rng import MASK64
from .core import FrameConfig, FrameTrace, SimSummary
from .harness import (ConfigError, SimConfig, SweepSpec,
                      run_simulation, run_sweep)
from .traffic import MarkovParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

TRACE_HEADER = "frame,generated,allocated,r,alpha_f,theta_f,u_size"
SWEEP_HEADER = "p,p_hat,scheduler,seed,reliability_rate,embb_efficiency"

_FRAME_KEYS = {"num_slots", "latency", "target_unreliability"}
_MARKOV_KEYS = {"p_plus", "p_minus", "g_min", "g_max"}
_CONFIG_KEYS = {"frame", "gamma_step", "num_frames", "traffic",
                "predictor_params", "scheduler_kind", "seed"}


@dataclass(frozen=True)
class OutputPaths:
    """Destinations for the artifacts a command writes."""

    trace_path: Optional[str] = None
    summary_path: Optional[str] = None
    sweep_path: Optional[str] = None


def _fmt(x: float) -> str:
    """Reals are serialized with 9 significant digits, locale-independent."""
    return format(float(x), ".9g")


def _round9(x: float) -> float:
    return float(_fmt(x))


def _expect_keys(obj: dict, keys: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(obj) - keys
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = keys - set(obj)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def _as_int(obj: dict, key: str, where: str) -> int:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key} must be an integer")
    return v


def _as_float(obj: dict, key: str, where: str) -> float:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return float(v)


def _markov_from(obj: dict, where: str) -> MarkovParams:
    _expect_keys(obj, _MARKOV_KEYS, where)
    try:
        return MarkovParams(
            p_plus=_as_float(obj, "p_plus", where),
            p_minus=_as_float(obj, "p_minus", where),
            g_min=_as_int(obj, "g_min", where),
            g_max=_as_int(obj, "g_max", where))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path: str) -> SimConfig:
    """Parse and validate a simulation config file (strict JSON schema)."""
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    _expect_keys(obj, _CONFIG_KEYS, "config")
    frame_obj = obj["frame"]
    _expect_keys(frame_obj, _FRAME_KEYS, "frame")
    kind = obj["scheduler_kind"]
    if not isinstance(kind, str):
        raise ConfigError("scheduler_kind must be a string")
    try:
        return SimConfig(
            frame=FrameConfig(
                num_slots=_as_int(frame_obj, "num_slots", "frame"),
                latency=_as_int(frame_obj, "latency", "frame"),
                target_unreliability=_as_float(
                    frame_obj, "target_unreliability", "frame")),
            gamma_step=_as_float(obj, "gamma_step", "config"),
            num_frames=_as_int(obj, "num_frames", "config"),
            traffic=_markov_from(obj["traffic"], "traffic"),
            predictor_params=_markov_from(
                obj["predictor_params"], "predictor_params"),
            scheduler_kind=kind,
            seed=_as_int(obj, "seed", "config"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write_text(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _slots_field(slots) -> str:
    return ";".join(str(s) for s in slots)


def _trace_csv(traces: Sequence[FrameTrace]) -> str:
    lines = [TRACE_HEADER]
    for t in traces:
        lines.append(
            f"{t.frame_index},{_slots_field(t.generated)},"
            f"{_slots_field(t.allocated)},{t.reliability},"
            f"{_fmt(t.alpha_f)},{_fmt(t.theta_f)},{t.allocated_count}")
    return "\n".join(lines) + "\n"


def _summary_json(summary: SimSummary) -> str:
    payload = {
        "frames": summary.num_frames,
        "reliability_rate": _round9(summary.reliability_rate),
        "embb_efficiency": _round9(summary.embb_efficiency),
        "trailing_200_reliability": _round9(summary.trailing_200_reliability),
    }
    return json.dumps(payload, indent=2) + "\n"


def cmd_run(config_path: str, seed_override: Optional[int],
            paths: OutputPaths) -> int:
    """Execute one run; writes the trace CSV and summary JSON."""
    try:
        config = load_config(config_path)
        if seed_override is not None:
            if not 0 <= seed_override <= MASK64:
                raise ConfigError("seed must be an unsigned 64-bit integer")
            config = replace(config, seed=seed_override)
        traces, summary = run_simulation(config)
    except ConfigError as exc:
        print(f"cpsched: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _write_text(paths.trace_path, _trace_csv(traces))
        _write_text(paths.summary_path, _summary_json(summary))
    except OSError as exc:
        print(f"cpsched: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _parse_grid(text: str, name: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{name} must be a comma-separated list of reals") \
            from exc
    for v in values:
        if not 0.0 <= v <= 0.5:
            raise ConfigError(f"{name} value {v} outside [0, 0.5]")
    return values


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError("seeds must be a comma-separated list of integers") \
            from exc
    for s in seeds:
        if not 0 <= s <= MASK64:
            raise ConfigError(f"seed {s} is not an unsigned 64-bit integer")
    return seeds


def cmd_sweep(config_path: str, p_grid: str, p_hat_grid: str, seeds: str,
              sweep_path: str) -> int:
    """Run the mismatch sweep; writes one CSV row per cell."""
    try:
        spec = SweepSpec(
            base=load_config(config_path),
            p_grid=_parse_grid(p_grid, "--p"),
            p_hat_grid=_parse_grid(p_hat_grid, "--p-hat"),
            seeds=_parse_seeds(seeds))
        rows = run_sweep(spec)
    except ConfigError as exc:
        print(f"cpsched: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(
            f"{_fmt(r.p)},{_fmt(r.p_hat)},{r.scheduler.value},{r.seed},"
            f"{_fmt(r.reliability_rate)},{_fmt(r.embb_efficiency)}")
    try:
        _write_text(sweep_path, "\n".join(lines) + "\n")
    except OSError as exc:
        print(f"cpsched: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpsched",
        description="Deterministic URLLC slot-allocation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration")
    p_run.add_argument("--config", required=True, help="JSON config file")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_run.add_argument("--trace", required=True, help="per-frame CSV output")
    p_run.add_argument("--summary", required=True, help="JSON summary output")

    p_sweep = sub.add_parser("sweep", help="run the mismatch sweep")
    p_sweep.add_argument("--config", required=True, help="JSON config file")
    p_sweep.add_argument("--p", required=True,
                         help="comma-separated ground-truth step probabilities")
    p_sweep.add_argument("--p-hat", required=True, dest="p_hat",
                         help="comma-separated predictor step probabilities")
    p_sweep.add_argument("--seeds", required=True,
                         help="comma-separated seeds")
    p_sweep.add_argument("--out", required=True, help="sweep CSV output")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        paths = OutputPaths(trace_path=args.trace, summary_path=args.summary)
        return cmd_run(args.config, args.seed, paths)
    paths = OutputPaths(sweep_path=args.out)
    return cmd_sweep(args.config, args.p, args.p_hat, args.seeds,
                     paths.sweep_path)


if __name__ == "__main__":
    raise SystemExit(main())
