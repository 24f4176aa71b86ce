import json
import subprocess
import sys

import pytest

from cpsched.cli import (EXIT_CONFIG, EXIT_IO, EXIT_OK, OutputPaths, cmd_run,
                         cmd_sweep, main)
from cpsched.scheduler import stretching_inverse


def base_config(**overrides):
    cfg = {
        "frame": {"num_slots": 12, "latency": 1, "target_unreliability": 0.1},
        "gamma_step": 0.1,
        "num_frames": 1,
        "traffic": {"p_plus": 0.0, "p_minus": 0.0, "g_min": 0, "g_max": 6},
        "predictor_params": {"p_plus": 0.0, "p_minus": 0.0,
                             "g_min": 0, "g_max": 6},
        "scheduler_kind": "naive",
        "seed": 7,
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run_paths(tmp_path, tag=""):
    return OutputPaths(trace_path=str(tmp_path / f"trace{tag}.csv"),
                       summary_path=str(tmp_path / f"summary{tag}.json"))


# ---------------------------------------------------------------------------
# run


def test_run_single_empty_frame(tmp_path):
    config_path = write_config(tmp_path, base_config())
    paths = run_paths(tmp_path)
    assert cmd_run(config_path, None, paths) == EXIT_OK
    theta = format(stretching_inverse(0.1), ".9g")
    expected = ("frame,generated,allocated,r,alpha_f,theta_f,u_size\n"
                f"1,,,1,0.1,{theta},0\n")
    assert (tmp_path / "trace.csv").read_text() == expected
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary == {
        "frames": 1,
        "reliability_rate": 1.0,
        "embb_efficiency": 1.0,
        "trailing_200_reliability": 1.0,
    }


def test_run_is_byte_deterministic(tmp_path):
    cfg = base_config(num_frames=400, scheduler_kind="cp",
                      traffic={"p_plus": 0.16, "p_minus": 0.16,
                               "g_min": 0, "g_max": 6},
                      predictor_params={"p_plus": 0.02, "p_minus": 0.02,
                                        "g_min": 0, "g_max": 6})
    config_path = write_config(tmp_path, cfg)
    a, b = run_paths(tmp_path, "a"), run_paths(tmp_path, "b")
    assert cmd_run(config_path, None, a) == EXIT_OK
    assert cmd_run(config_path, None, b) == EXIT_OK
    assert (tmp_path / "tracea.csv").read_bytes() == \
        (tmp_path / "traceb.csv").read_bytes()
    assert (tmp_path / "summarya.json").read_bytes() == \
        (tmp_path / "summaryb.json").read_bytes()


def test_run_seed_override_changes_trace(tmp_path):
    cfg = base_config(num_frames=50,
                      traffic={"p_plus": 0.3, "p_minus": 0.3,
                               "g_min": 0, "g_max": 6})
    config_path = write_config(tmp_path, cfg)
    a, b = run_paths(tmp_path, "a"), run_paths(tmp_path, "b")
    assert cmd_run(config_path, None, a) == EXIT_OK
    assert cmd_run(config_path, 12345, b) == EXIT_OK
    assert (tmp_path / "tracea.csv").read_text() != \
        (tmp_path / "traceb.csv").read_text()


@pytest.mark.parametrize("mutate", [
    lambda c: c.update(extra_key=1),
    lambda c: c.pop("seed"),
    lambda c: c["frame"].update(num_slots=0),
    lambda c: c["frame"].update(target_unreliability=2.0),
    lambda c: c.update(scheduler_kind="bogus"),
    lambda c: c.update(num_frames=0),
    lambda c: c["predictor_params"].update(g_max=5),
    lambda c: c.update(seed=True),
])
def test_run_bad_config_exits_2(tmp_path, mutate):
    cfg = base_config()
    mutate(cfg)
    config_path = write_config(tmp_path, cfg)
    assert cmd_run(config_path, None, run_paths(tmp_path)) == EXIT_CONFIG


def test_run_unparseable_or_missing_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cmd_run(str(bad), None, run_paths(tmp_path)) == EXIT_CONFIG
    assert cmd_run(str(tmp_path / "absent.json"), None,
                   run_paths(tmp_path)) == EXIT_CONFIG


def test_run_bad_seed_override_exits_2(tmp_path):
    config_path = write_config(tmp_path, base_config())
    assert cmd_run(config_path, -1, run_paths(tmp_path)) == EXIT_CONFIG
    assert cmd_run(config_path, 1 << 64, run_paths(tmp_path)) == EXIT_CONFIG


def test_run_unwritable_output_exits_3(tmp_path):
    config_path = write_config(tmp_path, base_config())
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    paths = OutputPaths(trace_path=str(blocker / "trace.csv"),
                        summary_path=str(tmp_path / "summary.json"))
    assert cmd_run(config_path, None, paths) == EXIT_IO


# ---------------------------------------------------------------------------
# sweep


def test_sweep_single_cell(tmp_path):
    cfg = base_config(num_frames=40)
    config_path = write_config(tmp_path, cfg)
    out = tmp_path / "sweep.csv"
    assert cmd_sweep(config_path, "0.16", "0.02", "3", str(out)) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "p,p_hat,scheduler,seed,reliability_rate,embb_efficiency"
    assert len(lines) == 3  # header + naive + cp
    assert lines[1].startswith("0.16,0.02,cp,3,")
    assert lines[2].startswith("0.16,0.02,naive,3,")


def test_sweep_rows_sorted(tmp_path):
    config_path = write_config(tmp_path, base_config(num_frames=30))
    out = tmp_path / "sweep.csv"
    assert cmd_sweep(config_path, "0.2,0.1", "0.3,0.05", "2,1",
                     str(out)) == EXIT_OK
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert len(rows) == 2 * 2 * 2 * 2
    keys = [(float(r[0]), float(r[1]), r[2], int(r[3])) for r in rows]
    assert keys == sorted(keys)


def test_sweep_grid_validation(tmp_path):
    config_path = write_config(tmp_path, base_config())
    out = str(tmp_path / "sweep.csv")
    assert cmd_sweep(config_path, "0.6", "0.1", "1", out) == EXIT_CONFIG
    assert cmd_sweep(config_path, "0.1", "nope", "1", out) == EXIT_CONFIG
    assert cmd_sweep(config_path, "0.1", "0.1", "x", out) == EXIT_CONFIG
    assert cmd_sweep(config_path, "0.1", "0.1", "-3", out) == EXIT_CONFIG


def test_sweep_unwritable_output_exits_3(tmp_path):
    config_path = write_config(tmp_path, base_config())
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert cmd_sweep(config_path, "0.1", "0.1", "1",
                     str(blocker / "sweep.csv")) == EXIT_IO


# ---------------------------------------------------------------------------
# entry points


def test_main_dispatch(tmp_path):
    config_path = write_config(tmp_path, base_config())
    trace = tmp_path / "t.csv"
    summary = tmp_path / "s.json"
    code = main(["run", "--config", config_path,
                 "--trace", str(trace), "--summary", str(summary)])
    assert code == EXIT_OK
    assert trace.exists() and summary.exists()
    out = tmp_path / "sw.csv"
    code = main(["sweep", "--config", config_path, "--p", "0.1",
                 "--p-hat", "0.1", "--seeds", "1", "--out", str(out)])
    assert code == EXIT_OK
    assert out.exists()


def test_module_entry_point(tmp_path):
    config_path = write_config(tmp_path, base_config())
    result = subprocess.run(
        [sys.executable, "-m", "cpsched", "run", "--config", config_path,
         "--trace", str(tmp_path / "t.csv"),
         "--summary", str(tmp_path / "s.json")],
        capture_output=True, text=True)
    assert result.returncode == EXIT_OK, result.stderr
