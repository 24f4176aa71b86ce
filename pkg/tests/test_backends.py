"""Bit-exact parity between the compiled kernels and their pure twins."""

import os
import subprocess
import sys

import numpy as np
import pytest

numba = pytest.importorskip("numba")

from cpsched.backend import jit, pure
from cpsched.scheduler import stretching_inverse


def test_rng_stream_parity():
    state_j = np.uint64(0xDEADBEEF12345678)
    state_p = 0xDEADBEEF12345678
    for _ in range(1000):
        uj, state_j = jit.rng_next(state_j)
        up, state_p = pure.rng_next(state_p)
        assert int(uj) == up
    fj, state_j = jit.rng_uniform(state_j)
    fp, state_p = pure.rng_uniform(state_p)
    assert fj == fp
    kj, state_j = jit.rng_below(12, state_j)
    kp, state_p = pure.rng_below(12, state_p)
    assert int(kj) == kp


def test_cover_kernels_parity():
    rng = np.random.default_rng(11)
    for _ in range(3000):
        bits = int(rng.integers(1, 13))
        a = int(rng.integers(0, 1 << bits))
        g = int(rng.integers(0, 1 << bits))
        latency = int(rng.integers(0, 3))
        assert bool(jit.l_covers(np.uint64(a), np.uint64(g), latency)) == \
            pure.l_covers(a, g, latency)
        assert bool(jit.l_covers_exhaustive(np.uint64(a), np.uint64(g),
                                            latency)) == \
            pure.l_covers_exhaustive(a, g, latency)


def test_top_bit_masks_survive_both_backends():
    # slot 64 exercises the sign bit of the mask word
    full = (1 << 64) - 1
    high = 1 << 63
    assert pure.l_covers(full, high, 0)
    assert bool(jit.l_covers(np.uint64(full), np.uint64(high), 0))
    assert pure.popcount(full) == 64
    assert jit.popcount(np.uint64(full)) == 64


def test_transition_and_prefix_parity():
    rng = np.random.default_rng(23)
    for _ in range(500):
        mask = int(rng.integers(0, 1 << 12))
        card = bin(mask).count("1")
        g_min = int(rng.integers(0, card + 1))
        g_max = int(rng.integers(card, 13))
        pp = float(rng.uniform(0, 0.5))
        pm = float(rng.uniform(0, 0.5))
        mj, pj = jit.transition_support(np.uint64(mask), 12, pp, pm,
                                        g_min, g_max)
        mp, pq = pure.transition_support(mask, 12, pp, pm, g_min, g_max)
        assert np.array_equal(mj, mp)
        assert np.array_equal(pj, pq)
        alpha_f = float(rng.uniform(0, 1))
        kj, cj = jit.select_prefix(mj, pj, alpha_f)
        kp, cp_ = pure.select_prefix(mp, pq, alpha_f)
        assert (int(kj), float(cj)) == (kp, cp_)
        assert np.array_equal(mj, mp)  # same in-place sort


def test_greedy_allocate_parity():
    rng = np.random.default_rng(37)
    for _ in range(1000):
        n = int(rng.integers(0, 9))
        pats = rng.integers(0, 1 << 12, size=n).astype(np.uint64)
        latency = int(rng.integers(0, 3))
        aj = jit.greedy_allocate(pats.copy(), latency, 12)
        ap = pure.greedy_allocate(pats.copy(), latency, 12)
        assert int(aj) == ap


def test_stretching_parity():
    for theta in np.linspace(-2.0, 3.0, 401):
        assert jit.stretching(theta) == pure.stretching(theta)
    for alpha in np.linspace(0.0, 1.0, 201):
        assert jit.stretching_inverse(alpha) == pure.stretching_inverse(alpha)


@pytest.mark.parametrize("use_cp", [True, False])
def test_simulate_parity(use_cp):
    args = (12, 1, 0.1, 0.1, 2000, 0.16, 0.16, 0, 6, 0.02, 0.02,
            use_cp, stretching_inverse(0.1), np.uint64(123456789))
    out_j = jit.simulate(*args)
    out_p = pure.simulate(*args)
    for a, b in zip(out_j[:-1], out_p[:-1]):
        assert np.array_equal(a, b)
    assert float(out_j[-1]) == float(out_p[-1])


def test_simulate_parity_boundary_params():
    args = (12, 2, 0.05, 0.07, 1500, 0.5, 0.5, 1, 5, 0.4, 0.25,
            True, stretching_inverse(0.05), np.uint64(99))
    out_j = jit.simulate(*args)
    out_p = pure.simulate(*args)
    for a, b in zip(out_j[:-1], out_p[:-1]):
        assert np.array_equal(a, b)
    assert float(out_j[-1]) == float(out_p[-1])


def test_backend_env_flag_selects_pure():
    env = dict(os.environ, CPSCHED_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c",
         "import cpsched; print(cpsched.BACKEND_NAME)"],
        capture_output=True, text=True, env=env)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "python"


def test_backend_env_flag_rejects_unknown():
    env = dict(os.environ, CPSCHED_BACKEND="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import cpsched"],
        capture_output=True, text=True, env=env)
    assert out.returncode != 0
    assert "CPSCHED_BACKEND" in out.stderr
