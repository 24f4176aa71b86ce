import pytest

from cpsched import FrameConfig, MarkovParams, SimConfig

# Canonical seeds for the frozen experiment scenarios.
GOLDEN_SEEDS = (1, 2, 3, 4, 5)


def make_config(scheduler_kind="cp", *, num_slots=12, latency=1, alpha=0.1,
                gamma_step=0.1, num_frames=2000, p=0.16, p_hat=0.02,
                g_min=0, g_max=6, seed=1) -> SimConfig:
    return SimConfig(
        frame=FrameConfig(num_slots, latency, alpha),
        gamma_step=gamma_step,
        num_frames=num_frames,
        traffic=MarkovParams(p, p, g_min, g_max),
        predictor_params=MarkovParams(p_hat, p_hat, g_min, g_max),
        scheduler_kind=scheduler_kind,
        seed=seed,
    )


@pytest.fixture
def sim_config():
    return make_config
