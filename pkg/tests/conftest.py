import numpy as np
import pytest

from elastic_curves.bspline import TWO_PI, DiscretePath, SplineConfig, greville
from elastic_curves.shapes import circle


def random_path(cfg: SplineConfig, rng, amp=0.15):
    """Smooth immersed path: a circle family with a few low-frequency wobbles."""
    base = circle(cfg).ctrl
    th = greville(cfg)[:, None]
    s = greville(cfg, "t")[:, None, None]
    ctrl = np.broadcast_to(base, (cfg.N_t,) + base.shape).copy()
    for k in (1, 2, 3):
        a = rng.normal(size=(cfg.N_t, 1, 2)) * amp / k
        ctrl += a * np.concatenate([np.cos(k * th), np.sin(k * th)], axis=1)[None]
    ctrl *= 1.0 + 0.3 * s
    ctrl += rng.normal(size=(cfg.N_t, 1, 2)) * 0.2
    return DiscretePath(cfg, ctrl)


def directional_fd(f, x, d, h=1e-5):
    return (f(x + h * d) - f(x - h * d)) / (2 * h)


def rel_err(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_cfg():
    return SplineConfig(N_theta=16, N_t=6)


__all__ = ["random_path", "directional_fd", "rel_err", "TWO_PI"]
