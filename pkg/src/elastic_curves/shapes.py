"""Synthetic test shapes fitted onto spline spaces."""
from __future__ import annotations

import numpy as np

from .bspline import TWO_PI, DiscreteCurve, SplineConfig, fit_curve


def _params(config: SplineConfig, m: int) -> np.ndarray:
    return np.linspace(0, TWO_PI, m, endpoint=not config.closed)


def from_function(fn, config: SplineConfig, density: int = 10) -> DiscreteCurve:
    """Least-squares spline of theta -> fn(theta), using theta itself as parameter."""
    theta = _params(config, density * config.N_theta)
    return fit_curve(fn(theta), config, params=theta)


def circle(config: SplineConfig, radius: float = 1.0, center=(0.0, 0.0)) -> DiscreteCurve:
    c = np.asarray(center, float)
    return from_function(lambda t: c + radius * np.stack([np.cos(t), np.sin(t)], 1), config)


def ellipse(config: SplineConfig, a: float = 1.0, b: float = 0.5, angle: float = 0.0) -> DiscreteCurve:
    R = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    return from_function(lambda t: np.stack([a * np.cos(t), b * np.sin(t)], 1) @ R.T, config)


def bean(config: SplineConfig, depth: float = 0.35) -> DiscreteCurve:
    """Circle with a smooth inward dent on one side."""
    def fn(t):
        r = 1.0 - depth * np.exp(-4.0 * (1 - np.cos(t - np.pi / 2)))
        return np.stack([1.2 * r * np.cos(t), 0.8 * r * np.sin(t)], 1)

    return from_function(fn, config)


def segment(config: SplineConfig, start=(0.0, 0.0), end=(TWO_PI, 0.0)) -> DiscreteCurve:
    """Straight open segment parametrized proportionally to theta (exact in any spline space)."""
    from .bspline import greville

    s = greville(config)[:, None] / TWO_PI
    ctrl = (1 - s) * np.asarray(start, float) + s * np.asarray(end, float)
    return DiscreteCurve(config, ctrl)
