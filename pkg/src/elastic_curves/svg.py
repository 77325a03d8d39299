"""Deterministic SVG strips of path snapshots.

Each frame is a panel with its own viewBox in user coordinates; y is negated
so that the picture is not mirrored (SVG's y axis points down).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import TWO_PI, DiscreteCurve, DiscretePath

N_SAMPLES = 200


@dataclass(frozen=True)
class SvgStyle:
    panel_px: int = 200
    stroke: str = "#1f4e9c"
    target_stroke: str = "#c2185b"
    stroke_width: float = 1.5
    dash: str = "6,4"
    precision: int = 6


def frame_times(k: int) -> list[float]:
    return [i / (k - 1) for i in range(k)]


def _sites(closed: bool) -> np.ndarray:
    return np.linspace(0.0, TWO_PI, N_SAMPLES, endpoint=not closed)


def sample_frame(path: DiscretePath, t: float) -> np.ndarray:
    return path.curve_at(t)(_sites(path.config.closed))


def _fmt(pts: np.ndarray, precision: int) -> str:
    return " ".join(f"{x:.{precision}f},{-y:.{precision}f}" for x, y in pts)


def render_svg(
    path: DiscretePath,
    times=None,
    target: DiscreteCurve | None = None,
    style: SvgStyle | None = None,
) -> str:
    """One panel per time, 200 theta samples per polyline, shared viewBox with 5% margin."""
    style = style or SvgStyle()
    times = frame_times(5) if times is None else list(times)
    frames = [sample_frame(path, t) for t in times]
    tpts = target(_sites(target.config.closed)) if target is not None else None
    closed = path.config.closed
    if closed:
        frames = [np.vstack([f, f[:1]]) for f in frames]
        if tpts is not None:
            tpts = np.vstack([tpts, tpts[:1]])
    allpts = np.vstack(frames + ([tpts] if tpts is not None else []))
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    lo, hi = lo - 0.05 * span, hi + 0.05 * span
    w, h = hi - lo
    p = style.precision
    # viewBox in flipped coordinates (x, -y)
    vb = f"{lo[0]:.{p}f} {-hi[1]:.{p}f} {w:.{p}f} {h:.{p}f}"
    px = style.panel_px
    py = max(1, int(round(px * h / w)))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{px * len(frames)}" height="{py}">',
    ]
    for i, (t, pts) in enumerate(zip(times, frames)):
        lines.append(
            f'  <svg x="{i * px}" y="0" width="{px}" height="{py}" viewBox="{vb}" '
            f'preserveAspectRatio="xMidYMid meet">'
        )
        lines.append(f"    <title>t={t:.4f}</title>")
        if tpts is not None and i == len(frames) - 1:
            lines.append(
                f'    <polyline class="target" fill="none" stroke="{style.target_stroke}" '
                f'stroke-dasharray="{style.dash}" vector-effect="non-scaling-stroke" '
                f'stroke-width="{style.stroke_width}" points="{_fmt(tpts, p)}"/>'
            )
        lines.append(
            f'    <polyline class="frame" fill="none" stroke="{style.stroke}" '
            f'vector-effect="non-scaling-stroke" stroke-width="{style.stroke_width}" '
            f'points="{_fmt(pts, p)}"/>'
        )
        lines.append("  </svg>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def parse_polylines(svg: str) -> list[np.ndarray]:
    """Frame polylines of a rendered document, back in user coordinates."""
    import re

    out = []
    for m in re.finditer(r'class="frame"[^>]*points="([^"]*)"', svg):
        pts = np.array([[float(v) for v in pair.split(",")] for pair in m.group(1).split()])
        pts[:, 1] *= -1
        out.append(pts)
    return out
