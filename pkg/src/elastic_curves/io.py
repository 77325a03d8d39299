"""JSON curve and path files.

Curve file, either raw points to be fitted::

    {"name": "fish01", "closed": true, "points": [[x, y], ...]}

or explicit spline data::

    {"name": "c", "spline": {"n_theta": 3, "N_theta": 12, "closed": true},
     "ctrl": [[x, y], ...]}

Path file::

    {"spline": {...all SplineConfig fields...}, "ctrl": [[[x, y], ...], ...]}
"""
from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .bspline import DiscreteCurve, DiscretePath, FitError, SplineConfig, SplineConfigError, fit_curve
from .matching import resample_curve


class InputError(ValueError):
    """Malformed or unreadable input file."""


CURVE_KEYS = {"name", "closed", "points", "spline", "ctrl"}
SPLINE_KEYS = set(SplineConfig.__dataclass_fields__)


def read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _spline_from(data: dict, where: str, base: SplineConfig | None = None) -> SplineConfig:
    if not isinstance(data, dict):
        raise InputError(f"{where}: key 'spline' must be an object")
    for key in data:
        if key not in SPLINE_KEYS:
            raise InputError(f"{where}: unknown key 'spline.{key}'")
    try:
        if base is not None:
            return base.with_(**data)
        return SplineConfig(**data)
    except (SplineConfigError, TypeError) as exc:
        raise InputError(f"{where}: invalid key 'spline': {exc}") from exc


def curve_from_dict(data: dict, config: SplineConfig, where: str = "curve") -> tuple[str, DiscreteCurve]:
    """Parse a curve object and bring it onto ``config``'s spatial spline space."""
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected a JSON object")
    for key in data:
        if key not in CURVE_KEYS:
            raise InputError(f"{where}: unknown key {key!r}")
    name = str(data.get("name", Path(where).stem))
    if "points" in data:
        pts = _array(data["points"], where, "points", ndim=2)
        if len(pts) < 4:
            raise InputError(f"{where}: key 'points' needs at least 4 points, got {len(pts)}")
        closed = data.get("closed", config.closed)
        if not isinstance(closed, bool):
            raise InputError(f"{where}: key 'closed' must be a boolean")
        if closed != config.closed:
            raise InputError(f"{where}: key 'closed' is {closed} but the run expects closed={config.closed}")
        try:
            return name, fit_curve(pts, config)
        except FitError as exc:
            raise InputError(f"{where}: key 'points': {exc}") from exc
    if "ctrl" not in data or "spline" not in data:
        raise InputError(f"{where}: missing key 'points' (or 'spline' and 'ctrl')")
    own = _spline_from(data["spline"], where, base=config)
    ctrl = _array(data["ctrl"], where, "ctrl", ndim=2)
    try:
        curve = DiscreteCurve(own, ctrl)
    except SplineConfigError as exc:
        raise InputError(f"{where}: key 'ctrl': {exc}") from exc
    if (own.closed, own.n_theta, own.N_theta) != (config.closed, config.n_theta, config.N_theta):
        try:
            curve = resample_curve(curve, config)
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from exc
    return name, DiscreteCurve(config, curve.ctrl)


def _array(value, where, key, ndim):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: key {key!r} must be a numeric array") from exc
    if arr.ndim != ndim or arr.shape[-1] != 2:
        raise InputError(f"{where}: key {key!r} has shape {arr.shape}, expected (..., 2)")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: key {key!r} contains non-finite values")
    return arr


def read_curve(path, config: SplineConfig) -> tuple[str, DiscreteCurve]:
    return curve_from_dict(read_json(path), config, where=str(path))


def curve_to_dict(curve: DiscreteCurve, name: str = "curve") -> dict:
    cfg = curve.config
    return {
        "name": name,
        "spline": {"n_theta": cfg.n_theta, "N_theta": cfg.N_theta, "closed": cfg.closed},
        "ctrl": curve.ctrl.tolist(),
    }


def path_to_dict(path: DiscretePath) -> dict:
    return {"spline": asdict(path.config), "ctrl": path.ctrl.tolist()}


def path_from_dict(data: dict, where: str = "path") -> DiscretePath:
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected a JSON object")
    for key in data:
        if key not in ("spline", "ctrl"):
            raise InputError(f"{where}: unknown key {key!r}")
    if "spline" not in data or "ctrl" not in data:
        raise InputError(f"{where}: path files need keys 'spline' and 'ctrl'")
    cfg = _spline_from(data["spline"], where)
    ctrl = _array(data["ctrl"], where, "ctrl", ndim=3)
    try:
        return DiscretePath(cfg, ctrl)
    except SplineConfigError as exc:
        raise InputError(f"{where}: key 'ctrl': {exc}") from exc


def read_path(path) -> DiscretePath:
    return path_from_dict(read_json(path), where=str(path))


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
