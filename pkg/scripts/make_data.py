"""Write the sample curve files and configs under data/."""
import argparse
import json
from pathlib import Path

import numpy as np


def closed_points(fn, m=200):
    t = np.linspace(0, 2 * np.pi, m, endpoint=False)
    return np.round(fn(t), 12).tolist()


def circle(t, r=1.0, c=(0.0, 0.0)):
    return np.stack([c[0] + r * np.cos(t), c[1] + r * np.sin(t)], axis=1)


def ellipse(t, a=1.0, b=0.5, angle=0.0):
    R = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    return np.stack([a * np.cos(t), b * np.sin(t)], axis=1) @ R.T


def bean(t, depth=0.35):
    # same dent as elastic_curves.shapes.bean
    r = 1.0 - depth * np.exp(-4.0 * (1 - np.cos(t - np.pi / 2)))
    return np.stack([1.2 * r * np.cos(t), 0.8 * r * np.sin(t)], axis=1)


CURVES = {
    "circle": lambda t: circle(t),
    "circle_translated": lambda t: circle(t, c=(1.0, 0.0)),
    "ellipse": lambda t: ellipse(t),
    "ellipse_rotated": lambda t: ellipse(t, angle=0.5),
    "bean": lambda t: bean(t),
}

CONFIGS = {
    "small": {
        "spline": {"N_theta": 16, "N_t": 6},
        "metric": {"a0": 1.0, "a1": 100.0, "b1": 100.0, "a2": 1.0},
        "kernel": {"radial_scale": 0.5, "zonal_scale": 0.5},
        "options": {"optim": {"max_iters": 1500, "grad_tol": 1e-3}},
        "io": {"frames": 5},
    },
    "rotation": {
        "spline": {"N_theta": 16, "N_t": 6},
        "metric": {"a0": 1.0, "a1": 1.0, "b1": 1.0, "a2": 0.1},
        "kernel": {"radial_scale": 0.5, "zonal_scale": 0.5},
        "options": {"opt_rotation": True},
    },
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, fn in CURVES.items():
        data = {"name": name, "closed": True, "points": closed_points(fn)}
        (out / f"{name}.json").write_text(json.dumps(data) + "\n")
    for name, cfg in CONFIGS.items():
        (out / f"config_{name}.json").write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    (out / "shapes.json").write_text(json.dumps({"curves": ["circle.json", "ellipse.json", "bean.json"]}) + "\n")
    print(f"wrote {len(CURVES)} curves and {len(CONFIGS)} configs to {out}")


if __name__ == "__main__":
    main()
