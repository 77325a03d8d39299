"""Command-line entry point.

Exit codes: 0 success, 2 input or configuration error, 3 solver did not converge.
Set ELASTIC_CURVES_VERBOSITY to 0 (quiet), 1 (info) or 2 (debug).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .bspline import DiscreteCurve, SplineConfig
from .config import ConfigError, RunConfig
from .io import InputError, curve_from_dict, path_to_dict, read_curve, read_json, read_path, write_json
from .matching import MatchProblem, MatchResult, solve
from .metric import DegenerateCurveError, energy_terms
from .svg import frame_times, render_svg
from .varifold import apply_similarity, eval_grid, varifold_dist_sq

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3
VERBOSITY_ENV = "ELASTIC_CURVES_VERBOSITY"

log = logging.getLogger("elastic_curves")


def _setup_logging() -> None:
    raw = os.environ.get(VERBOSITY_ENV, "0")
    try:
        level = int(raw)
    except ValueError:
        level = 0
    lvl = {0: logging.WARNING, 1: logging.INFO}.get(level, logging.DEBUG)
    logging.basicConfig(level=lvl, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("elastic_curves").setLevel(lvl)


def load_config(args) -> RunConfig:
    """Config file (or defaults) with command-line overrides applied."""
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    opts = cfg.options
    if getattr(args, "mode", None):
        opts.mode = args.mode
    if getattr(args, "lambda_weight", None) is not None:
        opts.lambda_weight = args.lambda_weight
    for flag, name in (("opt_rot", "opt_rotation"), ("opt_tra", "opt_translation"), ("opt_scale", "opt_scale")):
        if getattr(args, flag, False):
            setattr(opts, name, True)
    if getattr(args, "frames", None) is not None:
        cfg.io.frames = args.frames
    return cfg.validate()


def build_problem(cfg: RunConfig, source: DiscreteCurve, target: DiscreteCurve) -> MatchProblem:
    o = cfg.options
    return MatchProblem(
        source=source,
        target=target,
        metric=cfg.metric.build(),
        kernel=cfg.kernel.build(),
        opt_translation=o.opt_translation,
        opt_rotation=o.opt_rotation,
        opt_scale=o.opt_scale,
        mode=cfg.solver_mode,
        n_pts=cfg.kernel.n_pts,
    )


def run_match(cfg: RunConfig, source: DiscreteCurve, target: DiscreteCurve) -> MatchResult:
    o = cfg.options
    return solve(
        build_problem(cfg, source, target),
        lam_weight=o.lambda_weight,
        state0=o.auglag.build(),
        settings=o.optim.build(),
    )


def _clean(v):
    """JSON-safe copy: numpy scalars to float, non-finite floats to strings."""
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    if isinstance(v, np.integer):
        return int(v)
    return v


def result_manifest(cfg: RunConfig, result: MatchResult, names: tuple[str, str]) -> dict:
    return _clean({
        "config_hash": cfg.hash(),
        "config": cfg.to_dict(),
        "source": names[0],
        "target": names[1],
        "energy": result.energy,
        "d2": result.d2,
        "distance": result.distance,
        "objective": result.objective,
        "transform": result.transform.as_dict(),
        "reason": result.reason,
        "converged": result.converged,
        "iterations": result.iterations,
        "multipliers": result.multipliers,
        "log": result.log,
    })


def cmd_geodesic(args) -> int:
    cfg = load_config(args)
    spline = cfg.spline.build()
    src_name, source = read_curve(args.source, spline)
    tgt_name, target = read_curve(args.target, spline)
    out = Path(args.out or cfg.io.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_match(cfg, source, target)
    write_json(out / "manifest.json", result_manifest(cfg, result, (src_name, tgt_name)))
    write_json(out / "path.json", path_to_dict(result.path))
    svg = render_svg(result.path, frame_times(cfg.io.frames), target=_moved_target(result, target))
    (out / "geodesic.svg").write_text(svg)
    print(f"energy {result.energy:.10g}  d2 {result.d2:.4e}  ({result.reason})  config {cfg.hash()}")
    return EXIT_OK if result.converged else EXIT_SOLVER


def _moved_target(result: MatchResult, target: DiscreteCurve) -> DiscreteCurve:
    t = result.transform
    return apply_similarity(target, t.r, t.angle, t.b)


def _list_entries(path: Path) -> list:
    data = read_json(path)
    if isinstance(data, dict):
        if set(data) != {"curves"}:
            raise InputError(f"{path}: expected a list or an object with the single key 'curves'")
        data = data["curves"]
    if not isinstance(data, list) or len(data) < 2:
        raise InputError(f"{path}: need a list of at least 2 curves")
    return data


def load_curve_list(path, spline: SplineConfig) -> list[tuple[str, DiscreteCurve]]:
    """Entries are file names (relative to the list file) or inline curve objects."""
    path = Path(path)
    curves = []
    for i, entry in enumerate(_list_entries(path)):
        if isinstance(entry, str):
            curves.append(read_curve(path.parent / entry, spline))
        else:
            curves.append(curve_from_dict(entry, spline, where=f"{path}[{i}]"))
    names = [n for n, _ in curves]
    if len(set(names)) != len(names):
        raise InputError(f"{path}: curve names must be unique")
    return curves


def _pair_task(cfg_dict: dict, ctrl_i, ctrl_j):
    """One registration in a worker process: (distance or nan, converged, seconds, error)."""
    cfg = RunConfig.from_dict(cfg_dict)
    spline = cfg.spline.build()
    t0 = time.perf_counter()
    try:
        res = run_match(cfg, DiscreteCurve(spline, ctrl_i), DiscreteCurve(spline, ctrl_j))
    except (DegenerateCurveError, ValueError, FloatingPointError) as exc:
        return math.nan, False, time.perf_counter() - t0, str(exc)
    value = res.distance if math.isfinite(res.energy) else math.nan
    return value, res.converged, time.perf_counter() - t0, None


def distance_matrix(cfg: RunConfig, curves, jobs: int = 1):
    """Upper-triangle registrations mirrored into a symmetric matrix, plus per-pair records."""
    n = len(curves)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    cfg_dict = cfg.to_dict()
    args = [(cfg_dict, curves[i][1].ctrl, curves[j][1].ctrl) for i, j in pairs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_pair_task, *zip(*args)))
    else:
        outcomes = [_pair_task(*a) for a in args]
    D = np.zeros((n, n))
    records = []
    for (i, j), (value, ok, secs, err) in zip(pairs, outcomes):
        D[i, j] = D[j, i] = value
        if err is not None:
            log.error("pair %s/%s failed: %s", curves[i][0], curves[j][0], err)
        elif not ok:
            log.warning("pair %s/%s did not converge", curves[i][0], curves[j][0])
        records.append(dict(i=curves[i][0], j=curves[j][0], distance=value, converged=ok,
                            seconds=secs, error=err))
    return D, records


def cmd_distance_matrix(args) -> int:
    cfg = load_config(args)
    curves = load_curve_list(args.curves, cfg.spline.build())
    out = Path(args.out or cfg.io.out)
    out.mkdir(parents=True, exist_ok=True)
    D, records = distance_matrix(cfg, curves, jobs=max(1, args.jobs))
    names = [n for n, _ in curves]
    with open(out / "distances.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + names)
        for name, row in zip(names, D):
            w.writerow([name] + [repr(float(v)) for v in row])
    with open(out / "distances_times.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "target", "distance", "converged", "seconds", "error"])
        for r in records:
            w.writerow([r["i"], r["j"], repr(float(r["distance"])), r["converged"],
                        f"{r['seconds']:.3f}", r["error"] or ""])
    write_json(out / "manifest.json", _clean({
        "config_hash": cfg.hash(),
        "config": cfg.to_dict(),
        "names": names,
        "pairs": [{k: r[k] for k in ("i", "j", "distance", "converged", "error")} for r in records],
    }))
    total = sum(r["seconds"] for r in records)
    print(f"{len(records)} pairs, {total:.1f} s of solver time, config {cfg.hash()}")
    ok = all(r["converged"] for r in records)
    return EXIT_OK if ok else EXIT_SOLVER


def cmd_energy(args) -> int:
    cfg = load_config(args)
    path = read_path(args.path)
    try:
        terms = energy_terms(path, cfg.metric.build())
    except DegenerateCurveError as exc:
        where = f" at t={exc.t:.6g}" if exc.t is not None else ""
        raise InputError(f"{args.path}: degenerate curve{where}: {exc}") from exc
    total = sum(terms.values())
    if args.json:
        print(json.dumps(_clean({"config_hash": cfg.hash(), "total": total, **terms}), sort_keys=True))
    else:
        print(f"config {cfg.hash()}")
        print(f"total {total:.12g}")
        for k, v in terms.items():
            print(f"{k} {v:.12g}")
    return EXIT_OK


def cmd_render(args) -> int:
    cfg = load_config(args)
    path = read_path(args.path)
    target = None
    if args.target:
        _, target = read_curve(args.target, path.config)
    svg = render_svg(path, frame_times(cfg.io.frames), target=target)
    out = Path(args.out) if args.out else None
    if out is None:
        sys.stdout.write(svg)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(svg)
    return EXIT_OK


def cmd_varifold_dist(args) -> int:
    cfg = load_config(args)
    spline = cfg.spline.build()
    _, c1 = read_curve(args.curve1, spline)
    _, c2 = read_curve(args.curve2, spline)
    try:
        d2 = varifold_dist_sq(eval_grid(c1, cfg.kernel.n_pts), eval_grid(c2, cfg.kernel.n_pts),
                              cfg.kernel.build())
    except DegenerateCurveError as exc:
        raise InputError(f"degenerate curve: {exc}") from exc
    print(f"d2 {d2:.12g}  config {cfg.hash()}")
    return EXIT_OK


def _common(p: argparse.ArgumentParser, solver: bool = False) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (or file for render)")
    p.add_argument("--frames", type=int, help="number of snapshots in SVG output")
    if solver:
        p.add_argument("--mode", choices=("penalty", "auglag"))
        p.add_argument("--lambda", dest="lambda_weight", type=float, help="penalty weight")
        p.add_argument("--opt-rot", action="store_true", help="optimize over rotations")
        p.add_argument("--opt-tra", action="store_true", help="optimize over translations")
        p.add_argument("--opt-scale", action="store_true", help="optimize over scalings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastic-curves", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geodesic", help="match two curves and write the path")
    p.add_argument("source")
    p.add_argument("target")
    _common(p, solver=True)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("distance-matrix", help="pairwise shape distances of a curve list")
    p.add_argument("curves", help="JSON list of curve files or inline curves")
    p.add_argument("--jobs", type=int, default=1)
    _common(p, solver=True)
    p.set_defaults(func=cmd_distance_matrix)

    p = sub.add_parser("energy", help="path energy and its per-term breakdown")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("render", help="SVG snapshots of a path file")
    p.add_argument("path")
    p.add_argument("--target")
    _common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("varifold-dist", help="squared varifold distance of two curves")
    p.add_argument("curve1")
    p.add_argument("curve2")
    _common(p)
    p.set_defaults(func=cmd_varifold_dist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging()
    try:
        return args.func(args)
    except (InputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
