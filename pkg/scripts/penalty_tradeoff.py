"""Sweep the penalty weight and report path energy against endpoint mismatch."""
import argparse

from elastic_curves import MatchProblem, MetricParams, OptimSettings, SplineConfig, VarifoldKernel, solve_penalty
from elastic_curves.shapes import circle, ellipse


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weights", type=float, nargs="+", default=[1e1, 1e2, 1e3, 1e4])
    ap.add_argument("--N-theta", type=int, default=12)
    ap.add_argument("--N-t", type=int, default=5)
    args = ap.parse_args(argv)

    cfg = SplineConfig(N_theta=args.N_theta, N_t=args.N_t)
    p = MatchProblem(circle(cfg), ellipse(cfg, 1.3, 0.6), MetricParams(1, 1, 1, 0.1),
                     VarifoldKernel("gaussian", 0.5, "gaussian_oriented", 0.5))
    print("lambda     energy       d2")
    for lam in args.weights:
        r = solve_penalty(p, lam, OptimSettings(grad_tol=1e-6, max_iters=3000))
        print(f"{lam:<10.0e} {r.energy:<12.6f} {r.d2:.3e}")


if __name__ == "__main__":
    main()
