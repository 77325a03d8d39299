"""Compare analytic gradients of the path energy and varifold distance with central differences."""
import argparse

import numpy as np

from elastic_curves import (
    DiscreteCurve,
    DiscretePath,
    MetricParams,
    SplineConfig,
    VarifoldKernel,
    path_energy,
    path_energy_gradient,
    varifold_dist_sq,
    varifold_dist_sq_gradient,
)
from elastic_curves.shapes import bean, circle


def check(f, g, x, rng, n, h):
    errs = []
    for _ in range(n):
        d = rng.normal(size=x.shape)
        d /= np.linalg.norm(d)
        fd = (f(x + h * d) - f(x - h * d)) / (2 * h)
        errs.append(abs(g @ d - fd) / np.linalg.norm(g))
    return max(errs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--directions", type=int, default=10)
    ap.add_argument("--step", type=float, default=1e-6)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    cfg = SplineConfig(N_theta=12, N_t=5)
    path = DiscretePath.linear(circle(cfg), bean(cfg))
    ctrl = path.ctrl.copy()
    ctrl[1:] += 0.05 * rng.normal(size=ctrl[1:].shape)
    for lw in (False, True):
        m = MetricParams(1, 1, 1, 0.1, length_weighted=lw)

        def f(x):
            c = ctrl.copy()
            c[1:] = x.reshape(c[1:].shape)
            return path_energy(DiscretePath(cfg, c), m)

        g = path_energy_gradient(DiscretePath(cfg, ctrl), m).ravel()
        err = check(f, g, ctrl[1:].ravel(), rng, args.directions, args.step)
        print(f"energy  {'G2' if lw else 'G1'}  max scaled error {err:.2e}")

    target = bean(cfg)
    for radial in ("gaussian", "cauchy"):
        for zonal in ("constant", "linear", "squared", "gaussian_oriented"):
            k = VarifoldKernel(radial, 0.5, zonal, 0.5)
            c0 = circle(cfg, 1.1).ctrl
            g = varifold_dist_sq_gradient(DiscreteCurve(cfg, c0), target, k).ravel()

            def f(x):
                return varifold_dist_sq(DiscreteCurve(cfg, x.reshape(c0.shape)), target, k)

            err = check(f, g, c0.ravel(), rng, args.directions, args.step)
            print(f"varifold {radial:<8} {zonal:<17} max scaled error {err:.2e}")


if __name__ == "__main__":
    main()
