"""Geodesic boundary value problems between unparametrized curves.

The endpoint condition c(1) = target (up to reparametrization) is relaxed to a
varifold constraint d^2(c(1), r A (target + b)) and handled either by a fixed
quadratic penalty or by an augmented Lagrangian loop. The source row of the
path control array is never a free variable.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .bspline import DiscreteCurve, DiscretePath, SplineConfig, fit_curve
from .metric import DegenerateCurveError, MetricParams, path_energy_and_gradient
from .optim import OptimResult, OptimSettings, minimize
from .varifold import (
    VarifoldEvalGrid,
    VarifoldKernel,
    dist_sq_sample_gradient,
    eval_grid,
    pull_back,
    rotation,
    sample_grid,
)

logger = logging.getLogger(__name__)

TRANSFORM_NAMES = ("log_scale", "angle", "bx", "by")


@dataclass(frozen=True)
class Transform:
    """Similarity r * A(angle) * (x + b) applied to the target."""

    r: float = 1.0
    angle: float = 0.0
    b: tuple[float, float] = (0.0, 0.0)

    @classmethod
    def from_vector(cls, v) -> "Transform":
        return cls(float(np.exp(v[0])), float(v[1]), (float(v[2]), float(v[3])))

    def vector(self) -> np.ndarray:
        return np.array([np.log(self.r), self.angle, *self.b], dtype=float)

    def as_dict(self) -> dict:
        return {"r": self.r, "angle": self.angle, "b": list(self.b)}


def resample_curve(curve: DiscreteCurve, config: SplineConfig, density: int = 8) -> DiscreteCurve:
    """Refit a curve onto another spline space, keeping its parametrization."""
    if curve.config.closed != config.closed:
        raise ValueError("cannot resample between open and closed curves")
    n = density * max(config.N_theta, curve.config.N_theta)
    if config.closed:
        theta = np.linspace(0, 2 * np.pi, n, endpoint=False)
    else:
        theta = np.linspace(0, 2 * np.pi, n)
    return fit_curve(curve(theta), config, params=theta)


@dataclass
class MatchProblem:
    source: DiscreteCurve
    target: DiscreteCurve
    metric: MetricParams = field(default_factory=MetricParams)
    kernel: VarifoldKernel = field(default_factory=VarifoldKernel)
    opt_translation: bool = False
    opt_rotation: bool = False
    opt_scale: bool = False
    mode: str = "augmented_lagrangian"
    n_pts: int | None = None

    def __post_init__(self):
        if self.mode not in ("penalty", "augmented_lagrangian"):
            raise ValueError(f"unknown mode {self.mode!r}")
        cfg = self.source.config
        tcfg = self.target.config
        if (tcfg.closed, tcfg.n_theta, tcfg.N_theta) != (cfg.closed, cfg.n_theta, cfg.N_theta):
            self.target = resample_curve(self.target, cfg)
        elif tcfg != cfg:
            self.target = DiscreteCurve(cfg, self.target.ctrl)

    @property
    def config(self) -> SplineConfig:
        return self.source.config

    @property
    def active(self) -> np.ndarray:
        return np.array(
            [self.opt_scale, self.opt_rotation, self.opt_translation, self.opt_translation]
        )

    def rescaled(self, factor: float) -> "MatchProblem":
        """Both curves scaled by ``factor`` with the kernel width scaled alike."""
        return replace(
            self,
            source=self.source.transformed(lambda c: factor * c),
            target=self.target.transformed(lambda c: factor * c),
            kernel=self.kernel.scaled(factor),
        )


@dataclass
class AugLagState:
    lam: float = 0.0
    mu: float = 1.0
    tau: float = 1.0
    eps: float = 0.01
    rho: float = 10.0
    tau_final: float = 1e-3
    k_max: int = 20

    def __post_init__(self):
        if self.lam > 0:
            raise ValueError("initial multiplier must be <= 0")
        if self.mu <= 0 or self.tau <= 0 or self.eps <= 0 or self.tau_final <= 0:
            raise ValueError("mu, tau, eps and tau_final must be positive")
        if self.rho <= 1:
            raise ValueError("penalty growth factor must exceed 1")


@dataclass
class MatchResult:
    path: DiscretePath
    transform: Transform
    energy: float
    d2: float
    objective: float
    reason: str
    converged: bool
    multipliers: list[float] = field(default_factory=list)
    log: list[dict] = field(default_factory=list)
    iterations: int = 0

    @property
    def distance(self) -> float:
        return float(np.sqrt(max(self.energy, 0.0)))


class _Evaluator:
    """Energy and constraint with gradients over the flat free-variable vector."""

    def __init__(self, problem: MatchProblem):
        self.p = problem
        cfg = problem.config
        self.shape = (cfg.N_t - 1, cfg.N_theta, 2)
        self.n_path = int(np.prod(self.shape))
        self.grid = sample_grid(problem.source, problem.n_pts)
        self.target = eval_grid(problem.target, problem.n_pts)

    def pack(self, path: DiscretePath, transform: Transform) -> np.ndarray:
        return np.concatenate([path.ctrl[1:].ravel(), transform.vector()[self.p.active]])

    def transform_vector(self, x: np.ndarray) -> np.ndarray:
        v = Transform().vector()
        v[self.p.active] = x[self.n_path :]
        return v

    def path(self, x: np.ndarray) -> DiscretePath:
        ctrl = np.concatenate([self.p.source.ctrl[None], x[: self.n_path].reshape(self.shape)])
        return DiscretePath(self.p.config, ctrl)

    def unpack(self, x):
        return self.path(x), Transform.from_vector(self.transform_vector(x))

    def __call__(self, x: np.ndarray):
        """(E, dE, d2, dd2) with gradients as flat vectors over the free variables."""
        path = self.path(x)
        E, gE = path_energy_and_gradient(path, self.p.metric)
        v = self.transform_vector(x)
        M = np.exp(v[0]) * rotation(v[1])
        b = v[2:]
        tgt = self.target
        moved = VarifoldEvalGrid((tgt.points + b) @ M.T, tgt.derivs @ M.T, tgt.qweights)
        end = path.ctrl[-1]
        a = VarifoldEvalGrid(self.grid.basis[0] @ end, self.grid.basis[1] @ end, self.grid.weights)
        need_b = bool(self.p.active.any())
        d2, (gp, gd), gb = dist_sq_sample_gradient(a, moved, self.p.kernel, wrt_b=need_b)

        g_path_d2 = np.zeros(self.shape)
        g_path_d2[-1] = pull_back(self.grid, gp, gd)
        g_tr = np.zeros(4)
        if need_b:
            gY, gU = gb
            dM = np.exp(v[0]) * rotation(v[1]) @ np.array([[0.0, -1.0], [1.0, 0.0]])
            g_tr[0] = np.sum(gY * moved.points) + np.sum(gU * moved.derivs)
            g_tr[1] = np.sum(gY * ((tgt.points + b) @ dM.T)) + np.sum(gU * (tgt.derivs @ dM.T))
            g_tr[2:] = M.T @ gY.sum(axis=0)
        act = self.p.active
        dE = np.concatenate([gE[1:].ravel(), np.zeros(act.sum())])
        dd2 = np.concatenate([g_path_d2.ravel(), g_tr[act]])
        return E, dE, d2, dd2


def _guard(fn):
    def wrapped(x):
        try:
            return fn(x)
        except DegenerateCurveError:
            return np.inf, np.zeros_like(x)

    return wrapped


def penalty_objective(path, transform, problem: MatchProblem, lam_weight: float):
    """E(c) + lam_weight * d^2(c(1), r A (target + b)) and its gradient over free variables."""
    ev = _Evaluator(problem)
    E, dE, d2, dd2 = ev(ev.pack(path, transform))
    return E + lam_weight * d2, dE + lam_weight * dd2


def auglag_objective(path, transform, problem: MatchProblem, lam: float, mu: float):
    """E(c) - lam * d^2 + mu/2 * d^4 and its gradient over free variables."""
    ev = _Evaluator(problem)
    E, dE, d2, dd2 = ev(ev.pack(path, transform))
    return _auglag_value(E, dE, d2, dd2, lam, mu)


def _auglag_value(E, dE, d2, dd2, lam, mu):
    value = E - lam * d2 + mu / 2 * d2**2
    grad = dE + (-lam + mu * d2) * dd2
    return value, grad


def _initial(problem: MatchProblem, init_path=None, init_transform=None):
    path = init_path if init_path is not None else DiscretePath.constant(problem.source)
    return path, init_transform or Transform()


def solve_penalty(
    problem: MatchProblem,
    lam_weight: float,
    settings: OptimSettings | None = None,
    init_path: DiscretePath | None = None,
    init_transform: Transform | None = None,
) -> MatchResult:
    """Single L-BFGS solve of the relaxed problem, started from the constant path."""
    if lam_weight < 0:
        raise ValueError("penalty weight must be nonnegative")
    settings = settings or OptimSettings()
    ev = _Evaluator(problem)
    path0, tr0 = _initial(problem, init_path, init_transform)

    def obj(x):
        E, dE, d2, dd2 = ev(x)
        return E + lam_weight * d2, dE + lam_weight * dd2

    res = minimize(_guard(obj), ev.pack(path0, tr0), settings)
    path, tr = ev.unpack(res.x)
    E, _, d2, _ = ev(res.x)
    entry = dict(objective=res.fun, grad_norm=res.grad_norm, energy=E, d2=max(d2, 0.0),
                 iterations=res.iterations, reason=res.reason)
    logger.info("penalty solve: E=%.6g d2=%.3e (%s)", E, d2, res.reason)
    return MatchResult(path=path, transform=tr, energy=E, d2=max(d2, 0.0), objective=res.fun,
                       reason=res.reason, converged=res.converged, log=[entry],
                       iterations=res.iterations)


def solve_auglag(
    problem: MatchProblem,
    state0: AugLagState | None = None,
    settings: OptimSettings | None = None,
    init_path: DiscretePath | None = None,
    init_transform: Transform | None = None,
) -> MatchResult:
    """Augmented Lagrangian outer loop with warm-started inner L-BFGS solves.

    An outer iterate is accepted once d^2 <= eps and the inner solve met a
    gradient tolerance of at most tau_final.
    """
    st = replace(state0) if state0 is not None else AugLagState()
    settings = settings or OptimSettings()
    ev = _Evaluator(problem)
    path0, tr0 = _initial(problem, init_path, init_transform)
    x = ev.pack(path0, tr0)
    lam, mu, tau = st.lam, st.mu, st.tau
    log, multipliers = [], [lam]
    best = None
    total_iters = 0
    reason = "k_max"
    for k in range(st.k_max + 1):
        def obj(xx, lam=lam, mu=mu):
            E, dE, d2, dd2 = ev(xx)
            return _auglag_value(E, dE, d2, dd2, lam, mu)

        res: OptimResult = minimize(_guard(obj), x, replace(settings, grad_tol=tau))
        x = res.x
        total_iters += res.iterations
        E, _, d2, _ = ev(x)
        d2 = max(d2, 0.0)
        log.append(dict(k=k, objective=res.fun, grad_norm=res.grad_norm, energy=E, d2=d2,
                        lam=lam, mu=mu, tau=tau, iterations=res.iterations, reason=res.reason))
        logger.info("auglag k=%d E=%.6g d2=%.3e lam=%.4g mu=%.3g tau=%.3g |g|=%.2e",
                    k, E, d2, lam, mu, tau, res.grad_norm)
        if best is None or d2 < best[1]:
            best = (x.copy(), d2, res.fun)
        accurate = tau <= st.tau_final or res.grad_norm <= st.tau_final
        if d2 <= st.eps and accurate:
            reason = "accepted"
            best = (x.copy(), d2, res.fun)
            break
        lam = lam - mu * d2
        multipliers.append(lam)
        if not d2 < st.eps:
            mu = st.rho * mu
        if tau > st.tau_final:
            tau = 0.5 * tau
    x_out = best[0]
    path, tr = ev.unpack(x_out)
    E, _, d2, _ = ev(x_out)
    return MatchResult(path=path, transform=tr, energy=E, d2=max(d2, 0.0), objective=best[2],
                       reason=reason, converged=reason == "accepted", multipliers=multipliers,
                       log=log, iterations=total_iters)


def solve(problem: MatchProblem, lam_weight: float = 1e3, state0: AugLagState | None = None,
          settings: OptimSettings | None = None) -> MatchResult:
    if problem.mode == "penalty":
        return solve_penalty(problem, lam_weight, settings)
    return solve_auglag(problem, state0, settings)


def shape_distance(problem: MatchProblem, **kwargs) -> float:
    """sqrt(E) of the computed path: an upper approximation of the geodesic distance."""
    return solve(problem, **kwargs).distance
