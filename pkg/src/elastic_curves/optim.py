"""Limited-memory BFGS with a strong Wolfe line search.

The objective returns (value, gradient) for a flat float vector. Failures of
the line search are reported in the result instead of raised, so an outer
loop can carry on from the last accepted iterate.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass
class OptimSettings:
    memory: int = 20
    max_iters: int = 1500
    grad_tol: float = 1e-6
    norm: str = "l2"  # or "sup"
    c1: float = 1e-4
    c2: float = 0.9
    max_ls_evals: int = 30
    verbosity: int = 0

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if not 0 < self.c1 < self.c2 < 1:
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.norm not in ("l2", "sup"):
            raise ValueError("norm must be 'l2' or 'sup'")


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    grad_norm: float
    iterations: int
    reason: str  # "tolerance" | "max_iters" | "line-search-failure"
    n_evals: int = 0
    history: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.reason == "tolerance"


def _norm(g: np.ndarray, kind: str) -> float:
    return float(np.max(np.abs(g))) if kind == "sup" else float(np.linalg.norm(g))


def two_loop(g: np.ndarray, pairs) -> np.ndarray:
    """Apply the L-BFGS inverse-Hessian approximation to ``g``.

    ``pairs`` holds (s, y, 1/y.s) oldest first; the initial matrix is the usual
    scaled identity s.y / y.y from the newest pair.
    """
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return q


def _cubic_min(a, fa, ga, b, fb, gb):
    """Minimizer of the cubic through two points with slopes, or None."""
    d1 = ga + gb - 3 * (fa - fb) / (a - b)
    rad = d1 * d1 - ga * gb
    if rad < 0:
        return None
    d2 = np.sign(b - a) * np.sqrt(rad)
    x = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2 * d2)
    return x if np.isfinite(x) else None


def strong_wolfe(phi, f0, g0, alpha1, c1, c2, max_evals, alpha_max=1e10):
    """Strong Wolfe line search along a descent direction.

    ``phi(alpha)`` returns (f, slope, payload). Returns (alpha, f, payload) on
    success, or None when no acceptable step is found within ``max_evals``.
    """
    evals = 0
    a_prev, f_prev, g_prev = 0.0, f0, g0
    a = alpha1
    # near a minimizer f stops resolving the decrease; allow roundoff
    fuzz = 8 * np.finfo(float).eps * abs(f0)
    while evals < max_evals:
        f, g, payload = phi(a)
        evals += 1
        if not np.isfinite(f):
            a = 0.5 * (a_prev + a)
            continue
        if f > f0 + c1 * a * g0 + fuzz or (evals > 1 and f >= f_prev + fuzz):
            return _zoom(phi, f0, g0, a_prev, f_prev, g_prev, a, f, g, c1, c2, max_evals - evals)
        if abs(g) <= -c2 * g0:
            return a, f, payload
        if g >= 0:
            return _zoom(phi, f0, g0, a, f, g, a_prev, f_prev, g_prev, c1, c2, max_evals - evals)
        a_prev, f_prev, g_prev = a, f, g
        a = min(4.0 * a, alpha_max)
    return None


def _zoom(phi, f0, g0, lo, flo, glo, hi, fhi, ghi, c1, c2, max_evals):
    best = None
    fuzz = 8 * np.finfo(float).eps * abs(f0)
    for _ in range(max(max_evals, 0)):
        x = _cubic_min(lo, flo, glo, hi, fhi, ghi)
        lo_b, hi_b = min(lo, hi), max(lo, hi)
        width = hi_b - lo_b
        if x is None or not (lo_b + 0.1 * width <= x <= hi_b - 0.1 * width):
            x = 0.5 * (lo + hi)
        f, g, payload = phi(x)
        if not np.isfinite(f) or f > f0 + c1 * x * g0 + fuzz or f >= flo + fuzz:
            hi, fhi, ghi = x, f if np.isfinite(f) else np.inf, g if np.isfinite(g) else 0.0
        else:
            if abs(g) <= -c2 * g0:
                return x, f, payload
            if f < f0 and (best is None or f < best[1]):
                best = (x, f, payload)
            if g * (hi - lo) >= 0:
                hi, fhi, ghi = lo, flo, glo
            lo, flo, glo = x, f, g
        if abs(hi - lo) <= 1e-16 * max(1.0, abs(lo)):
            break
    # sufficient decrease without curvature still makes progress
    if best is not None:
        return best
    return None


def minimize(objective: Objective, x0: np.ndarray, settings: OptimSettings | None = None) -> OptimResult:
    """Minimize a smooth function with L-BFGS until the gradient norm drops below grad_tol."""
    settings = settings or OptimSettings()
    x = np.array(x0, dtype=float).ravel()
    f, g = objective(x)
    n_evals = 1
    g = np.asarray(g, dtype=float).ravel()
    pairs: deque = deque(maxlen=settings.memory)
    history = [float(f)]
    gn = _norm(g, settings.norm)
    reason = "max_iters"
    it = 0
    while True:
        if gn < settings.grad_tol:
            reason = "tolerance"
            break
        if it >= settings.max_iters:
            break
        d = -two_loop(g, list(pairs))
        slope = float(g @ d)
        if not slope < 0:
            pairs.clear()
            d = -g
            slope = float(g @ d)
        alpha1 = 1.0 if pairs else min(1.0, 1.0 / max(np.linalg.norm(g), 1e-300))

        def phi(a):
            nonlocal n_evals
            xa = x + a * d
            fa, ga = objective(xa)
            n_evals += 1
            ga = np.asarray(ga, dtype=float).ravel()
            return float(fa), float(ga @ d), (xa, ga)

        ls = strong_wolfe(phi, f, slope, alpha1, settings.c1, settings.c2, settings.max_ls_evals)
        if ls is None and pairs:
            # retry once along steepest descent with a fresh memory
            pairs.clear()
            d = -g
            slope = float(g @ d)
            ls = strong_wolfe(
                phi, f, slope, min(1.0, 1.0 / np.linalg.norm(g)),
                settings.c1, settings.c2, settings.max_ls_evals,
            )
        if ls is None:
            reason = "line-search-failure"
            break
        _, f_new, (x_new, g_new) = ls
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            pairs.append((s, y, 1.0 / sy))
        x, f, g = x_new, f_new, g_new
        gn = _norm(g, settings.norm)
        it += 1
        history.append(float(f))
        if settings.verbosity > 1:
            logger.info("iter %d  f=%.10g  |g|=%.3e", it, f, gn)
    if settings.verbosity > 0:
        logger.info("L-BFGS stop (%s) after %d iters: f=%.10g |g|=%.3e", reason, it, f, gn)
    return OptimResult(x=x, fun=float(f), grad_norm=gn, iterations=it, reason=reason,
                       n_evals=n_evals, history=history)
