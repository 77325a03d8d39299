"""Uniform B-spline bases for planar curves and tensor-product paths of curves.

Curves live on the parameter domain [0, 2*pi] (periodic when closed), paths on
[0, 1] x [0, 2*pi]. Time knots always carry full multiplicity at the boundary,
so the first and last rows of a path's control array are exactly its end
curves.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Literal

import numpy as np
from scipy.interpolate import BSpline

TWO_PI = 2.0 * np.pi

Axis = Literal["theta", "t"]

# derivative keys understood by eval_path: (order in t, order in theta)
DERIVS = {
    "c": (0, 0),
    "t": (1, 0),
    "th": (0, 1),
    "thth": (0, 2),
    "tth": (1, 1),
    "tthth": (1, 2),
}


class SplineConfigError(ValueError):
    pass


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class SplineConfig:
    """Degrees, control-point counts and quadrature orders of a path discretization.

    ``quad_theta`` and ``quad_t`` are Gauss-Legendre points per knot span.
    """

    n_theta: int = 3
    N_theta: int = 100
    n_t: int = 2
    N_t: int = 10
    closed: bool = True
    quad_theta: int = 6
    quad_t: int = 3

    def __post_init__(self):
        if self.n_theta < 1 or self.n_t < 1:
            raise SplineConfigError("spline degrees must be >= 1")
        if self.N_theta < self.n_theta + 1:
            raise SplineConfigError(
                f"N_theta={self.N_theta} too small for degree n_theta={self.n_theta}"
            )
        if self.N_t < max(2, self.n_t + 1):
            raise SplineConfigError(
                f"N_t={self.N_t} too small for degree n_t={self.n_t}"
            )
        if self.quad_theta < 1 or self.quad_t < 1:
            raise SplineConfigError("quadrature orders must be >= 1")

    def with_(self, **changes) -> "SplineConfig":
        return replace(self, **changes)

    def degree(self, which: Axis) -> int:
        return self.n_theta if which == "theta" else self.n_t

    def count(self, which: Axis) -> int:
        return self.N_theta if which == "theta" else self.N_t

    def periodic(self, which: Axis) -> bool:
        return which == "theta" and self.closed

    def domain(self, which: Axis) -> tuple[float, float]:
        return (0.0, TWO_PI) if which == "theta" else (0.0, 1.0)


def make_knots(config: SplineConfig, which: Axis) -> np.ndarray:
    """Uniform knot vector for one parameter axis.

    Clamped axes repeat the boundary knots degree+1 times. The periodic axis
    returns N + 2*degree + 1 equispaced knots starting at -degree*h, so that
    the N + degree extended basis functions wrap onto N periodic ones.
    """
    k = config.degree(which)
    n = config.count(which)
    a, b = config.domain(which)
    if config.periodic(which):
        h = (b - a) / n
        return a + h * np.arange(-k, n + k + 1, dtype=float)
    n_spans = n - k
    if n_spans < 1:
        raise SplineConfigError(f"need more than {k} control points for degree {k}")
    inner = np.linspace(a, b, n_spans + 1)
    return np.concatenate([np.full(k, a), inner, np.full(k, b)])


def breakpoints(config: SplineConfig, which: Axis) -> np.ndarray:
    """Distinct knots bounding the polynomial spans of the domain."""
    a, b = config.domain(which)
    k = config.degree(which)
    n = config.count(which)
    n_spans = n if config.periodic(which) else n - k
    return np.linspace(a, b, n_spans + 1)


def basis_matrix(
    config: SplineConfig, which: Axis, x: np.ndarray, nu: int = 0
) -> np.ndarray:
    """Values (or ``nu``-th derivatives) of every basis function at ``x``.

    Returns an array of shape (len(x), N).
    """
    x = np.asarray(x, dtype=float)
    k = config.degree(which)
    n = config.count(which)
    knots = make_knots(config, which)
    if config.periodic(which):
        n_ext = n + k
        x = np.mod(x, TWO_PI)
    else:
        n_ext = n
    spl = BSpline(knots, np.eye(n_ext), k, extrapolate=True)
    vals = spl(x, nu=nu) if nu <= k else np.zeros((x.size, n_ext))
    vals = np.asarray(vals).reshape(x.size, n_ext)
    if config.periodic(which):
        folded = vals[:, :n].copy()
        folded[:, :k] += vals[:, n:]
        return folded
    if nu == 0:
        # clamped knots interpolate the end control points; make that exact
        a, b = config.domain(which)
        vals[x == a] = np.eye(n)[0]
        vals[x == b] = np.eye(n)[-1]
    return vals


def greville(config: SplineConfig, which: Axis = "theta") -> np.ndarray:
    """Greville abscissae: control-point parameters reproducing the identity map.

    For a clamped axis, a spline whose control values are these abscissae is the
    linear function x -> x.
    """
    k = config.degree(which)
    knots = make_knots(config, which)
    n = config.count(which)
    if config.periodic(which):
        n = n + k
    avg = np.array([knots[i + 1 : i + k + 1].mean() for i in range(n)])
    if config.periodic(which):
        return np.mod(avg[: config.count(which)], TWO_PI)
    return avg


@dataclass(frozen=True)
class QuadratureGrid:
    """Quadrature sites and weights with basis tables at the sites.

    ``basis[d]`` holds the d-th derivative of every basis function, shape
    (n_sites, N), for d = 0, 1, 2.
    """

    sites: np.ndarray
    weights: np.ndarray
    basis: np.ndarray
    which: str = "theta"

    @property
    def size(self) -> int:
        return self.sites.size

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ values)


def gauss_sites(edges: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with ``q`` points on each interval of ``edges``."""
    xg, wg = np.polynomial.legendre.leggauss(q)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    sites = (lo + hi) * 0.5 + half * xg[None, :]
    weights = half * wg[None, :]
    return sites.ravel(), weights.ravel()


def make_quadrature(
    config: SplineConfig, which: Axis, q: int | None = None
) -> QuadratureGrid:
    """Per-span Gauss-Legendre grid with basis values and derivatives filled in."""
    if q is None:
        q = config.quad_theta if which == "theta" else config.quad_t
    sites, weights = gauss_sites(breakpoints(config, which), q)
    return grid_at(config, which, sites, weights)


def grid_at(
    config: SplineConfig, which: Axis, sites: np.ndarray, weights: np.ndarray
) -> QuadratureGrid:
    table = np.stack([basis_matrix(config, which, sites, nu) for nu in range(3)])
    return QuadratureGrid(
        sites=np.asarray(sites, float),
        weights=np.asarray(weights, float),
        basis=table,
        which=which,
    )


def uniform_grid(config: SplineConfig, n_pts: int) -> QuadratureGrid:
    """Midpoint rule on ``n_pts`` equal cells of [0, 2*pi] (varifold resampling)."""
    h = TWO_PI / n_pts
    sites = h * (np.arange(n_pts) + 0.5)
    return grid_at(config, "theta", sites, np.full(n_pts, h))


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """Spline curve c(theta) = sum_j ctrl[j] C_j(theta); ``ctrl`` has shape (N_theta, 2)."""

    config: SplineConfig
    ctrl: np.ndarray
    fit_residual: float | None = field(default=None, compare=False)

    def __post_init__(self):
        ctrl = np.array(self.ctrl, dtype=float)
        if ctrl.shape != (self.config.N_theta, 2):
            raise SplineConfigError(
                f"curve ctrl must have shape ({self.config.N_theta}, 2), got {ctrl.shape}"
            )
        ctrl.setflags(write=False)
        object.__setattr__(self, "ctrl", ctrl)

    def __call__(self, theta, nu: int = 0) -> np.ndarray:
        return basis_matrix(self.config, "theta", np.atleast_1d(theta), nu) @ self.ctrl

    def at_grid(self, grid: QuadratureGrid, nu: int = 0) -> np.ndarray:
        return grid.basis[nu] @ self.ctrl

    def transformed(self, fn) -> "DiscreteCurve":
        """Apply an affine map to the control points (affine maps commute with splines)."""
        return DiscreteCurve(self.config, fn(self.ctrl))


@dataclass(frozen=True, eq=False)
class DiscretePath:
    """Tensor-product spline path; ``ctrl`` has shape (N_t, N_theta, 2)."""

    config: SplineConfig
    ctrl: np.ndarray

    def __post_init__(self):
        ctrl = np.array(self.ctrl, dtype=float)
        shape = (self.config.N_t, self.config.N_theta, 2)
        if ctrl.shape != shape:
            raise SplineConfigError(f"path ctrl must have shape {shape}, got {ctrl.shape}")
        ctrl.setflags(write=False)
        object.__setattr__(self, "ctrl", ctrl)

    @classmethod
    def constant(cls, curve: DiscreteCurve, config: SplineConfig | None = None):
        config = config or curve.config
        return cls(config, np.broadcast_to(curve.ctrl, (config.N_t,) + curve.ctrl.shape))

    @classmethod
    def linear(cls, start: DiscreteCurve, end: DiscreteCurve, config=None):
        """Straight-line interpolation of control points (exactly linear in t)."""
        config = config or start.config
        s = greville(config, "t")[:, None, None]
        return cls(config, (1 - s) * start.ctrl + s * end.ctrl)

    def curve_at(self, t: float) -> DiscreteCurve:
        row = basis_matrix(self.config, "t", np.array([t]))[0]
        return DiscreteCurve(self.config, np.tensordot(row, self.ctrl, axes=1))

    @property
    def start(self) -> DiscreteCurve:
        return DiscreteCurve(self.config, self.ctrl[0])

    @property
    def end(self) -> DiscreteCurve:
        return DiscreteCurve(self.config, self.ctrl[-1])


def eval_path(
    path: DiscretePath,
    derivs: Iterable[str],
    grid_t: QuadratureGrid,
    grid_theta: QuadratureGrid,
) -> dict[str, np.ndarray]:
    """Evaluate the path and requested partial derivatives on a tensor grid.

    Keys are those of ``DERIVS``; each value has shape (n_t_sites, n_theta_sites, 2).
    """
    out = {}
    cache = {}
    for key in derivs:
        dt, dth = DERIVS[key]
        if dt not in cache:
            cache[dt] = np.tensordot(grid_t.basis[dt], path.ctrl, axes=1)
        out[key] = np.matmul(grid_theta.basis[dth], cache[dt])
    return out


def chord_parameters(points: np.ndarray, closed: bool) -> np.ndarray:
    """Normalized cumulative chord length mapped to [0, 2*pi]."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    if closed:
        seg = np.append(seg, np.linalg.norm(points[0] - points[-1]))
    total = seg.sum()
    if total <= 0:
        raise FitError("points have zero total chord length")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    return TWO_PI * cum[: len(points)] / total


def fit_curve(
    points: np.ndarray,
    config: SplineConfig,
    params: np.ndarray | None = None,
    rcond: float = 1e-12,
) -> DiscreteCurve:
    """Least-squares spline through ordered points.

    Parameters default to chord length. The returned curve carries the RMS
    residual in ``fit_residual``.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise FitError(f"expected an (M, 2) point array, got shape {points.shape}")
    if len(points) < config.N_theta:
        raise FitError(
            f"{len(points)} points cannot determine {config.N_theta} control points"
        )
    if params is None:
        params = chord_parameters(points, config.closed)
    A = basis_matrix(config, "theta", params)
    s = np.linalg.svd(A, compute_uv=False)
    cond = s[0] / s[-1] if s[-1] > 0 else np.inf
    if not np.isfinite(cond) or s[-1] < rcond * s[0]:
        raise FitError(
            f"collocation matrix is rank deficient (condition number {cond:.3g}); "
            "too few distinct parameter values"
        )
    ctrl, *_ = np.linalg.lstsq(A, points, rcond=None)
    resid = A @ ctrl - points
    rms = float(np.sqrt(np.mean(np.sum(resid**2, axis=1))))
    return DiscreteCurve(config, ctrl, fit_residual=rms)
