"""Second-order elastic Sobolev metrics on planar curves and the path energy.

In theta coordinates, with u = c', w = c'', L = |u| and s = <u, w>, the metric
density of a tangent vector h is

    A0 L |h|^2 + A1 <h', u>^2 / L^3 + B1 (|h'|^2 / L - <h', u>^2 / L^3)
    + A2 (s^2 |h'|^2 / L^7 - 2 s <h', h''> / L^5 + |h''|^2 / L^3)

where (A0, A1, B1, A2) are either constants or functions of the curve length
(a0 / l^3, a1 / l, b1 / l, l a2 for the scale-invariant family). The path
energy integrates this density with h = c_t over [0, 1] x [0, 2 pi] by tensor
Gauss quadrature; its gradient is the exact derivative of that quadrature sum.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .bspline import (
    DiscreteCurve,
    DiscretePath,
    QuadratureGrid,
    SplineConfig,
    eval_path,
    make_quadrature,
)

IMMERSION_TOL = 1e-8

TERM_NAMES = ("a0", "a1", "b1", "a2")

CoefficientFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


class DegenerateCurveError(ValueError):
    """Raised when |c'| falls below the immersion tolerance."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class MetricParams:
    """Metric constants and the length-weighting mode.

    With ``length_weighted`` the coefficients become a0/l^3, a1/l, b1/l, l*a2.
    ``coefficient_fn`` overrides this with any user weighting: it maps an array
    of lengths to (coefficients, derivatives), each of shape (4, n).
    """

    a0: float = 1.0
    a1: float = 1.0
    b1: float = 1.0
    a2: float = 1.0
    length_weighted: bool = False
    coefficient_fn: CoefficientFn | None = None

    def __post_init__(self):
        if min(self.a0, self.a1, self.b1, self.a2) < 0:
            raise ValueError("metric coefficients must be nonnegative")

    @property
    def constants(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.b1, self.a2], dtype=float)

    @property
    def depends_on_length(self) -> bool:
        return self.length_weighted or self.coefficient_fn is not None

    def check_complete(self) -> None:
        if self.a0 <= 0 or self.a2 <= 0:
            warnings.warn(
                "a0 and a2 should be positive for a complete metric", stacklevel=2
            )

    def coefficients(self, length) -> tuple[np.ndarray, np.ndarray]:
        """Coefficient values and their length derivatives, shapes (4, *length.shape)."""
        length = np.asarray(length, dtype=float)
        if self.coefficient_fn is not None:
            vals, dvals = self.coefficient_fn(length)
            return np.asarray(vals, float), np.asarray(dvals, float)
        a = self.constants.reshape((4,) + (1,) * length.ndim)
        if not self.length_weighted:
            return a * np.ones_like(length), np.zeros((4,) + length.shape)
        powers = np.array([-3.0, -1.0, -1.0, 1.0]).reshape(a.shape)
        vals = a * length**powers
        return vals, powers * vals / length


@dataclass(frozen=True)
class PointwiseMetricTerms:
    """Geometry of the base curve at quadrature sites plus the energy density partials.

    ``d_*`` are derivatives of the (coefficient-weighted) density with respect
    to c', c'', h, h' and h''; ``terms`` holds the four unweighted densities.
    """

    speed: np.ndarray
    cc: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    dh_tan: np.ndarray
    dh_nor: np.ndarray
    terms: np.ndarray
    d_u: np.ndarray
    d_w: np.ndarray
    d_h: np.ndarray
    d_dh: np.ndarray
    d_ddh: np.ndarray


def _dot(x, y):
    return np.einsum("...d,...d->...", x, y)


def _perp(x):
    return np.stack([-x[..., 1], x[..., 0]], axis=-1)


def density_terms(u, w, h, dh, ddh):
    """The four unweighted metric densities for G_c(h, h), elementwise over sites."""
    L = np.linalg.norm(u, axis=-1)
    s = _dot(u, w)
    pu = _dot(dh, u)
    pp = _dot(dh, dh)
    t0 = L * _dot(h, h)
    t1 = pu**2 / L**3
    tb = pp / L - t1
    t2 = s**2 * pp / L**7 - 2 * s * _dot(dh, ddh) / L**5 + _dot(ddh, ddh) / L**3
    return np.stack([t0, t1, tb, t2])


def bilinear_density(u, w, h, dh, ddh, k, dk, ddk, coeffs):
    """Metric density for G_c(h, k); ``coeffs`` broadcast against the site arrays."""
    L = np.linalg.norm(u, axis=-1)
    s = _dot(u, w)
    hu, ku = _dot(dh, u), _dot(dk, u)
    t0 = L * _dot(h, k)
    t1 = hu * ku / L**3
    tb = _dot(dh, dk) / L - t1
    t2 = (
        s**2 * _dot(dh, dk) / L**7
        - s * (_dot(dh, ddk) + _dot(ddh, dk)) / L**5
        + _dot(ddh, ddk) / L**3
    )
    A0, A1, B1, A2 = coeffs
    return A0 * t0 + A1 * t1 + B1 * tb + A2 * t2


def pointwise_terms(u, w, h, dh, ddh, coeffs) -> PointwiseMetricTerms:
    """Density of G_c(h, h) and its partial derivatives, all elementwise over sites.

    ``coeffs`` is a length-4 sequence of arrays broadcastable to the sites.
    """
    A0, A1, B1, A2 = coeffs
    A0, A1, B1, A2 = (np.asarray(x)[..., None] for x in (A0, A1, B1, A2))
    L = np.linalg.norm(u, axis=-1)
    Lc = L[..., None]
    s = _dot(u, w)[..., None]
    pu = _dot(dh, u)[..., None]
    pp = _dot(dh, dh)[..., None]
    pq = _dot(dh, ddh)[..., None]
    qq = _dot(ddh, ddh)[..., None]
    hh = _dot(h, h)[..., None]

    d_h = 2 * A0 * Lc * h
    d_dh = (
        2 * A1 * pu * u / Lc**3
        + B1 * (2 * dh / Lc - 2 * pu * u / Lc**3)
        + A2 * (2 * s**2 * dh / Lc**7 - 2 * s * ddh / Lc**5)
    )
    d_ddh = A2 * (-2 * s * dh / Lc**5 + 2 * ddh / Lc**3)
    d_w = A2 * (2 * s * pp * u / Lc**7 - 2 * pq * u / Lc**5)
    d_u = (
        A0 * hh * u / Lc
        + A1 * (2 * pu * dh / Lc**3 - 3 * pu**2 * u / Lc**5)
        + B1 * (-pp * u / Lc**3 - 2 * pu * dh / Lc**3 + 3 * pu**2 * u / Lc**5)
        + A2
        * (
            2 * s * pp * w / Lc**7
            - 7 * s**2 * pp * u / Lc**9
            - 2 * pq * w / Lc**5
            + 10 * s * pq * u / Lc**7
            - 3 * qq * u / Lc**5
        )
    )
    tangent = u / Lc
    normal = _perp(tangent)
    dh_tan = _dot(dh, tangent)[..., None] * tangent
    return PointwiseMetricTerms(
        speed=L,
        cc=s[..., 0],
        tangent=tangent,
        normal=normal,
        dh_tan=dh_tan,
        dh_nor=dh - dh_tan,
        terms=density_terms(u, w, h, dh, ddh),
        d_u=d_u,
        d_w=d_w,
        d_h=d_h,
        d_dh=d_dh,
        d_ddh=d_ddh,
    )


@lru_cache(maxsize=64)
def quadrature(config: SplineConfig, which: str) -> QuadratureGrid:
    grid = make_quadrature(config, which)
    for arr in (grid.sites, grid.weights, grid.basis):
        arr.setflags(write=False)
    return grid


def check_immersion(speed: np.ndarray, weights: np.ndarray, t_sites=None) -> np.ndarray:
    """Per-curve lengths; raises DegenerateCurveError if |c'| drops below tolerance.

    ``speed`` has shape (..., n_theta_sites).
    """
    lengths = speed @ weights
    bad = speed <= IMMERSION_TOL * lengths[..., None]
    if np.any(bad) or np.any(lengths <= 0) or not np.all(np.isfinite(speed)):
        t = None
        if t_sites is not None and speed.ndim == 2:
            rows = np.flatnonzero(bad.any(axis=1) | (lengths <= 0))
            t = float(t_sites[rows[0]]) if rows.size else None
        where = f" at t={t:.6g}" if t is not None else ""
        raise DegenerateCurveError(f"curve is not immersed{where}: |c'| ~ 0", t=t)
    return lengths


def curve_length(curve: DiscreteCurve) -> float:
    grid = quadrature(curve.config, "theta")
    speed = np.linalg.norm(curve.at_grid(grid, 1), axis=-1)
    return float(check_immersion(speed, grid.weights))


def metric_value(
    curve: DiscreteCurve, h: np.ndarray, k: np.ndarray, params: MetricParams
) -> float:
    """G_c(h, k) for tangent fields given as spline coefficient arrays (N_theta, 2)."""
    grid = quadrature(curve.config, "theta")
    u, w = curve.at_grid(grid, 1), curve.at_grid(grid, 2)
    length = check_immersion(np.linalg.norm(u, axis=-1), grid.weights)
    coeffs, _ = params.coefficients(np.asarray(length))
    hv = [grid.basis[nu] @ np.asarray(h, float) for nu in range(3)]
    kv = [grid.basis[nu] @ np.asarray(k, float) for nu in range(3)]
    dens = bilinear_density(u, w, *hv, *kv, coeffs)
    return float(grid.weights @ dens)


def _path_fields(path: DiscretePath):
    gt = quadrature(path.config, "t")
    gth = quadrature(path.config, "theta")
    f = eval_path(path, ("th", "thth", "t", "tth", "tthth"), gt, gth)
    return gt, gth, f


def energy_terms(path: DiscretePath, params: MetricParams) -> dict[str, float]:
    """Contribution of each metric term (a0, a1, b1, a2) to the path energy."""
    gt, gth, f = _path_fields(path)
    u = f["th"]
    lengths = check_immersion(np.linalg.norm(u, axis=-1), gth.weights, gt.sites)
    coeffs, _ = params.coefficients(lengths)
    dens = density_terms(u, f["thth"], f["t"], f["tth"], f["tthth"])
    per_t = dens @ gth.weights
    vals = (coeffs * per_t) @ gt.weights
    return dict(zip(TERM_NAMES, map(float, vals)))


def path_energy(path: DiscretePath, params: MetricParams) -> float:
    return path_energy_and_gradient(path, params, gradient=False)[0]


def path_energy_and_gradient(
    path: DiscretePath, params: MetricParams, gradient: bool = True
) -> tuple[float, np.ndarray | None]:
    """Energy and its gradient with respect to all path control points.

    The gradient has the full ctrl shape (N_t, N_theta, 2); callers that keep
    the source curve fixed drop row 0.
    """
    gt, gth, f = _path_fields(path)
    u, w = f["th"], f["thth"]
    lengths = check_immersion(np.linalg.norm(u, axis=-1), gth.weights, gt.sites)
    coeffs, dcoeffs = params.coefficients(lengths)
    W = gt.weights[:, None] * gth.weights[None, :]
    if not gradient:
        dens = density_terms(u, w, f["t"], f["tth"], f["tthth"])
        energy = float(np.sum(coeffs * (dens @ gth.weights), axis=0) @ gt.weights)
        return energy, None

    pt = pointwise_terms(u, w, f["t"], f["tth"], f["tthth"], coeffs[:, :, None])
    dens = pt.terms
    energy = float(np.sum(coeffs * (dens @ gth.weights), axis=0) @ gt.weights)

    d_u = pt.d_u
    if params.depends_on_length:
        # chain rule through l(t) = sum_q w_q |c'(t, theta_q)|
        g_t = np.sum(dcoeffs * (dens @ gth.weights), axis=0)
        d_u = d_u + g_t[:, None, None] * pt.tangent

    B, C = gt.basis, gth.basis
    Wd = W[..., None]
    # contract theta first (matmul broadcasts over t), then t
    g0 = np.matmul(C[1].T, Wd * d_u) + np.matmul(C[2].T, Wd * pt.d_w)
    g1 = (
        np.matmul(C[0].T, Wd * pt.d_h)
        + np.matmul(C[1].T, Wd * pt.d_dh)
        + np.matmul(C[2].T, Wd * pt.d_ddh)
    )
    grad = np.tensordot(B[0].T, g0, axes=1) + np.tensordot(B[1].T, g1, axes=1)
    return energy, grad


def path_energy_gradient(path: DiscretePath, params: MetricParams) -> np.ndarray:
    """Gradient with respect to the free control rows 2..N_t (the source row is fixed)."""
    return path_energy_and_gradient(path, params)[1][1:]
