"""Oriented-varifold kernel inner products and distances between curves.

A curve is represented by weighted (point, unit tangent) samples taken at
quadrature sites; the kernel is rho(|x - y|^2) * gamma(<u, v>). Gradients are
taken with respect to the raw samples (positions and c') and then pulled back
to spline control points through the basis tables of the sampling grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import DiscreteCurve, QuadratureGrid, uniform_grid
from .metric import check_immersion, quadrature

RADIAL = ("gaussian", "cauchy", "constant")
ZONAL = ("constant", "linear", "squared", "gaussian_oriented")


@dataclass(frozen=True)
class VarifoldKernel:
    radial: str = "gaussian"
    radial_scale: float = 0.1
    zonal: str = "gaussian_oriented"
    zonal_scale: float = 0.3

    def __post_init__(self):
        if self.radial not in RADIAL:
            raise ValueError(f"unknown radial kernel {self.radial!r}; choose from {RADIAL}")
        if self.zonal not in ZONAL:
            raise ValueError(f"unknown zonal kernel {self.zonal!r}; choose from {ZONAL}")
        if self.radial_scale <= 0 or self.zonal_scale <= 0:
            raise ValueError("kernel scales must be positive")

    @property
    def separating(self) -> bool:
        return self.radial != "constant"

    @property
    def orientation_invariant(self) -> bool:
        return self.zonal in ("constant", "squared")

    def rho(self, sq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """rho and its derivative at squared distances."""
        s2 = self.radial_scale**2
        if self.radial == "gaussian":
            r = np.exp(-sq / s2)
            return r, -r / s2
        if self.radial == "cauchy":
            r = 1.0 / (1.0 + sq / s2)
            return r, -(r**2) / s2
        return np.ones_like(sq), np.zeros_like(sq)

    def gamma(self, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """gamma and its derivative at tangent cosines."""
        if self.zonal == "linear":
            return c, np.ones_like(c)
        if self.zonal == "squared":
            return c**2, 2 * c
        if self.zonal == "gaussian_oriented":
            k = 2.0 / self.zonal_scale**2
            g = np.exp(k * (c - 1.0))
            return g, k * g
        return np.ones_like(c), np.zeros_like(c)

    def scaled(self, factor: float) -> "VarifoldKernel":
        return VarifoldKernel(self.radial, self.radial_scale * factor, self.zonal, self.zonal_scale)


@dataclass(frozen=True)
class VarifoldEvalGrid:
    """Samples of a curve: positions, derivatives c' and raw quadrature weights.

    Arc-length weights are quadrature weight times |c'|.
    """

    points: np.ndarray
    derivs: np.ndarray
    qweights: np.ndarray

    @property
    def speed(self) -> np.ndarray:
        return np.linalg.norm(self.derivs, axis=-1)

    @property
    def tangents(self) -> np.ndarray:
        return self.derivs / self.speed[:, None]

    @property
    def weights(self) -> np.ndarray:
        return self.qweights * self.speed

    @property
    def size(self) -> int:
        return len(self.points)

    def concat(self, other: "VarifoldEvalGrid") -> "VarifoldEvalGrid":
        return VarifoldEvalGrid(
            np.concatenate([self.points, other.points]),
            np.concatenate([self.derivs, other.derivs]),
            np.concatenate([self.qweights, other.qweights]),
        )

    def reversed(self) -> "VarifoldEvalGrid":
        """Same samples traversed in the opposite direction."""
        return VarifoldEvalGrid(self.points[::-1], -self.derivs[::-1], self.qweights[::-1])


def sample_grid(curve: DiscreteCurve, n_pts: int | None = None) -> QuadratureGrid:
    if n_pts:
        return uniform_grid(curve.config, n_pts)
    return quadrature(curve.config, "theta")


def eval_grid(curve: DiscreteCurve, n_pts: int | None = None) -> VarifoldEvalGrid:
    """Varifold samples at the spline's theta quadrature sites, or ``n_pts`` uniform sites."""
    grid = sample_grid(curve, n_pts)
    derivs = curve.at_grid(grid, 1)
    check_immersion(np.linalg.norm(derivs, axis=-1), grid.weights)
    return VarifoldEvalGrid(curve.at_grid(grid, 0), derivs, np.asarray(grid.weights))


def as_grid(c, n_pts=None) -> VarifoldEvalGrid:
    return c if isinstance(c, VarifoldEvalGrid) else eval_grid(c, n_pts)


def _pair(a: VarifoldEvalGrid, b: VarifoldEvalGrid, kernel: VarifoldKernel,
          grad_a: bool = False, grad_b: bool = False):
    """<mu_a, mu_b> and optionally its gradients w.r.t. either side's points and derivs."""
    dx = a.points[:, 0, None] - b.points[None, :, 0]
    dy = a.points[:, 1, None] - b.points[None, :, 1]
    sq = dx * dx + dy * dy
    ta, tb = a.tangents, b.tangents
    cos = ta @ tb.T
    r, dr = kernel.rho(sq)
    g, dg = kernel.gamma(cos)
    wa, wb = a.weights, b.weights
    rg = r * g
    value = float(wa @ rg @ wb)
    out = [value, None, None]
    if not (grad_a or grad_b):
        return out
    # 2 rho' gamma w_i w_j (x_i - y_j)
    coef = 2 * dr * g * wa[:, None] * wb[None, :]
    gpx = np.stack([(coef * dx).sum(axis=1), (coef * dy).sum(axis=1)], axis=1)
    rdg = r * dg
    if grad_a:
        # through w_i = q_i |u_i| and v_i = u_i / |u_i|
        s_g = rg @ wb
        tang = rdg * wb[None, :]
        proj = tang @ tb - (tang * cos).sum(axis=1)[:, None] * ta
        out[1] = (gpx, a.qweights[:, None] * (s_g[:, None] * ta + proj))
    if grad_b:
        gpy = -np.stack([(coef * dx).sum(axis=0), (coef * dy).sum(axis=0)], axis=1)
        s_g = wa @ rg
        tang = rdg * wa[:, None]
        proj = tang.T @ ta - (tang * cos).sum(axis=0)[:, None] * tb
        out[2] = (gpy, b.qweights[:, None] * (s_g[:, None] * tb + proj))
    return out


def varifold_inner(c1, c2, kernel: VarifoldKernel) -> float:
    """<mu_c1, mu_c2> by direct double summation over the sample grids."""
    return _pair(as_grid(c1), as_grid(c2), kernel)[0]


def varifold_dist_sq(c1, c2, kernel: VarifoldKernel) -> float:
    a, b = as_grid(c1), as_grid(c2)
    d2 = varifold_inner(a, a, kernel) - 2 * varifold_inner(a, b, kernel) + varifold_inner(b, b, kernel)
    return max(d2, 0.0)


def dist_sq_sample_gradient(
    a: VarifoldEvalGrid, b: VarifoldEvalGrid, kernel: VarifoldKernel, wrt_b: bool = False
):
    """Unclamped d^2(a, b) and gradients w.r.t. the samples of a (and b if asked).

    Returns (d2, (g_pts_a, g_der_a), (g_pts_b, g_der_b) or None). Self terms use
    the kernel symmetry: d<mu, mu> = 2 d_first<mu, mu>.
    """
    aa, (gaa_p, gaa_d), _ = _pair(a, a, kernel, grad_a=True)
    ab, (gab_p, gab_d), grad_ba = _pair(a, b, kernel, grad_a=True, grad_b=wrt_b)
    bb, grad_bb, _ = _pair(b, b, kernel, grad_a=wrt_b)
    d2 = aa - 2 * ab + bb
    grad_a = (2 * gaa_p - 2 * gab_p, 2 * gaa_d - 2 * gab_d)
    grad_b = None
    if wrt_b:
        grad_b = (2 * grad_bb[0] - 2 * grad_ba[0], 2 * grad_bb[1] - 2 * grad_ba[1])
    return d2, grad_a, grad_b


def pull_back(grid: QuadratureGrid, g_pts: np.ndarray, g_der: np.ndarray) -> np.ndarray:
    """Sample gradients to control-point gradients."""
    return grid.basis[0].T @ g_pts + grid.basis[1].T @ g_der


def varifold_dist_sq_gradient(
    c1: DiscreteCurve, c2, kernel: VarifoldKernel, n_pts: int | None = None
) -> np.ndarray:
    """Gradient of d^2(c1, c2) with respect to c1's control points, shape (N_theta, 2).

    This is the derivative of the unclamped quadrature sum.
    """
    grid = sample_grid(c1, n_pts)
    a = eval_grid(c1, n_pts)
    _, (gp, gd), _ = dist_sq_sample_gradient(a, as_grid(c2, n_pts), kernel)
    return pull_back(grid, gp, gd)


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def apply_similarity(obj, r: float = 1.0, angle: float = 0.0, b=(0.0, 0.0)):
    """r * A(angle) (x + b) applied to a curve, a sample grid or a point array.

    Translation is applied first, then rotation and scaling.
    """
    if r <= 0:
        raise ValueError("scale factor must be positive")
    M = r * rotation(angle)
    b = np.asarray(b, dtype=float)
    if isinstance(obj, VarifoldEvalGrid):
        return VarifoldEvalGrid((obj.points + b) @ M.T, obj.derivs @ M.T, obj.qweights)
    if isinstance(obj, DiscreteCurve):
        return obj.transformed(lambda ctrl: (ctrl + b) @ M.T)
    return (np.asarray(obj, float) + b) @ M.T
