import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastic_curves.bspline import (
    TWO_PI,
    DiscreteCurve,
    DiscretePath,
    FitError,
    SplineConfig,
    SplineConfigError,
    basis_matrix,
    breakpoints,
    fit_curve,
    gauss_sites,
    greville,
    make_knots,
    make_quadrature,
)

configs = st.builds(
    SplineConfig,
    n_theta=st.integers(1, 4),
    N_theta=st.integers(8, 30),
    n_t=st.integers(1, 3),
    N_t=st.integers(4, 10),
    closed=st.booleans(),
)


@settings(max_examples=40, deadline=None)
@given(configs, st.integers(0, 2**31 - 1))
def test_partition_of_unity(cfg, seed):
    x = np.random.default_rng(seed).uniform(0, TWO_PI, 50)
    for which, xs in (("theta", x), ("t", x / TWO_PI)):
        B = basis_matrix(cfg, which, xs)
        assert np.max(np.abs(B.sum(axis=1) - 1)) <= 1e-12
        assert np.all(B >= -1e-15)


@settings(max_examples=30, deadline=None)
@given(configs)
def test_clamped_endpoints_are_exact(cfg):
    B = basis_matrix(cfg, "t", np.array([0.0, 1.0]))
    e0 = np.zeros(cfg.N_t)
    e0[0] = 1
    assert np.array_equal(B[0], e0)
    assert np.array_equal(B[1], e0[::-1])


def test_path_start_and_end_rows():
    cfg = SplineConfig(N_theta=10, N_t=5)
    ctrl = np.random.default_rng(0).normal(size=(5, 10, 2))
    path = DiscretePath(cfg, ctrl)
    assert np.array_equal(path.curve_at(0.0).ctrl, ctrl[0])
    assert np.array_equal(path.curve_at(1.0).ctrl, ctrl[-1])


def test_periodic_basis_wraps():
    cfg = SplineConfig(N_theta=12)
    x = np.linspace(0, 0.5, 7)
    for nu in range(3):
        assert np.allclose(basis_matrix(cfg, "theta", x, nu), basis_matrix(cfg, "theta", x + TWO_PI, nu))


def test_derivative_matches_difference_quotient():
    cfg = SplineConfig(N_theta=15, closed=False)
    x = np.linspace(0.3, 6.0, 9)
    h = 1e-6
    fd = (basis_matrix(cfg, "theta", x + h) - basis_matrix(cfg, "theta", x - h)) / (2 * h)
    assert np.allclose(basis_matrix(cfg, "theta", x, 1), fd, atol=1e-7)


def test_greville_reproduces_linear():
    cfg = SplineConfig(N_theta=9, closed=False)
    x = np.linspace(0, TWO_PI, 17)
    assert np.allclose(basis_matrix(cfg, "theta", x) @ greville(cfg), x, atol=1e-12)


def test_knot_counts():
    cfg = SplineConfig(n_theta=3, N_theta=10, N_t=6, n_t=2)
    assert len(make_knots(cfg, "theta")) == 10 + 2 * 3 + 1
    assert len(make_knots(cfg, "t")) == 6 + 2 + 1
    assert len(breakpoints(cfg, "t")) == 6 - 2 + 1


@pytest.mark.parametrize("closed", [True, False])
def test_fit_round_trip(closed):
    cfg = SplineConfig(N_theta=20, closed=closed)
    rng = np.random.default_rng(3)
    ctrl = rng.normal(size=(20, 2))
    theta = np.linspace(0, TWO_PI, 200, endpoint=not closed)
    pts = DiscreteCurve(cfg, ctrl)(theta)
    fitted = fit_curve(pts, cfg, params=theta)
    assert np.max(np.abs(fitted.ctrl - ctrl)) <= 1e-8
    assert fitted.fit_residual <= 1e-10


def test_fit_rejects_too_few_points():
    cfg = SplineConfig(N_theta=20)
    with pytest.raises(FitError):
        fit_curve(np.random.default_rng(0).normal(size=(10, 2)), cfg)


def test_fit_reports_rank_deficiency():
    cfg = SplineConfig(N_theta=20, closed=False)
    theta = np.concatenate([np.full(30, 1.0), np.full(30, 2.0)])
    with pytest.raises(FitError, match="condition"):
        fit_curve(np.zeros((60, 2)) + theta[:, None], cfg, params=theta)


@pytest.mark.parametrize("q", [1, 2, 3, 4, 6])
def test_gauss_exactness(q):
    edges = breakpoints(SplineConfig(N_theta=7), "theta")
    sites, weights = gauss_sites(edges, q)
    deg = 2 * q - 1
    # shifted monomial keeps the integrand O(1) on [0, 2 pi]
    f = lambda x: ((x - np.pi) / np.pi) ** deg + 1.0
    exact = np.pi * (((1.0) ** (deg + 1) - (-1.0) ** (deg + 1)) / (deg + 1)) + TWO_PI
    assert abs(weights @ f(sites) - exact) / exact <= 1e-13


def test_quadrature_integrates_spline_products():
    cfg = SplineConfig(N_theta=11, quad_theta=4)
    grid = make_quadrature(cfg, "theta")
    # each cubic basis function integrates to the knot spacing on a uniform periodic grid
    assert np.allclose(grid.weights @ grid.basis[0], TWO_PI / 11, atol=1e-13)


def test_config_validation():
    with pytest.raises(SplineConfigError):
        SplineConfig(n_theta=3, N_theta=3)
    with pytest.raises(SplineConfigError):
        SplineConfig(N_t=1)
    with pytest.raises(SplineConfigError):
        DiscreteCurve(SplineConfig(N_theta=10), np.zeros((9, 2)))


def test_ctrl_is_read_only():
    c = DiscreteCurve(SplineConfig(N_theta=10), np.zeros((10, 2)))
    with pytest.raises(ValueError):
        c.ctrl[0, 0] = 1.0


def test_linear_path_is_linear_in_t():
    cfg = SplineConfig(N_theta=10, N_t=6, n_t=3)
    rng = np.random.default_rng(1)
    a, b = DiscreteCurve(cfg, rng.normal(size=(10, 2))), DiscreteCurve(cfg, rng.normal(size=(10, 2)))
    path = DiscretePath.linear(a, b)
    for t in (0.2, 0.5, 0.9):
        assert np.allclose(path.curve_at(t).ctrl, (1 - t) * a.ctrl + t * b.ctrl, atol=1e-12)
