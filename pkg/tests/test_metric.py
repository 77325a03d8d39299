import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import directional_fd, random_path, rel_err
from elastic_curves.bspline import TWO_PI, DiscretePath, SplineConfig
from elastic_curves.metric import (
    DegenerateCurveError,
    MetricParams,
    bilinear_density,
    curve_length,
    density_terms,
    energy_terms,
    metric_value,
    path_energy,
    path_energy_and_gradient,
    path_energy_gradient,
)
from elastic_curves.shapes import circle, segment

CFG = SplineConfig(N_theta=16, N_t=5)


def _fields(rng, n=7):
    return [rng.normal(size=(n, 2)) for _ in range(5)]


def test_density_is_diagonal_of_bilinear(rng):
    u, w, h, dh, ddh = _fields(rng)
    coeffs = np.array([1.0, 2.0, 3.0, 0.5])[:, None]
    dens = (coeffs * density_terms(u, w, h, dh, ddh)).sum(axis=0)
    assert np.allclose(dens, bilinear_density(u, w, h, dh, ddh, h, dh, ddh, coeffs))


def test_bilinear_is_symmetric(rng):
    u, w, h, dh, ddh = _fields(rng)
    k, dk, ddk = _fields(rng)[:3]
    c = np.array([1.0, 2.0, 3.0, 0.5])[:, None]
    assert np.allclose(bilinear_density(u, w, h, dh, ddh, k, dk, ddk, c),
                       bilinear_density(u, w, k, dk, ddk, h, dh, ddh, c))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_metric_is_positive(seed):
    rng = np.random.default_rng(seed)
    c = circle(CFG, radius=rng.uniform(0.5, 2))
    h = rng.normal(size=(CFG.N_theta, 2))
    assert metric_value(c, h, h, MetricParams(1, 1, 1, 1)) > 0


def test_b1_term_sees_only_normal_part():
    c = segment(SplineConfig(N_theta=10, closed=False))
    # tangential field varying along the segment: b1 term vanishes, a1 does not
    from elastic_curves.bspline import greville

    th = greville(c.config)
    h = np.stack([np.sin(th), 0 * th], axis=1)
    assert metric_value(c, h, h, MetricParams(0, 0, 1, 0)) == pytest.approx(0, abs=1e-14)
    assert metric_value(c, h, h, MetricParams(0, 1, 0, 0)) > 0.1


def test_constant_path_has_zero_energy():
    path = DiscretePath.constant(circle(CFG))
    terms = energy_terms(path, MetricParams(1, 1, 1, 1))
    assert all(abs(v) <= 1e-20 for v in terms.values())


def test_translation_oracle_terms():
    c0 = circle(CFG)
    w = np.array([1.0, 0.5])
    path = DiscretePath.linear(c0, c0.transformed(lambda x: x + w))
    terms = energy_terms(path, MetricParams(2.0, 3.0, 5.0, 7.0))
    ell = curve_length(c0)
    assert terms["a0"] == pytest.approx(2.0 * ell * w @ w, rel=1e-12)
    for k in ("a1", "b1", "a2"):
        assert abs(terms[k]) <= 1e-10


def test_energy_terms_sum_to_energy(rng):
    path = random_path(CFG, rng)
    for lw in (False, True):
        p = MetricParams(1, 10, 0.1, 1e-3, length_weighted=lw)
        assert sum(energy_terms(path, p).values()) == pytest.approx(path_energy(path, p), rel=1e-13)


@pytest.mark.parametrize("lw", [False, True])
def test_gradient_small(rng, lw):
    path = random_path(CFG, rng)
    p = MetricParams(1, 10, 0.1, 1e-3, length_weighted=lw)
    _, g = path_energy_and_gradient(path, p)
    x0 = path.ctrl.copy()
    f = lambda x: path_energy(DiscretePath(CFG, x), p)
    for _ in range(5):
        d = rng.normal(size=x0.shape)
        assert rel_err(np.sum(g * d), directional_fd(f, x0, d)) <= 1e-6


def test_gradient_drops_source_row(rng):
    path = random_path(CFG, rng)
    p = MetricParams()
    assert path_energy_gradient(path, p).shape == (CFG.N_t - 1, CFG.N_theta, 2)


def test_degenerate_curve_reports_t():
    cfg = SplineConfig(N_theta=10, N_t=5, n_t=1)
    c = circle(cfg)
    ctrl = np.broadcast_to(c.ctrl, (5, 10, 2)).copy()
    ctrl[1:4] = 0.0  # the curves for t in [1/4, 3/4] collapse to a point
    with pytest.raises(DegenerateCurveError) as exc:
        path_energy(DiscretePath(cfg, ctrl), MetricParams())
    assert 0.25 <= exc.value.t <= 0.5


def test_incomplete_metric_warns():
    with pytest.warns(UserWarning):
        MetricParams(0, 1, 1, 0).check_complete()


def test_negative_coefficient_rejected():
    with pytest.raises(ValueError):
        MetricParams(a1=-1)


def test_custom_coefficient_function(rng):
    path = random_path(CFG, rng)

    def fn(length):
        vals = np.stack([length**-2, np.ones_like(length), length, np.zeros_like(length)])
        dvals = np.stack([-2 * length**-3, 0 * length, np.ones_like(length), 0 * length])
        return vals, dvals

    p = MetricParams(coefficient_fn=fn)
    _, g = path_energy_and_gradient(path, p)
    d = rng.normal(size=path.ctrl.shape)
    f = lambda x: path_energy(DiscretePath(CFG, x), p)
    assert rel_err(np.sum(g * d), directional_fd(f, path.ctrl.copy(), d)) <= 1e-6


def test_shrinking_segment_log_oracle():
    cfg = SplineConfig(N_theta=8, N_t=12, closed=False)
    seg = segment(cfg)
    # c(s) = (1 - s/2) seg on s in [0, 1]; time rescaling from [0, 1/2] doubles the energy
    path = DiscretePath.linear(seg, seg.transformed(lambda x: 0.5 * x))
    E = 2 * path_energy(path, MetricParams(0, 1, 0, 0))
    assert E == pytest.approx(TWO_PI * np.log(2), rel=1e-3)
