import numpy as np
import pytest

from conftest import directional_fd, rel_err
from elastic_curves.bspline import SplineConfig
from elastic_curves.matching import (
    AugLagState,
    MatchProblem,
    Transform,
    _Evaluator,
    auglag_objective,
    penalty_objective,
    resample_curve,
    solve_auglag,
    solve_penalty,
)
from elastic_curves.metric import MetricParams
from elastic_curves.optim import OptimSettings
from elastic_curves.shapes import bean, circle, ellipse
from elastic_curves.varifold import VarifoldKernel, apply_similarity

CFG = SplineConfig(N_theta=12, N_t=5)
KERNEL = VarifoldKernel("gaussian", 0.5, "gaussian_oriented", 0.5)


def _problem(**kw):
    src = kw.pop("source", circle(CFG))
    tgt = kw.pop("target", bean(CFG))
    return MatchProblem(src, tgt, MetricParams(1, 1, 1, 0.1), KERNEL, **kw)


def test_transform_vector_round_trip():
    t = Transform(1.5, -0.3, (0.2, 0.7))
    back = Transform.from_vector(t.vector())
    assert back.r == pytest.approx(1.5) and back.angle == -0.3 and back.b == (0.2, 0.7)


def test_resample_keeps_shape():
    c = bean(CFG)
    fine = resample_curve(c, CFG.with_(N_theta=30))
    th = np.linspace(0, 6, 13)
    assert np.max(np.abs(fine(th) - c(th))) < 5e-3


def test_target_is_moved_onto_source_space():
    p = _problem(target=bean(SplineConfig(N_theta=20)))
    assert p.target.config == p.source.config


@pytest.mark.parametrize("flags", [{}, {"opt_rotation": True},
                                   {"opt_translation": True, "opt_scale": True, "opt_rotation": True}])
def test_objective_gradient_with_transform(flags):
    rng = np.random.default_rng(2)
    p = _problem(**flags)
    ev = _Evaluator(p)
    x0 = ev.pack(_perturbed_path(p, rng), Transform(1.1, 0.2, (0.1, -0.2)))

    def f(x):
        E, _, d2, _ = ev(x)
        return E + 30.0 * d2

    E, dE, d2, dd2 = ev(x0)
    g = dE + 30.0 * dd2
    for _ in range(4):
        d = rng.normal(size=x0.shape)
        assert rel_err(g @ d, directional_fd(f, x0, d)) <= 1e-6


def _perturbed_path(p, rng):
    from elastic_curves.bspline import DiscretePath

    path = DiscretePath.linear(p.source, p.target)
    ctrl = path.ctrl.copy()
    ctrl[1:] += 0.02 * rng.normal(size=ctrl[1:].shape)
    return DiscretePath(p.config, ctrl)


def test_auglag_with_zero_mu_is_penalty():
    rng = np.random.default_rng(4)
    p = _problem(opt_rotation=True)
    path = _perturbed_path(p, rng)
    tr = Transform(1.0, 0.1, (0.0, 0.0))
    fp, gp = penalty_objective(path, tr, p, 250.0)
    fa, ga = auglag_objective(path, tr, p, lam=-250.0, mu=0.0)
    assert abs(fp - fa) <= 1e-14 * abs(fp)
    assert np.max(np.abs(gp - ga)) <= 1e-14 * np.max(np.abs(gp))


def test_identical_curves_accepted_immediately():
    c = bean(CFG)
    res = solve_auglag(MatchProblem(c, c, kernel=KERNEL))
    assert res.reason == "accepted" and len(res.log) == 1
    assert res.energy <= 1e-8 and res.d2 <= 1e-12


def test_multipliers_are_nonincreasing():
    p = _problem()
    res = solve_auglag(p, AugLagState(eps=1e-4, k_max=4), OptimSettings(max_iters=200))
    m = res.multipliers
    assert m[0] == 0.0
    assert all(b <= a for a, b in zip(m, m[1:]))


def test_auglag_state_validation():
    with pytest.raises(ValueError):
        AugLagState(lam=1.0)
    with pytest.raises(ValueError):
        AugLagState(rho=1.0)


def test_penalty_weight_trades_energy_for_constraint():
    src, tgt = circle(CFG), ellipse(CFG, 1.3, 0.6)
    d2s, Es = [], []
    for lam in (1e1, 1e2, 1e3):
        r = solve_penalty(MatchProblem(src, tgt, MetricParams(1, 1, 1, 0.1), KERNEL), lam,
                          OptimSettings(grad_tol=1e-6, max_iters=3000))
        d2s.append(r.d2)
        Es.append(r.energy)
    assert all(b <= 1.1 * a for a, b in zip(d2s, d2s[1:]))
    assert all(b >= 0.9 * a for a, b in zip(Es, Es[1:]))


def test_rotation_enabled_never_worse():
    src = circle(CFG)
    tgt = ellipse(CFG, 1.2, 0.7, angle=0.8)
    s = OptimSettings(grad_tol=1e-6, max_iters=3000)
    metric = MetricParams(1, 1, 1, 0.1)
    off = solve_penalty(MatchProblem(src, tgt, metric, KERNEL), 1e2, s)
    on = solve_penalty(MatchProblem(src, tgt, metric, KERNEL, opt_rotation=True), 1e2, s)
    assert on.objective <= off.objective * (1 + 1e-6)


def test_rotation_recovered_modulo_symmetry():
    src = ellipse(CFG, 1.0, 0.5)
    tgt = apply_similarity(src, angle=0.5)
    p = MatchProblem(src, tgt, MetricParams(1, 1, 1, 0.1), KERNEL, opt_rotation=True)
    res = solve_penalty(p, 1e3, OptimSettings(grad_tol=1e-7, max_iters=2000))
    err = (res.transform.angle + 0.5 + np.pi / 2) % np.pi - np.pi / 2
    assert abs(err) <= 1e-2
    assert res.energy <= 1e-4


@pytest.mark.xfail(strict=True, reason="with a0 only the metric is degenerate: the optimizer finds "
                                       "paths far cheaper than the translation (E about 0.47 * 2pi)")
def test_translation_energy_with_a0_only_metric():
    cfg = SplineConfig(N_theta=16, N_t=6)
    src = circle(cfg)
    p = MatchProblem(src, apply_similarity(src, b=(1.0, 0.0)), MetricParams(1, 0, 0, 0), KERNEL)
    res = solve_auglag(p, AugLagState(), OptimSettings(grad_tol=1e-3))
    assert res.energy == pytest.approx(2 * np.pi, rel=0.05)
