import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastic_curves.config import ConfigError, RunConfig


def test_defaults():
    cfg = RunConfig()
    assert cfg.spline.N_theta == 100 and cfg.spline.N_t == 10
    assert cfg.kernel.radial_scale == 0.1 and cfg.kernel.zonal_scale == 0.3
    assert cfg.options.auglag.eps == 0.01 and cfg.options.auglag.tau_final == 1e-3


def test_unknown_keys_name_their_path():
    with pytest.raises(ConfigError, match="options.auglag.epsilon"):
        RunConfig.from_dict({"options": {"auglag": {"epsilon": 1.0}}})
    with pytest.raises(ConfigError, match="'colour'"):
        RunConfig.from_dict({"colour": 1})


def test_type_errors():
    with pytest.raises(ConfigError, match="spline.N_theta"):
        RunConfig.from_dict({"spline": {"N_theta": "ten"}})
    with pytest.raises(ConfigError, match="metric.a0"):
        RunConfig.from_dict({"metric": {"a0": True}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"spline": []})


def test_value_errors():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"kernel": {"radial": "laplace"}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"options": {"mode": "newton"}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"spline": {"N_theta": 2}})


def test_integral_float_accepted_for_int():
    assert RunConfig.from_dict({"spline": {"N_theta": 20.0}}).spline.N_theta == 20


def test_bad_json_reports_position(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{\n  "spline": {"N_theta": 20,}\n}')
    with pytest.raises(ConfigError, match="line 2"):
        RunConfig.from_file(p)


config_dicts = st.fixed_dictionaries(
    {},
    optional={
        "spline": st.fixed_dictionaries({}, optional={
            "N_theta": st.integers(8, 200), "N_t": st.integers(4, 30), "closed": st.booleans()}),
        "metric": st.fixed_dictionaries({}, optional={
            "a0": st.floats(0, 10), "a2": st.floats(0, 10), "length_weighted": st.booleans()}),
        "kernel": st.fixed_dictionaries({}, optional={
            "radial": st.sampled_from(["gaussian", "cauchy", "constant"]),
            "radial_scale": st.floats(0.01, 5), "n_pts": st.none() | st.integers(10, 500)}),
        "options": st.fixed_dictionaries({}, optional={
            "mode": st.sampled_from(["penalty", "auglag"]), "opt_rotation": st.booleans(),
            "auglag": st.fixed_dictionaries({}, optional={"eps": st.floats(1e-6, 1)})}),
    },
)


@settings(max_examples=60, deadline=None)
@given(config_dicts)
def test_round_trip(data):
    cfg = RunConfig.from_dict(data)
    again = RunConfig.from_dict(json.loads(cfg.to_json()))
    assert again == cfg
    assert again.hash() == cfg.hash()


def test_hash_changes_with_content():
    a = RunConfig()
    b = RunConfig.from_dict({"metric": {"a2": 0.5}})
    assert a.hash() != b.hash()
