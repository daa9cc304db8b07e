"""Config schema: parsing, defaults, strictness, presets."""

import json

import pytest

from allpay.config import (
    CASE_STUDY,
    ConfigError,
    case_study_spec,
    load_config,
    parse_config,
)
from allpay.model import AtomUniform, MonomialPayment, PiecewiseCdf, PowerLaw, Uniform

FULL_DOC = {
    "agents": [
        {"family": "uniform", "params": {"lo": 0.0, "hi": 1.0}},
        {"family": "atom_uniform", "params": {"atom": 0.5}},
    ],
    "payment": {"family": "monomial", "c": 1.0, "a": 2.0, "d": 0.0},
    "value_scale": {"gamma": 1.0},
    "lambda": 0.1,
    "numerics": {"steps": 2048, "abs_tol": 1e-11, "rel_tol": 1e-11},
}


def test_parse_full_document():
    loaded = parse_config(FULL_DOC)
    spec = loaded.spec
    assert spec.n == 2 and spec.lam == 0.1
    assert isinstance(spec.agents[0], Uniform)
    assert isinstance(spec.agents[1], AtomUniform) and spec.agents[1].atom == 0.5
    assert loaded.numerics.steps == 2048


def test_defaults_applied():
    doc = {
        "agents": [{"family": "uniform"}, {"family": "power", "params": {"alpha": 2.0}}],
        "payment": {"family": "monomial"},
        "lambda": 0.3,
    }
    loaded = parse_config(doc)
    assert isinstance(loaded.spec.agents[1], PowerLaw)
    assert loaded.spec.payment == MonomialPayment(1.0, 2.0, 0.0)
    assert loaded.numerics.steps == 4096


def test_piecewise_agent():
    doc = dict(FULL_DOC)
    doc["agents"] = [
        {"family": "uniform"},
        {"family": "piecewise", "params": {"knots": [0.0, 0.4, 1.0], "cdf": [0.2, 0.5, 1.0]}},
    ]
    loaded = parse_config(doc)
    assert isinstance(loaded.spec.agents[1], PiecewiseCdf)


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.update(extra=1), "root"),
    (lambda d: d["agents"][0].update(mean=3), "agent"),
    (lambda d: d["agents"][0]["params"].update(scale=2), "agent params"),
    (lambda d: d["payment"].update(exponent=2), "payment"),
    (lambda d: d["numerics"].update(seed=1), "numerics"),
    (lambda d: d["value_scale"].update(beta=1), "value_scale"),
])
def test_unknown_keys_rejected(mutate, where):
    doc = json.loads(json.dumps(FULL_DOC))
    mutate(doc)
    with pytest.raises(ConfigError):
        parse_config(doc)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("agents"),
    lambda d: d.update(agents=[{"family": "uniform"}]),
    lambda d: d["agents"].__setitem__(0, {"family": "gaussian"}),
    lambda d: d["payment"].update(family="exponential"),
    lambda d: d["payment"].update(a=0.5),
    lambda d: d.update({"lambda": -1.0}),
    lambda d: d["numerics"].update(steps=2),
])
def test_invalid_values_rejected(mutate):
    doc = json.loads(json.dumps(FULL_DOC))
    mutate(doc)
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_load_from_file(tmp_path):
    path = tmp_path / "contest.json"
    path.write_text(json.dumps(FULL_DOC))
    loaded = load_config(path)
    assert loaded.spec.lam == 0.1
    loaded2 = load_config(path, lam=0.4)
    assert loaded2.spec.lam == 0.4
    assert loaded2.spec.agents == loaded.spec.agents


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_preset():
    loaded = load_config(CASE_STUDY)
    spec = loaded.spec
    assert spec.lam == 0.1
    assert spec.agents == case_study_spec(0.1).agents
    assert spec.agents[1].cdf(0.0) == 0.5
    assert load_config(CASE_STUDY, lam=0.5).spec.lam == 0.5
