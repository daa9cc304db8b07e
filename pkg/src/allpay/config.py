"""Contest configuration: JSON schema, numerics knobs, built-in presets.

Config file schema (all JSON):

    {
      "agents": [
        {"family": "uniform",      "params": {"lo": 0.0, "hi": 1.0}},
        {"family": "atom_uniform", "params": {"atom": 0.5, "lo": 0.0, "hi": 1.0}},
        {"family": "power",        "params": {"alpha": 3.0, "lo": 0.0, "hi": 1.0}},
        {"family": "piecewise",    "params": {"knots": [...], "cdf": [...]}}
      ],
      "payment":     {"family": "monomial", "c": 1.0, "a": 2.0, "d": 0.0},
      "value_scale": {"gamma": 1.0},
      "lambda":      0.1,
      "numerics":    {"steps": 4096, "abs_tol": 1e-10, "rel_tol": 1e-10}
    }

`numerics` is optional; `lo`/`hi` default to [0, 1].  Unknown keys are
errors, not warnings, so typos cannot silently change a run.

The preset name "paper-case-study" can be used wherever a config path is
accepted: two agents on [0, 1], the first uniform, the second a 0.5 atom
at zero plus a uniform half, quadratic effort cost, identity value scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .model import (
    AtomUniform,
    ContestSpec,
    MonomialPayment,
    PiecewiseCdf,
    PowerLaw,
    TypeDistribution,
    Uniform,
    ValueScale,
)

__all__ = [
    "ConfigError",
    "NumericsSettings",
    "LoadedConfig",
    "load_config",
    "parse_config",
    "case_study_spec",
    "CASE_STUDY",
    "DEFAULT_NUMERICS",
]

CASE_STUDY = "paper-case-study"


class ConfigError(ValueError):
    """A config document is malformed or contradicts the schema."""


@dataclass(frozen=True)
class NumericsSettings:
    """Solver knobs shared by all mechanisms.

    steps controls the fixed-step ODE grid; abs_tol/rel_tol feed the
    quadrature and root-finding tolerances.
    """

    steps: int = 4096
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.steps < 8:
            raise ConfigError(f"numerics.steps must be at least 8, got {self.steps}")
        if not (self.abs_tol > 0.0 and self.rel_tol >= 0.0):
            raise ConfigError("numerics tolerances must be positive")


DEFAULT_NUMERICS = NumericsSettings()


@dataclass(frozen=True)
class LoadedConfig:
    spec: ContestSpec
    numerics: NumericsSettings


def _require_keys(obj: dict, allowed: set[str], where: str, required: set[str] = frozenset()):
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; allowed: {sorted(allowed)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in {where}")


def _parse_agent(entry: dict, index: int) -> TypeDistribution:
    where = f"agents[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{where} must be an object")
    _require_keys(entry, {"family", "params"}, where, required={"family"})
    family = entry["family"]
    params = entry.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{where}.params must be an object")
    try:
        if family == "uniform":
            _require_keys(params, {"lo", "hi"}, f"{where}.params")
            return Uniform(lo=params.get("lo", 0.0), hi=params.get("hi", 1.0))
        if family == "atom_uniform":
            _require_keys(params, {"atom", "lo", "hi"}, f"{where}.params", required={"atom"})
            return AtomUniform(w=params["atom"], lo=params.get("lo", 0.0), hi=params.get("hi", 1.0))
        if family == "power":
            _require_keys(params, {"alpha", "lo", "hi"}, f"{where}.params", required={"alpha"})
            return PowerLaw(alpha=params["alpha"], lo=params.get("lo", 0.0), hi=params.get("hi", 1.0))
        if family == "piecewise":
            _require_keys(params, {"knots", "cdf"}, f"{where}.params", required={"knots", "cdf"})
            return PiecewiseCdf(params["knots"], params["cdf"])
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown distribution family {family!r}")


def parse_config(doc: dict) -> LoadedConfig:
    """Build a ContestSpec plus numerics settings from a parsed document."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(doc, {"agents", "payment", "value_scale", "lambda", "numerics"},
                  "config", required={"agents", "payment", "lambda"})

    agents_doc = doc["agents"]
    if not isinstance(agents_doc, list) or len(agents_doc) < 2:
        raise ConfigError("agents must be a list with at least 2 entries")
    agents = tuple(_parse_agent(a, i) for i, a in enumerate(agents_doc))

    pay_doc = doc["payment"]
    _require_keys(pay_doc, {"family", "c", "a", "d"}, "payment", required={"family"})
    if pay_doc["family"] != "monomial":
        raise ConfigError(f"unknown payment family {pay_doc['family']!r}")
    try:
        payment = MonomialPayment(c=pay_doc.get("c", 1.0), a=pay_doc.get("a", 2.0),
                                  d=pay_doc.get("d", 0.0))
    except ValueError as exc:
        raise ConfigError(f"invalid payment: {exc}") from exc

    vs_doc = doc.get("value_scale", {})
    _require_keys(vs_doc, {"gamma"}, "value_scale")
    try:
        value_scale = ValueScale(gamma=vs_doc.get("gamma", 1.0))
    except ValueError as exc:
        raise ConfigError(f"invalid value_scale: {exc}") from exc

    num_doc = doc.get("numerics", {})
    _require_keys(num_doc, {"steps", "abs_tol", "rel_tol"}, "numerics")
    numerics = NumericsSettings(
        steps=num_doc.get("steps", DEFAULT_NUMERICS.steps),
        abs_tol=num_doc.get("abs_tol", DEFAULT_NUMERICS.abs_tol),
        rel_tol=num_doc.get("rel_tol", DEFAULT_NUMERICS.rel_tol),
    )

    try:
        spec = ContestSpec(agents=agents, payment=payment, value_scale=value_scale,
                           lam=float(doc["lambda"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid contest: {exc}") from exc
    return LoadedConfig(spec=spec, numerics=numerics)


def case_study_spec(lam: float = 0.1) -> ContestSpec:
    """The built-in two-agent contest used throughout the test battery.

    Agent 1 is uniform on [0, 1]; agent 2 has a 0.5 atom at zero and is
    otherwise uniform, so F2(v) = (v + 1)/2.  Quadratic effort cost
    p(b) = b^2, identity value scale h(v) = v.
    """
    return ContestSpec(
        agents=(Uniform(0.0, 1.0), AtomUniform(w=0.5, lo=0.0, hi=1.0)),
        payment=MonomialPayment(c=1.0, a=2.0, d=0.0),
        value_scale=ValueScale(gamma=1.0),
        lam=lam,
    )


def load_config(path_or_name: str | Path, lam: float | None = None) -> LoadedConfig:
    """Load a config file, or a named preset such as "paper-case-study".

    `lam` overrides the principal valuation (used by sweep commands).
    """
    if str(path_or_name) == CASE_STUDY:
        loaded = LoadedConfig(spec=case_study_spec(), numerics=DEFAULT_NUMERICS)
    else:
        path = Path(path_or_name)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        loaded = parse_config(doc)
    if lam is not None:
        spec = loaded.spec
        loaded = LoadedConfig(
            spec=ContestSpec(agents=spec.agents, payment=spec.payment,
                             value_scale=spec.value_scale, lam=float(lam)),
            numerics=loaded.numerics,
        )
    return loaded
