"""Named mechanisms: one entry point per contest variant.

Maps the mechanism tokens used by the CLI and the test battery onto the
solver modules:

    opt    variable-prize mechanism for the configured (possibly
           asymmetric) agents
    fix    two-agent asymmetric contest with a fixed prize
    sym    n-agent symmetric contest with a fixed prize; the config's
           agents must already be identical
    sym1   symmetric contest built from agent 1's prior (n copies)
    sym2   symmetric contest built from agent 2's prior
    fixn   alias of sym1 with an explicit agent count, used for
           diminishing-returns sweeps

Fixed-prize variants require a type-independent payment p(b) and the
identity value scale (prize worth v * Z); anything else is rejected
rather than silently projected.
"""

from __future__ import annotations

from .benchmarks import (
    MechanismError,
    fix_profit,
    fix_strategies,
    optimal_fixed_prize,
    sym_profit,
    sym_strategy,
)
from .config import DEFAULT_NUMERICS, NumericsSettings
from .model import ContestSpec, PrizeSchedule
from .optimal import build_opt_prize, build_opt_strategies, opt_profit
from .verify import EquilibriumProfile

__all__ = ["MECHANISMS", "solve_profile", "mechanism_profit", "best_fixed_prize"]

MECHANISMS = ("opt", "fix", "sym", "sym1", "sym2", "fixn")


def _fixed_prize_spec(spec: ContestSpec, mechanism: str, n: int | None) -> ContestSpec:
    if spec.value_scale.gamma != 1.0:
        raise MechanismError(
            f"{mechanism} requires the identity value scale (gamma=1); "
            f"got gamma={spec.value_scale.gamma}"
        )
    if mechanism == "fix":
        if spec.n != 2:
            raise MechanismError(f"fix requires exactly 2 agents, got n={spec.n}")
        if n is not None and n != 2:
            raise MechanismError("fix does not take an agent-count override")
        return spec
    if mechanism == "sym":
        if any(a != spec.agents[0] for a in spec.agents[1:]):
            raise MechanismError(
                "sym requires identical agents; use sym1/sym2 to symmetrize "
                "an asymmetric config on one agent's prior"
            )
        return spec.symmetrized(0, n)
    if mechanism == "sym1":
        return spec.symmetrized(0, n)
    if mechanism == "sym2":
        return spec.symmetrized(1, n)
    if mechanism == "fixn":
        return spec.symmetrized(0, n)
    raise MechanismError(f"unknown mechanism {mechanism!r}")


def solve_profile(spec: ContestSpec, mechanism: str, prize: float = 1.0,
                  n: int | None = None,
                  settings: NumericsSettings = DEFAULT_NUMERICS) -> EquilibriumProfile:
    """Equilibrium strategies and prize schedules for a named mechanism."""
    if mechanism == "opt":
        strategies = build_opt_strategies(spec, settings)
        prizes = tuple(build_opt_prize(spec, i, strategies, settings) for i in range(spec.n))
        return EquilibriumProfile(
            agents=spec.agents, payment=spec.payment, value_scale=spec.value_scale,
            lam=spec.lam, strategies=strategies, prizes=prizes, label="opt",
        )

    eff = _fixed_prize_spec(spec, mechanism, n)
    if mechanism == "fix":
        b1, b2 = fix_strategies(eff.agents[0], eff.agents[1], eff.payment, prize, settings)
        strategies = (b1, b2)
    else:
        s = sym_strategy(eff.n, eff.agents[0], eff.payment, prize, settings)
        strategies = (s,) * eff.n
    top = max(s.max_bid for s in strategies)
    prizes = tuple(PrizeSchedule.constant(prize, top) for _ in range(eff.n))
    return EquilibriumProfile(
        agents=eff.agents, payment=eff.payment, value_scale=eff.value_scale,
        lam=eff.lam, strategies=strategies, prizes=prizes, label=mechanism,
    )


def mechanism_profit(spec: ContestSpec, mechanism: str, prize: float = 1.0,
                     n: int | None = None,
                     settings: NumericsSettings = DEFAULT_NUMERICS) -> float:
    """Principal's expected profit under a named mechanism."""
    if mechanism == "opt":
        if n is not None:
            spec = spec.symmetrized(0, n)
        return opt_profit(spec, settings).total
    eff = _fixed_prize_spec(spec, mechanism, n)
    if mechanism == "fix":
        return fix_profit(eff.agents[0], eff.agents[1], eff.payment, prize, eff.lam, settings)
    return sym_profit(eff.n, eff.agents[0], eff.payment, prize, eff.lam, settings)


def best_fixed_prize(spec: ContestSpec, mechanism: str, n: int | None = None,
                     settings: NumericsSettings = DEFAULT_NUMERICS) -> tuple[float, float]:
    """(Z*, profit*) maximizing the fixed prize for a benchmark mechanism."""
    eff = _fixed_prize_spec(spec, mechanism, n)
    kind = "fix" if mechanism == "fix" else "sym"
    return optimal_fixed_prize(kind, eff.agents, eff.payment, eff.lam,
                               n=eff.n, settings=settings)
