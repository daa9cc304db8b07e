"""The optimal variable-prize mechanism.

Computes, for any valid contest: per-agent optimal effort schedules, the
profit-maximizing prize schedule tuple, the expected prize cost, and the
principal's maximized profit.

Key structure, for agent i with prior F_i, hazard complement
H_i = (1 - F_i)/f_i and normalized payment phat = p/h:

* optimal effort b_i(v) solves, in b,

      phat_b(b, v) = 1/h(lam) + phat_bv(b, v) * H_i(v)

  which involves no opponent prior at all.  That independence is the
  strategy-autonomy property: swapping any opponent's distribution leaves
  the schedule bit-identical (see verify.check_sa).

* the prize that supports these efforts as an equilibrium is

      Z_i(b) = [phat(b, v_i(b)) - J_i(v_i(b))] / prod_{j != i} F_j(v_j(b))

  where v_i is the inverse schedule and J_i(v) is the cumulative integral
  of phat_v(b_i(u), u) du from the bottom type up to v.

* the maximized profit integrates, against each dF_i,

      b_i(v) - h(lam) * phat(b_i, v) + h(lam) * phat_v(b_i, v) * H_i(v).

A probability atom at the lowest type never contributes: the lowest type
exerts zero effort and p(0, v) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from .config import DEFAULT_NUMERICS, NumericsSettings
from .model import (
    ContestSpec,
    NormalizedPayment,
    PrizeSchedule,
    Strategy,
    TYPE_GRID_SIZE,
    normalized_payment,
)
from .numerics import (
    Interval,
    Tolerance,
    cumulative_gauss5,
    find_root,
    integrate,
    monotone_hermite,
)

__all__ = [
    "SolverError",
    "solve_opt_effort",
    "build_opt_strategy",
    "build_opt_strategies",
    "build_opt_prize",
    "opt_profit",
    "OptProfit",
    "expected_prize_cost",
    "total_expected_effort",
    "PRIZE_DOMAIN_FLOOR",
]

# The prize schedule's tabulated domain starts at max_bid * this factor:
# a winner with b -> 0 has vanishing win probability and Z(0) is not
# defined by the mechanism.
PRIZE_DOMAIN_FLOOR = 1e-6

# Bracket expansion cap for the effort first-order condition.  Hitting it
# signals a payment family that violates the convexity assumptions.
_BRACKET_CAP = 2.0 ** 96

_ROOT_TOL = Tolerance(abs_tol=1e-300, rel_tol=4.0 * np.finfo(float).eps, max_iter=200)


class SolverError(RuntimeError):
    """An equilibrium solve failed (bracket expansion exhausted, ...)."""


def _foc(phat: NormalizedPayment, inv_h_lam: float, hazard: float, v: float):
    """Residual of the optimal-effort first-order condition at type v."""

    def g(b: float) -> float:
        return float(phat.p_b(b, v)) - inv_h_lam - float(phat.p_bv(b, v)) * hazard

    return g


def solve_opt_effort(spec: ContestSpec, i: int, v: float,
                     settings: NumericsSettings = DEFAULT_NUMERICS) -> float:
    """Optimal effort of agent i at type v.

    The root in b is unique (the decoupled profit integrand is strictly
    concave in b), so a bracket expanded geometrically from [0, 1] until
    the residual changes sign is enough.  Types at the lower support
    endpoint exert no effort by construction.
    """
    lo = spec.support.lo
    if v <= lo:
        return 0.0
    if v > spec.support.hi:
        raise ValueError(f"type {v} outside support {spec.support}")
    phat = normalized_payment(spec)
    hazard = spec.agents[i].hazard_complement(v)
    g = _foc(phat, 1.0 / float(spec.value_scale.h(spec.lam)), hazard, v)
    hi = 1.0
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise SolverError(
                f"effort bracket expansion exceeded {_BRACKET_CAP:g} for agent {i} at v={v}; "
                "the payment family likely violates the convexity assumptions"
            )
    return find_root(g, Interval(0.0, hi), _ROOT_TOL)


def build_opt_strategy(spec: ContestSpec, i: int,
                       settings: NumericsSettings = DEFAULT_NUMERICS,
                       grid_size: int = TYPE_GRID_SIZE) -> Strategy:
    """Tabulate agent i's optimal effort schedule over the type grid."""
    lo, hi = spec.support.lo, spec.support.hi
    v_nodes = np.linspace(lo, hi, grid_size)
    b_nodes = np.empty_like(v_nodes)
    b_nodes[0] = 0.0
    for k in range(1, v_nodes.size):
        b_nodes[k] = solve_opt_effort(spec, i, float(v_nodes[k]), settings)
    return Strategy.from_table(v_nodes, b_nodes)


def build_opt_strategies(spec: ContestSpec,
                         settings: NumericsSettings = DEFAULT_NUMERICS) -> tuple[Strategy, ...]:
    """Optimal schedules for every agent, reusing identical solves.

    Agents with the same prior object share one tabulation (their
    first-order conditions are identical term by term).
    """
    cache: dict[int, Strategy] = {}
    out = []
    for i, agent in enumerate(spec.agents):
        key = id(agent)
        if key not in cache:
            cache[key] = build_opt_strategy(spec, i, settings)
        out.append(cache[key])
    return tuple(out)


def _envelope_integral(spec: ContestSpec, i: int, strategy: Strategy,
                       settings: NumericsSettings):
    """J_i(v): cumulative integral of phat_v(b_i(u), u) from the bottom type.

    Evaluated with per-cell Gauss nodes where the effort is re-solved
    exactly (no interpolation error enters the prize numerator), then
    interpolated with the integrand itself as the exact slope.
    """
    phat = normalized_payment(spec)

    def integrand(u: float) -> float:
        return float(phat.p_v(solve_opt_effort(spec, i, u, settings), u))

    nodes = strategy.v_nodes
    j_nodes = cumulative_gauss5(integrand, nodes)
    slopes = np.empty_like(j_nodes)
    slopes[0] = 0.0  # b(lo)^a dominates the v-power: the integrand vanishes
    slopes[1:] = np.asarray(phat.p_v(strategy.b_nodes[1:], nodes[1:]), dtype=float)
    return monotone_hermite(nodes, j_nodes, slopes)


def build_opt_prize(spec: ContestSpec, i: int, strategies: tuple[Strategy, ...],
                    settings: NumericsSettings = DEFAULT_NUMERICS) -> PrizeSchedule:
    """Prize schedule Z_i supporting the optimal efforts as an equilibrium.

    The numerator integral is taken over types (change of variables
    through the schedule); the denominator multiplies the opponents'
    c.d.f. values at the types that map to the same effort.  The schedule
    evaluates anywhere in (0, max_bid] and extends above max_bid by
    formula continuation (inverse types clamp at the top), which is what
    the deviation checks need.
    """
    phat = normalized_payment(spec)
    strategy = strategies[i]
    j_interp = _envelope_integral(spec, i, strategy, settings)
    others = [(j, spec.agents[j]) for j in range(spec.n) if j != i]

    def fn(b):
        b_arr = np.asarray(b, dtype=float)
        vi = np.asarray(strategy.inverse(b_arr), dtype=float)
        num = np.asarray(phat.p(b_arr, vi), dtype=float) - j_interp(vi)
        den = np.ones_like(b_arr)
        for j, dist in others:
            den = den * np.asarray(dist.cdf(strategies[j].inverse(b_arr)), dtype=float)
        return num / den

    b_top = strategy.max_bid
    b_min = b_top * PRIZE_DOMAIN_FLOOR
    b_grid = strategy.forward(strategy.v_nodes)
    b_nodes = np.concatenate([b_grid[b_grid >= b_min], [b_top]])
    b_nodes = np.unique(b_nodes)
    return PrizeSchedule(fn, b_nodes, fn(b_nodes), b_min, b_top)


@dataclass(frozen=True)
class OptProfit:
    total: float
    per_agent: tuple[float, ...]


def _profit_integrand(spec: ContestSpec, i: int, settings: NumericsSettings):
    phat = normalized_payment(spec)
    h_lam = float(spec.value_scale.h(spec.lam))
    dist = spec.agents[i]

    def integrand(v: float) -> float:
        b = solve_opt_effort(spec, i, v, settings)
        val = (b - h_lam * float(phat.p(b, v))
               + h_lam * float(phat.p_v(b, v)) * dist.hazard_complement(v))
        return val * float(dist.density(v))

    return integrand


def opt_profit(spec: ContestSpec, settings: NumericsSettings = DEFAULT_NUMERICS) -> OptProfit:
    """Principal's maximized profit and its per-agent decomposition.

    Integrates the continuous part of each dF_i over the open support;
    an atom at the bottom type adds w * integrand(lo) with b(lo) = 0,
    which vanishes because p(0, v) = 0.
    """
    tol = Tolerance(abs_tol=settings.abs_tol, rel_tol=settings.rel_tol)
    per = []
    for i in range(spec.n):
        contrib = integrate(_profit_integrand(spec, i, settings), spec.support, tol)
        per.append(contrib)  # atom term is identically zero
    return OptProfit(total=float(sum(per)), per_agent=tuple(per))


def total_expected_effort(spec: ContestSpec, strategies: tuple[Strategy, ...],
                          settings: NumericsSettings = DEFAULT_NUMERICS) -> float:
    """Expected sum of efforts under the given schedules (the revenue)."""
    tol = Tolerance(abs_tol=settings.abs_tol, rel_tol=settings.rel_tol)
    total = 0.0
    for i, dist in enumerate(spec.agents):
        total += integrate(
            lambda v, s=strategies[i], d=dist: float(s.forward(v)) * float(d.density(v)),
            spec.support, tol,
        )
    return total


def expected_prize_cost(spec: ContestSpec, strategies: tuple[Strategy, ...],
                        prizes: tuple[PrizeSchedule, ...],
                        settings: NumericsSettings = DEFAULT_NUMERICS) -> float:
    """h(lam) times the expected awarded prize, by total expectation.

    Sums, per agent, the integral of Z_i(b_i(v)) times the probability of
    winning with that effort, against dF_i.  Must satisfy
    revenue - cost = opt_profit for the optimal schedules.
    """
    tol = Tolerance(abs_tol=settings.abs_tol, rel_tol=settings.rel_tol)
    h_lam = float(spec.value_scale.h(spec.lam))

    def win_prob(i: int, b: float) -> float:
        q = 1.0
        for j in range(spec.n):
            if j != i:
                q *= float(spec.agents[j].cdf(strategies[j].inverse(b)))
        return q

    total = 0.0
    for i, dist in enumerate(spec.agents):
        def integrand(v: float, i=i, dist=dist) -> float:
            b = float(strategies[i].forward(v))
            if b <= 0.0:
                return 0.0
            return float(prizes[i](b)) * win_prob(i, b) * float(dist.density(v))

        total += integrate(integrand, spec.support, tol)
        # Atom term: Z_i * win probability at b -> 0 equals the envelope
        # numerator at the bottom type, which is 0 since p(0, v) = 0.
    return h_lam * total
