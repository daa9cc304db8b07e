"""Fixed-prize comparison mechanisms.

Three canonical auctions serve as baselines for the variable-prize
mechanism:

* FIX:  two asymmetric agents competing for one fixed prize Z.  The
  equilibrium couples the agents through a link function k(v) solving
  k'(v) = k F1'(v) / (v F2'(k)) backward from k(v_top) = v_top; agent 1
  bids p^{-1}(Z * integral of k dF1) and agent 2 plays b1 composed with
  the inverse link.
* SYM:  n symmetric agents, fixed prize.  The envelope form gives
  b(v) = p^{-1}(Z * (v F^{n-1}(v) - integral of F^{n-1})).
* FIX-n: SYM instantiated with n copies of a reference agent, used for
  diminishing-returns comparisons against the optimal mechanism.

These results hold for a type-independent payment p(b) and a prize worth
v * Z to a type-v agent, so the module rejects type-dependent payments
rather than silently projecting them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .config import DEFAULT_NUMERICS, NumericsSettings
from .model import (
    MonomialPayment,
    PaymentFunction,
    Strategy,
    TypeDistribution,
    _solve_increasing,
)
from .numerics import (
    Interval,
    MonotonicityError,
    Tolerance,
    cumulative_gauss5,
    integrate,
    monotone_hermite,
    solve_ode_backward,
)

__all__ = [
    "MechanismError",
    "OptimizerError",
    "LinkFunction",
    "solve_fix_link",
    "fix_strategies",
    "sym_strategy",
    "fix_profit",
    "sym_profit",
    "fixed_prize_profit",
    "optimal_fixed_prize",
]


class MechanismError(ValueError):
    """The requested benchmark does not apply to the given contest."""


class OptimizerError(RuntimeError):
    """Prize optimization could not bracket a maximum."""


class LinkFunction:
    """The type correspondence k between the two agents in FIX.

    Strictly increasing with k(v_top) = v_top.  `lower_hit` is the agent-1
    type at which k reaches the bottom of the support; below it agent 1
    bids zero (for the built-in case study it is effectively the bottom
    itself).  Interpolation runs in t = log(v) with the ODE's own slopes,
    matching how the table was generated.
    """

    def __init__(self, v_nodes: np.ndarray, k_nodes: np.ndarray, dkdt_nodes: np.ndarray,
                 support: Interval):
        v_nodes = np.asarray(v_nodes, dtype=float)
        k_nodes = np.asarray(k_nodes, dtype=float)
        if np.any(np.diff(v_nodes) <= 0.0) or np.any(np.diff(k_nodes) <= 0.0):
            raise MonotonicityError("link table must be strictly increasing")
        self.v_nodes = v_nodes
        self.k_nodes = k_nodes
        self.support = support
        self.t_nodes = np.log(v_nodes)
        self._interp = monotone_hermite(self.t_nodes, k_nodes, dkdt_nodes)

    @property
    def lower_hit(self) -> float:
        return float(self.v_nodes[0])

    def forward(self, v):
        v_arr = np.clip(np.asarray(v, dtype=float), self.v_nodes[0], self.v_nodes[-1])
        out = np.asarray(self._interp(np.log(v_arr)), dtype=float)
        return out if np.asarray(v).ndim else float(out)

    def inverse(self, y):
        return _solve_increasing(self.forward, self.v_nodes, self.k_nodes, y)


def _require_fixed_payment(payment: PaymentFunction) -> MonomialPayment:
    if payment.type_dependent or not isinstance(payment, MonomialPayment):
        raise MechanismError(
            "fixed-prize benchmarks require a type-independent payment p(b) "
            "(monomial with d = 0)"
        )
    return payment


def solve_fix_link(F1: TypeDistribution, F2: TypeDistribution,
                   settings: NumericsSettings = DEFAULT_NUMERICS) -> LinkFunction:
    """Solve the FIX link ODE backward from the top of the support.

    Starts one small offset below the top (the right-hand side can be
    0/0-adjacent at the boundary) and pins the boundary value exactly
    afterward.  The backward sweep runs in t = log(v): the ODE carries a
    1/v factor, so log spacing keeps the fixed-step kernel accurate down
    to the bottom of the support where linear steps could not resolve the
    solution.  Integration truncates if k reaches the bottom of the
    support in the interior; the truncation point is where agent 1 stops
    bidding.  A vanishing opponent density on the path surfaces as an
    IntegrationError from the ODE kernel, reporting the location.
    """
    if F1.support != F2.support:
        raise MechanismError(f"agents must share a support, got {F1.support} vs {F2.support}")
    lo, hi = F1.support.lo, F1.support.hi
    width = hi - lo
    eps = 1e-8 * width
    dens_floor = lo + 1e-12 * width

    def rhs_t(t: float, k: float) -> float:
        # dk/dt for t = log(v); dv = v dt cancels the 1/v in the ODE.
        v = math.exp(t)
        kk = min(max(k, dens_floor), hi)
        return k * float(F1.density(v)) / float(F2.density(kk))

    f2_top = float(F2.density(hi))
    slope_top = float(F1.density(hi)) / f2_top if f2_top > 0.0 else 1.0
    k_start = hi - eps * slope_top

    table = solve_ode_backward(
        rhs_t,
        v_end=math.log(hi - eps),
        k_end=k_start,
        v_start=math.log(lo + eps),
        steps=settings.steps,
        stop_when=lambda t, k: not (k > lo),
    )
    # When k hits the bottom of the support in the interior, the step
    # straddling the hit can leave one corrupted row before the stop
    # triggers; keep only the strictly increasing tail.
    t_raw, k_raw = table.v, table.k
    start = 0
    for j in range(k_raw.size - 1, 0, -1):
        if k_raw[j - 1] >= k_raw[j] or not k_raw[j - 1] > lo:
            start = j
            break
    t_raw, k_raw = t_raw[start:], k_raw[start:]
    v_nodes = np.append(np.exp(t_raw), hi)
    k_nodes = np.append(k_raw, hi)
    dkdt = np.array([rhs_t(t, k) for t, k in zip(t_raw, k_raw)]
                    + [hi * float(F1.density(hi)) / f2_top if f2_top > 0.0 else 0.0])
    return LinkFunction(v_nodes, k_nodes, dkdt, F1.support)


@dataclass(frozen=True)
class _FixSolution:
    b1: Strategy
    b2: Strategy
    link: LinkFunction


def _solve_fix(F1: TypeDistribution, F2: TypeDistribution, payment: MonomialPayment,
               prize: float, settings: NumericsSettings,
               link: LinkFunction | None = None) -> _FixSolution:
    if prize <= 0.0:
        raise MechanismError(f"prize must be positive, got {prize}")
    link = link if link is not None else solve_fix_link(F1, F2, settings)
    lo, hi = F1.support.lo, F1.support.hi

    # Cumulative integral of k dF1 from the point where agent 1 starts
    # bidding; below it the schedule is identically zero.  Accumulated in
    # t = log(v) on the link's own grid, with exact integrand slopes.
    def c_rate(t: float) -> float:
        v = math.exp(t)
        return float(link.forward(v)) * float(F1.density(v)) * v

    c_nodes = cumulative_gauss5(c_rate, link.t_nodes)
    c_interp = monotone_hermite(link.t_nodes, c_nodes,
                                [c_rate(t) for t in link.t_nodes])
    start = link.lower_hit

    def b1_fn(v):
        v_arr = np.asarray(v, dtype=float)
        t = np.log(np.clip(v_arr, start, hi))
        c = np.where(v_arr <= start, 0.0, np.clip(c_interp(t), 0.0, None))
        return payment.invert(prize * c)

    def b2_fn(v):
        return b1_fn(link.inverse(v))

    zero1 = start if start > lo + 2e-8 * (hi - lo) else lo
    b1 = Strategy.from_callable(b1_fn, F1.support, zero_below=zero1)
    # Agent 2's schedule is positive above the bottom type, but when the
    # link hugs the bottom of the support the lowest tabulation nodes can
    # round to zero; treat those as the no-effort head.
    b2 = _strategy_with_underflow_head(b2_fn, F2)
    return _FixSolution(b1=b1, b2=b2, link=link)


def _strategy_with_underflow_head(b_fn, F: TypeDistribution) -> Strategy:
    from .model import TYPE_GRID_SIZE

    v = np.linspace(F.support.lo, F.support.hi, TYPE_GRID_SIZE)
    b = np.asarray(b_fn(v), dtype=float)
    flat = np.nonzero(b <= 0.0)[0]
    zero_below = float(v[flat[-1]]) if flat.size else None
    head = v[0] if zero_below is None else zero_below
    return Strategy(v, np.where(v <= head, 0.0, b), b_fn, zero_below=zero_below)


def fix_strategies(F1: TypeDistribution, F2: TypeDistribution, payment: PaymentFunction,
                   prize: float = 1.0,
                   settings: NumericsSettings = DEFAULT_NUMERICS) -> tuple[Strategy, Strategy]:
    """Equilibrium schedules of the two-agent fixed-prize contest.

    Both schedules share the top bid b1(v_top) = b2(v_top) by
    construction (common equilibrium support).
    """
    pay = _require_fixed_payment(payment)
    sol = _solve_fix(F1, F2, pay, prize, settings)
    return sol.b1, sol.b2


def _sym_effort_fn(n: int, F: TypeDistribution, pay: MonomialPayment, prize: float):
    """v -> effort callable from the symmetric envelope condition."""

    def b_fn(v):
        v_arr = np.asarray(v, dtype=float)
        env = (v_arr * np.asarray(F.cdf(v_arr), dtype=float) ** (n - 1)
               - np.asarray(F.cdf_power_integral(v_arr, n - 1), dtype=float))
        return pay.invert(prize * np.clip(env, 0.0, None))

    return b_fn


def _check_sym_args(n: int, F: TypeDistribution, payment: PaymentFunction,
                    prize: float) -> MonomialPayment:
    pay = _require_fixed_payment(payment)
    if n < 2:
        raise MechanismError(f"need at least 2 agents, got n={n}")
    if prize <= 0.0:
        raise MechanismError(f"prize must be positive, got {prize}")
    if F.atom > 0.0 and F.support.lo > 0.0:
        raise MechanismError(
            "symmetric benchmark with an atom requires the support to start at 0 "
            "(otherwise the bottom type would bid a positive amount and ties "
            "would have positive probability)"
        )
    return pay


def sym_strategy(n: int, F: TypeDistribution, payment: PaymentFunction,
                 prize: float = 1.0,
                 settings: NumericsSettings = DEFAULT_NUMERICS) -> Strategy:
    """Symmetric equilibrium schedule of the n-agent fixed-prize contest.

    For very large n the schedule v^(n/2)-like values underflow to zero
    over most of the support; the tabulation treats that region as the
    no-effort segment.
    """
    pay = _check_sym_args(n, F, payment, prize)
    return _strategy_with_underflow_head(_sym_effort_fn(n, F, pay, prize), F)


def fix_profit(F1: TypeDistribution, F2: TypeDistribution, payment: PaymentFunction,
               prize: float, lam: float,
               settings: NumericsSettings = DEFAULT_NUMERICS,
               link: LinkFunction | None = None) -> float:
    """Expected total effort minus lam * Z in the FIX contest.

    Atoms at the bottom type contribute no effort: the bottom type bids
    zero there, which nullifies the atom in the revenue integral.
    """
    pay = _require_fixed_payment(payment)
    sol = _solve_fix(F1, F2, pay, prize, settings, link=link)
    tol = Tolerance(abs_tol=settings.abs_tol, rel_tol=settings.rel_tol)
    support = F1.support
    rev1 = integrate(lambda v: float(sol.b1.forward(v)) * float(F1.density(v)), support, tol)
    rev2 = integrate(lambda v: float(sol.b2.forward(v)) * float(F2.density(v)), support, tol)
    return rev1 + rev2 - lam * prize


def sym_profit(n: int, F: TypeDistribution, payment: PaymentFunction,
               prize: float, lam: float,
               settings: NumericsSettings = DEFAULT_NUMERICS) -> float:
    """Expected total effort minus lam * Z in the n-agent SYM contest.

    Integrates the envelope-form schedule directly (no tabulation).  The
    integrand carries an F^(n-1) factor whose mass collapses toward the
    top of the support as n grows, so the domain is pre-split into dyadic
    panels refined toward the top; a single adaptive pass would never
    sample the spike for large n.
    """
    pay = _check_sym_args(n, F, payment, prize)
    b_fn = _sym_effort_fn(n, F, pay, prize)
    lo, hi = F.support.lo, F.support.hi
    levels = max(4, math.ceil(math.log2(max(n, 2))) + 8)
    edges = [lo] + [hi - (hi - lo) * 0.5 ** j for j in range(1, levels + 1)] + [hi]
    tol = Tolerance(abs_tol=settings.abs_tol / (levels + 1), rel_tol=settings.rel_tol)
    rev = sum(
        integrate(lambda v: float(b_fn(v)) * float(F.density(v)), Interval(a, b), tol)
        for a, b in zip(edges[:-1], edges[1:])
    )
    return n * rev - lam * prize


def fixed_prize_profit(mechanism: str, agents: tuple[TypeDistribution, ...],
                       payment: PaymentFunction, prize: float, lam: float,
                       n: int | None = None,
                       settings: NumericsSettings = DEFAULT_NUMERICS) -> float:
    """Profit of one of the fixed-prize mechanisms: "fix", "sym", "fixn".

    "fix" needs exactly two agents; "sym" and "fixn" use agents[0]'s
    distribution replicated n times (n defaults to len(agents)).
    """
    if mechanism == "fix":
        if len(agents) != 2:
            raise MechanismError(f"fix requires exactly 2 agents, got {len(agents)}")
        return fix_profit(agents[0], agents[1], payment, prize, lam, settings)
    if mechanism in ("sym", "fixn"):
        count = n if n is not None else len(agents)
        return sym_profit(count, agents[0], payment, prize, lam, settings)
    raise MechanismError(f"unknown fixed-prize mechanism {mechanism!r}")


def _golden_max(f: Callable[[float], float], lo: float, hi: float,
                rel_tol: float = 1e-9) -> tuple[float, float]:
    """Golden-section maximization of a unimodal f on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > rel_tol * max(1.0, abs(a), abs(b)):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def optimal_fixed_prize(mechanism: str, agents: tuple[TypeDistribution, ...],
                        payment: PaymentFunction, lam: float,
                        n: int | None = None,
                        settings: NumericsSettings = DEFAULT_NUMERICS) -> tuple[float, float]:
    """Profit-maximizing fixed prize Z* and its profit for a benchmark.

    Revenue grows sublinearly in Z for a convex effort cost, so the
    profit is unimodal: it rises from 0, peaks, and decays to -inf.  The
    upper bracket expands geometrically until profit turns negative; a
    failure to bracket raises OptimizerError.
    """
    _require_fixed_payment(payment)
    link = None
    if mechanism == "fix":
        if len(agents) != 2:
            raise MechanismError(f"fix requires exactly 2 agents, got {len(agents)}")
        link = solve_fix_link(agents[0], agents[1], settings)

        def profit(z: float) -> float:
            return fix_profit(agents[0], agents[1], payment, z, lam, settings, link=link)
    elif mechanism in ("sym", "fixn"):
        count = n if n is not None else len(agents)

        def profit(z: float) -> float:
            return sym_profit(count, agents[0], payment, z, lam, settings)
    else:
        raise MechanismError(f"unknown fixed-prize mechanism {mechanism!r}")

    hi = 1.0
    for _ in range(200):
        if profit(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise OptimizerError("could not bracket the optimal prize: profit never turns negative")
    z_star, pi_star = _golden_max(profit, 0.0, hi)
    if pi_star < profit(0.5 * z_star) or pi_star < 0.0:
        raise OptimizerError("profit is not unimodal in the prize on the bracket")
    return z_star, pi_star
