"""Independent numerical verification of claimed equilibria.

None of these checks reuse the solvers' internal identities: utilities
are rebuilt from first principles (win probability = product of opponent
c.d.f. values at the types whose bids match; utility = value times prize
times win probability minus payment), so a bug in a solver cannot
certify itself.

Checks
------
* best-response deviation search over a type x bid grid,
* individual rationality (nonnegative utility, strictly positive for
  positive effort),
* strategy autonomy (the optimal schedule is bit-identical under any
  replacement of opponent priors; the fixed-prize benchmark shifts, which
  is reported as the expected contrast),
* monotonicity of every schedule,
* a seeded Monte Carlo campaign cross-checking analytic profits.

Tie conventions: a bid of exactly zero never wins (losses against atoms
of zero-bidders), while any positive bid beats all zero bids; ties at
positive bids have probability zero against continuous strategies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_NUMERICS, NumericsSettings
from .model import (
    ContestSpec,
    PaymentFunction,
    PrizeSchedule,
    Strategy,
    TypeDistribution,
    ValueScale,
)
from .optimal import build_opt_strategy

__all__ = [
    "EquilibriumProfile",
    "DeviationReport",
    "IRReport",
    "SAReport",
    "MonotonicityReport",
    "MCResult",
    "VerificationReport",
    "win_probability",
    "expected_utility",
    "equilibrium_utilities",
    "best_response_check",
    "check_ir",
    "check_sa",
    "check_monotonicity",
    "monte_carlo_campaign",
    "perturb_profile",
    "verify_equilibrium",
    "default_type_grid",
    "default_bid_grid",
]

# Deviation bids range up to this multiple of the top equilibrium bid.
# Overbidding beyond every opponent already wins with probability 1, so
# higher deviations are strictly dominated and need no scanning.
BID_CAP_FACTOR = 1.5


@dataclass(frozen=True)
class EquilibriumProfile:
    """A claimed equilibrium: schedules plus supporting prize schedules."""

    agents: tuple[TypeDistribution, ...]
    payment: PaymentFunction
    value_scale: ValueScale
    lam: float
    strategies: tuple[Strategy, ...]
    prizes: tuple[PrizeSchedule, ...]
    label: str = ""

    def __post_init__(self):
        if not (len(self.agents) == len(self.strategies) == len(self.prizes)):
            raise ValueError("agents, strategies and prizes must have equal length")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def max_bid(self) -> float:
        return max(s.max_bid for s in self.strategies)

    def spec(self) -> ContestSpec:
        return ContestSpec(agents=self.agents, payment=self.payment,
                           value_scale=self.value_scale, lam=self.lam)


def win_probability(profile: EquilibriumProfile, i: int, b):
    """Probability that agent i wins when bidding b against the profile.

    Product over opponents j of F_j evaluated at the type bidding b.
    Bids above an opponent's top bid contribute a factor 1; a bid of
    exactly zero loses outright (ties at zero go against the deviator).
    Atom mass at the bottom counts for any positive bid: as b -> 0+ the
    win probability tends to the product of opponent atom masses.
    """
    b_arr = np.asarray(b, dtype=float)
    q = np.ones_like(b_arr)
    for j in range(profile.n):
        if j == i:
            continue
        vj = profile.strategies[j].inverse(b_arr)
        q = q * np.asarray(profile.agents[j].cdf(vj), dtype=float)
    q = np.where(b_arr <= 0.0, 0.0, q)
    return q if np.asarray(b).ndim else float(q)


def expected_utility(profile: EquilibriumProfile, i: int, v, b):
    """Expected payoff of agent i of type v bidding b against the profile.

    h(v) * Z_i(b) * win probability - payment; zero at b = 0 since a zero
    bid never wins and costs nothing.  Broadcasts over v and b.
    """
    v_arr = np.asarray(v, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    zq = np.where(b_arr <= 0.0, 0.0,
                  np.asarray(profile.prizes[i](np.maximum(b_arr, 0.0)), dtype=float)
                  * np.asarray(win_probability(profile, i, b_arr), dtype=float))
    h = np.asarray(profile.value_scale.h(v_arr), dtype=float)
    pay = np.asarray(profile.payment.p(b_arr, v_arr), dtype=float)
    u = h * zq - pay
    return u if (np.asarray(v).ndim or np.asarray(b).ndim) else float(u)


def equilibrium_utilities(profile: EquilibriumProfile, i: int, type_grid):
    """Utility along the equilibrium path for agent i on a type grid."""
    v = np.asarray(type_grid, dtype=float)
    b_star = np.asarray(profile.strategies[i].forward(v), dtype=float)
    return expected_utility(profile, i, v, b_star)


def default_type_grid(profile: EquilibriumProfile, points: int = 101) -> np.ndarray:
    s = profile.agents[0].support
    return np.linspace(s.lo, s.hi, points)


def default_bid_grid(profile: EquilibriumProfile, points: int = 2001) -> np.ndarray:
    return np.linspace(0.0, BID_CAP_FACTOR * profile.max_bid, points)


@dataclass(frozen=True)
class DeviationReport:
    """Result of the grid best-response search.

    max_gain is the largest utility improvement any agent/type finds on
    the bid grid over the claimed equilibrium bid (positive means a
    profitable deviation was found).  discretization_gap measures how far
    the grid's best response falls short of the claimed optimum; it
    shrinks quadratically as the grids refine and is the yardstick the
    refinement study tracks.
    """

    max_gain: float
    worst: tuple[int, float, float]
    discretization_gap: float
    per_agent_gain: tuple[float, ...]
    tol: float
    type_points: int
    bid_points: int

    @property
    def passed(self) -> bool:
        return self.max_gain <= self.tol


def best_response_check(profile: EquilibriumProfile, type_grid=None, bid_grid=None,
                        tol: float = 1e-3) -> DeviationReport:
    """Search a type x bid grid for profitable unilateral deviations."""
    v = default_type_grid(profile) if type_grid is None else np.asarray(type_grid, float)
    bids = default_bid_grid(profile) if bid_grid is None else np.asarray(bid_grid, float)

    max_gain = -math.inf
    worst = (0, math.nan, math.nan)
    gap = 0.0
    per_agent = []
    for i in range(profile.n):
        zq = np.where(bids <= 0.0, 0.0,
                      np.asarray(profile.prizes[i](np.maximum(bids, 1e-300)), float)
                      * win_probability(profile, i, bids))
        h = np.asarray(profile.value_scale.h(v), float)
        u_grid = h[:, None] * zq[None, :] - np.asarray(
            profile.payment.p(bids[None, :], np.maximum(v, 1e-300)[:, None]), float)
        u_grid = np.where((bids[None, :] <= 0.0), 0.0, u_grid)
        best_idx = np.argmax(u_grid, axis=1)
        u_best = u_grid[np.arange(v.size), best_idx]
        u_star = equilibrium_utilities(profile, i, v)
        gains = u_best - u_star
        k = int(np.argmax(gains))
        per_agent.append(float(gains[k]))
        if gains[k] > max_gain:
            max_gain = float(gains[k])
            worst = (i, float(v[k]), float(bids[best_idx[k]]))
        gap = max(gap, float(np.max(u_star - u_best)))
    return DeviationReport(
        max_gain=max_gain,
        worst=worst,
        discretization_gap=gap,
        per_agent_gain=tuple(per_agent),
        tol=tol,
        type_points=int(v.size),
        bid_points=int(bids.size),
    )


@dataclass(frozen=True)
class IRReport:
    """Participation check: utilities along the equilibrium path."""

    min_utility: float
    min_at: tuple[int, float]
    strict_violations: int  # types with positive effort but u <= 0
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.min_utility >= -self.tol and self.strict_violations == 0


def check_ir(profile: EquilibriumProfile, type_grid=None, tol: float = 1e-9) -> IRReport:
    """Every type must weakly gain from participating; strictly so when
    it exerts positive effort."""
    v = default_type_grid(profile) if type_grid is None else np.asarray(type_grid, float)
    min_u, min_at = math.inf, (0, math.nan)
    strict = 0
    for i in range(profile.n):
        u = np.atleast_1d(equilibrium_utilities(profile, i, v))
        b = np.atleast_1d(profile.strategies[i].forward(v))
        k = int(np.argmin(u))
        if u[k] < min_u:
            min_u, min_at = float(u[k]), (i, float(v[k]))
        strict += int(np.sum((b > 0.0) & (u <= 0.0)))
    return IRReport(min_utility=min_u, min_at=min_at, strict_violations=strict, tol=tol)


@dataclass(frozen=True)
class SAReport:
    """Strategy-autonomy check for one agent of the optimal mechanism.

    max_diff is the largest pointwise change of the agent's optimal
    schedule across opponent replacements (0 up to solver determinism).
    fix_contrast reports how much the fixed-prize benchmark's schedule
    moves under the same replacement: expected to be materially nonzero,
    it is informational and never gates the check.
    """

    max_diff: float
    per_replacement: tuple[float, ...]
    fix_contrast: float | None
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.max_diff <= self.tol


def check_sa(spec: ContestSpec, i: int, replacements: tuple[TypeDistribution, ...],
             settings: NumericsSettings = DEFAULT_NUMERICS,
             tol: float = 1e-12) -> SAReport:
    """Rebuild agent i's optimal schedule under opponent replacements.

    Every replacement must share the support.  An empty replacement list
    passes vacuously.
    """
    base = build_opt_strategy(spec, i, settings)
    diffs = []
    fix_contrast = None
    for repl in replacements:
        if repl.support != spec.support:
            raise ValueError(f"replacement support {repl.support} != {spec.support}")
        agents = tuple(repl if j != i else a for j, a in enumerate(spec.agents))
        alt_spec = ContestSpec(agents=agents, payment=spec.payment,
                               value_scale=spec.value_scale, lam=spec.lam)
        alt = build_opt_strategy(alt_spec, i, settings)
        diffs.append(float(np.max(np.abs(alt.b_nodes - base.b_nodes))))

    if replacements and spec.n == 2 and not spec.payment.type_dependent \
            and spec.value_scale.gamma == 1.0:
        from .benchmarks import fix_strategies
        j = 1 - i
        pair = (spec.agents[0], spec.agents[1])
        fix_base = fix_strategies(pair[0], pair[1], spec.payment, 1.0, settings)[i]
        contrast = 0.0
        for repl in replacements:
            alt_pair = tuple(repl if idx == j else pair[idx] for idx in range(2))
            fix_alt = fix_strategies(alt_pair[0], alt_pair[1], spec.payment, 1.0, settings)[i]
            grid = fix_base.v_nodes
            contrast = max(contrast, float(np.max(np.abs(
                fix_alt.forward(grid) - fix_base.forward(grid)))))
        fix_contrast = contrast

    return SAReport(
        max_diff=max(diffs) if diffs else 0.0,
        per_replacement=tuple(diffs),
        fix_contrast=fix_contrast,
        tol=tol,
    )


@dataclass(frozen=True)
class MonotonicityReport:
    ok: bool
    worst_agent: int | None = None

    @property
    def passed(self) -> bool:
        return self.ok


def check_monotonicity(profile: EquilibriumProfile) -> MonotonicityReport:
    """Each schedule must be strictly increasing above its no-effort region."""
    for i, s in enumerate(profile.strategies):
        live = s.v_nodes > s.zero_below
        if np.any(np.diff(s.b_nodes[live]) <= 0.0):
            return MonotonicityReport(ok=False, worst_agent=i)
    return MonotonicityReport(ok=True)


# ---------------------------------------------------------------------------
# Monte Carlo campaign
# ---------------------------------------------------------------------------

# Trials are processed in fixed-size blocks; each block draws from its own
# counter offset of the keyed Philox stream, so results do not depend on
# how blocks are scheduled (serial or across workers).
MC_BLOCK = 1 << 17


@dataclass(frozen=True)
class MCResult:
    profit_mean: float
    profit_stderr: float
    effort_means: tuple[float, ...]
    trials: int
    seed: int
    rng: str = "philox4x64-10"


@dataclass(frozen=True)
class _BlockPartial:
    count: int
    profit_sum: float
    profit_sumsq: float
    effort_sums: tuple[float, ...]


def _mc_block(profile: EquilibriumProfile, seed: int, block_index: int,
              m: int) -> _BlockPartial:
    """Simulate trials [block_index*MC_BLOCK, +m) from their own substream.

    Each block draws from the keyed Philox stream at a counter offset
    fixed by its index alone, so blocks can run in any order (or on any
    worker) and merge to the identical result.
    """
    n = profile.n
    h_lam = float(profile.value_scale.h(profile.lam))
    # Uniform draws consumed per trial: n types + 1 tie break, rounded to
    # whole counter blocks with margin for the generator's buffering.
    words_per_block = 4 * ((MC_BLOCK * (n + 1) + 3) // 4 + 1)
    rng = np.random.Generator(
        np.random.Philox(key=seed).advance(block_index * words_per_block))
    u = rng.random((m, n + 1))
    types = np.column_stack([
        np.asarray(profile.agents[j].quantile(u[:, j]), dtype=float) for j in range(n)
    ])
    bids = np.column_stack([
        np.asarray(profile.strategies[j].forward(types[:, j]), dtype=float)
        for j in range(n)
    ])
    top = bids.max(axis=1)
    is_top = bids == top[:, None]
    winner = np.argmax(is_top, axis=1)
    tied = np.nonzero(is_top.sum(axis=1) > 1)[0]
    for r in tied:
        choices = np.flatnonzero(is_top[r])
        winner[r] = choices[int(u[r, n] * choices.size)]
    prize_value = np.zeros(m)
    for j in range(n):
        sel = winner == j
        if np.any(sel):
            prize_value[sel] = np.asarray(profile.prizes[j](bids[sel, j]), dtype=float)
    profit = bids.sum(axis=1) - h_lam * prize_value
    return _BlockPartial(
        count=m,
        profit_sum=float(profit.sum()),
        profit_sumsq=float(np.dot(profit, profit)),
        effort_sums=tuple(bids.sum(axis=0)),
    )


def merge_mc_blocks(partials, seed: int) -> MCResult:
    """Combine block partials (in block order) into a campaign result."""
    count = 0
    s1 = 0.0
    s2 = 0.0
    effort_sums = None
    for p in partials:
        count += p.count
        s1 += p.profit_sum
        s2 += p.profit_sumsq
        e = np.asarray(p.effort_sums)
        effort_sums = e.copy() if effort_sums is None else effort_sums + e
    mean = s1 / count
    var = max(s2 / count - mean * mean, 0.0) * (count / max(count - 1, 1))
    return MCResult(
        profit_mean=mean,
        profit_stderr=math.sqrt(var / count),
        effort_means=tuple(effort_sums / count),
        trials=count,
        seed=seed,
    )


def monte_carlo_campaign(profile: EquilibriumProfile, trials: int, seed: int) -> MCResult:
    """Simulate the contest and report the empirical profit.

    Per trial: sample each type by inverse c.d.f. (atoms included),
    compute bids, award the prize to the highest bidder (ties broken
    uniformly; zero-measure against continuous strategies), and record
    total effort minus the principal's value of the awarded prize.
    Fully reproducible: the trial stream is a pure function of the seed.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    partials = []
    count = 0
    block_index = 0
    while count < trials:
        m = min(MC_BLOCK, trials - count)
        partials.append(_mc_block(profile, seed, block_index, m))
        count += m
        block_index += 1
    return merge_mc_blocks(partials, seed)


def refinement_study(profile: EquilibriumProfile, type_points: int = 101,
                     bid_points: int = 2001, factor: int = 2) -> tuple[float, float]:
    """Grid-resolution gauge at two resolutions: (coarse, fine).

    The gauge is the mean shortfall of the bid grid's best response below
    the claimed equilibrium utility.  It is a pure discretization measure
    (quadratic in the bid spacing), so doubling the grids must shrink it
    by about a factor of four; a solver error would instead leave a
    resolution-independent floor.

    Probe types come from a golden-ratio sequence rather than a uniform
    lattice: a linear schedule maps a uniform type lattice onto bid-grid
    offsets with a short rational period, which can alias the gauge into
    not improving under refinement at all.
    """

    def gauge(tp: int, bp: int) -> float:
        lo, hi = profile.agents[0].support.lo, profile.agents[0].support.hi
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        ks = np.arange(1, tp + 1, dtype=float)
        v = lo + (hi - lo) * np.mod(ks * phi, 1.0)
        bids = default_bid_grid(profile, bp)
        total = 0.0
        for i in range(profile.n):
            zq = np.where(bids <= 0.0, 0.0,
                          np.asarray(profile.prizes[i](np.maximum(bids, 1e-300)), float)
                          * win_probability(profile, i, bids))
            h = np.asarray(profile.value_scale.h(v), float)
            u_grid = h[:, None] * zq[None, :] - np.asarray(
                profile.payment.p(bids[None, :], v[:, None]), float)
            u_best = np.max(u_grid, axis=1)
            u_star = equilibrium_utilities(profile, i, v)
            total += float(np.mean(np.clip(u_star - u_best, 0.0, None)))
        return total / profile.n

    coarse = gauge(type_points, bid_points)
    fine = gauge(factor * (type_points - 1) + 1, factor * (bid_points - 1) + 1)
    return coarse, fine


def perturb_profile(profile: EquilibriumProfile, delta: float) -> EquilibriumProfile:
    """Shift every positive-effort bid by delta (breaks the equilibrium)."""
    shifted = []
    for s in profile.strategies:
        b = s.b_nodes + delta * (s.v_nodes > s.zero_below)
        shifted.append(Strategy.from_table(s.v_nodes, b, zero_below=s.zero_below))
    return EquilibriumProfile(
        agents=profile.agents, payment=profile.payment,
        value_scale=profile.value_scale, lam=profile.lam,
        strategies=tuple(shifted), prizes=profile.prizes,
        label=f"{profile.label}+perturbed({delta})",
    )


@dataclass(frozen=True)
class VerificationReport:
    """Aggregate of all verifier checks; complete even when some fail."""

    label: str
    deviation: DeviationReport
    ir: IRReport
    monotonicity: MonotonicityReport
    sa: SAReport | None = None
    details: dict = field(default_factory=dict)

    @property
    def max_deviation_gain(self) -> float:
        return self.deviation.max_gain

    @property
    def ir_min_utility(self) -> float:
        return self.ir.min_utility

    @property
    def monotonicity_ok(self) -> bool:
        return self.monotonicity.ok

    @property
    def passed(self) -> bool:
        checks = [self.deviation.passed, self.ir.passed, self.monotonicity.passed]
        if self.sa is not None:
            checks.append(self.sa.passed)
        return all(checks)


def verify_equilibrium(profile: EquilibriumProfile, type_points: int = 101,
                       bid_points: int = 2001, tol: float = 1e-3,
                       sa: SAReport | None = None) -> VerificationReport:
    """Run the deviation, IR and monotonicity checks on one profile."""
    v = default_type_grid(profile, type_points)
    bids = default_bid_grid(profile, bid_points)
    dev = best_response_check(profile, v, bids, tol)
    ir = check_ir(profile, v)
    mono = check_monotonicity(profile)
    return VerificationReport(label=profile.label, deviation=dev, ir=ir,
                              monotonicity=mono, sa=sa)
