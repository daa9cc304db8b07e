"""Domain model of an all-pay contest.

Type distributions (with an optional probability atom at the lower
support endpoint), payment and value-scale function families, contest
specifications, effort strategies, and prize schedules.

All objects are immutable after construction; concurrent reads are safe.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .numerics import (
    Interval,
    MonotonicityError,
    Tolerance,
    integrate,
)

__all__ = [
    "DomainError",
    "TypeDistribution",
    "Uniform",
    "AtomUniform",
    "PowerLaw",
    "PiecewiseCdf",
    "PaymentFunction",
    "MonomialPayment",
    "NormalizedPayment",
    "ValueScale",
    "ContestSpec",
    "Strategy",
    "PrizeSchedule",
    "normalized_payment",
    "validate_payment",
    "PaymentValidationReport",
    "TYPE_GRID_SIZE",
]

# Tabulation grid for strategies: uniformly spaced types, both endpoints
# included.  2^11 + 1 keeps cell midpoints exactly representable.
TYPE_GRID_SIZE = 2049


class DomainError(ValueError):
    """An evaluation was requested outside a function's domain."""


# ---------------------------------------------------------------------------
# Type distributions
# ---------------------------------------------------------------------------


class TypeDistribution(ABC):
    """A type prior on a common support [lo, hi].

    The c.d.f. may carry a probability atom at the lower endpoint; the
    rest of the mass is continuous with a positive density on the open
    support.  Atoms anywhere else are not representable: the optimal
    effort condition needs the continuous density on the open support.
    """

    support: Interval
    atom: float

    # -- family-specific pieces ------------------------------------------

    @abstractmethod
    def _continuous_cdf(self, x):
        """Mass of the continuous part on [lo, v], as a function of v."""

    @abstractmethod
    def density(self, v):
        """Continuous-part density f(v); positive on the open support."""

    @abstractmethod
    def _continuous_quantile(self, m):
        """Inverse of _continuous_cdf for continuous mass m in [0, 1-atom]."""

    # -- common surface ---------------------------------------------------

    def cdf(self, v):
        """Right-continuous c.d.f. including the lower atom.

        Total function: values below the support map to 0, above to 1.
        """
        v = np.asarray(v, dtype=float)
        lo, hi = self.support.lo, self.support.hi
        inside = np.clip(v, lo, hi)
        out = np.where(
            v < lo,
            0.0,
            np.where(v >= hi, 1.0, self.atom + self._continuous_cdf(inside)),
        )
        return out if out.ndim else float(out)

    def hazard_complement(self, v: float) -> float:
        """(1 - F(v)) / f(v), the reciprocal hazard rate.

        Defined on (lo, hi]; exactly 0 at the upper endpoint.  Raises
        DomainError at or below the lower endpoint, where the continuous
        density does not describe the distribution.
        """
        lo, hi = self.support.lo, self.support.hi
        if v <= lo or v > hi:
            raise DomainError(f"hazard complement needs v in ({lo}, {hi}], got {v}")
        if v == hi:
            return 0.0
        return (1.0 - float(self.cdf(v))) / float(self.density(v))

    def quantile(self, u):
        """Inverse c.d.f. for u in [0, 1]; atoms map to the lower endpoint."""
        u = np.asarray(u, dtype=float)
        cont = np.clip(u - self.atom, 0.0, 1.0 - self.atom)
        out = np.where(u <= self.atom, self.support.lo, self._continuous_quantile(cont))
        return out if out.ndim else float(out)

    def cdf_power_integral(self, v, m: int):
        """Integral of F(t)^m for t from lo to v (quadrature fallback).

        Accepts scalars or arrays; closed-form families override this
        with vectorized expressions.
        """
        lo = self.support.lo

        def one(vv: float) -> float:
            vv = min(float(vv), self.support.hi)
            if vv <= lo:
                return 0.0
            return integrate(lambda t: float(self.cdf(t)) ** m, Interval(lo, vv),
                             Tolerance(abs_tol=1e-13, rel_tol=1e-12))

        v_arr = np.asarray(v, dtype=float)
        if v_arr.ndim == 0:
            return one(float(v_arr))
        return np.array([one(vv) for vv in v_arr.reshape(-1)]).reshape(v_arr.shape)

    def validate(self, mass_tol: float = 1e-9) -> None:
        """Check total mass atom + integral of density == 1."""
        cont = integrate(lambda t: float(self.density(t)), self.support,
                         Tolerance(abs_tol=1e-12, rel_tol=1e-12))
        total = self.atom + cont
        if abs(total - 1.0) > mass_tol:
            raise ValueError(f"{self!r}: total probability mass is {total}, not 1")

    def _check_common(self):
        if not 0.0 <= self.atom < 1.0:
            raise ValueError(f"atom mass must be in [0, 1), got {self.atom}")
        if self.support.lo < 0.0:
            raise ValueError(f"support must be nonnegative, got lo={self.support.lo}")


@dataclass(frozen=True)
class Uniform(TypeDistribution):
    """Uniform distribution on [lo, hi]."""

    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "support", Interval(self.lo, self.hi))
        object.__setattr__(self, "atom", 0.0)
        self._check_common()

    def _x(self, v):
        return (np.asarray(v, dtype=float) - self.lo) / (self.hi - self.lo)

    def _continuous_cdf(self, v):
        return self._x(v)

    def density(self, v):
        return np.full_like(np.asarray(v, dtype=float), 1.0 / (self.hi - self.lo))

    def _continuous_quantile(self, m):
        return self.lo + (self.hi - self.lo) * m

    def cdf_power_integral(self, v, m: int):
        x = np.clip(self._x(v), 0.0, 1.0)
        out = (self.hi - self.lo) * x ** (m + 1) / (m + 1)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class AtomUniform(TypeDistribution):
    """Mixture of a point mass at lo and a uniform on [lo, hi].

    F(v) = w + (1 - w) * (v - lo)/(hi - lo), right-continuous at lo.
    """

    w: float = 0.5
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "support", Interval(self.lo, self.hi))
        object.__setattr__(self, "atom", float(self.w))
        self._check_common()

    def _x(self, v):
        return (np.asarray(v, dtype=float) - self.lo) / (self.hi - self.lo)

    def _continuous_cdf(self, v):
        return (1.0 - self.w) * self._x(v)

    def density(self, v):
        return np.full_like(np.asarray(v, dtype=float), (1.0 - self.w) / (self.hi - self.lo))

    def _continuous_quantile(self, m):
        return self.lo + (self.hi - self.lo) * m / (1.0 - self.w)

    def cdf_power_integral(self, v, m: int):
        w, width = self.w, self.hi - self.lo
        f = w + (1.0 - w) * np.clip(self._x(v), 0.0, 1.0)
        out = width * (f ** (m + 1) - w ** (m + 1)) / ((m + 1) * (1.0 - w))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PowerLaw(TypeDistribution):
    """F(v) = ((v - lo)/(hi - lo))^alpha with alpha > 0."""

    alpha: float = 2.0
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        object.__setattr__(self, "support", Interval(self.lo, self.hi))
        object.__setattr__(self, "atom", 0.0)
        self._check_common()

    def _x(self, v):
        return (np.asarray(v, dtype=float) - self.lo) / (self.hi - self.lo)

    def _continuous_cdf(self, v):
        return self._x(v) ** self.alpha

    def density(self, v):
        x = self._x(v)
        return self.alpha * x ** (self.alpha - 1.0) / (self.hi - self.lo)

    def _continuous_quantile(self, m):
        return self.lo + (self.hi - self.lo) * np.asarray(m, dtype=float) ** (1.0 / self.alpha)

    def cdf_power_integral(self, v, m: int):
        e = self.alpha * m + 1.0
        out = (self.hi - self.lo) * np.clip(self._x(v), 0.0, 1.0) ** e / e
        return out if out.ndim else float(out)


class PiecewiseCdf(TypeDistribution):
    """C.d.f. given by values at knots, monotone-cubic interpolated.

    cdf_values[0] is the atom mass at lo; cdf_values[-1] must be 1.  The
    interpolated density must stay positive on the open support.
    """

    def __init__(self, knots: Sequence[float], cdf_values: Sequence[float]):
        knots = np.asarray(knots, dtype=float)
        vals = np.asarray(cdf_values, dtype=float)
        if knots.size != vals.size or knots.size < 3:
            raise ValueError("need matching knots/cdf_values with at least 3 points")
        if np.any(np.diff(knots) <= 0.0) or np.any(np.diff(vals) <= 0.0):
            raise MonotonicityError("knots and cdf values must be strictly increasing")
        if abs(vals[-1] - 1.0) > 1e-12:
            raise ValueError(f"cdf must reach 1 at the last knot, got {vals[-1]}")
        self.support = Interval(float(knots[0]), float(knots[-1]))
        self.atom = float(vals[0])
        self._check_common()
        self.knots = knots
        self.cdf_values = vals
        self._interp = PchipInterpolator(knots, vals)
        self._deriv = self._interp.derivative()
        scan = np.linspace(knots[0], knots[-1], 1001)[1:-1]
        if np.min(self._deriv(scan)) <= 0.0:
            raise ValueError("interpolated density is not positive on the open support")

    def __repr__(self):
        return f"PiecewiseCdf({self.knots.tolist()}, {self.cdf_values.tolist()})"

    def _continuous_cdf(self, v):
        return self._interp(v) - self.atom

    def density(self, v):
        return self._deriv(v)

    def _continuous_quantile(self, m):
        target = np.asarray(m, dtype=float) + self.atom
        return _solve_increasing(self._interp, self.knots, self.cdf_values, target)


# ---------------------------------------------------------------------------
# Payment and value-scale families
# ---------------------------------------------------------------------------


class PaymentFunction(ABC):
    """Effort cost p(b, v) with the partial derivatives the theory needs.

    Model assumptions, each checkable on a grid via validate_payment:
    p(0, v) = 0, p_b > 0, p_v <= 0, p_bb > 0, p_bbv <= 0.
    """

    @abstractmethod
    def p(self, b, v): ...

    @abstractmethod
    def p_b(self, b, v): ...

    @abstractmethod
    def p_v(self, b, v): ...

    @abstractmethod
    def p_bb(self, b, v): ...

    @abstractmethod
    def p_bv(self, b, v): ...

    @abstractmethod
    def p_bbv(self, b, v): ...

    @property
    def type_dependent(self) -> bool:
        """True unless p is a function of effort alone."""
        return True


@dataclass(frozen=True)
class MonomialPayment(PaymentFunction):
    """p(b, v) = c * b^a / v^d with c > 0, a > 1, d >= 0.

    d = 0 gives a type-independent cost p(b), the form the fixed-prize
    benchmark mechanisms require.
    """

    c: float = 1.0
    a: float = 2.0
    d: float = 0.0

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.a <= 1.0:
            raise ValueError(f"a must exceed 1 for convex effort cost, got {self.a}")
        if self.d < 0.0:
            raise ValueError(f"d must be nonnegative, got {self.d}")

    def _vpow(self, v, extra=0.0):
        v = np.asarray(v, dtype=float)
        e = self.d + extra
        if e == 0.0:
            return np.ones_like(v)
        return v ** -e

    def p(self, b, v):
        return self.c * np.asarray(b, dtype=float) ** self.a * self._vpow(v)

    def p_b(self, b, v):
        return self.c * self.a * np.asarray(b, dtype=float) ** (self.a - 1.0) * self._vpow(v)

    def p_v(self, b, v):
        return -self.d * self.c * np.asarray(b, dtype=float) ** self.a * self._vpow(v, 1.0)

    def p_bb(self, b, v):
        return self.c * self.a * (self.a - 1.0) * np.asarray(b, dtype=float) ** (self.a - 2.0) * self._vpow(v)

    def p_bv(self, b, v):
        return -self.d * self.c * self.a * np.asarray(b, dtype=float) ** (self.a - 1.0) * self._vpow(v, 1.0)

    def p_bbv(self, b, v):
        return (-self.d * self.c * self.a * (self.a - 1.0)
                * np.asarray(b, dtype=float) ** (self.a - 2.0) * self._vpow(v, 1.0))

    @property
    def type_dependent(self) -> bool:
        return self.d != 0.0

    def invert(self, y):
        """Effort b with p(b) = y, for the type-independent case d = 0."""
        if self.d != 0.0:
            raise DomainError("invert() requires a type-independent payment (d = 0)")
        return (np.asarray(y, dtype=float) / self.c) ** (1.0 / self.a)


@dataclass(frozen=True)
class ValueScale:
    """Prize value multiplier h(v) = v^gamma, gamma > 0; h(0) = 0, h' > 0."""

    gamma: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def h(self, v):
        v = np.asarray(v, dtype=float)
        out = v if self.gamma == 1.0 else v ** self.gamma
        return out if out.ndim else float(out)

    def h_prime(self, v):
        v = np.asarray(v, dtype=float)
        out = self.gamma * v ** (self.gamma - 1.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class NormalizedPayment(PaymentFunction):
    """Payment divided by the value scale: phat(b, v) = p(b, v) / h(v).

    Quotient-rule closed forms over the underlying family's partials; only
    defined for v > 0 since h(0) = 0.
    """

    base: PaymentFunction
    scale: ValueScale

    def _guard(self, v):
        if np.any(np.asarray(v) <= 0.0):
            raise DomainError("normalized payment is undefined at v = 0")

    def p(self, b, v):
        self._guard(v)
        return self.base.p(b, v) / self.scale.h(v)

    def p_b(self, b, v):
        self._guard(v)
        return self.base.p_b(b, v) / self.scale.h(v)

    def p_v(self, b, v):
        self._guard(v)
        h, hp = self.scale.h(v), self.scale.h_prime(v)
        return (self.base.p_v(b, v) * h - self.base.p(b, v) * hp) / (h * h)

    def p_bb(self, b, v):
        self._guard(v)
        return self.base.p_bb(b, v) / self.scale.h(v)

    def p_bv(self, b, v):
        self._guard(v)
        h, hp = self.scale.h(v), self.scale.h_prime(v)
        return (self.base.p_bv(b, v) * h - self.base.p_b(b, v) * hp) / (h * h)

    def p_bbv(self, b, v):
        self._guard(v)
        h, hp = self.scale.h(v), self.scale.h_prime(v)
        return (self.base.p_bbv(b, v) * h - self.base.p_bb(b, v) * hp) / (h * h)


def normalized_payment(spec: "ContestSpec") -> NormalizedPayment:
    """phat = p / h for the spec's payment and value scale."""
    return NormalizedPayment(spec.payment, spec.value_scale)


# ---------------------------------------------------------------------------
# Contest specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContestSpec:
    """One contest: agent priors, payment, value scale, principal type.

    The single input object of every solver.  All agents must share the
    same support; lam > 0 is the principal's valuation of the prize.
    """

    agents: tuple[TypeDistribution, ...]
    payment: PaymentFunction
    value_scale: ValueScale
    lam: float

    def __post_init__(self):
        if len(self.agents) < 2:
            raise ValueError(f"need at least 2 agents, got {len(self.agents)}")
        object.__setattr__(self, "agents", tuple(self.agents))
        s0 = self.agents[0].support
        for a in self.agents[1:]:
            if a.support != s0:
                raise ValueError(f"agents must share a common support, got {a.support} vs {s0}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def support(self) -> Interval:
        return self.agents[0].support

    def symmetrized(self, agent_index: int, n: int | None = None) -> "ContestSpec":
        """Same contest with n copies of one agent's distribution."""
        n = self.n if n is None else n
        return ContestSpec(
            agents=(self.agents[agent_index],) * n,
            payment=self.payment,
            value_scale=self.value_scale,
            lam=self.lam,
        )


# ---------------------------------------------------------------------------
# Strategies and prize schedules
# ---------------------------------------------------------------------------


def _solve_increasing(fn, x_nodes, y_nodes, y_query):
    """Vectorized inverse of an increasing fn via bracketed bisection.

    x_nodes/y_nodes bracket the cells; queries outside [y[0], y[-1]] clamp
    to the corresponding end.  60 bisection rounds push the residual to
    machine level.
    """
    y = np.atleast_1d(np.asarray(y_query, dtype=float))
    idx = np.clip(np.searchsorted(y_nodes, y, side="right") - 1, 0, len(x_nodes) - 2)
    lo = x_nodes[idx].astype(float)
    hi = x_nodes[idx + 1].astype(float)
    lo = np.where(y <= y_nodes[0], x_nodes[0], lo)
    hi = np.where(y >= y_nodes[-1], x_nodes[-1], hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = np.asarray(fn(mid)) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(y <= y_nodes[0], x_nodes[0], out)
    out = np.where(y >= y_nodes[-1], x_nodes[-1], out)
    return out if np.asarray(y_query).ndim else float(out[0])


def _solve_increasing_ppoly(ppoly, y_nodes, y_query):
    """Inverse of an increasing piecewise cubic, one Horner cell per query.

    Same contract as _solve_increasing but bisects the located cell's own
    cubic, avoiding a full spline evaluation per bisection round.
    """
    y = np.atleast_1d(np.asarray(y_query, dtype=float))
    x_nodes = ppoly.x
    idx = np.clip(np.searchsorted(y_nodes, y, side="right") - 1, 0, len(x_nodes) - 2)
    c3, c2, c1, c0 = (ppoly.c[k, idx] for k in range(4))
    lo = np.zeros_like(y)
    hi = x_nodes[idx + 1] - x_nodes[idx]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        val = ((c3 * mid + c2) * mid + c1) * mid + c0
        below = val < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = x_nodes[idx] + 0.5 * (lo + hi)
    out = np.where(y <= y_nodes[0], x_nodes[0], out)
    out = np.where(y >= y_nodes[-1], x_nodes[-1], out)
    return out if np.asarray(y_query).ndim else float(out[0])


class Strategy:
    """A weakly increasing effort schedule v -> b with queryable inverse.

    Strictly increasing above `zero_below`; types at or below it exert no
    effort (for the optimal mechanism zero_below is the lower support
    endpoint itself).  forward() and inverse() accept scalars or arrays;
    inverse() clamps b <= 0 to zero_below and b >= max_bid to the top type.
    """

    def __init__(
        self,
        v_nodes: np.ndarray,
        b_nodes: np.ndarray,
        forward_fn: Callable | None = None,
        zero_below: float | None = None,
    ):
        v_nodes = np.asarray(v_nodes, dtype=float)
        b_nodes = np.asarray(b_nodes, dtype=float)
        if v_nodes.shape != b_nodes.shape or v_nodes.ndim != 1 or v_nodes.size < 2:
            raise ValueError("strategy table must be two equal-length 1-d arrays")
        if np.any(np.diff(v_nodes) <= 0.0):
            raise MonotonicityError("type grid must be strictly increasing")
        self.zero_below = float(v_nodes[0] if zero_below is None else zero_below)
        live = v_nodes > self.zero_below
        if np.any(np.diff(b_nodes[live]) <= 0.0):
            raise MonotonicityError("effort schedule must be strictly increasing in type")
        if np.any(b_nodes[~live] != 0.0):
            raise ValueError("efforts at or below zero_below must be 0")
        self.v_nodes = v_nodes
        self.b_nodes = b_nodes
        self._fn = forward_fn if forward_fn is not None else PchipInterpolator(v_nodes, b_nodes)

    @classmethod
    def from_table(cls, v_nodes, b_nodes, zero_below=None) -> "Strategy":
        return cls(v_nodes, b_nodes, None, zero_below)

    @classmethod
    def from_callable(cls, fn, support: Interval, zero_below=None,
                      grid_size: int = TYPE_GRID_SIZE) -> "Strategy":
        v = np.linspace(support.lo, support.hi, grid_size)
        return cls(v, np.asarray(fn(v), dtype=float), fn, zero_below)

    @property
    def support(self) -> Interval:
        return Interval(float(self.v_nodes[0]), float(self.v_nodes[-1]))

    @property
    def max_bid(self) -> float:
        return float(self.b_nodes[-1])

    def forward(self, v):
        v_arr = np.clip(np.asarray(v, dtype=float), self.v_nodes[0], self.v_nodes[-1])
        out = np.maximum(np.asarray(self._fn(v_arr), dtype=float), 0.0)
        out = np.where(v_arr <= self.zero_below, 0.0, out)
        return out if np.asarray(v).ndim else float(out)

    def inverse(self, b):
        from scipy.interpolate import PPoly

        b_arr = np.asarray(b, dtype=float)
        if isinstance(self._fn, PPoly):
            out = _solve_increasing_ppoly(self._fn, self.b_nodes, b_arr)
        else:
            out = _solve_increasing(self.forward, self.v_nodes, self.b_nodes, b_arr)
        out = np.where(b_arr <= 0.0, self.zero_below, out)
        out = np.asarray(np.where(b_arr >= self.max_bid, self.v_nodes[-1], out))
        return out if b_arr.ndim else float(out)


class PrizeSchedule:
    """Per-agent prize Z(b) paid to this agent when it wins with effort b.

    Defined on (0, max_bid]; the tabulated domain starts at b_min (a tiny
    positive floor) since a winning effort of exactly 0 has vanishing
    probability and no defined prize.  Evaluations clamp b below b_min.
    Callable on scalars or arrays.
    """

    def __init__(self, fn: Callable, b_nodes: np.ndarray, z_nodes: np.ndarray,
                 b_min: float, max_bid: float):
        self._fn = fn
        self.b_nodes = np.asarray(b_nodes, dtype=float)
        self.z_nodes = np.asarray(z_nodes, dtype=float)
        self.b_min = float(b_min)
        self.max_bid = float(max_bid)

    @classmethod
    def constant(cls, z: float, max_bid: float = math.inf) -> "PrizeSchedule":
        nodes = np.array([0.0, max_bid if math.isfinite(max_bid) else 1.0])
        return cls(lambda b: np.full_like(np.asarray(b, dtype=float), float(z)),
                   nodes, np.full(2, float(z)), 0.0, max_bid)

    def __call__(self, b):
        b_arr = np.maximum(np.asarray(b, dtype=float), self.b_min)
        out = np.asarray(self._fn(b_arr), dtype=float)
        return out if np.asarray(b).ndim else float(out)


# ---------------------------------------------------------------------------
# Payment validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssumptionResult:
    name: str
    passed: bool
    worst_point: tuple[float, float] | None = None
    worst_value: float | None = None


@dataclass(frozen=True)
class PaymentValidationReport:
    """Per-assumption pass/fail plus finite-difference partials check."""

    assumptions: tuple[AssumptionResult, ...]
    fd_max_rel_error: dict = field(default_factory=dict)
    fd_tolerance: float = 1e-5

    @property
    def all_passed(self) -> bool:
        fd_ok = all(e <= self.fd_tolerance for e in self.fd_max_rel_error.values())
        return fd_ok and all(a.passed for a in self.assumptions)

    def assumption(self, name: str) -> AssumptionResult:
        for a in self.assumptions:
            if a.name == name:
                return a
        raise KeyError(name)


def _central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def validate_payment(pf: PaymentFunction, grid: Sequence[tuple[float, float]],
                     fd_tol: float = 1e-5) -> PaymentValidationReport:
    """Check the model assumptions on p over a grid of (b, v) points.

    Each supplied analytic partial is also cross-checked against a central
    finite difference of the next-lower-order supplied partial.
    """
    pts = [(float(b), float(v)) for b, v in grid]

    def check(name, val_fn, severity):
        # severity(val) > 0 marks a violation; the worst one is reported.
        worst_pt, worst_val, worst_sev = None, None, 0.0
        violated = False
        for b, v in pts:
            val = float(val_fn(b, v))
            sev = severity(val)
            if sev > 0.0 and (not violated or sev >= worst_sev):
                worst_pt, worst_val, worst_sev = (b, v), val, sev
                violated = True
        return AssumptionResult(name, not violated, worst_pt, worst_val)

    tiny = 1e-12

    assumptions = (
        check("p(0,v)=0", lambda b, v: pf.p(0.0, v),
              lambda x: abs(x) if abs(x) > tiny else 0.0),
        check("p_b>0", pf.p_b, lambda x: tiny - x if x <= 0.0 else 0.0),
        check("p_v<=0", pf.p_v, lambda x: x if x > tiny else 0.0),
        check("p_bb>0", pf.p_bb, lambda x: tiny - x if x <= 0.0 else 0.0),
        check("p_bbv<=0", pf.p_bbv, lambda x: x if x > tiny else 0.0),
    )

    fd_pairs = {
        "p_b": (pf.p_b, lambda b, v, h: _central_diff(lambda x: pf.p(x, v), b, h)),
        "p_v": (pf.p_v, lambda b, v, h: _central_diff(lambda x: pf.p(b, x), v, h)),
        "p_bb": (pf.p_bb, lambda b, v, h: _central_diff(lambda x: pf.p_b(x, v), b, h)),
        "p_bv": (pf.p_bv, lambda b, v, h: _central_diff(lambda x: pf.p_b(b, x), v, h)),
        "p_bbv": (pf.p_bbv, lambda b, v, h: _central_diff(lambda x: pf.p_bb(b, x), v, h)),
    }
    fd_err: dict[str, float] = {}
    for name, (analytic, fd) in fd_pairs.items():
        worst = 0.0
        for b, v in pts:
            h = 1e-6 * max(1.0, abs(v) if name.endswith("v") else abs(b))
            ref = fd(b, v, h)
            val = float(analytic(b, v))
            scale = max(abs(ref), abs(val), 1e-8)
            worst = max(worst, abs(val - ref) / scale)
        fd_err[name] = worst

    return PaymentValidationReport(assumptions, fd_err, fd_tol)
