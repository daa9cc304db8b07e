"""Deterministic scalar numerical kernels shared by all solvers.

Four primitives: adaptive quadrature, bracketed root finding, fixed-step
backward ODE integration, and monotone inversion.  All of them are pure
functions of their inputs (no global state, no RNG), so they are safe to
call from any number of threads.

Design notes
------------
* Quadrature uses a globally adaptive 15-point Gauss-Kronrod rule.  All
  Kronrod abscissae are strictly interior, so integrands are never
  evaluated at the interval endpoints; integrable endpoint singularities
  (1/sqrt(v), log v, ...) converge without special casing.
* The root finder is Brent's method: inverse-quadratic/secant steps with
  a guaranteed bisection fallback, so the result never leaves the
  initial bracket.
* The ODE integrator is fixed-step classical RK4.  No adaptive step
  control, by design: runs are bit-reproducible for a given step count.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "Interval",
    "NumericsError",
    "QuadratureError",
    "BracketError",
    "IntegrationError",
    "MonotonicityError",
    "InverseResult",
    "OdeTable",
    "integrate",
    "find_root",
    "solve_ode_backward",
    "monotone_inverse",
    "monotone_hermite",
    "cumulative_gauss5",
]


class NumericsError(Exception):
    """Base class for numerical-kernel failures."""


class QuadratureError(NumericsError):
    """Quadrature did not converge.  Carries the last estimate."""

    def __init__(self, message: str, last_estimate: float):
        super().__init__(f"{message} (last estimate {last_estimate!r})")
        self.message = message
        self.last_estimate = last_estimate


class BracketError(NumericsError):
    """Root bracket does not contain a sign change."""


class IntegrationError(NumericsError):
    """ODE right-hand side became non-finite.  Carries the location."""

    def __init__(self, message: str, v: float):
        super().__init__(f"{message} (at v={v!r})")
        self.v = v


class MonotonicityError(NumericsError):
    """A table or function required to be strictly monotone is not."""


@dataclass(frozen=True)
class Tolerance:
    """Error targets for an iterative kernel.

    abs_tol is an absolute error target, rel_tol a relative one; a kernel
    stops once the error is below max(abs_tol, rel_tol * |result|).
    max_iter bounds the number of refinements (quadrature panel splits,
    root-finder iterations).
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 10_000

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and math.isfinite(self.abs_tol)):
            raise ValueError(f"abs_tol must be positive and finite, got {self.abs_tol}")
        if not (self.rel_tol >= 0.0 and math.isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be nonnegative, got {self.rel_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")

    def target(self, scale: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(scale))


@dataclass(frozen=True)
class Interval:
    """A finite open/closed interval with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


# 15-point Kronrod extension of 7-point Gauss-Legendre (QUADPACK values).
# Nodes are symmetric about 0 and strictly inside (-1, 1).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Weights of the embedded 7-point Gauss rule (odd Kronrod nodes + centre).
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_KRONROD_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Positions of the Gauss-7 nodes within the 15 Kronrod nodes.
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """One Gauss-Kronrod 15|7 panel: returns (estimate, error estimate).

    Nodes are clamped strictly inside (lo, hi): on very small panels the
    affine node map can round onto an endpoint, which would defeat the
    open rule.
    """
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = mid + half * _KRONROD_NODES
    xs = np.clip(xs, np.nextafter(lo, hi), np.nextafter(hi, lo))
    ys = np.array([f(x) for x in xs], dtype=float)
    if not np.all(np.isfinite(ys)):
        bad = xs[~np.isfinite(ys)][0]
        raise QuadratureError(f"integrand non-finite at x={bad!r}", last_estimate=math.nan)
    gk = half * float(np.dot(_KRONROD_WEIGHTS, ys))
    g = half * float(np.dot(_GAUSS_WEIGHTS, ys[_GAUSS_IDX]))
    return gk, abs(gk - g)


def integrate(f: Callable[[float], float], domain: Interval, tol: Tolerance = Tolerance()) -> float:
    """Adaptively integrate f over the domain.

    The worst panel (largest Kronrod-Gauss discrepancy) is bisected until
    the summed error estimate meets the tolerance.  Endpoints are never
    sampled, so integrable singularities at either end are handled.

    Raises QuadratureError (carrying the last estimate) if the error
    target is not met within tol.max_iter panel splits.
    """
    gk, err = _gk15(f, domain.lo, domain.hi)
    # Heap entries: (-err, lo, hi, estimate).  Worst panel first.
    heap = [(-err, domain.lo, domain.hi, gk)]
    total = gk
    total_err = err
    for _ in range(tol.max_iter):
        if total_err <= tol.target(total):
            return total
        neg_err, lo, hi, est = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            raise QuadratureError(
                "panel no longer splittable; integrand is likely not integrable",
                last_estimate=total,
            )
        try:
            gk_l, err_l = _gk15(f, lo, mid)
            gk_r, err_r = _gk15(f, mid, hi)
        except QuadratureError as exc:
            raise QuadratureError(exc.message, last_estimate=total) from exc
        total += gk_l + gk_r - est
        total_err += err_l + err_r + neg_err  # neg_err == -old panel error
        heapq.heappush(heap, (-err_l, lo, mid, gk_l))
        heapq.heappush(heap, (-err_r, mid, hi, gk_r))
    if total_err <= tol.target(total):
        return total
    raise QuadratureError(
        f"quadrature did not converge after {tol.max_iter} refinements",
        last_estimate=total,
    )


def find_root(g: Callable[[float], float], bracket: Interval, tol: Tolerance = Tolerance()) -> float:
    """Find a root of g inside the bracket (Brent's method).

    Requires g(lo) * g(hi) <= 0.  The returned point always lies within
    the initial bracket, and the final bracket width is at or below
    max(abs_tol, rel_tol * |x|) plus machine rounding.
    """
    a, b = bracket.lo, bracket.hi
    fa, fb = g(a), g(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise BracketError(f"no sign change on [{a}, {b}]: g={fa!r}, {fb!r}")

    c, fc = a, fa
    d = e = b - a
    for _ in range(tol.max_iter):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * np.finfo(float).eps * abs(b) + 0.5 * tol.target(b)
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d, e = xm, xm
        else:
            d, e = xm, xm
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = g(b)
    raise NumericsError(f"root finder did not converge after {tol.max_iter} iterations")


class OdeTable(NamedTuple):
    """Tabulated ODE solution, ascending in v."""

    v: np.ndarray
    k: np.ndarray


def solve_ode_backward(
    rhs: Callable[[float, float], float],
    v_end: float,
    k_end: float,
    v_start: float,
    steps: int,
    stop_when: Callable[[float, float], bool] | None = None,
) -> OdeTable:
    """Integrate k'(v) = rhs(v, k) from v_end down to v_start.

    Classical fixed-step RK4 with `steps` equal steps.  The returned table
    is sorted ascending in v and includes the boundary point
    (v_end, k_end) exactly.  If `stop_when(v, k)` becomes true the table is
    truncated there (used by callers whose solution hits a domain edge
    before v_start).

    Raises IntegrationError, reporting the failing v, if the right-hand
    side evaluates to a non-finite value.
    """
    if not v_start < v_end:
        raise ValueError(f"requires v_start < v_end, got {v_start} >= {v_end}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")

    h = (v_start - v_end) / steps  # negative
    vs = [v_end]
    ks = [k_end]
    v, k = v_end, k_end

    def deriv(vv: float, kk: float) -> float:
        try:
            val = rhs(vv, kk)
        except ZeroDivisionError as exc:
            raise IntegrationError("ODE right-hand side divides by zero", v=vv) from exc
        if not math.isfinite(val):
            raise IntegrationError("ODE right-hand side is non-finite", v=vv)
        return val

    for n in range(1, steps + 1):
        k1 = deriv(v, k)
        k2 = deriv(v + 0.5 * h, k + 0.5 * h * k1)
        k3 = deriv(v + 0.5 * h, k + 0.5 * h * k2)
        v_next = v_end + n * h if n < steps else v_start
        k4 = deriv(v_next, k + h * k3)
        k = k + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v = v_next
        if not math.isfinite(k):
            raise IntegrationError("ODE state is non-finite", v=v)
        if stop_when is not None and stop_when(v, k):
            break
        vs.append(v)
        ks.append(k)

    return OdeTable(v=np.array(vs[::-1]), k=np.array(ks[::-1]))


class InverseResult(NamedTuple):
    value: float
    clamped: bool


def _as_table(table_or_fn, domain: Interval):
    """Normalize the monotone_inverse input to (eval_fn, lo_y, hi_y)."""
    if callable(table_or_fn):
        return table_or_fn, float(table_or_fn(domain.lo)), float(table_or_fn(domain.hi))
    xs, ys = (np.asarray(a, dtype=float) for a in table_or_fn)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise ValueError("table must be two equal-length 1-d arrays")
    if np.any(np.diff(xs) <= 0.0) or np.any(np.diff(ys) <= 0.0):
        raise MonotonicityError("table is not strictly increasing")

    def interp(x):
        return float(np.interp(x, xs, ys))

    return interp, float(ys[0]), float(ys[-1])


def monotone_inverse(
    table_or_fn,
    y: float,
    domain: Interval,
    tol: Tolerance = Tolerance(),
) -> InverseResult:
    """Solve fn(x) = y for a strictly increasing fn on the domain.

    Accepts either a callable or a table (xs, ys); tables are checked for
    strict monotonicity.  Targets outside the attained range are clamped
    to the matching domain endpoint and flagged.
    """
    fn, y_lo, y_hi = _as_table(table_or_fn, domain)
    if y_lo >= y_hi:
        raise MonotonicityError(f"function is not increasing on [{domain.lo}, {domain.hi}]")
    if y <= y_lo:
        return InverseResult(domain.lo, clamped=y < y_lo)
    if y >= y_hi:
        return InverseResult(domain.hi, clamped=y > y_hi)
    x = find_root(lambda t: fn(t) - y, domain, tol)
    return InverseResult(x, clamped=False)


def monotone_hermite(x: np.ndarray, y: np.ndarray, dydx: np.ndarray):
    """Cubic Hermite interpolant with Fritsch-Carlson slope limiting.

    Where the supplied derivatives are consistent with the data (the
    normal case: derivatives from an ODE right-hand side or an exact
    integrand) the limiter is inert and the interpolant is 4th-order
    accurate.  Slopes exceeding 3x the adjacent secants are clamped so a
    monotone data set always yields a monotone interpolant.
    """
    from scipy.interpolate import CubicHermiteSpline

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = np.array(dydx, dtype=float, copy=True)
    s = np.diff(y) / np.diff(x)
    s_left = np.concatenate([[s[0]], s])    # secant left of each node
    s_right = np.concatenate([s, [s[-1]]])  # secant right of each node
    same_sign = np.sign(s_left) == np.sign(s_right)
    bound = 3.0 * np.minimum(np.abs(s_left), np.abs(s_right)) * same_sign
    sign = np.where(same_sign, np.sign(s_right), 0.0)
    d = np.clip(d, np.minimum(0.0, sign * bound), np.maximum(0.0, sign * bound))
    return CubicHermiteSpline(x, y, d)


def cumulative_gauss5(
    f: Callable[[float], float],
    nodes: Sequence[float] | np.ndarray,
) -> np.ndarray:
    """Cumulative integral of f over a strictly increasing node grid.

    Per-cell 5-point Gauss-Legendre, accumulated left to right; exact for
    polynomials up to degree 9 within each cell.  Returns an array C with
    C[0] = 0 and C[i] = integral from nodes[0] to nodes[i].  Endpoints of
    the grid are never sampled (all Gauss nodes are interior).
    """
    x = np.asarray(nodes, dtype=float)
    if np.any(np.diff(x) <= 0.0):
        raise MonotonicityError("cumulative integration grid must be strictly increasing")
    g_nodes = np.array([
        -0.906179845938663992797626878299393,
        -0.538469310105683091036314420700208,
        0.0,
        0.538469310105683091036314420700208,
        0.906179845938663992797626878299393,
    ])
    g_weights = np.array([
        0.236926885056189087514264040719917,
        0.478628670499366468041291514835638,
        0.568888888888888888888888888888889,
        0.478628670499366468041291514835638,
        0.236926885056189087514264040719917,
    ])
    mids = 0.5 * (x[1:] + x[:-1])
    halves = 0.5 * (x[1:] - x[:-1])
    cells = np.empty(x.size - 1)
    for i in range(x.size - 1):
        pts = mids[i] + halves[i] * g_nodes
        vals = np.array([f(p) for p in pts], dtype=float)
        cells[i] = halves[i] * float(np.dot(g_weights, vals))
    out = np.zeros(x.size)
    np.cumsum(cells, out=out[1:])
    return out
