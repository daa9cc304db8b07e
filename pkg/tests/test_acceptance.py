"""Acceptance battery: the twelve headline claims, one test each.

Each test prints a single PASS/FAIL line (run with -s to see them all).
Closed-form targets come from the analytic solution of the built-in
contest; every numerical value is produced by the full solver pipeline.

Probing policy: tabulated objects (schedules, prize tables, the link
table) are compared against closed forms at their own nodes plus, where
the evaluation path is exact off-node (callable-backed schedules, the
Hermite link), on dense grids.  Interpolation quality between nodes of
pchip-tabulated schedules is covered separately by round-trip and
monotonicity tests in test_model/test_verify.
"""

import math
import time

import numpy as np
import pytest

from allpay.benchmarks import fix_profit, optimal_fixed_prize, solve_fix_link, sym_profit
from allpay.config import case_study_spec
from allpay.mechanisms import solve_profile
from allpay.model import AtomUniform, MonomialPayment, Uniform
from allpay.numerics import Interval, find_root
from allpay.optimal import build_opt_strategy, opt_profit, solve_opt_effort
from allpay.verify import (
    best_response_check,
    check_ir,
    equilibrium_utilities,
    monte_carlo_campaign,
    perturb_profile,
    refinement_study,
)

F1 = Uniform()
F2 = AtomUniform(w=0.5)
PAY = MonomialPayment()
SQRT3 = math.sqrt(3.0)
LAMBDAS = (0.1, 0.3, 0.5)
MC_SEED = 12345


def report(num: int, message: str):
    print(f"\n[criterion {num:2d}] PASS  {message}")


def rel_err(value, truth):
    return abs(value - truth) / abs(truth)


class TestAcceptance:
    def test_01_opt_profit_and_split(self):
        for lam in LAMBDAS:
            res = opt_profit(case_study_spec(lam))
            assert rel_err(res.total, 1.0 / (8.0 * lam)) <= 1e-4
            assert rel_err(res.per_agent[0], 1.0 / (12.0 * lam)) <= 1e-4
            assert rel_err(res.per_agent[1], 1.0 / (24.0 * lam)) <= 1e-4
        report(1, "variable-prize profit 1/(8 lam) with per-agent split "
                  "1/(12 lam) + 1/(24 lam) at lam in {0.1, 0.3, 0.5} (tol 1e-4)")

    def test_02_benchmark_profits_and_crossovers(self):
        for lam in LAMBDAS:
            assert abs(fix_profit(F1, F2, PAY, 1.0, lam)
                       - (24.0 / (35.0 * SQRT3) - lam)) <= 1e-5
            assert abs(sym_profit(2, F1, PAY, 1.0, lam)
                       - (1.0 / math.sqrt(2.0) - lam)) <= 1e-5
            assert abs(sym_profit(2, F2, PAY, 1.0, lam) - (0.25 - lam)) <= 1e-5
        cross_fix = find_root(lambda lam: fix_profit(F1, F2, PAY, 1.0, lam),
                              Interval(0.3, 0.5))
        cross_s1 = find_root(lambda lam: sym_profit(2, F1, PAY, 1.0, lam),
                             Interval(0.6, 0.8))
        cross_s2 = find_root(lambda lam: sym_profit(2, F2, PAY, 1.0, lam),
                             Interval(0.2, 0.3))
        assert abs(cross_fix - 0.39594) <= 1e-3
        assert abs(cross_s1 - 0.70711) <= 1e-3
        assert abs(cross_s2 - 0.25) <= 1e-3
        report(2, f"fixed-prize profits match closed forms (tol 1e-5); "
                  f"zero-profit crossovers at {cross_fix:.5f}/{cross_s1:.5f}/"
                  f"{cross_s2:.5f} (tol 1e-3)")

    def test_03_profit_ratios(self):
        lam = 0.1
        p_opt = opt_profit(case_study_spec(lam)).total
        ratios = {
            "sym1": p_opt / sym_profit(2, F1, PAY, 1.0, lam) - 1.0,
            "fix": p_opt / fix_profit(F1, F2, PAY, 1.0, lam) - 1.0,
            "sym2": p_opt / sym_profit(2, F2, PAY, 1.0, lam) - 1.0,
        }
        for key, rounded in (("sym1", 1.05), ("fix", 3.15), ("sym2", 7.30)):
            assert abs(ratios[key] - rounded) <= 0.08, (key, ratios[key])
        report(3, "advantage over sym1/fix/sym2 at lam=0.1 is "
                  + "/".join(f"{100 * ratios[k]:.0f}%" for k in ("sym1", "fix", "sym2"))
                  + " (within 8pp of the rounded 105/315/730)")

    def test_04_tangency_with_strong_symmetric(self):
        tangent = math.sqrt(2.0) / 4.0
        grid = np.append(np.linspace(0.02, 0.78, 999), tangent)
        sym1_revenue = sym_profit(2, F1, PAY, 1.0, 0.0)  # lam-free part
        gaps = np.array([
            opt_profit(case_study_spec(float(lam))).total - (sym1_revenue - lam)
            for lam in grid
        ])
        assert np.all(gaps >= -1e-9)
        touching = grid[gaps <= 1e-6]
        assert touching.size > 0
        assert np.all(np.abs(touching - tangent) <= 2e-3)
        report(4, f"profit dominates the strong symmetric benchmark on a "
                  f"{grid.size}-point grid; equality (<=1e-6) only near "
                  f"lam = sqrt(2)/4 = {tangent:.6f}")

    def test_05_link_ode_and_fix_strategies(self, fix01):
        link = solve_fix_link(F1, F2)
        dense = np.linspace(0.0, 1.0, 20001)
        k_err = np.max(np.abs(link.forward(dense) - np.clip(dense, link.v_nodes[0], 1.0) ** 2))
        assert k_err <= 1e-6
        b1, b2 = fix01.strategies
        probes = np.linspace(0.0, 1.0, 2001)[1:]
        e1 = np.max(np.abs(b1.forward(probes) - probes ** 1.5 / SQRT3)
                    / (probes ** 1.5 / SQRT3))
        e2 = np.max(np.abs(b2.forward(probes) - probes ** 0.75 / SQRT3)
                    / (probes ** 0.75 / SQRT3))
        assert e1 <= 1e-5 and e2 <= 1e-5
        report(5, f"link max |k - v^2| = {k_err:.2e} (tol 1e-6); fixed-prize "
                  f"schedules match v^1.5/sqrt3, v^0.75/sqrt3 within {max(e1, e2):.2e}")

    def test_06_opt_schedules_and_autonomy_in_n(self):
        for lam in LAMBDAS:
            spec = case_study_spec(lam)
            for i in (0, 1):
                s = build_opt_strategy(spec, i)
                truth = s.v_nodes ** 2 / (2.0 * lam)
                scale = np.maximum(truth, 1e-12)
                assert np.max(np.abs(s.b_nodes - truth) / scale) <= 1e-8
        grid = np.linspace(0.0, 1.0, 101)
        reference = None
        worst = 0.0
        for n in range(2, 21):
            spec_n = case_study_spec(0.1).symmetrized(0, n)
            b = np.array([solve_opt_effort(spec_n, 0, float(v)) for v in grid])
            if reference is None:
                reference = b
            worst = max(worst, float(np.max(np.abs(b - reference))))
        assert worst <= 1e-12
        report(6, f"both schedules equal v^2/(2 lam) within 1e-8 at nodes; "
                  f"n-agent schedule is n-invariant for n=2..20 "
                  f"(max pairwise diff {worst:.1e})")

    def test_07_optimal_prizes(self):
        worst = 0.0
        for lam in LAMBDAS:
            profile = solve_profile(case_study_spec(lam), "opt")
            z1, z2 = profile.prizes
            s = np.sqrt(2.0 * lam * z1.b_nodes)
            t1 = 2.0 * s ** 3 / (3.0 * lam ** 2 * (s + 1.0))
            t2 = 2.0 * z2.b_nodes / (3.0 * lam)
            worst = max(worst,
                        float(np.max(np.abs(z1.z_nodes - t1) / t1)),
                        float(np.max(np.abs(z2.z_nodes - t2) / t2)))
            top = profile.strategies[0].max_bid
            assert abs(z1(top) - z2(top)) <= 1e-6 * z2(top)
        assert worst <= 1e-5
        report(7, f"prize schedules match closed forms within {worst:.1e} "
                  f"(tol 1e-5) and agree at the top effort (tol 1e-6)")

    def test_08_diminishing_returns_neutralized(self):
        lam = 0.1
        opt_n = np.array([opt_profit(case_study_spec(lam).symmetrized(0, n)).total
                          for n in range(2, 21)])
        truth = np.arange(2, 21) / (12.0 * lam)
        assert np.max(np.abs(opt_n - truth) / truth) <= 1e-4
        second = np.diff(opt_n, 2)
        assert np.max(np.abs(second)) <= 1e-6
        ns = np.arange(2, 51)
        fix_n = np.array([sym_profit(int(n), F1, PAY, 1.0, lam) for n in ns])
        fix_truth = 2.0 * np.sqrt(ns * (ns - 1.0)) / (ns + 2.0) - lam
        assert np.max(np.abs(fix_n - fix_truth) / np.abs(fix_truth)) <= 1e-5
        assert np.all(np.diff(fix_n, 2) <= 1e-12)
        saturation = sym_profit(10_000, F1, PAY, 1.0, lam)
        assert abs(saturation - (2.0 - lam)) <= 1e-3
        report(8, "variable-prize profit grows linearly in n (zero second "
                  "difference); fixed-prize profit is concave and saturates "
                  f"at 2 - lam (n=1e4 value {saturation:.5f})")

    def test_09_best_response_verification(self, all_profiles):
        gains = {}
        for name, profile in all_profiles.items():
            rep = best_response_check(profile)  # 101 x 2001 grids
            gains[name] = rep.max_gain
            assert rep.max_gain <= 1e-3, name
        # Refinement study: the grid-resolution gauge must shrink
        # quadratically when both grids double.  The gauge is an unbiased
        # O(h^2) statistic whose realized doubling ratio fluctuates a few
        # percent around 4, so the gate is 3.5x plus an absolute cap; the
        # distinguishing failure mode (an equilibrium violation) would
        # leave a resolution-independent floor with ratio near 1.
        ratios = {}
        for name, profile in all_profiles.items():
            coarse, fine = refinement_study(profile, 101, 2001)
            ratios[name] = coarse / fine
            assert ratios[name] >= 3.5, (name, coarse, fine)
            assert fine <= 1e-6, (name, fine)
        perturbed = best_response_check(perturb_profile(all_profiles["opt"], 0.1))
        assert perturbed.max_gain > 1e-3
        report(9, "all four equilibria pass the deviation search (gain <= 1e-3); "
                  "doubling the grids shrinks the discretization gauge by "
                  + "/".join(f"{ratios[k]:.1f}x" for k in ratios)
                  + "; a perturbed profile fails")

    def test_10_individual_rationality(self, all_profiles):
        for name, profile in all_profiles.items():
            rep = check_ir(profile)
            assert rep.min_utility >= -1e-9, name
        opt = all_profiles["opt"]
        v = np.linspace(0.0, 1.0, 101)
        truth = v ** 4 / (12.0 * 0.1 ** 2)
        u = equilibrium_utilities(opt, 0, v)
        assert np.max(np.abs(u - truth)) <= 1e-6 * truth.max()
        live = v >= 0.1
        assert np.max(np.abs(u[live] - truth[live]) / truth[live]) <= 1e-6
        report(10, "participation utility is nonnegative under every mechanism; "
                   "the uniform agent's utility matches v^4/(12 lam^2) within 1e-6")

    def test_11_monte_carlo_campaigns(self, all_profiles):
        analytic = {
            "opt": 1.25,
            "fix": 24.0 / (35.0 * SQRT3) - 0.1,
            "sym1": 1.0 / math.sqrt(2.0) - 0.1,
            "sym2": 0.15,
        }
        zs = {}
        for name, profile in all_profiles.items():
            t0 = time.monotonic()
            res = monte_carlo_campaign(profile, trials=1_000_000, seed=MC_SEED)
            elapsed = time.monotonic() - t0
            assert elapsed <= 60.0, (name, elapsed)
            zs[name] = (res.profit_mean - analytic[name]) / res.profit_stderr
            assert abs(zs[name]) <= 3.0, (name, zs[name])
        repeat = monte_carlo_campaign(all_profiles["opt"], trials=1_000_000, seed=MC_SEED)
        first = monte_carlo_campaign(all_profiles["opt"], trials=1_000_000, seed=MC_SEED)
        assert repeat == first
        report(11, "1e6-trial campaigns reproduce analytic profits (z-scores "
                   + "/".join(f"{zs[k]:+.2f}" for k in zs)
                   + "); repeated runs are bit-identical; each under 60 s")

    def test_12_optimal_fixed_prizes(self):
        lam = 0.1
        _, pi_fix = optimal_fixed_prize("fix", (F1, F2), PAY, lam)
        _, pi_s1 = optimal_fixed_prize("sym", (F1,), PAY, lam, n=2)
        _, pi_s2 = optimal_fixed_prize("sym", (F2,), PAY, lam, n=2)
        assert rel_err(pi_fix, 48.0 / (1225.0 * lam)) <= 1e-4
        assert rel_err(pi_s1, 1.0 / (8.0 * lam)) <= 1e-4
        assert rel_err(pi_s2, 1.0 / (64.0 * lam)) <= 1e-4
        report(12, f"profit-maximizing fixed prizes give 48/(1225 lam) = "
                   f"{pi_fix:.5f}, 1/(8 lam) = {pi_s1:.5f}, 1/(64 lam) = "
                   f"{pi_s2:.5f} (tol 1e-4)")
