"""Fixed-prize benchmarks: link ODE, FIX/SYM strategies, profits, Z*.

Closed forms for the built-in contest at prize Z:

    link       k(v)  = v^2
    FIX        b1(v) = sqrt(Z) v^(3/2)/sqrt(3),  b2(v) = sqrt(Z) v^(3/4)/sqrt(3)
    SYM-1      b(v)  = sqrt(Z) v / sqrt(2)
    SYM-2      b(v)  = sqrt(Z) v / 2
    FIX-n      b(v)  = sqrt((n-1)/n) v^(n/2)   (Z = 1)
    profits    pi_fix  = 24 sqrt(Z)/(35 sqrt 3) - lam Z
               pi_sym1 = sqrt(Z)/sqrt(2) - lam Z
               pi_sym2 = sqrt(Z)/4 - lam Z
               pi_fixn = 2 sqrt(n(n-1))/(n+2) - lam
    optima     pi_fix*  = 48/(1225 lam)
               pi_sym1* = 1/(8 lam),  pi_sym2* = 1/(64 lam)
"""

import math

import numpy as np
import pytest

from allpay.benchmarks import (
    MechanismError,
    OptimizerError,
    fix_profit,
    fix_strategies,
    optimal_fixed_prize,
    solve_fix_link,
    sym_profit,
    sym_strategy,
)
from allpay.model import AtomUniform, MonomialPayment, PowerLaw, Uniform
from allpay.numerics import Interval, find_root

F1 = Uniform()
F2 = AtomUniform(w=0.5)
PAY = MonomialPayment()

SQRT3 = math.sqrt(3.0)
FIX_REVENUE = 24.0 / (35.0 * SQRT3)


class TestLink:
    def test_square_law(self):
        link = solve_fix_link(F1, F2)
        assert link.forward(0.5) == pytest.approx(0.25, abs=1e-9)
        assert link.forward(1.0) == 1.0
        dense = np.linspace(link.v_nodes[0], 1.0, 20001)
        assert np.max(np.abs(link.forward(dense) - dense ** 2)) <= 1e-6

    def test_boundary_pinned(self):
        link = solve_fix_link(F1, F2)
        assert link.v_nodes[-1] == 1.0 and link.k_nodes[-1] == 1.0

    def test_identity_when_symmetric(self):
        link = solve_fix_link(F1, Uniform())
        dense = np.linspace(link.v_nodes[0], 1.0, 5001)
        assert np.max(np.abs(link.forward(dense) - dense)) <= 1e-9

    def test_interior_hit_for_stronger_opponent(self):
        # Against F2 = v^3 the link k satisfies k^2 = 1 + (2/3) log v and
        # reaches the bottom of the support at v = exp(-3/2).
        link = solve_fix_link(F1, PowerLaw(alpha=3.0))
        assert link.lower_hit == pytest.approx(math.exp(-1.5), abs=5e-3)
        dense = np.linspace(link.lower_hit, 1.0, 2001)[1:]
        truth = np.sqrt(1.0 + (2.0 / 3.0) * np.log(dense))
        assert np.max(np.abs(link.forward(dense) - truth)) <= 1e-3

    def test_inverse(self):
        link = solve_fix_link(F1, F2)
        probes = np.linspace(0.05, 1.0, 50)
        assert np.max(np.abs(link.inverse(probes ** 2) - probes)) <= 1e-8


class TestFixStrategies:
    def test_closed_forms(self, fix01):
        b1, b2 = fix01.strategies
        assert b1.forward(1.0) == pytest.approx(1.0 / SQRT3, rel=1e-8)
        assert b2.forward(1.0) == pytest.approx(1.0 / SQRT3, rel=1e-8)
        assert b2.forward(0.5) == pytest.approx(0.5 ** 0.75 / SQRT3, rel=1e-8)
        v = b1.v_nodes[1:]
        assert np.max(np.abs(b1.forward(v) - v ** 1.5 / SQRT3) / (v ** 1.5 / SQRT3)) <= 1e-5
        assert np.max(np.abs(b2.forward(v) - v ** 0.75 / SQRT3) / (v ** 0.75 / SQRT3)) <= 1e-5

    def test_zero_at_link_hit(self, fix01):
        b1, _ = fix01.strategies
        assert b1.forward(0.0) == 0.0

    def test_common_top_bid(self, fix01):
        b1, b2 = fix01.strategies
        assert abs(b1.max_bid - b2.max_bid) <= 1e-6

    def test_prize_scaling(self):
        b1, _ = fix_strategies(F1, F2, PAY, prize=4.0)
        assert b1.forward(1.0) == pytest.approx(2.0 / SQRT3, rel=1e-8)

    def test_rejects_type_dependent_payment(self):
        with pytest.raises(MechanismError):
            fix_strategies(F1, F2, MonomialPayment(d=1.0), 1.0)


class TestSymStrategy:
    def test_sym1(self):
        s = sym_strategy(2, F1, PAY)
        assert s.forward(1.0) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
        v = np.linspace(0.0, 1.0, 101)
        assert np.allclose(s.forward(v), v / math.sqrt(2.0), atol=1e-12)

    def test_sym2(self):
        s = sym_strategy(2, F2, PAY)
        v = np.linspace(0.0, 1.0, 101)
        assert np.allclose(s.forward(v), v / 2.0, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 5])
    def test_fixn_schedule(self, n):
        s = sym_strategy(n, F1, PAY)
        v = np.linspace(0.0, 1.0, 101)
        truth = math.sqrt((n - 1.0) / n) * v ** (n / 2.0)
        assert np.allclose(s.forward(v), truth, atol=1e-12)

    def test_matches_fix_under_symmetry(self):
        sym = sym_strategy(2, F1, PAY)
        b1, b2 = fix_strategies(F1, Uniform(), PAY)
        v = np.linspace(0.0, 1.0, 101)
        assert np.max(np.abs(sym.forward(v) - b1.forward(v))) <= 1e-6
        assert np.max(np.abs(sym.forward(v) - b2.forward(v))) <= 1e-6

    def test_rejects_atom_away_from_zero(self):
        with pytest.raises(MechanismError):
            sym_strategy(2, AtomUniform(w=0.3, lo=0.5, hi=1.0), PAY)


class TestProfits:
    @pytest.mark.parametrize("lam", [0.1, 0.3])
    def test_fix(self, lam):
        assert fix_profit(F1, F2, PAY, 1.0, lam) == pytest.approx(FIX_REVENUE - lam, abs=1e-9)

    @pytest.mark.parametrize("lam", [0.1, 0.5])
    def test_sym(self, lam):
        assert sym_profit(2, F1, PAY, 1.0, lam) == pytest.approx(1.0 / math.sqrt(2) - lam, abs=1e-10)
        assert sym_profit(2, F2, PAY, 1.0, lam) == pytest.approx(0.25 - lam, abs=1e-10)

    def test_sym2_zero_profit_at_quarter(self):
        assert sym_profit(2, F2, PAY, 1.0, 0.25) == pytest.approx(0.0, abs=1e-12)

    def test_fixn_sixteen(self):
        truth = 2.0 * math.sqrt(16.0 * 15.0) / 18.0 - 0.1
        assert sym_profit(16, F1, PAY, 1.0, 0.1) == pytest.approx(truth, rel=1e-10)

    def test_zero_profit_crossovers(self):
        lam_fix = find_root(lambda lam: fix_profit(F1, F2, PAY, 1.0, lam),
                            Interval(0.3, 0.5))
        assert lam_fix == pytest.approx(FIX_REVENUE, abs=1e-8)
        lam_s1 = find_root(lambda lam: sym_profit(2, F1, PAY, 1.0, lam), Interval(0.6, 0.8))
        assert lam_s1 == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-10)
        lam_s2 = find_root(lambda lam: sym_profit(2, F2, PAY, 1.0, lam), Interval(0.2, 0.3))
        assert lam_s2 == pytest.approx(0.25, abs=1e-10)

    def test_fixn_concave_and_saturating(self):
        vals = [sym_profit(n, F1, PAY, 1.0, 0.1) for n in range(2, 51)]
        second = np.diff(vals, 2)
        assert np.all(second <= 1e-12)
        assert abs(sym_profit(10_000, F1, PAY, 1.0, 0.1) - 1.9) <= 1e-3

    def test_profit_ranking(self):
        # sym2 < fix < sym1 <= opt over the documented valuation range.
        from allpay.optimal import opt_profit
        from allpay.config import case_study_spec
        for lam in np.linspace(0.02, 0.70, 18):
            p_opt = opt_profit(case_study_spec(float(lam))).total
            p_fix = FIX_REVENUE - lam
            p_s1 = 1.0 / math.sqrt(2.0) - lam
            p_s2 = 0.25 - lam
            assert p_s2 < p_fix < p_s1 <= p_opt + 1e-12


class TestOptimalFixedPrize:
    def test_fix(self):
        z_star, pi_star = optimal_fixed_prize("fix", (F1, F2), PAY, 0.1)
        assert pi_star == pytest.approx(48.0 / (1225.0 * 0.1), rel=1e-6)
        assert z_star == pytest.approx((FIX_REVENUE / 0.2) ** 2, rel=1e-4)

    def test_sym(self):
        _, pi1 = optimal_fixed_prize("sym", (F1,), PAY, 0.1, n=2)
        assert pi1 == pytest.approx(1.25, rel=1e-6)
        _, pi2 = optimal_fixed_prize("sym", (F2,), PAY, 0.1, n=2)
        assert pi2 == pytest.approx(1.0 / 6.4, rel=1e-6)

    def test_unknown_mechanism(self):
        with pytest.raises(MechanismError):
            optimal_fixed_prize("vcg", (F1, F2), PAY, 0.1)
