"""Acceptance gate: every headline target at its stated tolerance.

Each test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected into the terminal summary.
"""
import math
import sys

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from orderedsearch.buyer_policy import (MarketConfig, PricePolicy, Regime,
                                        buyer_value_visit_first, hotelling_cutoffs,
                                        reservation_cutoff)
from orderedsearch.equilibrium import (GridSpec, grid_deviation_search, solve_single_price_foc,
                                       verify_foc_stationarity, verify_uniform_equilibrium_c0)
from orderedsearch.market_profit import (bonus_decomposition, condition_star_star,
                                         deviation_payoff, hotelling_profit_formulas,
                                         hotelling_total_profit, single_price_profit,
                                         visit_order_profits)
from orderedsearch.montecarlo import simulate

P0 = math.sqrt(2) - 1
SYM = PricePolicy(0.45, 0.51)
HOTELLING = MarketConfig(cost=0.01)
MC_N = 1_000_000
MC_SEEDS = (0, 1, 2)


def record(label, ok, detail):
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_zero_cost_single_price():
    p = solve_single_price_foc(0.0)
    record("1", abs(p - P0) <= 1e-12, f"p*={p:.15g} target sqrt(2)-1")


def test_criterion_02_hotelling_single_price():
    p = solve_single_price_foc(0.01)
    total = hotelling_total_profit(p, 0.0, 0.5, HOTELLING)
    engine = deviation_payoff(PricePolicy.uniform(p), p, HOTELLING)
    ok = abs(p - 0.4) <= 1e-12 and abs(total - 0.168) <= 1e-12 and abs(engine - 0.168) <= 1e-12
    record("2", ok, f"p*={p:.15g} profit={total:.15g} location-integrated={engine:.15g}")


def test_criterion_03_reservation_cutoff():
    v = reservation_cutoff(SYM).v_star
    record("3", abs(v - 0.71359) <= 1e-5, f"v*={v:.10f} target 0.71359 tol 1e-5")


def test_criterion_04_profits_by_visit_order():
    b = visit_order_profits(SYM, SYM)
    ok = (abs(b.profit_second - 0.16729) <= 1e-5
          and abs(b.profit_first - 0.18627) <= 2e-4
          and abs(b.profit_first - 0.186177890309) <= 1e-9)
    record("4", ok, f"profit_first={b.profit_first:.10f} profit_second={b.profit_second:.10f}")


def test_criterion_05_condition_closed_form():
    rng = np.random.default_rng(20251015)
    worst, negative, n = 0.0, True, 0
    while n < 1000:
        lo, hi = sorted(rng.random(2))
        pol = PricePolicy(float(lo), float(hi))
        if reservation_cutoff(pol).regime is not Regime.RETURNS_POSSIBLE:
            continue
        val = condition_star_star(pol)
        worst = max(worst, abs(val - lo * (lo - hi)))
        if 0 < lo < hi:
            negative &= val < 0
        n += 1
    record("5", worst <= 1e-10 and negative,
           f"max |condition - p_lo(p_lo-p_hi)| = {worst:.2e} over {n} pairs, all negative={negative}")


def test_criterion_06_grid_deviation_search():
    cand = PricePolicy.uniform(0.4)
    coarse = grid_deviation_search(cand, HOTELLING, GridSpec(0.0, 1.0, 0.01))
    top = max(v for _, v in coarse.table)
    fine = grid_deviation_search(cand, HOTELLING, GridSpec(0.35, 0.45, 0.005))
    ok = (coarse.best_deviation.astuple() == (0.41, 0.41)
          and abs(coarse.best_payoff - 0.1679067794) <= 1e-6
          and top <= 0.168 + 1e-12 and not coarse.profitable
          and fine.best_deviation.astuple() == (0.405, 0.405)
          and abs(fine.best_payoff - 0.1679769081) <= 1e-6)
    record("6", ok, f"step 0.01 best {coarse.best_deviation.astuple()} {coarse.best_payoff:.10f} "
                    f"(max over grid {top:.10f}); step 0.005 best "
                    f"{fine.best_deviation.astuple()} {fine.best_payoff:.10f}")


def test_criterion_07_zero_cost_equilibrium():
    rep = verify_uniform_equilibrium_c0(GridSpec(0.0, 1.0, 0.01))
    ok = (not rep.profitable and not rep.condition_violations
          and abs(rep.candidate_payoff - 0.1715729) <= 1e-7
          and abs(rep.candidate_payoff - P0 * (1 - P0 ** 2) / 2) <= 1e-9)
    record("7", ok, f"candidate payoff {rep.candidate_payoff:.10f}, best deviation "
                    f"{rep.best_deviation.astuple()} {rep.best_payoff:.10f}, "
                    f"{rep.conditions_checked} conditions negative")


def test_criterion_08_buyer_value_falls_with_return_price():
    rng = np.random.default_rng(8)
    bad = 0
    for _ in range(100):
        a_f, a_s = rng.uniform(0.05, 0.9, 2)
        other = PricePolicy(float(a_s), float(a_s + rng.uniform(0, 0.2)))
        # above this return price nobody comes back and the value is flat
        top = min(a_f + 0.5 * (1 - a_s) ** 2, 1.0)
        highs = np.linspace(a_f, top, 102)[:-1]
        vals = [buyer_value_visit_first(PricePolicy(float(a_f), float(h)), other) for h in highs]
        bad += not np.all(np.diff(vals) < 0)
    record("8", bad == 0, f"{100 - bad}/100 pairs strictly decreasing")


DPS = (1e-2, 1e-3, 1e-4)


def _scaled(field):
    return [getattr(bonus_decomposition(P0, d), field) / d for d in DPS]


def test_criterion_09a_bonus_gain_is_first_order():
    s = _scaled("gain_deter")
    ratios = [x / s[-1] for x in s]
    record("9a", all(0.5 <= r <= 2.0 for r in ratios),
           f"gain_deter/dp relative to dp=1e-4: {', '.join(f'{r:.4f}' for r in ratios)}")


def test_criterion_09b_bonus_discount_loss_shrinks():
    s = _scaled("loss_discount")
    shrink = [s[0] / s[1], s[1] / s[2]]
    record("9b", min(shrink) >= 5.0,
           f"loss_discount/dp per decade shrink {shrink[0]:.3f}, {shrink[1]:.3f} (need >= 5)")


def test_criterion_09c_bonus_second_visit_loss_shrinks():
    s = _scaled("loss_second")
    shrink = [s[0] / s[1], s[1] / s[2]]
    record("9c", min(shrink) >= 5.0,
           f"loss_second/dp per decade shrink {shrink[0]:.3f}, {shrink[1]:.3f} (need >= 5)")


def test_criterion_10_location_identities():
    rng = np.random.default_rng(10)
    msgs, ok = [], True
    for c in (0.01, 0.04):
        cfg, h = MarketConfig(cost=c), 1e-6
        d = (hotelling_cutoffs(0.4, h, cfg).x_star - hotelling_cutoffs(0.4, -h, cfg).x_star) / (2 * h)
        ok &= abs(d - 1 / (2 * math.sqrt(c))) <= 1e-4
        msgs.append(f"dx*/ddp(c={c})={d:.6f}")
    worst = 0.0
    for _ in range(100):
        p, dp, c = rng.uniform(0.2, 0.6), rng.uniform(-0.05, 0.05), rng.uniform(0.001, 0.05)
        cfg = MarketConfig(cost=c)
        xs = hotelling_cutoffs(p, dp, cfg).x_star
        # both location formulas are affine in x, so the midpoint rule is exact
        first = xs * hotelling_profit_formulas(p, dp, xs / 2, cfg)[0]
        second = (1 - xs) * hotelling_profit_formulas(p, dp, (1 + xs) / 2, cfg)[1]
        worst = max(worst, abs(first + second - hotelling_total_profit(p, dp, xs, cfg)))
    stationarity = max(abs(verify_foc_stationarity(solve_single_price_foc(c), c))
                       for c in (0.0, 0.01, 0.04))
    ok &= worst <= 1e-12 and stationarity <= 1e-12
    msgs.append(f"total-profit identity err {worst:.1e}, FOC residual {stationarity:.1e}")
    record("10", ok, "; ".join(msgs))


def test_criterion_11_monte_carlo():
    sym = visit_order_profits(SYM, SYM)
    v_star = reservation_cutoff(SYM).v_star
    failures, checks = [], 0

    def check(name, est, se, target):
        nonlocal checks
        checks += 1
        if abs(est - target) > 3 * se:
            failures.append(f"{name}: {est:.6f} vs {target:.6f} (se {se:.1e})")

    for seed in MC_SEEDS:
        r = simulate(PricePolicy.uniform(0.4), PricePolicy.uniform(0.4), HOTELLING, n=MC_N, seed=seed)
        check(f"seed {seed} c=0.01 profit", r.firm1.profit, r.firm1.profit_se, 0.168)
        r = simulate(SYM, SYM, n=MC_N, seed=seed)
        f = r.firm1
        check(f"seed {seed} profit_first", f.profit_first, f.profit_first_se, sym.profit_first)
        check(f"seed {seed} profit_second", f.profit_second, f.profit_second_se, sym.profit_second)
        share = r.counts[1][0] / f.n_first
        check(f"seed {seed} buy-now share 1-v*", share,
              math.sqrt(share * (1 - share) / f.n_first), 1 - v_star)
        r = simulate(PricePolicy.uniform(P0), PricePolicy.uniform(P0), n=MC_N, seed=seed)
        check(f"seed {seed} c=0 payoff", r.firm1.profit, r.firm1.profit_se, single_price_profit(P0))
    record("11", not failures,
           f"{checks - len(failures)}/{checks} within 3 SE at N={MC_N}, seeds {MC_SEEDS}"
           + (f"; {failures}" if failures else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
