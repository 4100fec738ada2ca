"""
Simulated buyers against the analytic profits
=============================================

Draw a million buyers, let each follow the optimal plan and compare the
sellers' average revenue with the exact integrals.
"""

from orderedsearch import MarketConfig, PricePolicy, simulate, visit_order_profits

pair = PricePolicy(0.45, 0.51)
exact = visit_order_profits(pair, pair)

r = simulate(pair, pair, n=1_000_000, seed=0)
f = r.firm1
print(f"visited first : {f.profit_first:.5f} +/- {f.profit_first_se:.5f}  exact {exact.profit_first:.5f}")
print(f"visited second: {f.profit_second:.5f} +/- {f.profit_second_se:.5f}  exact {exact.profit_second:.5f}")
print("outcome shares:", {k: round(v, 4) for k, v in r.demand_shares.items()})

# with travel costs, some buyers far from both sellers stay home
r = simulate(PricePolicy.uniform(0.4), PricePolicy.uniform(0.4), MarketConfig(cost=0.5),
             n=200_000, seed=1)
print(f"staying home at c=0.5: {r.counts[0][3] / r.n:.4f}")
