"""
Searching a price grid for a profitable deviation
=================================================

Buyers live on a line between the two sellers and pay 0.01 per unit of
distance travelled. Both sellers charging 0.4 is the single-price
candidate; here one seller tries every committed pair near it.
"""

from orderedsearch import (GridSpec, MarketConfig, PricePolicy, grid_deviation_search,
                           solve_single_price_foc)

config = MarketConfig(cost=0.01)
p = solve_single_price_foc(config.cost)
print(f"single-price candidate p* = {p:.10f}")

# a local window keeps this quick; the CLI default sweeps all of [0, 1]
rep = grid_deviation_search(PricePolicy.uniform(p), config, GridSpec(0.35, 0.45, 0.005))
print(f"candidate payoff {rep.candidate_payoff:.10f}")
print(f"best deviation {rep.best_deviation.astuple()} -> {rep.best_payoff:.10f}")
print("profitable" if rep.profitable else "not profitable")

# the five best pairs: all of them are single prices
for policy, payoff in sorted(rep.table, key=lambda t: -t[1])[:5]:
    print(f"  {policy.astuple()}  {payoff:.10f}")

with open("deviation_grid.csv", "w") as fh:
    fh.write(rep.to_csv())
