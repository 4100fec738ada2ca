"""
A first-visit discount and the buyer's cutoff
=============================================

A seller charging 0.45 on the first visit and 0.51 on return, facing a
rival that does the same, with values uniform on [0, 1] and free search.
"""

from orderedsearch import (PricePolicy, buyer_value_visit_first, condition_star_star,
                           plan_first_visit, reservation_cutoff, visit_order_profits)

pair = PricePolicy(0.45, 0.51)

# buyers valuing the first seller above v* buy on the spot
cut = reservation_cutoff(pair)
print(f"v* = {cut.v_star:.6f}  ({cut.regime.value})")

# below v* they inspect the rival; some come back at the higher price
plan = plan_first_visit(pair, pair)
print(f"search on [{plan.search_from:.4f}, {plan.buy_from:.4f})")

# profit when visited first and when visited second
b = visit_order_profits(pair, pair)
print(f"visited first: {b.profit_first:.6f}   visited second: {b.profit_second:.6f}")

# charging 0.45 to everybody instead: the condition is negative, so it pays
print(f"condition = {condition_star_star(pair):.6f}")

# a lower return price makes a seller the better first stop
for high in (0.45, 0.48, 0.51):
    v = buyer_value_visit_first(PricePolicy(0.45, high), pair)
    print(f"return price {high:.2f}: buyer value {v:.6f}")
