"""Seller profits by visit order, deviation payoffs and profit conditions.

Production cost is zero, so a seller's profit is the expected price it
collects from the single buyer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from scipy.integrate import quad

from .buyer_policy import (FirstVisit, MarketConfig, PricePolicy, Regime, VisitPlan,
                           _bracketed_root, first_visit_choice, first_visit_regions,
                           plan_first_visit, reservation_cutoff)
from .errors import NumericalError, RegimeError
from .valuation import (UNIFORM01, ValuationDistribution, expect_excess, integrate,
                        integrate_piecewise_polynomial)

__all__ = [
    "OrderOutcome",
    "ProfitBreakdown",
    "BonusDecomposition",
    "order_outcome",
    "single_price_profit",
    "visit_order_profits",
    "purchase_shares",
    "condition_star_star",
    "step2_profit_bound",
    "bonus_decomposition",
    "hotelling_profit_formulas",
    "hotelling_total_profit",
    "deviation_payoff",
]

LOCATION_EPSABS = 1e-13


@dataclass(frozen=True)
class OrderOutcome:
    """Purchase probabilities and revenues for one visit order."""

    buy_first_visit: float
    buy_on_return: float
    buy_from_second: float
    no_purchase: float
    revenue_first: float
    revenue_second: float


@dataclass(frozen=True)
class ProfitBreakdown:
    profit_first: float
    profit_second: float
    total: float
    weight_first: float
    demand_first: float
    demand_second: float


@dataclass(frozen=True)
class BonusDecomposition:
    delta_p: float
    v_indiff: float
    gain_deter: float
    loss_discount: float
    net_first: float
    loss_second: float
    below_price: bool = False


def order_outcome(plan: VisitPlan) -> OrderOutcome:
    """Who sells, and at what price, once the buyer follows ``plan``."""
    dist = plan.dist
    F = dist.cdf
    af, bf = plan.first.first_price, plan.first.return_price
    as_ = plan.second.first_price
    lo, hi = plan.search_from, plan.buy_from

    def p_return(v):
        return F(as_ + v - bf)

    def p_second(v):
        return 1.0 - F(as_ + max(v - bf, 0.0))

    ret_lo = max(lo, bf)
    if dist.is_uniform:
        returned = (integrate_piecewise_polynomial(p_return, ret_lo, hi, plan.kinks)
                    if ret_lo < hi else 0.0)
        second = integrate_piecewise_polynomial(p_second, lo, hi, plan.kinks)
        now = 1.0 - hi
    else:
        returned = integrate(dist, p_return, ret_lo, hi, plan.kinks) if ret_lo < hi else 0.0
        second = integrate(dist, p_second, lo, hi, plan.kinks)
        now = 1.0 - F(hi)
    none = max(1.0 - now - returned - second, 0.0)
    return OrderOutcome(buy_first_visit=now, buy_on_return=returned,
                        buy_from_second=second, no_purchase=none,
                        revenue_first=af * now + bf * returned,
                        revenue_second=as_ * second)


def single_price_profit(p: float, dist: ValuationDistribution = UNIFORM01) -> float:
    """Profit of each firm when both post ``p`` and search is free:
    ``p (1 - F(p)^2) / 2``."""
    return p * (1.0 - dist.cdf(p) ** 2) / 2.0


def _weight(choice: FirstVisit) -> float:
    return {FirstVisit.FIRM1: 1.0, FirstVisit.FIRM2: 0.0, FirstVisit.INDIFFERENT: 0.5}[choice]


def visit_order_profits(policy: PricePolicy, opp: PricePolicy,
                        dist: ValuationDistribution = UNIFORM01) -> ProfitBreakdown:
    """Zero-cost profit of the seller posting ``policy`` against ``opp``,
    conditional on being visited first and second, and weighted by the
    buyer's first-visit choice."""
    as_first = order_outcome(plan_first_visit(policy, opp, dist))
    as_second = order_outcome(plan_first_visit(opp, policy, dist))
    w = _weight(first_visit_choice(policy, opp, dist))
    pf, ps = as_first.revenue_first, as_second.revenue_second
    return ProfitBreakdown(
        profit_first=pf, profit_second=ps, total=w * pf + (1.0 - w) * ps,
        weight_first=w,
        demand_first=as_first.buy_first_visit + as_first.buy_on_return,
        demand_second=as_second.buy_from_second)


def purchase_shares(policy1: PricePolicy, policy2: PricePolicy,
                    dist: ValuationDistribution = UNIFORM01) -> dict[str, float]:
    """Zero-cost probabilities that the buyer buys from firm 1, firm 2 or nobody."""
    w = _weight(first_visit_choice(policy1, policy2, dist))
    o1 = order_outcome(plan_first_visit(policy1, policy2, dist))
    o2 = order_outcome(plan_first_visit(policy2, policy1, dist))
    firm1 = w * (o1.buy_first_visit + o1.buy_on_return) + (1 - w) * o2.buy_from_second
    firm2 = w * o1.buy_from_second + (1 - w) * (o2.buy_first_visit + o2.buy_on_return)
    none = w * o1.no_purchase + (1 - w) * o2.no_purchase
    return {"firm1": firm1, "firm2": firm2, "none": none}


def condition_star_star(policy: PricePolicy,
                        dist: ValuationDistribution = UNIFORM01) -> float:
    """Demand lost minus demand won when a discriminating seller switches to
    its first-visit price for everybody.

    Compares the trapezoid of second-visit sales given up with the triangle
    of first-visit sales gained, both at the first-visit price. Negative
    means the switch pays. Only meaningful when returns happen (``v* >``
    return price).
    """
    cut = reservation_cutoff(policy, dist)
    if cut.regime is not Regime.RETURNS_POSSIBLE:
        raise RegimeError(
            f"v*={cut.v_star:.6g} <= return price {policy.return_price}: no returns")
    lo, hi, v = policy.first_price, policy.return_price, cut.v_star
    F = dist.cdf
    gap = hi - lo
    lost = (integrate(dist, lambda x: F(x) - F(lo), lo, hi)
            + integrate(dist, lambda x: F(x) - F(x - gap), hi, v, points=(gap,)))
    won = integrate(dist, lambda x: 1.0 - F(x), v, dist.support_max)
    return lost - won


def step2_profit_bound(policy: PricePolicy,
                       dist: ValuationDistribution = UNIFORM01) -> tuple[float, float]:
    """``(bound, profit)`` for a symmetric pair in which nobody ever returns.

    ``bound`` is what a seller earns by charging its first-visit price to
    everyone and being visited first; ``profit`` is its symmetric-play
    profit, which must fall strictly short of it.
    """
    cut = reservation_cutoff(policy, dist)
    if cut.regime is not Regime.NO_RETURN:
        raise RegimeError(
            f"v*={cut.v_star:.6g} > return price {policy.return_price}: returns happen")
    lo = policy.first_price
    bound = lo * (1.0 - dist.cdf(lo) ** 2) / 2.0
    profit = visit_order_profits(policy, policy, dist).total
    if lo > 0 and not profit < bound:
        raise NumericalError(f"profit {profit} does not fall below bound {bound}")
    return bound, profit


def bonus_decomposition(p: float, delta_p: float,
                        dist: ValuationDistribution = UNIFORM01) -> BonusDecomposition:
    """Effects of a first-visit bonus ``delta_p`` off a uniform price ``p``
    when the rival charges ``p`` to everyone and search is free.

    When visited first, the bonus stops buyers valuing the seller at
    ``v_indiff`` or more from searching: it wins the ones who would have
    bought from the rival (``gain_deter``) and gives the discount to the
    ones who would have bought anyway (``loss_discount``). When visited
    second only the lower price matters (``loss_second``).
    """
    if not 0.0 < delta_p < p:
        raise ValueError(f"need 0 < delta_p < p, got delta_p={delta_p}, p={p}")
    V = dist.support_max
    F = dist.cdf
    if dist.is_uniform:
        v = 1.0 - math.sqrt(2.0 * delta_p)
    else:
        v = _bracketed_root(lambda t: delta_p - expect_excess(dist, t), 0.0, V,
                            "bonus indifference")
    green = integrate(dist, lambda x: 1.0 - F(x), v, V)
    red = integrate(dist, F, max(v, p), V)
    gain = (p - delta_p) * green
    loss = delta_p * red
    rival = PricePolicy.uniform(p)
    plain = order_outcome(plan_first_visit(rival, rival, dist)).revenue_second
    bonus = PricePolicy(p - delta_p, p)
    discounted = order_outcome(plan_first_visit(rival, bonus, dist)).revenue_second
    return BonusDecomposition(delta_p=delta_p, v_indiff=v, gain_deter=gain,
                              loss_discount=loss, net_first=gain - loss,
                              loss_second=plain - discounted, below_price=v < p)


def hotelling_profit_formulas(p_star: float, delta_p: float, x: float,
                              config: MarketConfig) -> tuple[float, float]:
    """Closed-form profit at location ``x`` of the firm undercutting a uniform
    ``p_star`` by ``delta_p``, when visited first and when visited second."""
    c = config.cost
    price = p_star - delta_p
    first = price * (0.5 + c * (1.0 - x) + delta_p - 0.5 * p_star ** 2)
    second = price * (-c * x + 0.5 + delta_p + 0.5 * delta_p ** 2 - 0.5 * p_star ** 2)
    return first, second


def hotelling_total_profit(p_star: float, delta_p: float, x_star: float,
                           config: MarketConfig) -> float:
    """Location-averaged profit of the undercutting firm when buyers left of
    ``x_star`` visit it first."""
    c = config.cost
    return (p_star - delta_p) * (0.5 + delta_p - 0.5 * p_star ** 2 + c * x_star
                                 + 0.5 * delta_p ** 2 * (1.0 - x_star) - c / 2.0)


def _first_revenue(dev, opp, dist, second_cost):
    return order_outcome(plan_first_visit(dev, opp, dist, second_cost)).revenue_first


def _second_revenue(dev, opp, dist, second_cost):
    return order_outcome(plan_first_visit(opp, dev, dist, second_cost)).revenue_second


def _location_integral(f, a, b):
    if b <= a:
        return 0.0
    val, _err = quad(f, a, b, epsabs=LOCATION_EPSABS, epsrel=1e-12, limit=200)
    return val


def deviation_payoff(dev: PricePolicy, opp: Union[PricePolicy, float],
                     config: MarketConfig = MarketConfig()) -> float:
    """Expected profit of a seller committing to ``dev`` against ``opp``.

    With ``cost = 0`` location is irrelevant and the buyer's first visit
    follows :func:`first_visit_choice` (exact ties split 50/50). With
    ``cost > 0`` the deviator sits at 0 of the unit line; its profit is
    integrated over buyer locations, split where the first-visit choice
    and participation change.
    """
    if not isinstance(opp, PricePolicy):
        opp = PricePolicy.uniform(float(opp))
    dist, c = config.dist, config.cost
    if c == 0.0:
        w = _weight(first_visit_choice(dev, opp, dist))
        total = 0.0
        if w > 0.0:
            total += w * _first_revenue(dev, opp, dist, 0.0)
        if w < 1.0:
            total += (1.0 - w) * _second_revenue(dev, opp, dist, 0.0)
        return total
    regions = first_visit_regions(dev, opp, config)
    until = min(regions.x_star, regions.firm1_until)
    start = max(regions.x_star, regions.firm2_from)
    served_first = _location_integral(
        lambda x: _first_revenue(dev, opp, dist, c * (1.0 - x)), 0.0, until)
    served_second = _location_integral(
        lambda x: _second_revenue(dev, opp, dist, c * x), start, 1.0)
    return served_first + served_second
