"""Optimal sequential search of a buyer facing two committed price pairs.

A seller commits to ``(first_price, return_price)``: the first is charged
when the buyer buys during the first visit, the second when the buyer leaves,
inspects the rival and comes back. Returning is free. With a Hotelling
travel cost ``c`` a buyer located at ``x`` pays ``c*x`` to visit firm 1 and
``c*(1-x)`` to visit firm 2, each at most once.

After the first visit the buyer's problem is summarised by a
:class:`VisitPlan`: buy at once when the first value is at least
``buy_from``, inspect the rival when it lies in ``[search_from, buy_from)``,
and leave otherwise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from scipy.optimize import brentq

from .errors import RootNotFoundError
from .valuation import (UNIFORM01, ValuationDistribution, expect_excess,
                        integrate, integrate_piecewise_polynomial)

__all__ = [
    "PricePolicy",
    "MarketConfig",
    "Regime",
    "FirstVisit",
    "SearchCutoffs",
    "HotellingCutoffs",
    "VisitPlan",
    "VisitRegions",
    "plan_first_visit",
    "continuation_value",
    "reservation_cutoff",
    "buyer_value_visit_first",
    "first_visit_choice",
    "first_visit_regions",
    "hotelling_cutoffs",
    "hotelling_indifference_gap",
    "sequential_value_at_location",
]

ROOT_XTOL = 1e-14
TIE_TOL = 1e-12


@dataclass(frozen=True)
class PricePolicy:
    """A committed price pair: ``first_price`` on the first visit,
    ``return_price`` when the buyer comes back."""

    first_price: float
    return_price: float

    def __post_init__(self):
        lo, hi = self.first_price, self.return_price
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("prices must be finite")
        if lo < 0:
            raise ValueError(f"first_price must be >= 0, got {lo}")
        if lo > hi:
            raise ValueError(
                f"first_price {lo} exceeds return_price {hi}; need first <= return")

    @classmethod
    def uniform(cls, price: float) -> "PricePolicy":
        return cls(price, price)

    @property
    def is_uniform(self) -> bool:
        return self.first_price == self.return_price

    def astuple(self) -> tuple[float, float]:
        return (self.first_price, self.return_price)


@dataclass(frozen=True)
class MarketConfig:
    dist: ValuationDistribution = UNIFORM01
    cost: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.cost) and self.cost >= 0):
            raise ValueError(f"cost must be >= 0, got {self.cost}")


class Regime(enum.Enum):
    RETURNS_POSSIBLE = "returns_possible"
    NO_RETURN = "no_return"


class FirstVisit(enum.Enum):
    FIRM1 = "firm1"
    FIRM2 = "firm2"
    INDIFFERENT = "indifferent"


@dataclass(frozen=True)
class SearchCutoffs:
    v_star: float
    regime: Regime
    participation: bool


@dataclass(frozen=True)
class HotellingCutoffs:
    """Cutoffs of the single-price deviation frame: firm 1 charges
    ``p_star - delta_p``, firm 2 charges ``p_star``."""

    p_star: float
    delta_p: float
    cost: float
    x_star: float
    corner: bool = False

    def v1_of_x(self, x: float) -> float:
        v = 1.0 - self.delta_p - math.sqrt(2.0 * self.cost * (1.0 - x))
        return min(max(v, 0.0), 1.0)

    def v2_of_x(self, x: float) -> float:
        v = 1.0 + self.delta_p - math.sqrt(2.0 * self.cost * x)
        return min(max(v, 0.0), 1.0)


@dataclass(frozen=True)
class VisitPlan:
    first: PricePolicy
    second: PricePolicy
    second_cost: float
    stop_cutoff: float  # smallest v with buy-now >= continue, ignoring the outside option
    buy_from: float
    search_from: float
    dist: ValuationDistribution = field(default=UNIFORM01, repr=False)

    @property
    def kinks(self) -> tuple[float, float]:
        b = self.first.return_price
        return (b, b + self.dist.support_max - self.second.first_price)

    @cached_property
    def value(self) -> float:
        """Expected payoff once at the first seller, first trip cost excluded."""
        af = self.first.first_price
        dist = self.dist

        def g(v):
            return continuation_value(v, self.first, self.second, dist, self.second_cost)

        if dist.is_uniform:
            searched = integrate_piecewise_polynomial(g, self.search_from, self.buy_from,
                                                      self.kinks)
            bought = 0.5 * (1.0 - af) ** 2 - 0.5 * (self.buy_from - af) ** 2
        else:
            searched = integrate(dist, g, self.search_from, self.buy_from, self.kinks)
            bought = integrate(dist, lambda v: v - af, self.buy_from, dist.support_max)
        return searched + bought


@dataclass(frozen=True)
class VisitRegions:
    """Locations served in each visit order when ``cost > 0``.

    The buyer visits firm 1 first on ``[0, firm1_until]`` and firm 2 first
    on ``[firm2_from, 1]``; in between the buyer stays home.
    """

    x_star: float
    firm1_until: float
    firm2_from: float


def _clamp(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


def continuation_value(v: float, first: PricePolicy, second: PricePolicy,
                       dist: ValuationDistribution, second_cost: float = 0.0) -> float:
    """Expected payoff of inspecting ``second`` after valuing ``first`` at ``v``.

    On seeing the rival the buyer takes the best of buying there at its
    first-visit price, returning at ``first.return_price``, or nothing.
    """
    m = max(v - first.return_price, 0.0)
    return -second_cost + m + expect_excess(dist, second.first_price + m)


def _uniform_thresholds(af, bf, as_, d):
    g0 = expect_excess(UNIFORM01, as_) - d
    if af + g0 <= bf:
        vh = af + g0
    else:
        vh = bf + 1.0 - as_ - math.sqrt(2.0 * (bf - af + d))
    vh = _clamp(vh, 0.0, 1.0)
    if g0 >= 0.0:
        vg = 0.0
    elif as_ < 1.0 and 1.0 - as_ - d >= 0.0:
        vg = bf + math.sqrt(2.0 * d + 2.0 * as_ - 1.0) - as_
    else:
        vg = bf + d
    return vh, min(vg, 1.0)


def _bracketed_root(fun: Callable[[float], float], lo: float, hi: float, what: str) -> float:
    """First crossing of a nondecreasing ``fun`` through zero on ``[lo, hi]``,
    clamped to the ends when there is no sign change."""
    flo = fun(lo)
    if flo >= 0.0:
        return lo
    fhi = fun(hi)
    if fhi < 0.0:
        return hi
    try:
        root = brentq(fun, lo, hi, xtol=ROOT_XTOL, rtol=1e-15, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise RootNotFoundError(f"no root for {what} on [{lo}, {hi}]") from exc
    probe = root - 1e-9
    if probe <= lo or fun(probe) < 0.0:
        return root
    # fun is flat at zero left of the root: bisect for where it starts
    a, b = lo, probe
    while b - a > ROOT_XTOL:
        mid = 0.5 * (a + b)
        if fun(mid) < 0.0:
            a = mid
        else:
            b = mid
    return b


def _generic_thresholds(first, second, dist, d):
    af = first.first_price
    V = dist.support_max

    def g(v):
        return continuation_value(v, first, second, dist, d)

    vh = _bracketed_root(lambda v: v - af - g(v), 0.0, V, "stopping cutoff")
    vg = _bracketed_root(g, 0.0, V, "search threshold")
    return vh, vg


def plan_first_visit(first: PricePolicy, second: PricePolicy,
                     dist: ValuationDistribution = UNIFORM01,
                     second_cost: float = 0.0) -> VisitPlan:
    """Optimal plan of a buyer who has just arrived at ``first``.

    Ties between buying now and searching go to buying; ties between
    searching and leaving go to searching.
    """
    af, bf = first.first_price, first.return_price
    as_ = second.first_price
    V = dist.support_max
    if dist.is_uniform:
        vh, vg = _uniform_thresholds(af, bf, as_, second_cost)
    else:
        vh, vg = _generic_thresholds(first, second, dist, second_cost)
    buy_from = min(max(af, vh), V)
    return VisitPlan(first=first, second=second, second_cost=second_cost,
                     stop_cutoff=vh, buy_from=buy_from,
                     search_from=min(vg, buy_from), dist=dist)


def reservation_cutoff(policy: PricePolicy, dist: ValuationDistribution = UNIFORM01,
                       other: PricePolicy | None = None) -> SearchCutoffs:
    """Zero-cost reservation value ``v*`` of a buyer who visits ``policy`` first.

    ``v*`` solves ``E[max(X - p_lo', v* - p_hi, 0)] = v* - p_lo`` where
    ``p_lo'`` is the rival's first-visit price (the seller's own by default,
    i.e. symmetric play). When the solution does not exceed the return
    price, returning never pays and ``v* = p_lo + E[(X - p_lo)+]``.
    """
    other = policy if other is None else other
    plan = plan_first_visit(policy, other, dist, 0.0)
    v_star = plan.stop_cutoff
    regime = (Regime.RETURNS_POSSIBLE if v_star > policy.return_price + TIE_TOL
              else Regime.NO_RETURN)
    return SearchCutoffs(v_star=v_star, regime=regime, participation=plan.value >= 0.0)


def buyer_value_visit_first(visited: PricePolicy, other: PricePolicy,
                            dist: ValuationDistribution = UNIFORM01) -> float:
    """Expected surplus from visiting ``visited`` first and searching optimally
    (zero visit cost)."""
    return plan_first_visit(visited, other, dist, 0.0).value


def first_visit_choice(policy1: PricePolicy, policy2: PricePolicy,
                       dist: ValuationDistribution = UNIFORM01) -> FirstVisit:
    w1 = buyer_value_visit_first(policy1, policy2, dist)
    w2 = buyer_value_visit_first(policy2, policy1, dist)
    if abs(w1 - w2) < TIE_TOL:
        return FirstVisit.INDIFFERENT
    return FirstVisit.FIRM1 if w1 > w2 else FirstVisit.FIRM2


def _travel_costs(x: float, cost: float, first_firm: int) -> tuple[float, float]:
    to1, to2 = cost * x, cost * (1.0 - x)
    return (to1, to2) if first_firm == 1 else (to2, to1)


def sequential_value_at_location(x: float, first: PricePolicy, second: PricePolicy,
                                 config: MarketConfig, first_firm: int = 1) -> float:
    """Value of a buyer at ``x`` who visits ``first`` (firm ``first_firm``)
    first, floored at zero for staying home."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"location must lie in [0, 1], got {x}")
    if first_firm not in (1, 2):
        raise ValueError("first_firm must be 1 or 2")
    d_first, d_second = _travel_costs(x, config.cost, first_firm)
    plan = plan_first_visit(first, second, config.dist, d_second)
    return max(plan.value - d_first, 0.0)


def _value_gap(x, p1, p2, config):
    c, dist = config.cost, config.dist
    w1 = plan_first_visit(p1, p2, dist, c * (1.0 - x)).value - c * x
    w2 = plan_first_visit(p2, p1, dist, c * x).value - c * (1.0 - x)
    return w1, w2


def first_visit_regions(policy1: PricePolicy, policy2: PricePolicy,
                        config: MarketConfig) -> VisitRegions:
    """Split the unit line by the buyer's first visit (``cost > 0``).

    The value of going to firm 1 first is nonincreasing in ``x`` and that
    of going to firm 2 first nondecreasing, so each boundary is a single
    bracketed root.
    """
    if config.cost <= 0:
        raise ValueError("first_visit_regions needs a positive travel cost")

    def gap(x):
        w1, w2 = _value_gap(x, policy1, policy2, config)
        return w1 - w2

    def w1(x):
        return _value_gap(x, policy1, policy2, config)[0]

    def w2(x):
        return _value_gap(x, policy1, policy2, config)[1]

    x_star = _bracketed_root(lambda x: -gap(x), 0.0, 1.0, "first-visit indifference")
    firm1_until = _bracketed_root(lambda x: -w1(x), 0.0, 1.0, "firm 1 participation")
    firm2_from = _bracketed_root(w2, 0.0, 1.0, "firm 2 participation")
    return VisitRegions(x_star=x_star, firm1_until=firm1_until, firm2_from=firm2_from)


def hotelling_indifference_gap(x: float, delta_p: float, cost: float) -> float:
    """Left minus right side of the small-gap first-visit indifference
    condition in the single-price deviation frame; decreasing in ``x``."""
    c = cost
    left = c * (1 - x) * delta_p + 2.0 / 3.0 * c * (1 - x) * math.sqrt(2 * c * (1 - x))
    right = -c * x * delta_p + 2.0 / 3.0 * c * x * math.sqrt(2 * c * x) + delta_p ** 3 / 6.0
    return left - right


def hotelling_cutoffs(p_star: float, delta_p: float, config: MarketConfig) -> HotellingCutoffs:
    """Stopping cutoffs ``v1(x)``, ``v2(x)`` and the indifferent location
    ``x*`` when firm 1 undercuts a uniform price ``p_star`` by ``delta_p``.

    Cutoffs are clamped to ``[0, 1]``; the closed forms are intended for
    ``|delta_p| <= 0.1``. A corner ``x*`` (no sign change) is returned
    clamped with ``corner=True``.
    """
    c = config.cost
    if c <= 0:
        raise ValueError("hotelling_cutoffs needs a positive travel cost")

    def f(x):
        return hotelling_indifference_gap(x, delta_p, c)

    f0, f1 = f(0.0), f(1.0)
    if f0 < 0.0:
        return HotellingCutoffs(p_star, delta_p, c, 0.0, corner=True)
    if f1 > 0.0:
        return HotellingCutoffs(p_star, delta_p, c, 1.0, corner=True)
    x_star = brentq(f, 0.0, 1.0, xtol=ROOT_XTOL, rtol=1e-15, maxiter=200)
    return HotellingCutoffs(p_star, delta_p, c, x_star)
