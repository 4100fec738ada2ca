"""Brute-force reference computations that share no code with the package.

The buyer's choice is made pointwise on a fine midpoint grid of first-visit
values (no cutoff formulas); only the expectation over the second value is
done analytically, for distributions with a closed-form tail integral.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

N_GRID = 1_000_000


class PowerDist:
    """``F(x) = x**k`` on ``[0, 1]`` (``k = 1`` is uniform)."""

    def __init__(self, k: float = 1.0):
        self.k = k

    def cdf(self, x):
        return np.clip(x, 0.0, 1.0) ** self.k

    def pdf(self, x):
        return self.k * np.clip(x, 0.0, 1.0) ** (self.k - 1)

    def tail(self, t):
        """``∫_t^1 (1 - F(x)) dx`` for ``t`` in ``[0, 1]``, vectorised."""
        t = np.clip(t, 0.0, 1.0)
        k = self.k
        return (1.0 - t) - (1.0 - t ** (k + 1)) / (k + 1)

    def excess(self, t):
        """``E[max(X - t, 0)]`` for any real ``t``."""
        t = np.asarray(t, dtype=float)
        below = np.where(t < 0, -t, 0.0)
        return below + self.tail(np.maximum(t, 0.0))


UNIFORM = PowerDist(1.0)


def _grid(n=N_GRID):
    return (np.arange(n) + 0.5) / n


def first_visit_outcomes(af, bf, as_, d=0.0, dist=UNIFORM, n=N_GRID):
    """Pointwise buyer decisions at the first seller and the implied
    expectations, integrated over a midpoint grid of first values.

    Returns a dict with the buyer's value and both sellers' revenues.
    """
    v = _grid(n)
    w = dist.pdf(v) / n
    m = np.maximum(v - bf, 0.0)
    search = -d + m + dist.excess(as_ + m)
    now = v - af
    buy = (now >= search) & (now >= 0.0)
    look = ~buy & (search >= 0.0)
    value = np.where(buy, now, np.where(look, search, 0.0))
    p_return = np.where(v >= bf, dist.cdf(as_ + v - bf), 0.0)
    p_second = 1.0 - dist.cdf(as_ + m)
    return {
        "value": float(np.sum(value * w)),
        "revenue_first": float(np.sum(w * (af * buy + bf * look * p_return))),
        "revenue_second": float(np.sum(w * as_ * look * p_second)),
        "buy_now": float(np.sum(w * buy)),
        "search": float(np.sum(w * look)),
    }


def zero_cost_payoff(dev, opp, dist=UNIFORM, n=N_GRID):
    """Deviator's expected profit with free search: it is visited first when
    that gives the buyer more, second when less, and half the time on a tie."""
    a = first_visit_outcomes(dev[0], dev[1], opp[0], dist=dist, n=n)
    b = first_visit_outcomes(opp[0], opp[1], dev[0], dist=dist, n=n)
    if abs(a["value"] - b["value"]) < 1e-9:
        w = 0.5
    else:
        w = 1.0 if a["value"] > b["value"] else 0.0
    return w * a["revenue_first"] + (1 - w) * b["revenue_second"]


def location_payoff(dev, opp, c, n_x=400, n_v=40_000):
    """Deviator at 0, opponent at 1 of the unit line, travel cost ``c`` per
    unit distance; midpoint rule over buyer locations."""
    total = 0.0
    for x in (np.arange(n_x) + 0.5) / n_x:
        to_dev, to_opp = c * x, c * (1.0 - x)
        a = first_visit_outcomes(dev[0], dev[1], opp[0], d=to_opp, n=n_v)
        b = first_visit_outcomes(opp[0], opp[1], dev[0], d=to_dev, n=n_v)
        w_dev, w_opp = a["value"] - to_dev, b["value"] - to_opp
        if max(w_dev, w_opp) < 0:
            continue
        total += a["revenue_first"] if w_dev >= w_opp else b["revenue_second"]
    return total / n_x


def literal_cutoff(af, bf, as_, dist=UNIFORM):
    """Root of ``v - af = E[max(X - as_, v - bf, 0)]`` by bisection, with the
    expectation done by adaptive quadrature of the max directly."""

    def rhs(v):
        f = lambda x: max(x - as_, v - bf, 0.0) * float(dist.pdf(x))
        pts = [p for p in (as_, as_ + v - bf) if 0 < p < 1]
        return quad(f, 0.0, 1.0, points=pts or None, epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def h(v):
        return v - af - rhs(v)

    # the two sides can coincide on an interval; count |h| below the noise
    # floor as zero so the bisection finds where the tie starts
    floor = -1e-14
    lo, hi = 0.0, 1.0
    if h(hi) < floor:
        return 1.0
    if h(lo) >= floor:
        return 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if h(mid) < floor:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hotelling_x_star(dp, c):
    """Indifferent location from the small-gap first-visit condition."""

    def gap(x):
        l = c * (1 - x) * dp + 2 / 3 * c * (1 - x) * math.sqrt(2 * c * (1 - x))
        r = -c * x * dp + 2 / 3 * c * x * math.sqrt(2 * c * x) + dp ** 3 / 6
        return l - r

    return brentq(gap, 0.0, 1.0, xtol=1e-15)
