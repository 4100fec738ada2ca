"""Seeded simulation of buyers, used to cross-check the analytic profits.

Draws are generated in fixed-size shards, each with its own stream spawned
from ``(seed, shard index)``, so a result depends only on ``(inputs, seed,
n)`` and not on how many workers ran the shards. Shards return integer
outcome counts and are merged by exact integer addition.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .buyer_policy import (FirstVisit, MarketConfig, PricePolicy, first_visit_choice,
                           first_visit_regions, plan_first_visit)

__all__ = ["FirmEstimate", "SimulationResult", "simulate", "SHARD_SIZE"]

SHARD_SIZE = 1 << 17
OUTCOMES = ("buy_first_visit", "buy_on_return", "buy_from_second", "no_purchase")
HOME, FIRM1_FIRST, FIRM2_FIRST = 0, 1, 2


@dataclass(frozen=True)
class FirmEstimate:
    profit: float
    profit_se: float
    n_first: int
    profit_first: float
    profit_first_se: float
    n_second: int
    profit_second: float
    profit_second_se: float


@dataclass(frozen=True)
class SimulationResult:
    n: int
    seed: int
    policy1: PricePolicy
    policy2: PricePolicy
    cost: float
    counts: tuple  # 3x4 nested tuple: [home, firm1 first, firm2 first] x OUTCOMES
    firm1: FirmEstimate
    firm2: FirmEstimate

    @property
    def demand_shares(self) -> dict[str, float]:
        totals = np.asarray(self.counts).sum(axis=0)
        return {name: int(k) / self.n for name, k in zip(OUTCOMES, totals)}

    def to_dict(self) -> dict:
        return {
            "n": self.n, "seed": self.seed, "cost": self.cost,
            "policy1": list(self.policy1.astuple()),
            "policy2": list(self.policy2.astuple()),
            "demand_shares": self.demand_shares,
            "firm1": asdict(self.firm1), "firm2": asdict(self.firm2),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        fields = list(FirmEstimate.__dataclass_fields__)
        w.writerow(["firm", *fields])
        for name, est in (("firm1", self.firm1), ("firm2", self.firm2)):
            w.writerow([name, *(f"{getattr(est, f):.10g}" for f in fields)])
        return buf.getvalue()


def _mean_se(values_counts) -> tuple[float, float]:
    """Mean and standard error of a sample given as ``(value, count)`` pairs."""
    n = sum(k for _, k in values_counts)
    if n == 0:
        return math.nan, math.nan
    mean = sum(v * k for v, k in values_counts) / n
    if n < 2:
        return mean, math.nan
    ss = sum(k * (v - mean) ** 2 for v, k in values_counts)
    return mean, math.sqrt(ss / (n - 1)) / math.sqrt(n)


def _firm_estimate(counts: np.ndarray, me: PricePolicy, own_first: int, other_first: int,
                   n: int) -> FirmEstimate:
    lo, hi = me.first_price, me.return_price
    a = counts[own_first]
    b = counts[other_first]
    # revenue values are 0, lo or hi; pool counts per value
    sold_lo = int(a[0]) + int(b[2])
    sold_hi = int(a[1])
    profit, se = _mean_se([(lo, sold_lo), (hi, sold_hi), (0.0, n - sold_lo - sold_hi)])
    n1, n2 = int(a.sum()), int(b.sum())
    pf, pf_se = _mean_se([(lo, int(a[0])), (hi, int(a[1])), (0.0, n1 - int(a[0]) - int(a[1]))])
    ps, ps_se = _mean_se([(lo, int(b[2])), (0.0, n2 - int(b[2]))])
    return FirmEstimate(profit, se, n1, pf, pf_se, n2, ps, ps_se)


def _plans(first, second, dist, second_costs):
    if np.ndim(second_costs) == 0:
        plan = plan_first_visit(first, second, dist, float(second_costs))
        return plan.buy_from, plan.search_from
    per_draw = np.vectorize(
        lambda d: (lambda pl: (pl.buy_from, pl.search_from))(
            plan_first_visit(first, second, dist, float(d))),
        otypes=[float, float])
    return per_draw(second_costs)


def _decide(v_first, v_second, first, second, buy_from, search_from):
    """Outcome index per draw for one visit order."""
    buy_now = v_first >= buy_from
    search = ~buy_now & (v_first >= search_from)
    rival = v_second - second.first_price
    back = v_first - first.return_price
    buy_second = search & (rival >= back) & (rival >= 0.0)
    returned = search & ~buy_second & (back >= 0.0)
    out = np.full(v_first.shape, 3, dtype=np.int8)
    out[buy_now] = 0
    out[returned] = 1
    out[buy_second] = 2
    return out


def _shard(args) -> np.ndarray:
    (seed, index, size, offset, p1, p2, config, choice, regions) = args
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    dist, c = config.dist, config.cost
    v1 = dist.sample(rng, size)
    v2 = dist.sample(rng, size)
    parity = (offset + np.arange(size)) % 2 == 0
    if c > 0:
        x = rng.random(size)
        until = min(regions.x_star, regions.firm1_until)
        start = max(regions.x_star, regions.firm2_from)
        order = np.full(size, HOME, dtype=np.int8)
        order[x < until] = FIRM1_FIRST
        order[x > start] = FIRM2_FIRST
        tie = (x == regions.x_star) & (until == start)
        order[tie] = np.where(parity[tie], FIRM1_FIRST, FIRM2_FIRST)
    else:
        x = np.zeros(size)
        if choice is FirstVisit.FIRM1:
            order = np.full(size, FIRM1_FIRST, dtype=np.int8)
        elif choice is FirstVisit.FIRM2:
            order = np.full(size, FIRM2_FIRST, dtype=np.int8)
        else:
            order = np.where(parity, FIRM1_FIRST, FIRM2_FIRST).astype(np.int8)
    counts = np.zeros((3, 4), dtype=np.int64)
    counts[HOME, 3] = int(np.sum(order == HOME))
    for code, first, second, vf, vs, dcost in (
            (FIRM1_FIRST, p1, p2, v1, v2, c * (1.0 - x)),
            (FIRM2_FIRST, p2, p1, v2, v1, c * x)):
        mask = order == code
        if not mask.any():
            continue
        d = dcost[mask] if c > 0 else 0.0
        buy_from, search_from = _plans(first, second, dist, d)
        out = _decide(vf[mask], vs[mask], first, second, buy_from, search_from)
        counts[code] = np.bincount(out, minlength=4)
    return counts


def simulate(policy1: PricePolicy, policy2: PricePolicy,
             config: MarketConfig = MarketConfig(), n: int = 1_000_000, seed: int = 0,
             workers: int = 1) -> SimulationResult:
    """Simulate ``n`` buyers facing ``policy1`` (firm 1) and ``policy2`` (firm 2).

    Buyers decide with the exact rules of :mod:`orderedsearch.buyer_policy`.
    A buyer indifferent about whom to visit first goes to firm 1 on even
    draw indices and firm 2 on odd ones.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    choice = first_visit_choice(policy1, policy2, config.dist) if config.cost == 0 else None
    regions = first_visit_regions(policy1, policy2, config) if config.cost > 0 else None
    tasks = []
    for index, offset in enumerate(range(0, n, SHARD_SIZE)):
        size = min(SHARD_SIZE, n - offset)
        tasks.append((seed, index, size, offset, policy1, policy2, config, choice, regions))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_shard, tasks))
    else:
        parts = [_shard(t) for t in tasks]
    counts = np.sum(parts, axis=0)
    firm1 = _firm_estimate(counts, policy1, FIRM1_FIRST, FIRM2_FIRST, n)
    firm2 = _firm_estimate(counts, policy2, FIRM2_FIRST, FIRM1_FIRST, n)
    return SimulationResult(n=n, seed=seed, policy1=policy1, policy2=policy2,
                            cost=config.cost,
                            counts=tuple(tuple(int(k) for k in row) for row in counts),
                            firm1=firm1, firm2=firm2)
