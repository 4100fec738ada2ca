"""Symmetric single-price equilibria and grid checks for profitable deviations."""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .buyer_policy import MarketConfig, PricePolicy, Regime, reservation_cutoff
from .errors import NumericalError
from .market_profit import condition_star_star, deviation_payoff
from .valuation import UNIFORM01

__all__ = [
    "GridSpec",
    "DeviationReport",
    "GridPointError",
    "solve_single_price_foc",
    "verify_foc_stationarity",
    "grid_deviation_search",
    "verify_uniform_equilibrium_c0",
    "default_workers",
]

PROFIT_TOL = 1e-12
WORKERS_ENV = "ORDEREDSEARCH_WORKERS"


class GridPointError(NumericalError):
    def __init__(self, policy: PricePolicy, cause: BaseException):
        self.policy = policy
        super().__init__(f"deviation payoff failed at p_low={policy.first_price}, "
                         f"p_high={policy.return_price}: {cause}")


@dataclass(frozen=True)
class GridSpec:
    """Inclusive price grid ``lo, lo+step, ..., hi`` inside ``[0, 1]``."""

    lo: float = 0.0
    hi: float = 1.0
    step: float = 0.01

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"need 0 <= lo <= hi <= 1, got lo={self.lo}, hi={self.hi}")
        n = (self.hi - self.lo) / self.step
        if abs(n - round(n)) > 1e-9:
            raise ValueError(f"step {self.step} does not divide [{self.lo}, {self.hi}]")

    def values(self) -> list[float]:
        n = round((self.hi - self.lo) / self.step)
        return [round(self.lo + i * self.step, 12) for i in range(n + 1)]

    def pairs(self) -> list[PricePolicy]:
        """All ``(p_low, p_high)`` with ``p_low <= p_high``, lexicographic."""
        vals = self.values()
        return [PricePolicy(a, b) for i, a in enumerate(vals) for b in vals[i:]]


@dataclass
class DeviationReport:
    candidate: PricePolicy
    candidate_payoff: float
    best_deviation: PricePolicy
    best_payoff: float
    profitable: bool
    grid: GridSpec
    table: list[tuple[PricePolicy, float]] = field(repr=False)
    cost: float = 0.0
    conditions_checked: int = 0
    condition_violations: list[tuple[PricePolicy, float]] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "candidate": list(self.candidate.astuple()),
            "candidate_payoff": self.candidate_payoff,
            "best_deviation": list(self.best_deviation.astuple()),
            "best_payoff": self.best_payoff,
            "profitable": self.profitable,
            "cost": self.cost,
            "grid": {"lo": self.grid.lo, "hi": self.grid.hi, "step": self.grid.step},
            "grid_points": len(self.table),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p_low", "p_high", "payoff"])
        for policy, payoff in self.table:
            writer.writerow([f"{policy.first_price:.10g}", f"{policy.return_price:.10g}",
                             f"{payoff:.10g}"])
        return buf.getvalue()


def solve_single_price_foc(c: float, sqrt_half_cost: bool = False) -> float:
    """Symmetric single-price equilibrium candidate under Hotelling cost ``c``.

    Positive root of ``p (1 + s) + p^2/2 - 1/2 = 0`` with ``s = sqrt(c)/2``.
    ``sqrt_half_cost=True`` uses ``s = sqrt(c/2)`` instead, which does not
    reproduce ``p* = 0.4`` at ``c = 0.01``; kept for comparison only.
    """
    if not c >= 0:
        raise ValueError(f"cost must be >= 0, got {c}")
    s = math.sqrt(c / 2.0) if sqrt_half_cost else math.sqrt(c) / 2.0
    b = 1.0 + s
    return math.sqrt(1.0 + b * b) - b


def verify_foc_stationarity(p_star: float, c: float) -> float:
    """Derivative of the undercutting firm's location-averaged profit with
    respect to the undercut, at zero undercut."""
    return p_star * (1.0 + math.sqrt(c) / 2.0) + 0.5 * p_star ** 2 - 0.5


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def _payoff_task(args):
    policy, candidate, config = args
    try:
        return deviation_payoff(policy, candidate, config)
    except Exception as exc:  # re-raised with the grid point attached
        return GridPointError(policy, exc)


def _evaluate(pairs: Sequence[PricePolicy], candidate: PricePolicy, config: MarketConfig,
              workers: int) -> list[float]:
    tasks = [(p, candidate, config) for p in pairs]
    if workers > 1 and len(tasks) > 1:
        chunk = max(len(tasks) // (8 * workers), 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_payoff_task, tasks, chunksize=chunk))
    else:
        out = [_payoff_task(t) for t in tasks]
    for r in out:
        if isinstance(r, GridPointError):
            raise r
    return out


def _same(a: PricePolicy, b: PricePolicy) -> bool:
    return (abs(a.first_price - b.first_price) < 1e-12
            and abs(a.return_price - b.return_price) < 1e-12)


def grid_deviation_search(candidate: PricePolicy, config: MarketConfig, grid: GridSpec,
                          workers: Optional[int] = None) -> DeviationReport:
    """Payoff of every grid deviation against an opponent playing ``candidate``.

    The candidate's own grid point (if present) is reported in the table but
    is not a deviation, so it is skipped when picking the best one, unless
    it is the only point. Ties go to the lexicographically smallest pair.
    Results do not depend on ``workers``.
    """
    workers = default_workers() if workers is None else max(int(workers), 1)
    pairs = grid.pairs()
    payoffs = _evaluate(pairs, candidate, config, workers)
    candidate_payoff = deviation_payoff(candidate, candidate, config)
    table = list(zip(pairs, payoffs))
    contenders = [(p, v) for p, v in table if not _same(p, candidate)] or table
    best, best_payoff = contenders[0]
    for p, v in contenders[1:]:
        if v > best_payoff:
            best, best_payoff = p, v
    return DeviationReport(candidate=candidate, candidate_payoff=candidate_payoff,
                           best_deviation=best, best_payoff=best_payoff,
                           profitable=best_payoff > candidate_payoff + PROFIT_TOL,
                           grid=grid, table=table, cost=config.cost)


def verify_uniform_equilibrium_c0(grid: GridSpec = GridSpec(),
                                  workers: Optional[int] = None) -> DeviationReport:
    """Grid check that posting ``sqrt(2) - 1`` to everyone is an equilibrium
    with free search and uniform values.

    Also evaluates the discriminating-pair condition at every grid point
    with ``0 < p_low < p_high`` where returns happen; each must be strictly
    negative, and failures are listed in ``condition_violations``.
    """
    config = MarketConfig(UNIFORM01, 0.0)
    p = solve_single_price_foc(0.0)
    report = grid_deviation_search(PricePolicy.uniform(p), config, grid, workers)
    for policy in grid.pairs():
        if not 0.0 < policy.first_price < policy.return_price:
            continue
        if reservation_cutoff(policy).regime is not Regime.RETURNS_POSSIBLE:
            continue
        value = condition_star_star(policy)
        report.conditions_checked += 1
        if not value < 0.0:
            report.condition_violations.append((policy, value))
    return report
