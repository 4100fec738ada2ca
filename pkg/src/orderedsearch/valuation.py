"""Buyer valuation distributions on a bounded support ``[0, V]``.

The uniform distribution on ``[0, 1]`` is special-cased everywhere with
closed forms. Any other distribution is described by its CDF (and
optionally its density) and handled with adaptive Simpson quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import QuadratureError

__all__ = [
    "ValuationDistribution",
    "UNIFORM01",
    "uniform01",
    "custom",
    "expect_excess",
    "integrate",
    "adaptive_simpson",
]

QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 40
DENSITY_STEP = 1e-6


@dataclass(frozen=True)
class ValuationDistribution:
    """Distribution ``F`` of a buyer's value for one seller's product.

    Use :func:`uniform01` or :func:`custom` rather than the constructor.
    """

    kind: str
    cdf_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)
    density_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)
    support_max: float = 1.0
    name: str = ""

    @property
    def is_uniform(self) -> bool:
        return self.kind == "uniform01"

    def cdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        if x >= self.support_max:
            return 1.0
        if self.is_uniform:
            return float(x)
        return float(self.cdf_fn(x))

    def density(self, x: float) -> float:
        if x < 0.0 or x > self.support_max:
            return 0.0
        if self.is_uniform:
            return 1.0
        if self.density_fn is not None:
            return float(self.density_fn(x))
        # central differences, one-sided at the support edges
        h = DENSITY_STEP
        lo = max(x - h, 0.0)
        hi = min(x + h, self.support_max)
        return (self.cdf(hi) - self.cdf(lo)) / (hi - lo)

    def ppf(self, u):
        """Inverse CDF, vectorised over ``u`` (bisection for custom CDFs)."""
        u = np.asarray(u, dtype=float)
        if self.is_uniform:
            return u.copy()
        cdf = np.vectorize(self.cdf, otypes=[float])
        lo = np.zeros_like(u)
        hi = np.full_like(u, self.support_max)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        return u if self.is_uniform else self.ppf(u)


UNIFORM01 = ValuationDistribution(kind="uniform01", name="Uniform[0,1]")


def uniform01() -> ValuationDistribution:
    return UNIFORM01


def custom(cdf: Callable[[float], float],
           density: Optional[Callable[[float], float]] = None,
           support_max: float = 1.0,
           name: str = "custom",
           check_points: int = 201) -> ValuationDistribution:
    """Build a distribution from a CDF callable on ``[0, support_max]``.

    The CDF is checked for ``F(0) = 0``, ``F(V) = 1`` and monotonicity on a
    grid of ``check_points`` nodes. When ``density`` is omitted it is taken
    from central differences of the CDF.
    """
    if not support_max > 0:
        raise ValueError("support_max must be positive")
    if abs(cdf(0.0)) > 1e-9 or abs(cdf(support_max) - 1.0) > 1e-9:
        raise ValueError("cdf must satisfy F(0)=0 and F(support_max)=1")
    grid = np.linspace(0.0, support_max, check_points)
    vals = np.array([cdf(x) for x in grid])
    if np.any(np.diff(vals) < -1e-12):
        raise ValueError("cdf must be nondecreasing")
    return ValuationDistribution(kind="custom", cdf_fn=cdf, density_fn=density,
                                 support_max=float(support_max), name=name)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = QUAD_TOL, max_depth: int = QUAD_MAX_DEPTH) -> float:
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson with Richardson
    correction. Raises :class:`QuadratureError` past ``max_depth`` halvings."""
    if b == a:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive Simpson did not converge on [{a:.6g}, {b:.6g}]")
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))

    # always split once so a symmetric kink cannot fool the first estimate
    return recurse(a, b, fa, fm, fb, whole, tol, 1)


def _split(lo: float, hi: float, points: Iterable[float]) -> list[float]:
    inner = sorted(p for p in points if lo < p < hi)
    return [lo, *inner, hi]


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(3)
_GL = tuple(zip(_GL_NODES.tolist(), _GL_WEIGHTS.tolist()))


def integrate_piecewise_polynomial(f: Callable[[float], float], lo: float, hi: float,
                                   points: Sequence[float] = ()) -> float:
    """Exact integral of ``f`` if it is a polynomial of degree <= 5 between
    consecutive ``points`` (3-node Gauss-Legendre per piece)."""
    total = 0.0
    knots = _split(lo, hi, points)
    for a, b in zip(knots[:-1], knots[1:]):
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        total += half * sum(w * f(mid + half * t) for t, w in _GL)
    return total


def integrate(dist: ValuationDistribution, integrand: Callable[[float], float],
              lo: float, hi: float, points: Sequence[float] = (),
              tol: float = QUAD_TOL) -> float:
    """``∫_lo^hi integrand(x) dF(x)``.

    ``points`` are known kinks of the integrand; the range is split there
    before adaptive Simpson runs on each piece.
    """
    if lo > hi:
        raise ValueError(f"integration bounds out of order: lo={lo} > hi={hi}")
    lo = max(lo, 0.0)
    hi = min(hi, dist.support_max)
    if hi <= lo:
        return 0.0
    if dist.is_uniform:
        g = integrand
    else:
        def g(x):
            return integrand(x) * dist.density(x)
    knots = _split(lo, hi, points)
    pieces = len(knots) - 1
    return sum(adaptive_simpson(g, a, b, tol / pieces)
               for a, b in zip(knots[:-1], knots[1:]))


def expect_excess(dist: ValuationDistribution, threshold: float) -> float:
    """``E[max(X - t, 0)]``: expected surplus of a draw above ``threshold``."""
    t = threshold
    V = dist.support_max
    if t >= V:
        return 0.0
    if dist.is_uniform:
        if t <= 0.0:
            return 0.5 - t
        return 0.5 * (1.0 - t) ** 2
    base = 0.0
    if t < 0.0:
        base, t = -t, 0.0
    # integration by parts: E[(X-t)+] = ∫_t^V (1 - F(x)) dx
    return base + adaptive_simpson(lambda x: 1.0 - dist.cdf(x), t, V)


