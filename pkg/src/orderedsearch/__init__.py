"""Ordered consumer search between two sellers that commit to separate
prices for first-visit and returning buyers."""
from .buyer_policy import (FirstVisit, HotellingCutoffs, MarketConfig, PricePolicy, Regime,
                           SearchCutoffs, VisitPlan, VisitRegions, buyer_value_visit_first,
                           first_visit_choice, first_visit_regions, hotelling_cutoffs,
                           plan_first_visit, reservation_cutoff, sequential_value_at_location)
from .equilibrium import (DeviationReport, GridSpec, grid_deviation_search,
                          solve_single_price_foc, verify_foc_stationarity,
                          verify_uniform_equilibrium_c0)
from .errors import NumericalError, QuadratureError, RegimeError, RootNotFoundError
from .market_profit import (BonusDecomposition, OrderOutcome, ProfitBreakdown,
                            bonus_decomposition, condition_star_star, deviation_payoff,
                            hotelling_profit_formulas, hotelling_total_profit, order_outcome,
                            purchase_shares, single_price_profit, step2_profit_bound,
                            visit_order_profits)
from .montecarlo import FirmEstimate, SimulationResult, simulate
from .valuation import UNIFORM01, ValuationDistribution, custom, expect_excess, uniform01

__version__ = "0.1.0"
