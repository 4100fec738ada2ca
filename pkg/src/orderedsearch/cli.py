"""Command-line front end.

Exit status: 0 on success, 2 on invalid input, 3 when a numeric routine
fails. Every command echoes its parameters in the output header.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Optional, Sequence

from .buyer_policy import MarketConfig, PricePolicy, reservation_cutoff
from .equilibrium import (GridSpec, default_workers, grid_deviation_search,
                          solve_single_price_foc, verify_foc_stationarity)
from .errors import NumericalError
from .market_profit import (bonus_decomposition, condition_star_star, hotelling_total_profit,
                            visit_order_profits)
from .montecarlo import simulate
from .reproduce import run_checks

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class InputError(ValueError):
    pass


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _header(command: str, params: dict) -> str:
    return f"# {command} " + " ".join(f"{k}={_fmt(v)}" for k, v in params.items())


def _render(command: str, params: dict, result: dict, fmt: str,
            rows: Optional[list[dict]] = None) -> str:
    if fmt == "json":
        payload = {"command": command, "params": params, "result": result}
        if rows is not None:
            payload["rows"] = rows
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(_header(command, params) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        if rows is not None:
            w.writerow(list(rows[0]))
            for r in rows:
                w.writerow([_fmt(v) for v in r.values()])
        else:
            w.writerow(["quantity", "value"])
            for k, v in result.items():
                w.writerow([k, _fmt(v)])
        return buf.getvalue()
    lines = [_header(command, params)]
    if rows is not None:
        lines += ["  ".join(f"{k}={_fmt(v)}" for k, v in r.items()) for r in rows]
    width = max(len(k) for k in result) if result else 0
    lines += [f"{k:<{width}}  {_fmt(v)}" for k, v in result.items()]
    return "\n".join(lines) + "\n"


def _policy(lo: float, hi: Optional[float], lo_flag: str, hi_flag: str) -> PricePolicy:
    hi = lo if hi is None else hi
    for flag, v in ((lo_flag, lo), (hi_flag, hi)):
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            raise InputError(f"{flag} must lie in [0, 1], got {v}")
    if lo > hi:
        raise InputError(f"{lo_flag} {lo} exceeds {hi_flag} {hi}")
    return PricePolicy(lo, hi)


def _cost(c: float) -> float:
    if not (math.isfinite(c) and c >= 0):
        raise InputError(f"--cost must be >= 0, got {c}")
    return c


def cmd_solve(a):
    c = _cost(a.cost)
    p = solve_single_price_foc(c)
    alt = solve_single_price_foc(c, sqrt_half_cost=True)
    cfg = MarketConfig(cost=c)
    result = {"p_star": p, "profit": hotelling_total_profit(p, 0.0, 0.5, cfg),
              "foc_residual": verify_foc_stationarity(p, c),
              "p_star_sqrt_half_cost": alt,
              "profit_sqrt_half_cost": hotelling_total_profit(alt, 0.0, 0.5, cfg)}
    return {"cost": c}, result, None


def cmd_cutoff(a):
    pol = _policy(a.pl, a.ph, "--pl", "--ph")
    other = _policy(a.opp_pl, a.opp_ph, "--opp-pl", "--opp-ph") if a.opp_pl is not None else None
    cut = reservation_cutoff(pol, other=other)
    params = {"pl": pol.first_price, "ph": pol.return_price}
    if other is not None:
        params.update(opp_pl=other.first_price, opp_ph=other.return_price)
    return params, {"v_star": cut.v_star, "regime": cut.regime.value,
                    "participation": cut.participation}, None


def cmd_profits(a):
    pol = _policy(a.pl, a.ph, "--pl", "--ph")
    opp = (_policy(a.opp_pl, a.opp_ph, "--opp-pl", "--opp-ph")
           if a.opp_pl is not None else pol)
    b = visit_order_profits(pol, opp)
    params = {"pl": pol.first_price, "ph": pol.return_price,
              "opp_pl": opp.first_price, "opp_ph": opp.return_price}
    return params, {"profit_first": b.profit_first, "profit_second": b.profit_second,
                    "total": b.total, "weight_first": b.weight_first,
                    "demand_first": b.demand_first, "demand_second": b.demand_second}, None


def cmd_condition(a):
    pol = _policy(a.pl, a.ph, "--pl", "--ph")
    value = condition_star_star(pol)
    return ({"pl": pol.first_price, "ph": pol.return_price},
            {"condition": value, "closed_form_uniform": pol.first_price * (pol.first_price - pol.return_price),
             "deviation_profitable": value < 0}, None)


def cmd_deviate(a):
    c = _cost(a.cost)
    cand = _policy(a.opp, a.opp_ph, "--opp", "--opp-ph")
    try:
        grid = GridSpec(a.lo, a.hi, a.step)
    except ValueError as exc:
        raise InputError(f"--lo/--hi/--step: {exc}") from exc
    rep = grid_deviation_search(cand, MarketConfig(cost=c), grid, a.workers)
    params = {"opp": cand.first_price, "opp_ph": cand.return_price, "cost": c,
              "lo": grid.lo, "hi": grid.hi, "step": grid.step, "workers": a.workers}
    b = rep.best_deviation
    result = {"candidate_payoff": rep.candidate_payoff,
              "best_p_low": b.first_price, "best_p_high": b.return_price,
              "best_payoff": rep.best_payoff,
              "verdict": "PROFITABLE" if rep.profitable else "NOT PROFITABLE"}
    result["summary"] = (f"best ({_fmt(b.first_price)},{_fmt(b.return_price)}), "
                         f"payoff {rep.best_payoff:.10f}, {result['verdict']}")
    rows = None
    if a.format != "table":
        rows = [{"p_low": p.first_price, "p_high": p.return_price, "payoff": v}
                for p, v in rep.table]
    return params, result, rows


def cmd_bonus(a):
    if not 0 < a.dp < a.p <= 1:
        raise InputError(f"--dp must satisfy 0 < dp < p <= 1, got dp={a.dp}, p={a.p}")
    d = bonus_decomposition(a.p, a.dp)
    return {"p": a.p, "dp": a.dp}, {
        "v_indiff": d.v_indiff, "gain_deter": d.gain_deter, "loss_discount": d.loss_discount,
        "net_first": d.net_first, "loss_second": d.loss_second,
        "below_price": d.below_price}, None


def cmd_mc(a):
    c = _cost(a.cost)
    p1 = _policy(a.pl1, a.ph1, "--pl1", "--ph1")
    p2 = _policy(a.pl2, a.ph2, "--pl2", "--ph2")
    if a.n < 1:
        raise InputError(f"--n must be >= 1, got {a.n}")
    r = simulate(p1, p2, MarketConfig(cost=c), n=a.n, seed=a.seed, workers=a.workers)
    params = {"pl1": p1.first_price, "ph1": p1.return_price, "pl2": p2.first_price,
              "ph2": p2.return_price, "cost": c, "n": a.n, "seed": a.seed}
    result = {}
    for name, est in (("firm1", r.firm1), ("firm2", r.firm2)):
        for k, v in vars(est).items():
            result[f"{name}_{k}"] = v
    for k, v in r.demand_shares.items():
        result[f"share_{k}"] = v
    return params, result, None


def cmd_report(a):
    rows = []
    for chk in run_checks(workers=a.workers, mc_n=a.mc_n):
        # NaN marks "no numeric target"; JSON has no NaN
        rows.append({"status": "PASS" if chk.passed else "FAIL", "check": chk.name,
                     "value": None if math.isnan(chk.value) else chk.value,
                     "target": None if math.isnan(chk.target) else chk.target,
                     "tol": chk.tol})
    failed = sum(r["status"] == "FAIL" for r in rows)
    result = {"checks": len(rows), "failed": failed}
    return {"mc_n": a.mc_n, "workers": a.workers}, result, rows


COMMANDS = {"solve": cmd_solve, "cutoff": cmd_cutoff, "profits": cmd_profits,
            "condition": cmd_condition, "deviate": cmd_deviate, "bonus": cmd_bonus,
            "mc": cmd_mc, "report": cmd_report}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INVALID, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--output", help="write output to this file instead of stdout")
    common.add_argument("--workers", type=int, default=default_workers(),
                        help="worker processes (default from $ORDEREDSEARCH_WORKERS)")

    parser = _Parser(prog="orderedsearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="single-price first-order condition")
    p.add_argument("--cost", type=float, default=0.01)

    for name in ("cutoff", "profits"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--pl", type=float, default=0.45)
        p.add_argument("--ph", type=float, default=0.51)
        p.add_argument("--opp-pl", type=float)
        p.add_argument("--opp-ph", type=float)

    p = sub.add_parser("condition", parents=[common])
    p.add_argument("--pl", type=float, default=0.45)
    p.add_argument("--ph", type=float, default=0.51)

    p = sub.add_parser("deviate", parents=[common], help="grid search for profitable deviations")
    p.add_argument("--opp", type=float, default=0.4, help="opponent first-visit price")
    p.add_argument("--opp-ph", type=float, help="opponent return price (default: --opp)")
    p.add_argument("--cost", type=float, default=0.01)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.01)

    p = sub.add_parser("bonus", parents=[common])
    p.add_argument("--p", type=float, default=math.sqrt(2) - 1)
    p.add_argument("--dp", type=float, default=0.01)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo simulation")
    p.add_argument("--pl1", type=float, default=0.45)
    p.add_argument("--ph1", type=float, default=0.51)
    p.add_argument("--pl2", type=float, default=0.45)
    p.add_argument("--ph2", type=float, default=0.51)
    p.add_argument("--cost", type=float, default=0.0)
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("report", parents=[common], help="recompute every headline number")
    p.add_argument("--mc-n", type=int, default=1_000_000)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        params, result, rows = COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = _render(args.command, params, result, args.format, rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
