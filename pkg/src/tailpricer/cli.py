"""Command-line surface for pricing, calibration, curves, and diagnostics.

Subcommands: price, calibrate, curve, put-curve, ivol, check-arb,
alpha-bound, fit-alpha, zipf, report.  Every number is printed with 12
significant digits so identical inputs give byte-identical output.  Exit
status 0 means the command ran and its artifacts were written; 2 means the
inputs were rejected (usage, validation, or domain errors, with the reason
on stderr).

Flags may also be supplied through ``--config file.json`` holding an object
of flag names (without dashes' prefix, e.g. {"alpha": 2.75}); explicit
command-line flags win.  Boolean switches must be given on the command line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import tail_model
from .arbitrage import alpha_lower_bound
from .black_scholes import implied_vol
from .errors import ParameterError, TailPricingError
from .reports import all_pass, arb_csv, arbitrage_scan, curve_csv, curve_json, fmt, loglog_csv
from .surface import (
    Chain,
    fit_alpha_to_market,
    generate_curve,
    load_chain,
    loglog_export,
    select_anchor,
)


def _chain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chain", required=True, help="chain file (CSV or JSON), or - for stdin")
    p.add_argument("--format", choices=("csv", "json"),
                   help="chain format (default: inferred from the file extension)")
    p.add_argument("--spot", type=float, help="spot price (required for CSV chains)")
    p.add_argument("--expiry-years", type=float,
                   help="time to expiry in years (required for CSV chains)")


def _anchor_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--anchor-strike", type=float, help="anchor at this strike")
    g.add_argument("--anchor-moneyness", type=float,
                   help="anchor at this percent of spot (90 means K = 0.9 S0)")


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of flag defaults")
    p.add_argument("--output", help="write the main artifact here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailpricer",
        description="Tail option pricing from one anchor quote and a tail index.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("price", help="price one option from model parameters")
    _common_flags(p)
    p.add_argument("--side", choices=("call", "put"), default="call")
    p.add_argument("--approach", choices=("price", "return"), default="return",
                   help="call model: Pareto on the price level or on simple returns")
    p.add_argument("--alpha", type=float)
    p.add_argument("--l", type=float, help="Karamata constant of the chosen model")
    p.add_argument("--spot", type=float)
    p.add_argument("--strike", type=float)
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("calibrate", help="back the Karamata constant out of an anchor price")
    _common_flags(p)
    p.add_argument("--approach", choices=("price", "return"), default="return")
    p.add_argument("--alpha", type=float)
    p.add_argument("--strike", type=float, help="anchor strike K1")
    p.add_argument("--price", type=float, help="anchor option price")
    p.add_argument("--spot", type=float)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("ivol", help="Black-Scholes implied volatility at zero rates")
    _common_flags(p)
    p.add_argument("--side", choices=("call", "put"), default="call")
    p.add_argument("--spot", type=float)
    p.add_argument("--strike", type=float)
    p.add_argument("--expiry-years", type=float)
    p.add_argument("--price", type=float)
    p.add_argument("--price-tol", type=float, default=1e-10,
                   help="absolute price tolerance of the inversion (default 1e-10)")
    p.set_defaults(func=cmd_ivol)

    for name, forced_side in (("curve", None), ("put-curve", "put")):
        p = sub.add_parser(
            name,
            help="generate the model curve beyond an anchor and compare to market"
            + ("" if forced_side is None else " (put side)"),
        )
        _common_flags(p)
        _chain_flags(p)
        _anchor_flags(p)
        if forced_side is None:
            p.add_argument("--side", choices=("call", "put"), default="call")
        p.add_argument("--alpha", type=float)
        p.add_argument("--approach", choices=("price", "return"), default="return")
        p.add_argument("--json-output", help="also write the JSON report here")
        p.add_argument("--loglog-output", help="also write the log-log CSV here")
        p.set_defaults(func=cmd_curve, forced_side=forced_side)

    p = sub.add_parser("fit-alpha", help="fit the tail index to market quotes beyond an anchor")
    _common_flags(p)
    _chain_flags(p)
    _anchor_flags(p)
    p.add_argument("--side", choices=("call", "put"), default="call")
    p.set_defaults(func=cmd_fit_alpha)

    p = sub.add_parser("check-arb", help="no-arbitrage diagnostics over a call chain")
    _common_flags(p)
    _chain_flags(p)
    _anchor_flags(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--approach", choices=("price", "return"), default="return")
    p.add_argument("--butterfly-rtol", type=float, default=1e-12,
                   help="butterfly margin tolerance, relative to the mid price (default 1e-12)")
    p.add_argument("--slope-tol", type=float,
                   help="absolute slope-margin tolerance (default: 1e-6 of the model slope)")
    p.add_argument("--match-rtol", type=float, default=1e-8,
                   help="model/market price match required for slope checks (default 1e-8)")
    p.set_defaults(func=cmd_check_arb)

    p = sub.add_parser("alpha-bound", help="closed-form lower bound on the tail index")
    _common_flags(p)
    p.add_argument("--spot", type=float)
    p.add_argument("--strike", type=float)
    p.add_argument("--l", type=float)
    p.add_argument("--expiry-years", type=float)
    p.add_argument("--sigma", type=float, help="implied vol at the strike")
    p.add_argument("--sigma-slope", type=float, default=0.0,
                   help="d sigma / dK at the strike (default 0)")
    p.set_defaults(func=cmd_alpha_bound)

    p = sub.add_parser("zipf", help="local log-log slope of a transformed tail")
    _common_flags(p)
    p.add_argument("--l", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--transform", choices=tail_model.TRANSFORMS, default="identity")
    p.add_argument("--spot", type=float, help="reference spot for the return transforms")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.set_defaults(func=cmd_zipf)

    p = sub.add_parser("report", help="full model-vs-market report with figures")
    p.add_argument("--config", help="JSON file of flag defaults")
    _chain_flags(p)
    _anchor_flags(p)
    p.add_argument("--side", choices=("call", "put"), default="put")
    p.add_argument("--alpha", type=float, help="tail index to generate with")
    p.add_argument("--fit-alpha", action="store_true",
                   help="fit the tail index to the market instead of fixing it")
    p.add_argument("--approach", choices=("price", "return"), default="return")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_report)

    return parser


def _apply_config(args: argparse.Namespace) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(doc, dict):
        raise ParameterError(f"config {path!r} must hold a JSON object of flags")
    for key, value in doc.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_"), None) is None]
    if missing:
        raise ParameterError(
            "missing required flag(s): " + ", ".join("--" + n for n in missing)
        )


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _get_chain(args: argparse.Namespace) -> Chain:
    fmt_ = args.format
    if fmt_ is None and args.chain not in ("-",):
        fmt_ = "json" if args.chain.lower().endswith(".json") else "csv"
    if fmt_ is None:
        raise ParameterError("--format is required when reading the chain from stdin")
    source = sys.stdin if args.chain == "-" else args.chain
    return load_chain(source, fmt_, spot=args.spot, expiry_years=args.expiry_years)


def _get_anchor(args: argparse.Namespace, chain: Chain, side: str):
    if args.anchor_strike is None and args.anchor_moneyness is None:
        raise ParameterError("pass --anchor-strike or --anchor-moneyness")
    return select_anchor(
        chain, side, strike=args.anchor_strike, moneyness=args.anchor_moneyness
    )


_APPROACH = {"price": "price_tail", "return": "return_tail"}


def cmd_price(args) -> int:
    _need(args, "alpha", "l", "strike")
    if args.side == "put":
        _need(args, "spot")
        model = tail_model.PutReturnModel(l=args.l, alpha=args.alpha, S0=args.spot)
        value = tail_model.put_price_abs(model, args.strike)
    elif args.approach == "return":
        _need(args, "spot")
        model = tail_model.ReturnTailModel(l=args.l, alpha=args.alpha, S0=args.spot)
        value = tail_model.call_price_return_tail(model, args.strike)
    else:
        model = tail_model.PriceTailModel(l=args.l, alpha=args.alpha)
        value = tail_model.call_price_price_tail(model, args.strike)
    _emit(fmt(value) + "\n", args.output)
    return 0


def cmd_calibrate(args) -> int:
    _need(args, "alpha", "strike", "price")
    if args.approach == "return":
        _need(args, "spot")
        model = tail_model.calibrate_l_return_tail(
            args.price, args.strike, args.spot, args.alpha
        )
    else:
        model = tail_model.calibrate_l_price_tail(args.price, args.strike, args.alpha)
    _emit(fmt(model.l) + "\n", args.output)
    return 0


def cmd_ivol(args) -> int:
    _need(args, "spot", "strike", "expiry-years", "price")
    sigma = implied_vol(args.price, args.spot, args.strike, args.expiry_years,
                        side=args.side, price_tol=args.price_tol)
    _emit(fmt(sigma) + "\n", args.output)
    return 0


def cmd_curve(args) -> int:
    side = args.forced_side or args.side
    _need(args, "alpha")
    chain = _get_chain(args)
    anchor = _get_anchor(args, chain, side)
    curve = generate_curve(chain, side, anchor, args.alpha,
                           approach=_APPROACH[args.approach])
    _emit(curve_csv(curve), args.output)
    if args.json_output:
        Path(args.json_output).write_text(curve_json(curve), encoding="utf-8")
    if args.loglog_output:
        Path(args.loglog_output).write_text(
            loglog_csv(loglog_export(curve)), encoding="utf-8"
        )
    return 0


def cmd_fit_alpha(args) -> int:
    chain = _get_chain(args)
    anchor = _get_anchor(args, chain, args.side)
    fit = fit_alpha_to_market(chain, args.side, anchor)
    _emit(fmt(fit.alpha) + "\n", args.output)
    print(f"r_squared={fmt(fit.r_squared)} n_points={fit.n_points}", file=sys.stderr)
    return 0


def cmd_check_arb(args) -> int:
    _need(args, "alpha")
    chain = _get_chain(args)
    if args.anchor_strike is None and args.anchor_moneyness is None:
        calls = chain.side_quotes("call")
        if not calls:
            raise ParameterError("chain has no call quotes; nothing to check")
        anchor = calls[0]
    else:
        anchor = _get_anchor(args, chain, "call")
    rows = arbitrage_scan(
        chain,
        anchor,
        args.alpha,
        approach=_APPROACH[args.approach],
        butterfly_rel_tol=args.butterfly_rtol,
        slope_tolerance=args.slope_tol,
        match_rtol=args.match_rtol,
    )
    _emit(arb_csv(rows), args.output)
    verdict = "all checks passed" if all_pass(rows) else "violations found"
    print(f"check-arb: {verdict} over {len(rows)} strikes "
          f"(anchor {fmt(anchor.strike)})", file=sys.stderr)
    return 0


def cmd_alpha_bound(args) -> int:
    _need(args, "spot", "strike", "l", "expiry-years", "sigma")
    bound = alpha_lower_bound(
        args.strike, args.spot, args.l, args.expiry_years, args.sigma,
        sigma_slope=args.sigma_slope,
    )
    _emit(fmt(bound) + "\n", args.output)
    return 0


def cmd_zipf(args) -> int:
    _need(args, "l", "alpha", "x-min", "x-max")
    if args.points < 1:
        raise ParameterError("--points must be at least 1")
    model = tail_model.PriceTailModel(l=args.l, alpha=args.alpha)
    if args.spacing == "log":
        grid = np.geomspace(args.x_min, args.x_max, args.points)
    else:
        grid = np.linspace(args.x_min, args.x_max, args.points)
    pairs = tail_model.zipf_local_slope(model, args.transform, grid, s0=args.spot)
    lines = ["x,slope"] + [f"{fmt(x)},{fmt(s)}" for x, s in pairs]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_report(args) -> int:
    side = args.side
    if args.fit_alpha == (args.alpha is not None):
        raise ParameterError("pass exactly one of --alpha or --fit-alpha")
    chain = _get_chain(args)
    anchor = _get_anchor(args, chain, side)
    if args.fit_alpha:
        fit = fit_alpha_to_market(chain, side, anchor)
        alpha = fit.alpha
        print(f"fitted alpha={fmt(alpha)} r_squared={fmt(fit.r_squared)} "
              f"n_points={fit.n_points}", file=sys.stderr)
    else:
        alpha = args.alpha
    curve = generate_curve(chain, side, anchor, alpha,
                           approach=_APPROACH[args.approach])

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    (out / "report.csv").write_text(curve_csv(curve), encoding="utf-8")
    written.append(out / "report.csv")
    (out / "report.json").write_text(curve_json(curve), encoding="utf-8")
    written.append(out / "report.json")
    (out / "loglog.csv").write_text(loglog_csv(loglog_export(curve)), encoding="utf-8")
    written.append(out / "loglog.csv")
    if not args.no_figures:
        from . import plots  # matplotlib import deferred to the one place it is needed

        plots.save_price_figure(curve, out / "prices.png")
        written.append(out / "prices.png")
        plots.save_ivol_figure(curve, out / "implied_vol.png")
        written.append(out / "implied_vol.png")
    for path in written:
        print(str(path))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        _apply_config(args)
        return args.func(args)
    except TailPricingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
