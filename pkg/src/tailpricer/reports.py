"""Delimited report writers and the per-strike arbitrage scan.

All numeric output is printed with 12 significant digits so identical
inputs produce byte-identical artifacts.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

from . import tail_model
from .arbitrage import (
    VolSkew,
    bl_density,
    bl_density_return_tail,
    slope_condition,
)
from .black_scholes import BSInputs, implied_vol
from .errors import (
    AnchorError,
    ConvergenceError,
    DomainError,
    MatchingError,
    ParameterError,
    PriceBoundsError,
)
from .surface import Chain, GeneratedCurve, LogLogPoint, OptionQuote

CURVE_HEADER = "strike,model_price,market_price,ratio,implied_vol_model,implied_vol_market"
ARB_HEADER = (
    "strike,market_price,model_price,density,"
    "butterfly_margin,butterfly_pass,slope_margin,slope_pass,note"
)


def fmt(x) -> str:
    """Canonical 12-significant-digit rendering used by every emitter."""
    return format(float(x), ".12g")


def _cell(x) -> str:
    return "" if x is None else fmt(x)


def curve_csv(curve: GeneratedCurve) -> str:
    lines = [CURVE_HEADER]
    for p in curve.points:
        lines.append(
            ",".join(
                (
                    fmt(p.strike),
                    _cell(p.model_price),
                    _cell(p.market_price),
                    _cell(p.ratio),
                    _cell(p.implied_vol),
                    _cell(p.implied_vol_market),
                )
            )
        )
    return "\n".join(lines) + "\n"


def curve_json(curve: GeneratedCurve) -> str:
    doc = {
        "side": curve.side,
        "approach": curve.approach,
        "alpha": curve.alpha,
        "spot": curve.spot,
        "expiry_years": curve.expiry_years,
        "anchor_strike": curve.anchor_strike,
        "anchor_price": curve.anchor_price,
        "points": [
            {
                "strike": p.strike,
                "model_price": p.model_price,
                "market_price": p.market_price,
                "ratio": p.ratio,
                "implied_vol_model": p.implied_vol,
                "implied_vol_market": p.implied_vol_market,
                "note": p.note,
            }
            for p in curve.points
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def loglog_csv(points: list[LogLogPoint]) -> str:
    with_market = any(p.log_market_price is not None for p in points)
    out = io.StringIO()
    out.write("log_distance,log_model_price")
    if with_market:
        out.write(",log_market_price")
    out.write("\n")
    for p in points:
        out.write(f"{fmt(p.log_distance)},{fmt(p.log_model_price)}")
        if with_market:
            out.write("," + _cell(p.log_market_price))
        out.write("\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# Arbitrage scan
# ---------------------------------------------------------------------------

@dataclass
class ArbRow:
    strike: float
    market_price: float | None = None
    model_price: float | None = None
    density: float | None = None
    butterfly_margin: float | None = None
    butterfly_pass: bool | None = None
    slope_margin: float | None = None
    slope_pass: bool | None = None
    note: str = ""


def _stencil_skew(raw_price_at, S0: float, t: float, K: float, h: float) -> VolSkew:
    # implied-vol knots of the model curve at K-h, K, K+h; used for sigma'(K).
    # raw_price_at must evaluate the closed form without the zone guard: at a
    # boundary anchor the lower stencil point sits a hair outside the zone,
    # where the formula is still smooth and only feeds the slope estimate.
    points = [(k, raw_price_at(k)) for k in (K - h, K, K + h)]
    return VolSkew(
        knots=tuple(
            (k, implied_vol(p, S0, k, t, side="call", price_tol=max(1e-14, 1e-9 * p)))
            for k, p in points
        )
    )


def arbitrage_scan(
    chain: Chain,
    anchor: OptionQuote,
    alpha,
    approach: str = "return_tail",
    butterfly_rel_tol: float = 1e-12,
    slope_tolerance: float | None = None,
    match_rtol: float = 1e-8,
    stencil_rel: float = 1e-4,
) -> list[ArbRow]:
    """Run the no-arbitrage diagnostics over the call strikes of a chain.

    The tail model is calibrated once at the anchor quote.  Per strike at or
    beyond the anchor the scan reports the recovered density, the butterfly
    margin (model wings above, chain price for the wing below, weighted for
    uneven spacing), and the call-spread slope margin against the model's own
    implied-vol smile.  The slope check needs a matched anchor, so strikes
    where the chain price strays from the model price beyond ``match_rtol``
    are flagged instead of checked.  Rows always carry their margins; a pass
    is a margin above minus-tolerance.
    """
    a = tail_model._checked_alpha(alpha)
    S0, t = chain.spot, chain.expiry_years
    if anchor.side != "call":
        raise ParameterError("arbitrage_scan runs on the call side")
    if approach == "return_tail":
        model = tail_model.calibrate_l_return_tail(anchor.price, anchor.strike, S0, a)

        def price_at(K: float) -> float:
            return tail_model.call_price_return_tail(model, K)

        def raw_price_at(K: float) -> float:
            return math.exp(
                a * math.log(model.l * S0) + (1.0 - a) * math.log(K - S0)
            ) / (a - 1.0)

        def density_at(K: float) -> float:
            return bl_density_return_tail(model, K)
    elif approach == "price_tail":
        model = tail_model.calibrate_l_price_tail(anchor.price, anchor.strike, a)

        def price_at(K: float) -> float:
            return tail_model.call_price_price_tail(model, K)

        def raw_price_at(K: float) -> float:
            return math.exp(a * math.log(model.l) + (1.0 - a) * math.log(K)) / (a - 1.0)

        def density_at(K: float) -> float:
            return bl_density(model, K)
    else:
        raise ParameterError(f"approach must be 'price_tail' or 'return_tail', got {approach!r}")

    calls = chain.side_quotes("call")
    if not calls:
        raise AnchorError("chain has no call quotes to scan")
    selected = [q for q in calls if q.strike >= anchor.strike]
    below = [q for q in calls if q.strike < anchor.strike]

    rows: list[ArbRow] = []
    for idx, quote in enumerate(selected):
        K = quote.strike
        row = ArbRow(strike=K, market_price=quote.price)
        notes = []
        try:
            row.model_price = price_at(K)
            row.density = density_at(K)
        except DomainError as exc:
            notes.append(f"inside Karamata point ({exc})")
            row.note = "; ".join(notes)
            rows.append(row)
            continue

        # butterfly: model wings at/above this strike, chain price below
        down = selected[idx - 1] if idx > 0 else (below[-1] if below else None)
        up = selected[idx + 1] if idx + 1 < len(selected) else None
        if down is not None and up is not None:
            w = (up.strike - K) / (up.strike - down.strike)
            down_price = down.price if down.strike < anchor.strike else price_at(down.strike)
            margin = w * down_price + (1.0 - w) * price_at(up.strike) - row.model_price
            tol = max(butterfly_rel_tol * row.model_price, 1e-12)
            row.butterfly_margin = margin
            row.butterfly_pass = margin >= -tol

        # slope condition against the model's own smile at this strike
        if quote.price <= 0.0 or abs(quote.price - row.model_price) > match_rtol * row.model_price:
            notes.append("chain price does not match the model here; slope check skipped")
        else:
            h = stencil_rel * K
            try:
                skew = _stencil_skew(raw_price_at, S0, t, K, h)
            except (ValueError, DomainError, PriceBoundsError, ConvergenceError) as exc:
                notes.append(f"slope check unavailable ({exc.__class__.__name__})")
                skew = None
            if skew is not None:
                try:
                    check = slope_condition(
                        BSInputs(S0=S0, K=K, sigma=skew.sigma_at(K), t=t),
                        skew,
                        model,
                        K,
                        match_rtol=match_rtol,
                        tolerance=slope_tolerance,
                    )
                    row.slope_margin = check.margin
                    row.slope_pass = check.passed
                except MatchingError as exc:
                    notes.append(f"slope matching failed ({exc})")
        row.note = "; ".join(notes)
        rows.append(row)
    return rows


def all_pass(rows: list[ArbRow]) -> bool:
    ok = True
    for row in rows:
        if row.density is not None and row.density < 0.0:
            ok = False
        for flag in (row.butterfly_pass, row.slope_pass):
            if flag is False:
                ok = False
    return ok


def _flag(value: bool | None) -> str:
    if value is None:
        return ""
    return "pass" if value else "fail"


def arb_csv(rows: list[ArbRow]) -> str:
    lines = [ARB_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                (
                    fmt(r.strike),
                    _cell(r.market_price),
                    _cell(r.model_price),
                    _cell(r.density),
                    _cell(r.butterfly_margin),
                    _flag(r.butterfly_pass),
                    _cell(r.slope_margin),
                    _flag(r.slope_pass),
                    '"%s"' % r.note if r.note else "",
                )
            )
        )
    return "\n".join(lines) + "\n"
