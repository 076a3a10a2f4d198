"""Chain ingestion, anchor selection, and model-vs-market tail curves.

A Chain is one expiry's snapshot: spot, time to expiry in years, and quoted
(strike, side, price) rows.  Curves are generated strike-by-strike from a
single anchor quote plus a tail index, then converted to implied vols and
compared against whatever market quotes exist at the same strikes.  Rates
are assumed zero throughout; forward-adjust quotes before loading them.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tail_model
from .black_scholes import implied_vol
from .errors import (
    AnchorError,
    CalibrationError,
    ChainParseError,
    ChainValidationError,
    ConvergenceError,
    DomainError,
    FitError,
    ParameterError,
    PriceBoundsError,
)

logger = logging.getLogger(__name__)

SIDES = ("call", "put")
APPROACHES = ("price_tail", "return_tail")

_SIDE_ALIASES = {"c": "call", "call": "call", "p": "put", "put": "put"}
_CSV_HEADER = ["strike", "side", "price"]


@dataclass(frozen=True)
class OptionQuote:
    strike: float
    side: str  # "call" | "put"
    price: float

    def __post_init__(self):
        if self.side not in SIDES:
            raise ChainValidationError(
                f"quote side must be one of {SIDES}, got {self.side!r}"
            )
        if not float(self.strike) > 0.0:
            raise ChainValidationError(f"quote strike must be positive, got {self.strike!r}")
        if not float(self.price) >= 0.0:
            raise ChainValidationError(f"quote price must be nonnegative, got {self.price!r}")
        object.__setattr__(self, "strike", float(self.strike))
        object.__setattr__(self, "price", float(self.price))


@dataclass(frozen=True)
class Chain:
    """One expiry's market snapshot; quotes are kept sorted by strike."""

    spot: float
    expiry_years: float
    quotes: tuple[OptionQuote, ...]

    def __post_init__(self):
        if not float(self.spot) > 0.0:
            raise ChainValidationError(f"spot must be positive, got {self.spot!r}")
        if not float(self.expiry_years) > 0.0:
            raise ChainValidationError(
                f"expiry_years must be positive, got {self.expiry_years!r}"
            )
        quotes = tuple(sorted(self.quotes, key=lambda q: (q.strike, q.side)))
        seen = set()
        for q in quotes:
            key = (q.side, q.strike)
            if key in seen:
                raise ChainValidationError(
                    f"duplicate {q.side} strike {q.strike!r} in chain"
                )
            seen.add(key)
        object.__setattr__(self, "spot", float(self.spot))
        object.__setattr__(self, "expiry_years", float(self.expiry_years))
        object.__setattr__(self, "quotes", quotes)

    def side_quotes(self, side: str) -> list[OptionQuote]:
        if side not in SIDES:
            raise ParameterError(f"side must be one of {SIDES}, got {side!r}")
        return [q for q in self.quotes if q.side == side]


def _normalize_side(raw: str, where: str) -> str:
    side = _SIDE_ALIASES.get(str(raw).strip().lower())
    if side is None:
        raise ChainParseError(f"{where}: side must be C or P, got {raw!r}")
    return side


def _parse_number(raw: str, name: str, where: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ChainParseError(f"{where}: {name} {raw!r} is not a number") from None


def _read_text(source) -> str:
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        return Path(source).read_text(encoding="utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def load_chain(
    source,
    format: str,
    spot: float | None = None,
    expiry_years: float | None = None,
) -> Chain:
    """Load and validate a chain from CSV or JSON.

    CSV carries only quote rows under the exact header ``strike,side,price``
    (side C or P), so spot and expiry_years must be supplied here.  JSON
    documents carry ``spot``, ``expiry_years`` and a ``quotes`` array; the
    arguments serve as fallbacks for fields the document omits.  Bad rows
    raise with the offending line or entry named.
    """
    if format not in ("csv", "json"):
        raise ParameterError(f"format must be 'csv' or 'json', got {format!r}")
    text = _read_text(source)

    if format == "csv":
        if spot is None or expiry_years is None:
            raise ParameterError(
                "CSV chains carry no spot/expiry metadata: pass spot= and "
                "expiry_years= (or use the JSON format)"
            )
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ChainParseError("empty CSV input") from None
        if [h.strip() for h in header] != _CSV_HEADER:
            raise ChainParseError(
                f"CSV header must be exactly {','.join(_CSV_HEADER)!r}, "
                f"got {','.join(header)!r}"
            )
        quotes = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            where = f"line {lineno}"
            if len(row) != 3:
                raise ChainParseError(f"{where}: expected 3 columns, got {len(row)}")
            strike = _parse_number(row[0], "strike", where)
            side = _normalize_side(row[1], where)
            price = _parse_number(row[2], "price", where)
            try:
                quotes.append(OptionQuote(strike=strike, side=side, price=price))
            except ChainValidationError as exc:
                raise ChainValidationError(f"{where}: {exc}") from None
        return Chain(spot=float(spot), expiry_years=float(expiry_years), quotes=tuple(quotes))

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChainParseError(f"invalid JSON chain: {exc}") from None
    if not isinstance(doc, dict):
        raise ChainParseError("JSON chain must be an object")
    doc_spot = doc.get("spot", spot)
    doc_expiry = doc.get("expiry_years", expiry_years)
    if doc_spot is None or doc_expiry is None:
        raise ChainParseError(
            "JSON chain must provide 'spot' and 'expiry_years' (or pass them "
            "as arguments)"
        )
    raw_quotes = doc.get("quotes")
    if not isinstance(raw_quotes, list):
        raise ChainParseError("JSON chain must contain a 'quotes' array")
    quotes = []
    for i, entry in enumerate(raw_quotes):
        where = f"quotes[{i}]"
        if not isinstance(entry, dict):
            raise ChainParseError(f"{where}: expected an object")
        try:
            strike = _parse_number(entry["strike"], "strike", where)
            side = _normalize_side(entry["side"], where)
            price = _parse_number(entry["price"], "price", where)
        except KeyError as exc:
            raise ChainParseError(f"{where}: missing field {exc}") from None
        try:
            quotes.append(OptionQuote(strike=strike, side=side, price=price))
        except ChainValidationError as exc:
            raise ChainValidationError(f"{where}: {exc}") from None
    return Chain(
        spot=float(doc_spot), expiry_years=float(doc_expiry), quotes=tuple(quotes)
    )


def select_anchor(
    chain: Chain,
    side: str,
    strike: float | None = None,
    moneyness: float | None = None,
    max_rel_gap: float = 0.1,
) -> OptionQuote:
    """Pick the anchor quote nearest a requested strike or moneyness percent.

    Moneyness is in percent of spot (90 means K = 0.9 spot).  The nearest
    listed strike on the requested side is returned; an inexact match is
    logged.  If the side is absent, or the nearest strike is further than
    max_rel_gap (relative) from the target, AnchorError is raised.
    """
    if (strike is None) == (moneyness is None):
        raise ParameterError("pass exactly one of strike= or moneyness=")
    if strike is not None:
        target = float(strike)
    else:
        target = chain.spot * float(moneyness) / 100.0
    if not target > 0.0:
        raise ParameterError(f"anchor target strike {target!r} must be positive")

    candidates = chain.side_quotes(side)
    if not candidates:
        raise AnchorError(f"chain has no {side} quotes to anchor on")
    best = min(candidates, key=lambda q: abs(q.strike - target))
    gap = abs(best.strike - target)
    if gap > max_rel_gap * target:
        raise AnchorError(
            f"no {side} quote within {max_rel_gap:.0%} of requested strike "
            f"{target!r} (nearest listed: {best.strike!r})"
        )
    if gap > 1e-9 * target:
        logger.info(
            "anchor request %s resolved to nearest listed strike %s (gap %.4g)",
            target, best.strike, gap,
        )
    return best


@dataclass
class CurvePoint:
    strike: float
    model_price: float | None = None
    implied_vol: float | None = None
    market_price: float | None = None
    ratio: float | None = None
    implied_vol_market: float | None = None
    note: str = ""


@dataclass
class GeneratedCurve:
    side: str
    approach: str
    alpha: float
    spot: float
    expiry_years: float
    anchor_strike: float
    anchor_price: float
    points: list[CurvePoint] = field(default_factory=list)


def _model_iv(price: float, spot: float, K: float, t: float, side: str):
    try:
        return implied_vol(price, spot, K, t, side=side), ""
    except (PriceBoundsError, ConvergenceError) as exc:
        return None, f"implied vol unavailable ({exc.__class__.__name__})"


def generate_curve(
    chain: Chain,
    side: str,
    anchor: OptionQuote,
    alpha,
    approach: str = "return_tail",
) -> GeneratedCurve:
    """Price every chain strike beyond the anchor off the anchor quote.

    Calls extend upward from the anchor using the chosen approach; puts
    extend downward through the l-free put ratio (the approach argument is
    ignored for puts, where only the return construction applies).  Strikes
    that fall outside a model's zone are kept as rows with a note instead of
    failing the whole curve; the anchor row itself carries ratio exactly 1.
    """
    if side not in SIDES:
        raise ParameterError(f"side must be one of {SIDES}, got {side!r}")
    if approach not in APPROACHES:
        raise ParameterError(f"approach must be one of {APPROACHES}, got {approach!r}")
    if anchor.side != side:
        raise ParameterError(
            f"anchor is a {anchor.side} quote but the curve side is {side}"
        )
    if anchor.price <= 0.0:
        raise AnchorError(f"anchor at strike {anchor.strike!r} has no positive price")
    a = tail_model._checked_alpha(alpha)
    S0, t = chain.spot, chain.expiry_years

    if side == "call":
        if approach == "return_tail":
            model = tail_model.calibrate_l_return_tail(anchor.price, anchor.strike, S0, a)

            def price_at(K: float) -> float:
                return tail_model.call_price_return_tail(model, K)
        else:
            model = tail_model.calibrate_l_price_tail(anchor.price, anchor.strike, a)

            def price_at(K: float) -> float:
                return tail_model.call_price_price_tail(model, K)

        selected = [q for q in chain.side_quotes(side) if q.strike >= anchor.strike]
    else:
        if not anchor.strike < S0:
            raise DomainError(
                f"put anchor strike {anchor.strike!r} must sit below the spot {S0!r}"
            )

        def price_at(K: float) -> float:
            return tail_model.relative_put(anchor.price, anchor.strike, K, S0, a)

        selected = [q for q in chain.side_quotes(side) if q.strike <= anchor.strike]

    curve = GeneratedCurve(
        side=side,
        approach=approach,
        alpha=a,
        spot=S0,
        expiry_years=t,
        anchor_strike=anchor.strike,
        anchor_price=anchor.price,
    )
    for quote in selected:
        point = CurvePoint(strike=quote.strike, market_price=quote.price)
        notes = []
        if abs(quote.strike - anchor.strike) <= 1e-12 * anchor.strike:
            point.model_price = anchor.price
        else:
            try:
                point.model_price = price_at(quote.strike)
            except (DomainError, CalibrationError) as exc:
                notes.append(f"inside Karamata point ({exc})")
        if point.model_price is not None:
            iv, iv_note = _model_iv(point.model_price, S0, quote.strike, t, side)
            point.implied_vol = iv
            if iv_note:
                notes.append("model " + iv_note)
            if quote.price > 0.0:
                point.ratio = point.model_price / quote.price
            else:
                notes.append("no market price for ratio")
        if quote.price > 0.0:
            iv_mkt, iv_note = _model_iv(quote.price, S0, quote.strike, t, side)
            point.implied_vol_market = iv_mkt
            if iv_note:
                notes.append("market " + iv_note)
        point.note = "; ".join(notes)
        curve.points.append(point)
    return curve


@dataclass(frozen=True)
class LogLogPoint:
    log_distance: float
    log_model_price: float
    log_market_price: float | None = None


def loglog_export(curve: GeneratedCurve, spot: float | None = None) -> list[LogLogPoint]:
    """Curve as (ln |K - S0|, ln price) pairs, in the curve's tail direction.

    Call curves use ln(K - S0) for strikes above the spot, put curves
    ln(S0 - K) for strikes below; rows without a positive model price or on
    the wrong side of the spot are dropped.  Under the returns construction
    the call points are exactly affine with slope 1 - alpha.
    """
    S0 = curve.spot if spot is None else float(spot)
    out = []
    for p in curve.points:
        if p.model_price is None or p.model_price <= 0.0:
            continue
        distance = (p.strike - S0) if curve.side == "call" else (S0 - p.strike)
        if distance <= 0.0:
            continue
        market = None
        if p.market_price is not None and p.market_price > 0.0:
            market = math.log(p.market_price)
        out.append(
            LogLogPoint(
                log_distance=math.log(distance),
                log_model_price=math.log(p.model_price),
                log_market_price=market,
            )
        )
    if not out:
        raise DomainError(
            "curve has no priced strikes strictly beyond the spot in its "
            "direction; nothing to export"
        )
    return out


@dataclass(frozen=True)
class AlphaFit:
    """Tail index fitted to market quotes in log-log space."""

    alpha: float
    slope: float
    r_squared: float
    n_points: int


def fit_alpha_to_market(chain: Chain, side: str, anchor: OptionQuote) -> AlphaFit:
    """Fit alpha = 1 - slope of ln(price) against ln|K - S0| beyond the anchor.

    Uses the market quotes at and beyond the anchor (upward for calls,
    downward for puts) with positive prices and strikes strictly beyond the
    spot.  At least 3 usable points are required.  The fit is exact for a
    Paretan returns-model call curve; elsewhere it is the log-log
    least-squares analogue of matching the market's tail decay.
    """
    if side not in SIDES:
        raise ParameterError(f"side must be one of {SIDES}, got {side!r}")
    S0 = chain.spot
    xs, ys = [], []
    for q in chain.side_quotes(side):
        beyond = q.strike >= anchor.strike if side == "call" else q.strike <= anchor.strike
        if not beyond or q.price <= 0.0:
            continue
        distance = (q.strike - S0) if side == "call" else (S0 - q.strike)
        if distance <= 0.0:
            continue
        xs.append(math.log(distance))
        ys.append(math.log(q.price))
    if len(xs) < 3:
        raise FitError(
            f"need at least 3 positive {side} quotes beyond the anchor to fit "
            f"alpha, found {len(xs)}"
        )
    x = np.asarray(xs)
    y = np.asarray(ys)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return AlphaFit(
        alpha=1.0 - float(slope),
        slope=float(slope),
        r_squared=r_squared,
        n_points=len(xs),
    )
