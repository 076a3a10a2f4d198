"""Figure rendering for curve reports.

The report command saves these next to its CSV/JSON artifacts.  Rendering is
headless (Agg) and intentionally plain: log-log prices against strike
distance, and the implied-vol comparison with the model/market ratio.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .surface import GeneratedCurve


def _distance_label(curve: GeneratedCurve) -> str:
    return "K - S0" if curve.side == "call" else "S0 - K"


def save_price_figure(curve: GeneratedCurve, path) -> None:
    """Model vs market prices on log-log axes against strike distance."""
    S0 = curve.spot
    xs, model, market = [], [], []
    for p in curve.points:
        d = (p.strike - S0) if curve.side == "call" else (S0 - p.strike)
        if d <= 0.0 or p.model_price is None or p.model_price <= 0.0:
            continue
        xs.append(d)
        model.append(p.model_price)
        market.append(p.market_price if p.market_price and p.market_price > 0 else None)

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.loglog(xs, model, "-", color="tab:red", lw=1.8,
              label=f"model (alpha={curve.alpha:g})")
    mkt_pairs = [(x, m) for x, m in zip(xs, market) if m is not None]
    if mkt_pairs:
        ax.loglog(*zip(*mkt_pairs), "o", color="tab:blue", ms=5,
                  mfc="none", label="market")
    ax.axvline(abs(curve.anchor_strike - S0), color="gray", lw=1, ls="--",
               label=f"anchor K={curve.anchor_strike:g}")
    ax.set_xlabel(_distance_label(curve))
    ax.set_ylabel(f"{curve.side} price")
    ax.set_title(f"Tail {curve.side} prices from anchor {curve.anchor_strike:g} "
                 f"(S0={S0:g}, t={curve.expiry_years:g}y)")
    ax.grid(True, which="both", ls=":", alpha=0.5)
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_ivol_figure(curve: GeneratedCurve, path) -> None:
    """Implied vols (model vs market) and the model/market price ratio."""
    strikes = [p.strike for p in curve.points]
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(7, 7), sharex=True, height_ratios=[2, 1]
    )

    iv_model = [(p.strike, p.implied_vol) for p in curve.points if p.implied_vol]
    iv_market = [(p.strike, p.implied_vol_market) for p in curve.points
                 if p.implied_vol_market]
    if iv_model:
        ax1.plot(*zip(*iv_model), "-", color="tab:red", lw=1.8, label="model IV")
    if iv_market:
        ax1.plot(*zip(*iv_market), "o", color="tab:blue", ms=5, mfc="none",
                 label="market IV")
    ax1.axvline(curve.anchor_strike, color="gray", lw=1, ls="--")
    ax1.set_ylabel("implied volatility")
    ax1.set_title(f"Implied vols, {curve.side}s anchored at "
                  f"{curve.anchor_strike:g} (alpha={curve.alpha:g})")
    ax1.grid(True, ls=":", alpha=0.5)
    ax1.legend(fontsize=9)

    ratios = [(p.strike, p.ratio) for p in curve.points if p.ratio is not None]
    if ratios:
        ax2.plot(*zip(*ratios), "s-", color="tab:green", ms=4, lw=1.2)
    ax2.axhline(1.0, color="gray", lw=1, ls="--")
    ax2.axvline(curve.anchor_strike, color="gray", lw=1, ls="--")
    ax2.set_xlabel("strike")
    ax2.set_ylabel("model / market")
    ax2.grid(True, ls=":", alpha=0.5)

    if strikes:
        lo, hi = min(strikes), max(strikes)
        pad = 0.02 * (hi - lo if hi > lo else hi)
        ax2.set_xlim(lo - pad, hi + pad)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
