"""Black-Scholes valuation at zero rates, implied vol, and strike derivatives.

Everything assumes zero rates and carry: chains quoted against a nonzero
curve must be forward-adjusted before they get here.  The normal CDF is
built on math.erfc (double-precision accurate), which is also the primitive
the closed-form tail-index bound is expressed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConvergenceError, ParameterError, PriceBoundsError

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Implied-vol search bracket and its price tolerance (on price, not on sigma).
SIGMA_LO = 1e-6
SIGMA_HI = 10.0
IV_PRICE_TOL = 1e-10
IV_MAX_ITER = 200

SIDES = ("call", "put")


def norm_cdf(x: float) -> float:
    """Standard normal CDF via erfc: Phi(x) = erfc(-x / sqrt(2)) / 2."""
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT2PI


@dataclass(frozen=True)
class BSInputs:
    """One Black-Scholes quote point: spot, strike, vol (per sqrt-year), expiry."""

    S0: float
    K: float
    sigma: float
    t: float

    def __post_init__(self):
        for name in ("S0", "K", "sigma", "t"):
            v = float(getattr(self, name))
            if not v > 0.0 or not math.isfinite(v):
                raise ParameterError(
                    f"BSInputs.{name} must be positive and finite, got {v!r}"
                )
            object.__setattr__(self, name, v)


def _d1_d2(inputs: BSInputs) -> tuple[float, float]:
    vol_sqrt_t = inputs.sigma * math.sqrt(inputs.t)
    d1 = math.log(inputs.S0 / inputs.K) / vol_sqrt_t + 0.5 * vol_sqrt_t
    return d1, d1 - vol_sqrt_t


def bs_call(inputs: BSInputs) -> float:
    """Call value S0 Phi(d1) - K Phi(d2) at zero rates."""
    d1, d2 = _d1_d2(inputs)
    return inputs.S0 * norm_cdf(d1) - inputs.K * norm_cdf(d2)


def bs_put(inputs: BSInputs) -> float:
    """Put value K Phi(-d2) - S0 Phi(-d1); parity C - P = S0 - K at zero rates."""
    d1, d2 = _d1_d2(inputs)
    return inputs.K * norm_cdf(-d2) - inputs.S0 * norm_cdf(-d1)


def vega(inputs: BSInputs) -> float:
    """dPrice/dsigma = S0 phi(d1) sqrt(t), same for calls and puts."""
    d1, _ = _d1_d2(inputs)
    return inputs.S0 * norm_pdf(d1) * math.sqrt(inputs.t)


def bs_call_dK(inputs: BSInputs, skew_slope: float) -> float:
    """Total strike derivative of BSC(K, sigma(K)) when sigma moves with K.

    d/dK BSC(K, sigma(K)) = -Phi(d2) + S0 phi(d1) sqrt(t) * sigma'(K).
    This is the limit of a call-spread price per unit of strike.
    """
    skew_slope = float(skew_slope)
    if not math.isfinite(skew_slope):
        raise ParameterError(f"skew_slope must be finite, got {skew_slope!r}")
    d1, d2 = _d1_d2(inputs)
    return -norm_cdf(d2) + inputs.S0 * norm_pdf(d1) * math.sqrt(inputs.t) * skew_slope


def implied_vol(
    price: float,
    S0: float,
    K: float,
    t: float,
    side: str = "call",
    price_tol: float = IV_PRICE_TOL,
) -> float:
    """Invert Black-Scholes for sigma, bracketed on [1e-6, 10].

    Newton steps (vega) are taken whenever they stay inside the current
    bracket, with bisection as the fallback; convergence is declared on the
    price residual, not on sigma.  Prices outside the band attainable within
    the bracket raise PriceBoundsError.
    """
    if side not in SIDES:
        raise ParameterError(f"side must be one of {SIDES}, got {side!r}")
    price = float(price)
    if not math.isfinite(price):
        raise ParameterError(f"price must be finite, got {price!r}")
    pricer = bs_call if side == "call" else bs_put
    probe = BSInputs(S0=S0, K=K, sigma=1.0, t=t)

    intrinsic = max(probe.S0 - probe.K, 0.0) if side == "call" else max(probe.K - probe.S0, 0.0)
    upper = probe.S0 if side == "call" else probe.K
    if price <= intrinsic or price >= upper:
        raise PriceBoundsError(
            f"{side} price {price!r} is outside the static no-arbitrage band "
            f"({intrinsic!r}, {upper!r}) for S0={probe.S0!r}, K={probe.K!r}"
        )

    lo, hi = SIGMA_LO, SIGMA_HI
    p_lo = pricer(replace(probe, sigma=lo))
    p_hi = pricer(replace(probe, sigma=hi))
    if price < p_lo - price_tol or price > p_hi + price_tol:
        raise PriceBoundsError(
            f"{side} price {price!r} is not attainable for sigma in "
            f"[{SIGMA_LO}, {SIGMA_HI}] (band [{p_lo!r}, {p_hi!r}])"
        )

    sigma = min(max(0.5 * (lo + hi), 0.2), 1.0)  # start well inside
    for _ in range(IV_MAX_ITER):
        inputs = replace(probe, sigma=sigma)
        diff = pricer(inputs) - price
        if abs(diff) <= price_tol:
            return sigma
        if diff > 0.0:
            hi = sigma
        else:
            lo = sigma
        v = vega(inputs)
        step = diff / v if v > 1e-16 else math.inf
        candidate = sigma - step
        if lo < candidate < hi:
            sigma = candidate
        else:
            sigma = 0.5 * (lo + hi)
    raise ConvergenceError(
        f"implied vol did not converge to |price error| <= {price_tol!r} in "
        f"{IV_MAX_ITER} iterations (last sigma={sigma!r})"
    )
