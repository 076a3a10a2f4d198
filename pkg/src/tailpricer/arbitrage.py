"""No-arbitrage diagnostics for tail-model call curves.

Four checks live here:

* bl_density        -- the risk-neutral density recovered from the second
                       strike derivative of the closed-form call, which must
                       be nonnegative (it is, analytically: alpha l^a K^-(a+1)).
* butterfly_check   -- the three-strike inequality across the anchor,
                       C(K+dK) + BSC(K-dK) >= 2 C(K), for equally spaced wings.
* slope_condition   -- the call-spread limit of that butterfly at the anchor:
                       the model's call slope must be no steeper than the
                       Black-Scholes slope along the smile,
                       dC/dK >= dBSC(K, sigma(K))/dK.
* alpha_lower_bound -- the closed-form minimum tail index that keeps the
                       slope condition satisfied at a given strike/smile point.

Note on direction: taking the printed butterfly to the limit gives
dC/dK >= dBSC/dK (the model curve may not fall faster than the matched
Black-Scholes curve at the anchor), and the closed-form bound below is the
alpha at which the two slopes cross, a *lower* bound on alpha.  A fatter
tail (smaller alpha) steepens the model curve at the anchor and violates
the butterfly first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .black_scholes import BSInputs, bs_call, bs_call_dK, norm_cdf, norm_pdf
from .errors import DomainError, MatchingError, ParameterError
from .tail_model import (
    PriceTailModel,
    ReturnTailModel,
    _EDGE,
    call_price_price_tail,
    call_price_return_tail,
)

# Margin tolerances are relative with an absolute floor, per-check below.
MARGIN_FLOOR = 1e-12


@dataclass(frozen=True)
class VolSkew:
    """Piecewise-linear implied-vol curve sigma(K) over ordered strike knots.

    slope_at returns the containing segment's slope; at an interior knot the
    two adjacent segment slopes are averaged (the knot convention is not
    canonical; this centered choice is symmetric).  A single-knot skew is
    flat: sigma is constant and the slope is zero everywhere.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple((float(k), float(s)) for k, s in self.knots)
        if not knots:
            raise ParameterError("VolSkew needs at least one (strike, sigma) knot")
        for (k0, s0), (k1, _) in zip(knots, knots[1:]):
            if not k1 > k0:
                raise ParameterError(
                    f"VolSkew strikes must be strictly increasing, got {k0!r} then {k1!r}"
                )
        for k, s in knots:
            if not s > 0.0:
                raise ParameterError(f"VolSkew sigma at K={k!r} must be positive, got {s!r}")
        object.__setattr__(self, "knots", knots)

    @classmethod
    def flat(cls, sigma: float, strike: float = 1.0) -> "VolSkew":
        return cls(knots=((strike, sigma),))

    def _segment(self, K: float) -> int:
        ks = [k for k, _ in self.knots]
        if not ks[0] <= K <= ks[-1]:
            raise DomainError(
                f"K={K!r} lies outside the skew's knot range [{ks[0]!r}, {ks[-1]!r}]"
            )
        for i in range(len(ks) - 1):
            if K <= ks[i + 1]:
                return i
        return len(ks) - 2

    def sigma_at(self, K: float) -> float:
        K = float(K)
        if len(self.knots) == 1:
            return self.knots[0][1]
        i = self._segment(K)
        (k0, s0), (k1, s1) = self.knots[i], self.knots[i + 1]
        w = (K - k0) / (k1 - k0)
        return s0 + w * (s1 - s0)

    def slope_at(self, K: float) -> float:
        K = float(K)
        if len(self.knots) == 1:
            return 0.0
        i = self._segment(K)
        slopes = [
            (s1 - s0) / (k1 - k0)
            for (k0, s0), (k1, s1) in zip(self.knots, self.knots[1:])
        ]
        # interior knot: average the two adjacent segments
        if K == self.knots[i][0] and 0 < i:
            return 0.5 * (slopes[i - 1] + slopes[i])
        if K == self.knots[i + 1][0] and i + 1 < len(slopes):
            return 0.5 * (slopes[i] + slopes[i + 1])
        return slopes[i]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a boundary check; the margin is always reported."""

    passed: bool
    margin: float
    tolerance: float


@dataclass(frozen=True)
class SlopeCheck:
    """Outcome of the call-spread slope condition at an anchor strike."""

    passed: bool
    model_slope: float
    bs_slope: float
    margin: float  # model_slope - bs_slope; negative beyond tolerance fails
    tolerance: float


def bl_density(model: PriceTailModel, K: float) -> float:
    """Risk-neutral density alpha l^alpha K^-(alpha+1) from d2C/dK2, K >= l."""
    K = float(K)
    if K < model.l * (1.0 - _EDGE):
        raise DomainError(
            f"strike K={K!r} is below the Karamata point l={model.l!r}"
        )
    a = model.alpha
    return a * math.exp(a * math.log(model.l) - (a + 1.0) * math.log(K))


def bl_density_return_tail(model: ReturnTailModel, K: float) -> float:
    """Density alpha (l S0)^alpha (K - S0)^-(alpha+1) for the returns model."""
    K = float(K)
    if K < model.min_strike * (1.0 - _EDGE):
        raise DomainError(
            f"strike K={K!r} is below the Paretan return zone "
            f"(S0 (1 + l) = {model.min_strike!r})"
        )
    a = model.alpha
    y = max(K - model.S0, model.l * model.S0)
    return a * math.exp(a * math.log(model.l * model.S0) - (a + 1.0) * math.log(y))


def butterfly_check(
    C_up: float,
    C_mid: float,
    bsc_down: float,
    rel_tol: float = 1e-12,
) -> CheckResult:
    """Three-strike inequality C(K+dK) + BSC(K-dK) - 2 C(K) >= 0.

    Wings are assumed equally spaced around the mid strike.  The margin is
    reported as-is; pass means margin >= -tolerance with the tolerance
    relative to the mid price (floored at MARGIN_FLOOR).
    """
    for name, p in (("C_up", C_up), ("C_mid", C_mid), ("bsc_down", bsc_down)):
        if not float(p) >= 0.0:
            raise ParameterError(f"{name} must be nonnegative, got {p!r}")
    margin = float(C_up) + float(bsc_down) - 2.0 * float(C_mid)
    tolerance = max(rel_tol * float(C_mid), MARGIN_FLOOR)
    return CheckResult(passed=margin >= -tolerance, margin=margin, tolerance=tolerance)


def call_slope_return_tail(model: ReturnTailModel, K: float) -> float:
    """Analytic dC/dK = -(l S0)^alpha (K - S0)^-alpha for the returns model."""
    K = float(K)
    if K < model.min_strike * (1.0 - _EDGE):
        raise DomainError(
            f"strike K={K!r} is below the Paretan return zone "
            f"(S0 (1 + l) = {model.min_strike!r})"
        )
    a = model.alpha
    y = max(K - model.S0, model.l * model.S0)
    return -math.exp(a * (math.log(model.l * model.S0) - math.log(y)))


def call_slope_price_tail(model: PriceTailModel, K: float) -> float:
    """Analytic dC/dK = -l^alpha K^-alpha (secondary, price-tail path)."""
    K = float(K)
    if K < model.l * (1.0 - _EDGE):
        raise DomainError(
            f"strike K={K!r} is below the Karamata point l={model.l!r}"
        )
    return -math.exp(model.alpha * (math.log(model.l) - math.log(K)))


def slope_condition(
    bs_inputs: BSInputs,
    skew: VolSkew,
    model: ReturnTailModel | PriceTailModel,
    K1: float,
    match_rtol: float = 1e-8,
    tolerance: float | None = None,
) -> SlopeCheck:
    """Call-spread limit of the butterfly at the anchor strike K1.

    Requires the Black-Scholes quote to reproduce the model price at K1
    (within match_rtol, relative); without that the two slopes are not
    comparing the same curve and MatchingError is raised.  Passes when the
    model slope is no steeper than the Black-Scholes slope along the smile:
    margin = dC/dK - dBSC/dK >= -tolerance.
    """
    K1 = float(K1)
    if abs(bs_inputs.K - K1) > 1e-9 * K1:
        raise ParameterError(
            f"bs_inputs.K={bs_inputs.K!r} must be the anchor strike K1={K1!r}"
        )
    sigma_skew = skew.sigma_at(K1)
    if abs(sigma_skew - bs_inputs.sigma) > 1e-6 * bs_inputs.sigma:
        raise ParameterError(
            f"bs_inputs.sigma={bs_inputs.sigma!r} disagrees with the skew's "
            f"sigma(K1)={sigma_skew!r}"
        )

    if isinstance(model, ReturnTailModel):
        model_price = call_price_return_tail(model, K1)
        model_slope = call_slope_return_tail(model, K1)
    elif isinstance(model, PriceTailModel):
        model_price = call_price_price_tail(model, K1)
        model_slope = call_slope_price_tail(model, K1)
    else:
        raise ParameterError(f"unsupported model type {type(model).__name__}")

    bs_price = bs_call(bs_inputs)
    if abs(bs_price - model_price) > match_rtol * abs(model_price):
        raise MatchingError(
            f"BSC(K1, sigma(K1)) = {bs_price!r} does not reproduce the model "
            f"price {model_price!r} at K1={K1!r} within rel {match_rtol!r}; "
            "the slope comparison needs matched anchors"
        )

    bs_slope = bs_call_dK(bs_inputs, skew.slope_at(K1))
    margin = model_slope - bs_slope
    if tolerance is None:
        # absorb implied-vol / finite-difference noise in skews built from quotes
        tolerance = max(1e-6 * abs(model_slope), 1e-7)
    return SlopeCheck(
        passed=margin >= -tolerance,
        model_slope=model_slope,
        bs_slope=bs_slope,
        margin=margin,
        tolerance=tolerance,
    )


def alpha_lower_bound(
    K: float,
    S0: float,
    l: float,
    t: float,
    sigma: float,
    sigma_slope: float = 0.0,
) -> float:
    """Closed-form minimum tail index from the slope condition at (K, sigma).

    With A = Phi(d2) - S0 phi(d1) sqrt(t) sigma'(K), the model slope equals
    the Black-Scholes slope exactly when ((K - S0)/(l S0))^-alpha = A, so

        alpha >= ln(A) / (ln(l S0) - ln(K - S0)).

    Requires K > S0 (1 + l) (so the denominator is strictly negative) and
    A > 0 (otherwise no finite bound exists and DomainError is raised).
    The returned bound may be <= 1, in which case the condition never binds
    for admissible tail indices.
    """
    K, S0, l, t, sigma, sigma_slope = (
        float(K), float(S0), float(l), float(t), float(sigma), float(sigma_slope)
    )
    for name, v in (("S0", S0), ("l", l), ("t", t), ("sigma", sigma)):
        if not v > 0.0 or not math.isfinite(v):
            raise ParameterError(f"{name} must be positive and finite, got {v!r}")
    if not math.isfinite(sigma_slope):
        raise ParameterError(f"sigma_slope must be finite, got {sigma_slope!r}")
    if K <= S0 * (1.0 + l):
        raise DomainError(
            f"K={K!r} must exceed S0 (1 + l) = {S0 * (1.0 + l)!r} for the "
            "bound's log prefactor to be well defined"
        )
    vol_sqrt_t = sigma * math.sqrt(t)
    d1 = math.log(S0 / K) / vol_sqrt_t + 0.5 * vol_sqrt_t
    d2 = d1 - vol_sqrt_t
    log_arg = norm_cdf(d2) - S0 * norm_pdf(d1) * math.sqrt(t) * sigma_slope
    if log_arg <= 0.0:
        raise DomainError(
            f"slope-adjusted probability term {log_arg!r} is nonpositive: the "
            "bound is unbounded/invalid for these inputs"
        )
    return math.log(log_arg) / (math.log(l * S0) - math.log(K - S0))
