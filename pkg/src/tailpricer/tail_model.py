"""Closed-form pricing of tail options under a strong Pareto regime.

Beyond some level l (the point where the slowly varying prefactor of a
power-law survival function has flattened to a constant) the tail is an
exact Pareto law, and out-of-the-money option prices collapse to one-line
closed forms in the tail index alpha.  Three variants live here:

* PriceTailModel  -- the underlying price S itself is Paretan:
                     P(S > s) = l^a s^-a,  C(K) = K^(1-a) l^a / (a-1).
* ReturnTailModel -- the simple return (S-S0)/S0 is Paretan:
                     C(K) = (l S0)^a (K-S0)^(1-a) / (a-1).
* PutReturnModel  -- negative returns r with S = (1-r) S0 follow a Pareto
                     law truncated to r in (l, 1), normalized by
                     lam = 1 / (1 - l^a), giving a closed-form put price.

Calibrating l from a single anchor option price turns each closed form into
a relative pricing rule: every further-out strike is priced from the anchor
and alpha alone, all distributional details dropping out of the ratio.

All powers are evaluated in log space (exp of a combined log expression) so
deep strikes and large alpha cannot overflow intermediate factors.  Every
function here is pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CalibrationError, DomainError, ParameterError

# Reject alpha at or below 1 + this excess; prices blow up as alpha -> 1+.
ALPHA_MIN_EXCESS = 1e-9

# Relative slack absorbed at tail-zone boundaries, so a strike sitting at a
# calibrated boundary (equal up to roundoff) is accepted.
_EDGE = 1e-12

# Anchor consistency: calibrated l may not exceed the anchor strike (or the
# anchor return zone) by more than this relative amount.
_ANCHOR_RTOL = 1e-9


def _checked_alpha(alpha) -> float:
    a = float(alpha)
    if not a > 1.0 + ALPHA_MIN_EXCESS:
        raise ParameterError(
            f"tail index alpha={a!r} must exceed 1 (finite mean); "
            f"values at or below {1.0 + ALPHA_MIN_EXCESS} are rejected"
        )
    return a


def _positive(name: str, value: float) -> float:
    v = float(value)
    if not v > 0.0 or not math.isfinite(v):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
    return v


@dataclass(frozen=True)
class TailIndex:
    """Tail exponent of the power law; alpha > 1 is the only moment condition."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _checked_alpha(self.alpha))

    def __float__(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class PriceTailModel:
    """Pareto tail on the underlying price: P(S > s) = l^alpha s^-alpha, s >= l."""

    l: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "l", _positive("l", self.l))
        object.__setattr__(self, "alpha", _checked_alpha(self.alpha))


@dataclass(frozen=True)
class ReturnTailModel:
    """Pareto tail on simple returns (S - S0)/S0; valid call strikes K >= S0 (1 + l)."""

    l: float
    alpha: float
    S0: float

    def __post_init__(self):
        object.__setattr__(self, "l", _positive("l", self.l))
        object.__setattr__(self, "alpha", _checked_alpha(self.alpha))
        object.__setattr__(self, "S0", _positive("S0", self.S0))

    @property
    def min_strike(self) -> float:
        """Lower edge of the Paretan call-strike zone, S0 (1 + l)."""
        return self.S0 * (1.0 + self.l)


@dataclass(frozen=True)
class PutReturnModel:
    """Truncated Pareto on negative returns r in (l, 1), S = (1 - r) S0.

    lam renormalizes the truncated density to integrate to 1 over
    S in (0, (1 - l) S0); it is derived, not supplied.
    """

    l: float
    alpha: float
    S0: float
    lam: float = field(init=False)

    def __post_init__(self):
        l = _positive("l", self.l)
        if not l < 1.0:
            raise ParameterError(
                f"put-side l={l!r} must lie in (0, 1): the negative return r "
                "ranges over (l, 1) so the price stays positive"
            )
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "alpha", _checked_alpha(self.alpha))
        object.__setattr__(self, "S0", _positive("S0", self.S0))
        object.__setattr__(self, "lam", 1.0 / (-math.expm1(self.alpha * math.log(l))))

    @property
    def max_strike(self) -> float:
        """Upper edge of the admissible put-strike zone, (1 - l) S0."""
        return self.S0 * (1.0 - self.l)


# ---------------------------------------------------------------------------
# Approach 1: the underlying price is in the regular-variation class
# ---------------------------------------------------------------------------

def survival_price(model: PriceTailModel, s: float) -> float:
    """P(S > s) = l^alpha s^-alpha for s >= l (equals 1 at s = l)."""
    s = float(s)
    if s < model.l * (1.0 - _EDGE):
        raise DomainError(
            f"s={s!r} is below the strong-Pareto zone (l={model.l!r}); "
            "the model is silent below its Karamata point"
        )
    return min(1.0, math.exp(model.alpha * (math.log(model.l) - math.log(s))))


def call_price_price_tail(model: PriceTailModel, K: float) -> float:
    """Call price K^(1-alpha) l^alpha / (alpha - 1) for K >= l."""
    K = float(K)
    a = model.alpha
    if K < model.l * (1.0 - _EDGE):
        raise DomainError(
            f"strike K={K!r} is below the Karamata point l={model.l!r}"
        )
    return math.exp(a * math.log(model.l) + (1.0 - a) * math.log(K)) / (a - 1.0)


def calibrate_l_price_tail(C_m: float, K1: float, alpha) -> PriceTailModel:
    """Back the Karamata constant out of one anchor call price.

    l = ((alpha - 1) C_m K1^(alpha - 1))^(1/alpha); the returned model
    reprices the anchor exactly (round trip within 1e-12 relative).
    """
    a = _checked_alpha(alpha)
    C_m = _positive("anchor price C_m", C_m)
    K1 = _positive("anchor strike K1", K1)
    l = math.exp(
        (math.log(a - 1.0) + math.log(C_m) + (a - 1.0) * math.log(K1)) / a
    )
    if l > K1 * (1.0 + _ANCHOR_RTOL):
        raise CalibrationError(
            f"anchor (C_m={C_m!r}, K1={K1!r}, alpha={a!r}) implies l={l!r} > K1: "
            "the anchor sits below the Karamata point, so the price is too "
            "high for a Paretan tail at that strike"
        )
    return PriceTailModel(l=min(l, K1), alpha=a)


def relative_call_price_tail(C_K1: float, K1: float, K2: float, alpha) -> float:
    """Price the K2 call from the K1 anchor: C(K2) = (K2/K1)^(1-alpha) C(K1)."""
    a = _checked_alpha(alpha)
    model = calibrate_l_price_tail(C_K1, K1, a)
    K2 = float(K2)
    if K2 < model.l * (1.0 - _EDGE):
        raise DomainError(
            f"target strike K2={K2!r} is below the implied Karamata point "
            f"l={model.l!r}; the ratio rule only extends away from the money"
        )
    return math.exp((1.0 - a) * math.log(K2 / K1)) * C_K1


# ---------------------------------------------------------------------------
# Approach 2: simple returns are in the regular-variation class
# ---------------------------------------------------------------------------

def survival_return(model: ReturnTailModel, K: float) -> float:
    """P(S > K) = ((K - S0)/(l S0))^-alpha for K >= S0 (1 + l)."""
    K = float(K)
    lo = model.min_strike
    if K < lo * (1.0 - _EDGE):
        raise DomainError(
            f"strike K={K!r} is below the Paretan return zone "
            f"(S0 (1 + l) = {lo!r})"
        )
    z = math.log(max(K - model.S0, model.l * model.S0)) - math.log(model.l * model.S0)
    return min(1.0, math.exp(-model.alpha * z))


def call_price_return_tail(model: ReturnTailModel, K: float) -> float:
    """Call price (l S0)^alpha (K - S0)^(1-alpha) / (alpha - 1), K >= S0 (1 + l)."""
    K = float(K)
    a = model.alpha
    lo = model.min_strike
    if K < lo * (1.0 - _EDGE):
        raise DomainError(
            f"strike K={K!r} is below the Paretan return zone "
            f"(S0 (1 + l) = {lo!r})"
        )
    y = max(K - model.S0, model.l * model.S0)
    return math.exp(
        a * math.log(model.l * model.S0) + (1.0 - a) * math.log(y)
    ) / (a - 1.0)


def calibrate_l_return_tail(C_m: float, K1: float, S0: float, alpha) -> ReturnTailModel:
    """Back the return-space Karamata constant out of one anchor call price.

    l = (alpha-1)^(1/alpha) C_m^(1/alpha) (K1 - S0)^(1 - 1/alpha) / S0,
    which makes the model reprice the anchor exactly.
    """
    a = _checked_alpha(alpha)
    C_m = _positive("anchor price C_m", C_m)
    S0 = _positive("spot S0", S0)
    K1 = float(K1)
    if K1 <= S0:
        raise ParameterError(
            f"anchor strike K1={K1!r} must exceed the spot S0={S0!r} for the "
            "return-tail call model"
        )
    l = math.exp(
        (math.log(a - 1.0) + math.log(C_m)) / a
        + (1.0 - 1.0 / a) * math.log(K1 - S0)
        - math.log(S0)
    )
    if K1 < S0 * (1.0 + l) * (1.0 - _ANCHOR_RTOL):
        raise CalibrationError(
            f"anchor (C_m={C_m!r}, K1={K1!r}, S0={S0!r}, alpha={a!r}) implies "
            f"l={l!r}, putting the anchor inside S0 (1 + l) = {S0 * (1.0 + l)!r}: "
            "the anchor price is too high for a Paretan return tail there"
        )
    return ReturnTailModel(l=min(l, (K1 - S0) / S0), alpha=a, S0=S0)


def relative_call_return(C_K1: float, K1: float, K2: float, S0: float, alpha) -> float:
    """C(K2) = ((K2 - S0)/(K1 - S0))^(1-alpha) C(K1); l drops out entirely."""
    a = _checked_alpha(alpha)
    model = calibrate_l_return_tail(C_K1, K1, S0, a)
    K2 = float(K2)
    if K2 < model.min_strike * (1.0 - _EDGE):
        raise DomainError(
            f"target strike K2={K2!r} is below the Paretan return zone "
            f"(S0 (1 + l) = {model.min_strike!r}) implied by the anchor"
        )
    return math.exp((1.0 - a) * math.log((K2 - S0) / (K1 - S0))) * C_K1


# ---------------------------------------------------------------------------
# Put side: truncated Pareto on negative returns
# ---------------------------------------------------------------------------

def _put_bracket(K: float, S0: float, alpha: float) -> float:
    # S0^a (S0-K)^(1-a) - ((a-1) K + S0), written with expm1/log1p so the
    # near-cancellation at small K keeps its leading digits.
    return S0 * math.expm1((1.0 - alpha) * math.log1p(-K / S0)) - (alpha - 1.0) * K


def put_density(model: PutReturnModel, S: float) -> float:
    """Price density lam * alpha * (l S0)^alpha (S0 - S)^-(alpha+1) on (0, (1-l) S0]."""
    S = float(S)
    hi = model.max_strike
    if not 0.0 < S <= hi * (1.0 + _EDGE):
        raise DomainError(
            f"S={S!r} is outside the truncated-Pareto support (0, {hi!r}]"
        )
    a = model.alpha
    return model.lam * a * math.exp(
        a * math.log(model.l * model.S0)
        - (a + 1.0) * math.log(max(model.S0 - S, model.l * model.S0))
    )


def put_price_abs(model: PutReturnModel, K: float) -> float:
    """Absolute put price under the truncated Pareto return density.

    P(K) = lam * l^alpha / (alpha - 1)
           * (S0^alpha (S0 - K)^(1-alpha) - ((alpha - 1) K + S0))
    for strikes 0 < K <= (1 - l) S0.
    """
    K = float(K)
    hi = model.max_strike
    if not 0.0 < K <= hi * (1.0 + _EDGE):
        raise DomainError(
            f"put strike K={K!r} must lie in (0, (1 - l) S0 = {hi!r}]: beyond "
            "it the threshold return leaves the strong-Pareto zone"
        )
    a = model.alpha
    scale = model.lam * math.exp(a * math.log(model.l)) / (a - 1.0)
    return scale * _put_bracket(min(K, hi), model.S0, a)


def relative_put(P_K1: float, K1: float, K2: float, S0: float, alpha) -> float:
    """Price the K2 put from the K1 anchor; both l and lam cancel in the ratio.

    P(K2) = P(K1) * B(K2)/B(K1) with
    B(K) = S0^alpha (S0 - K)^(1-alpha) - ((alpha - 1) K + S0).

    The zone bound K <= (1 - l) S0 cannot be verified here: l is exactly what
    the ratio eliminates.  Callers anchoring very close to the spot should
    check their own l separately.
    """
    a = _checked_alpha(alpha)
    P_K1 = _positive("anchor put price P_K1", P_K1)
    S0 = _positive("spot S0", S0)
    K1, K2 = float(K1), float(K2)
    for name, K in (("K1", K1), ("K2", K2)):
        if not 0.0 < K < S0:
            raise DomainError(
                f"put strike {name}={K!r} must lie strictly between 0 and the "
                f"spot S0={S0!r}"
            )
    return P_K1 * _put_bracket(K2, S0, a) / _put_bracket(K1, S0, a)


# ---------------------------------------------------------------------------
# Zipf-plot diagnostic
# ---------------------------------------------------------------------------

TRANSFORMS = ("identity", "simple_return", "log_return")


def zipf_local_slope(
    model: PriceTailModel,
    transform: str,
    x_grid,
    s0: float | None = None,
    rel_step: float = 1e-5,
) -> list[tuple[float, float]]:
    """Local log-log slope d ln(survival) / d ln(x) of a transformed tail.

    For the raw price (``identity``) the slope is the constant -alpha.  For
    the simple return it tends to -alpha from above.  For the log return the
    survival is exponential, so the local slope is -alpha * x: it steepens
    without bound, which is exactly why log returns fall outside the
    regular-variation class.

    Slopes are central differences of the analytic transformed log-survival,
    taken in log-x with step ``rel_step``.  Returns [(x, slope), ...].
    """
    if transform not in TRANSFORMS:
        raise ParameterError(
            f"unknown transform {transform!r}; expected one of {TRANSFORMS}"
        )
    a, l = model.alpha, model.l
    if transform == "identity":
        log_l = math.log(l)

        def log_survival(x: float) -> float:
            return a * (log_l - math.log(x))

        def in_domain(x: float) -> bool:
            return x >= l * (1.0 - _EDGE)

        domain_note = f"x >= l = {l!r}"
    else:
        if s0 is None:
            raise ParameterError(
                f"transform {transform!r} needs the reference spot s0"
            )
        s0 = _positive("s0", s0)
        log_ls0 = math.log(l) - math.log(s0)
        if transform == "simple_return":

            def log_survival(x: float) -> float:
                return a * (log_ls0 - math.log1p(x))

            def in_domain(x: float) -> bool:
                return x > 0.0 and s0 * (1.0 + x) >= l * (1.0 - _EDGE)

            domain_note = f"x > 0 with s0 (1 + x) >= l = {l!r}"
        else:  # log_return

            def log_survival(x: float) -> float:
                return a * (log_ls0 - x)

            def in_domain(x: float) -> bool:
                return x > 0.0 and s0 * math.exp(x) >= l * (1.0 - _EDGE)

            domain_note = f"x > 0 with s0 exp(x) >= l = {l!r}"

    xs = [float(x) for x in x_grid]
    if not xs:
        raise ParameterError("x_grid must contain at least one point")
    h = float(rel_step)
    if not 0.0 < h < 0.1:
        raise ParameterError(f"rel_step={rel_step!r} must lie in (0, 0.1)")

    out = []
    up, down = math.exp(h), math.exp(-h)
    for x in xs:
        if not in_domain(x):
            raise DomainError(
                f"grid point x={x!r} is outside the transformed Pareto "
                f"domain ({domain_note})"
            )
        slope = (log_survival(x * up) - log_survival(x * down)) / (2.0 * h)
        out.append((x, slope))
    return out
