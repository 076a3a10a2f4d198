"""Tail option pricing under strong Pareto («Karamata constant») tails.

From a single anchor option price and a tail index, price every further
out-of-the-money strike in closed form, convert to Black-Scholes implied
vols, and verify the no-arbitrage boundaries the construction must respect.
"""

from .arbitrage import (
    CheckResult,
    SlopeCheck,
    VolSkew,
    alpha_lower_bound,
    bl_density,
    bl_density_return_tail,
    butterfly_check,
    call_slope_price_tail,
    call_slope_return_tail,
    slope_condition,
)
from .black_scholes import (
    BSInputs,
    bs_call,
    bs_call_dK,
    bs_put,
    implied_vol,
    norm_cdf,
    norm_pdf,
    vega,
)
from .errors import (
    AnchorError,
    CalibrationError,
    ChainError,
    ChainParseError,
    ChainValidationError,
    ConvergenceError,
    DomainError,
    FitError,
    MatchingError,
    ParameterError,
    PriceBoundsError,
    TailPricingError,
)
from .surface import (
    AlphaFit,
    Chain,
    CurvePoint,
    GeneratedCurve,
    LogLogPoint,
    OptionQuote,
    fit_alpha_to_market,
    generate_curve,
    load_chain,
    loglog_export,
    select_anchor,
)
from .tail_model import (
    PriceTailModel,
    PutReturnModel,
    ReturnTailModel,
    TailIndex,
    calibrate_l_price_tail,
    calibrate_l_return_tail,
    call_price_price_tail,
    call_price_return_tail,
    put_density,
    put_price_abs,
    relative_call_price_tail,
    relative_call_return,
    relative_put,
    survival_price,
    survival_return,
    zipf_local_slope,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaFit",
    "AnchorError",
    "BSInputs",
    "CalibrationError",
    "Chain",
    "ChainError",
    "ChainParseError",
    "ChainValidationError",
    "CheckResult",
    "ConvergenceError",
    "CurvePoint",
    "DomainError",
    "FitError",
    "GeneratedCurve",
    "LogLogPoint",
    "MatchingError",
    "OptionQuote",
    "ParameterError",
    "PriceBoundsError",
    "PriceTailModel",
    "PutReturnModel",
    "ReturnTailModel",
    "SlopeCheck",
    "TailIndex",
    "TailPricingError",
    "VolSkew",
    "alpha_lower_bound",
    "bl_density",
    "bl_density_return_tail",
    "bs_call",
    "bs_call_dK",
    "bs_put",
    "butterfly_check",
    "calibrate_l_price_tail",
    "calibrate_l_return_tail",
    "call_price_price_tail",
    "call_price_return_tail",
    "call_slope_price_tail",
    "call_slope_return_tail",
    "fit_alpha_to_market",
    "generate_curve",
    "implied_vol",
    "load_chain",
    "loglog_export",
    "norm_cdf",
    "norm_pdf",
    "put_density",
    "put_price_abs",
    "relative_call_price_tail",
    "relative_call_return",
    "relative_put",
    "select_anchor",
    "slope_condition",
    "survival_price",
    "survival_return",
    "vega",
    "zipf_local_slope",
]
