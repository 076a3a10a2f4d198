"""Exception hierarchy for the tail pricing engine.

Every error raised by this package derives from TailPricingError, so callers
can catch one type at the boundary (the CLI does exactly that).
"""


class TailPricingError(Exception):
    """Base class for all errors raised by tailpricer."""


class DomainError(TailPricingError, ValueError):
    """Input lies outside the zone where a model or formula is defined."""


class ParameterError(TailPricingError, ValueError):
    """A model parameter or argument violates its constraints."""


class CalibrationError(TailPricingError):
    """An anchor quote is inconsistent with the requested tail model."""


class PriceBoundsError(TailPricingError):
    """Option price sits outside the static no-arbitrage band for its side."""


class ConvergenceError(TailPricingError):
    """An iterative solver exhausted its iteration budget."""


class MatchingError(TailPricingError):
    """The Black-Scholes quote does not reproduce the model price at the
    anchor strike, so the slope comparison is not meaningful."""


class ChainError(TailPricingError):
    """Base class for option-chain ingestion problems."""


class ChainParseError(ChainError):
    """Malformed chain input (bad row, bad JSON, unknown format)."""


class ChainValidationError(ChainError):
    """Chain content violates invariants (duplicate strikes, bad values)."""


class AnchorError(TailPricingError):
    """No usable anchor quote for the requested side/strike region."""


class FitError(TailPricingError):
    """Not enough usable points to fit the tail index."""
