"""Exception types shared across the package."""


class DeconflictError(Exception):
    """Base class for all package errors."""


class ValidationError(DeconflictError, ValueError):
    """Raised for malformed inputs: bad matrices, bad graphs, bad records."""


class SizeLimitError(DeconflictError):
    """Raised when an exact algorithm is asked to exceed its size ceiling."""


class StrategyError(DeconflictError, ValueError):
    """Raised when a reward strategy receives inputs of the wrong kind."""


class TransportError(DeconflictError):
    """Raised when a judge request fails after exhausting its retries."""
