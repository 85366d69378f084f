"""Exception hierarchy shared across the toolkit."""


class GraphSwapError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(GraphSwapError):
    """An input violates a documented contract."""


class ParseError(ValidationError):
    """A record file could not be parsed; message names the path and line."""


class UnknownDocumentError(ValidationError):
    """An annotation or mention references a document id not in the corpus."""


class StaleAnnotationError(ValidationError):
    """A mention span no longer slices to its recorded surface."""


class SpectralConvergenceError(GraphSwapError):
    """Power iteration did not reach the residual tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
