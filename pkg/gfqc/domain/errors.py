"""Exception hierarchy for the codec.

Every error raised on purpose by the package derives from ``GfqcError`` so
callers (the CLI in particular) can separate codec failures from bugs.
Parameter and domain errors also derive from ``ValueError``.
"""

from typing import Optional


class GfqcError(Exception):
    """Base class for all codec errors."""


class ConfigurationError(GfqcError, ValueError):
    """Invalid parameters, unsupported field degree or unusable code."""


class FieldDomainError(GfqcError, ValueError):
    """Arithmetic outside the field's domain, such as inverting zero."""


class ConstructionError(GfqcError):
    """A code cannot be built or reduced with the requested profile."""


class DimensionMismatchError(GfqcError, ValueError):
    """Vector lengths disagree with each other or with the code."""


class CodeFileError(GfqcError, ValueError):
    """A code file does not follow the ``gfq-code v1`` format."""


class HeaderMismatchError(GfqcError):
    """A compressed block was produced with a different code."""


class CorruptStreamError(GfqcError):
    """A compressed stream is truncated or malformed."""


class EncodeFailure(GfqcError):
    """Reinforced BP exhausted its trials without reaching a codeword.

    Attributes:
        iterations: Total sweeps spent over all trials.
        trials: Number of trials run.
    """

    def __init__(self, iterations: int, trials: int, message: Optional[str] = None):
        self.iterations = iterations
        self.trials = trials
        super().__init__(
            message or f"RBP did not converge after {trials} trials ({iterations} sweeps)"
        )
