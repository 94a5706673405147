"""Exception types shared across the library."""


class NotHermitian(ValueError):
    """Input matrix is not Hermitian within the equality tolerance."""


class NotPSD(ValueError):
    """Input matrix has an eigenvalue too far below zero to clamp."""


class NoConvergence(RuntimeError):
    """An iterative routine failed to settle within its budget."""


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class LengthMismatch(ValueError):
    """Paired sequences have different lengths."""


class BadSpec(ValueError):
    """A host or job specification is malformed."""


class ValueOutsideRange(ValueError):
    """A target value is not interior to the sampled numerical range."""


class NotStrictContraction(ValueError):
    """Operator norm is not strictly below the required bound."""


class MarginLost(RuntimeError):
    """The host's disc certificate failed, possibly mid-synthesis.

    ``target_index`` is the index of the target being extracted when the
    certificate failed, or None for an entry check.
    """

    def __init__(self, message: str, target_index: int | None = None):
        super().__init__(message)
        self.target_index = target_index


class HostTooSmall(ValueError):
    """The host dimension cannot absorb the requested extractions."""


class TooLarge(ValueError):
    """Requested construction exceeds the supported size cap."""


class BadBlockCount(ValueError):
    """Block count is not a power of two."""


class SizeMismatch(ValueError):
    """Blocks do not share a common square size."""


class NotNormal(ValueError):
    """Matrix is not normal within the stated tolerance."""


class SystemNotConverging(ValueError):
    """Diagonal values of an orthonormal system do not approach the target."""
