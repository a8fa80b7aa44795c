"""Shared exception types."""


class QChainsError(Exception):
    """Base class for all computation errors raised by this package."""


class VariantMismatch(QChainsError):
    """Arithmetic attempted between scalars of different coefficient variants."""


class ShapeMismatch(QChainsError):
    """Matrix shapes disagree with recorded dimensions."""


class FloatNotSupported(QChainsError):
    """Exact linear algebra requested over the float-complex variant."""


class PoleAtTarget(QChainsError):
    """A rational function was specialized at a zero of its denominator."""


class GroupMismatch(QChainsError):
    """Group-algebra arithmetic between elements over different groups."""


class IdentificationFailed(QChainsError):
    """A claimed basis bijection does not conjugate one boundary to the other."""


class InsufficientRange(QChainsError):
    """A sampled-data classifier was given too small a sample range."""


class PrecisionExhausted(QChainsError):
    """A float input ran out of reliable digits."""


class SingularGenerator(QChainsError):
    """A matrix representation generator is not invertible."""
