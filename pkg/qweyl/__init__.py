"""qweyl: exact quantum birational representations of affine Weyl groups E8, E7, E6 and D5."""

__version__ = "0.1.0"


class QWeylError(Exception):
    """Base class for all engine errors."""


class StructuralError(QWeylError):
    """Operands live over different symbol tables, or an input is malformed."""


class NotDivisible(QWeylError):
    """Exact division by a linear factor left a nonzero remainder."""


class SpecializationError(QWeylError):
    """An assignment misses a symbol or sends a symbol with a negative power to zero."""


class GenericityError(QWeylError):
    """Linear-system dimensions disagree across random specializations."""


class NormalizationError(QWeylError):
    """F(0,0) is not a monomial, so the section cannot be normalized."""
