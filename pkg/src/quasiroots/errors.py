"""Exception types raised across the package."""


class QuasiRootError(Exception):
    """Base class for all package errors."""


class DegenerateGram(QuasiRootError):
    """The Gram matrix has smaller rank than the claimed dimension."""


class BudgetExceeded(QuasiRootError):
    """A combinatorial search ran past its node or size budget.

    ``partial`` carries whatever was collected before the cut-off.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InadmissibleProduct(QuasiRootError):
    """A scalar product that no pair of distinct roots can have."""


class NoIntegralBasis(QuasiRootError):
    """No subset of roots generates every root with integer coefficients."""


class UnknownName(QuasiRootError):
    pass


class BadParams(QuasiRootError):
    pass


class SingularC(QuasiRootError):
    """The Gram matrix handed to the I-type solver is not invertible."""


class GradeOverflow(QuasiRootError):
    """An operator would produce a state above the truncation grade."""


class NonIntegerProduct(QuasiRootError):
    pass


class SchemaError(QuasiRootError):
    """Malformed JSON input."""
