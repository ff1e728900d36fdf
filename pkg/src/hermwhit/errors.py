"""Exception taxonomy shared by all modules."""


class HermwhitError(Exception):
    """Base class for all structured failures raised by this package."""


class NotUnipotent(HermwhitError):
    """Matrix logarithm requested for a matrix whose spectrum is not 1."""


class NotInDenseCell(HermwhitError):
    """Element lies outside the dense Harish-Chandra cell P+ K_C P-."""


class OutsideDomain(HermwhitError):
    """Point escapes the bounded domain {Z : 1 - Z*Z > 0}."""


class NotInCell(HermwhitError):
    """Element certified to lie outside the requested P+ K_C N_C cell."""


class Inconclusive(HermwhitError):
    """Iterative factorization failed to converge; membership undecided."""


class DivergentIntegral(HermwhitError):
    """Numerical integral flagged as divergent by the growth test."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
