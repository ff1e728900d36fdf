"""Generalized Whittaker models for holomorphic discrete series on SU(p,q).

Numerical realization of the Harish-Chandra and P+ K_C N_C factorizations,
restricted root data, Fock models of the nilradical, explicit Whittaker
kernels, and the square-integrability classifier, on the concrete matrix
groups SL(2,C), SU(1,1), SU(2,1) and SU(2,2).
"""

from .errors import (
    DivergentIntegral,
    Inconclusive,
    NotInCell,
    NotInDenseCell,
    NotUnipotent,
    OutsideDomain,
)

__version__ = "0.1.0"

__all__ = [
    "DivergentIntegral",
    "Inconclusive",
    "NotInCell",
    "NotInDenseCell",
    "NotUnipotent",
    "OutsideDomain",
    "__version__",
]
