"""matstat: exact arithmetic statistics of bounded integer matrices.

Counts matrices in M_n(Z; H) by characteristic polynomial, determinant and
trace constraints, studies multiplicative dependence of matrix tuples, and
provides the exact lattice machinery (dual lattices, reduced bases, box
counts) those questions run on.
"""

__version__ = "0.1.0"

from . import counting, exact, experiments, lattices, multdep, numtheory
from .errors import (
    BudgetExceededError,
    NegativePowerOfSingularError,
    SingularMatrixError,
    ZeroArgumentError,
)

__all__ = [
    "counting",
    "exact",
    "experiments",
    "lattices",
    "multdep",
    "numtheory",
    "BudgetExceededError",
    "NegativePowerOfSingularError",
    "SingularMatrixError",
    "ZeroArgumentError",
    "__version__",
]
