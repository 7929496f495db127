"""tfglab: a finite-scale workbench for minimal subshifts and the finite
approximations of their topological full groups.

Modules
-------
words      factor languages, complexity/recurrence/entropy, word sources
tfg        exact algebra of full-group elements as cylinder cocycles
quotient   permutation quotients of generator balls and their certificates
lower      disjoint cylinder families, alternating blocks, order obstructions
jlp        recursive word families of intermediate complexity
cli        command-line front end
"""

from .config import Budgets, DEFAULT_BUDGETS
from .errors import (
    BudgetError,
    CertificateError,
    ConstructionError,
    InexactResult,
    InternalConsistencyError,
    PreconditionError,
    TfgLabError,
)

__all__ = [
    "Budgets",
    "DEFAULT_BUDGETS",
    "BudgetError",
    "CertificateError",
    "ConstructionError",
    "InexactResult",
    "InternalConsistencyError",
    "PreconditionError",
    "TfgLabError",
]

__version__ = "0.1.0"
