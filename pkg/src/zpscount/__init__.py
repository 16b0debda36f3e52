"""Exact counting of matrices over Z/p^sZ by homogeneous kernel size."""

from .errors import (
    BudgetExceeded,
    DuplicatePrime,
    IndexOutOfRange,
    IntegralityViolation,
    NotSquare,
    RangeUnsupported,
    ShapeUnsupported,
    ZpsCountError,
)
from .exact_arith import gen_phi, qbinom, qbinom_at_inverse
from .linalg import (
    PrimePower,
    SmithProfile,
    ZpsMatrix,
    det_valuation,
    gcd_det_correct,
    kernel_count_bruteforce,
    smith_profile,
    solution_count,
)
from .recursive import CountTable, E_rec, count_table, tildeE, tildeE_i
from .explicit import E_explicit, explicit_route
from .oracle import OracleBudget, bruteforce_table, bruteforce_table_direct
from .probability import crt_compose, prob_gcd_correct

__version__ = "0.1.0"
