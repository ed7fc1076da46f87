"""Semantic exceptions; public functions never signal failure with bare ValueError."""


class ApqError(Exception):
    """Base error for this package."""


class DomainError(ApqError, ValueError):
    """Input outside the admissible parameter or coordinate domain."""


class SolveError(ApqError, ArithmeticError):
    """A root search or constructive search failed to converge or to bracket."""


class NonIntegrableError(ApqError, ArithmeticError):
    """A requested moment does not exist (power singularity at 0 too strong)."""
