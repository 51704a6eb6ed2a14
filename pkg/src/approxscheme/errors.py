"""Exception hierarchy shared by the solvers and constructors."""

from __future__ import annotations


class ApproxError(Exception):
    """Base class for computation failures (CLI exit code 1)."""

    op: str = ""

    def __init__(self, message: str, *, level: int | None = None, op: str | None = None):
        self.level = level
        if op is not None:
            self.op = op
        prefix = f"[{self.op}]" if self.op else ""
        if level is not None:
            prefix += f"[n={level}]"
        super().__init__(f"{prefix} {message}".strip())


class SolverError(ApproxError):
    """A best-approximation solver did not converge within its budget."""

    op = "bestapprox.dist_subspace"


class BudgetExceeded(ApproxError):
    """Exhaustive n-term search would exceed the combinatorial budget."""

    op = "bestapprox.dist_nterm"


class InsufficientSubspace(ApproxError):
    """The target subspace is too small relative to the construction horizon."""

    op = "lethargy.bernstein_construct"


class LambdaInfeasible(ApproxError):
    """No admissible coefficient attains the prescribed error at a level."""

    op = "lethargy.bernstein_construct"


class IndexSelectionExhausted(ApproxError):
    """The finite epsilon sequence or scheme ran out before J indices were chosen."""

    op = "lethargy.series_construct"


class CallbackContractError(ApproxError):
    """A far-witness callback returned an element violating its contract."""

    op = "lethargy.series_construct"
