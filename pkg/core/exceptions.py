"""Exception hierarchy shared by the exact and numerical layers."""

from typing import Optional


class HWCError(Exception):
    """Base class for all errors raised by the toolkit."""


class ConfigError(HWCError, ValueError):
    """Invalid run configuration."""


class RingMismatchError(HWCError, ValueError):
    """Operands live over different coefficient rings."""


class LevelMismatchError(HWCError, ValueError):
    """Operands were built for different levels k."""


class OutsideSubalgebraError(HWCError, ValueError):
    """d_T was applied to a word containing b or bbar."""

    def __init__(self, word_text: str):
        super().__init__(f"d_T is only defined on words in Delta, D and c; got {word_text}")
        self.word_text = word_text


class NonPolynomialCoefficientError(HWCError, ValueError):
    """A form or curve function was given non-polynomial data."""


class SingularSystemError(HWCError, ArithmeticError):
    """A triangular system has a vanishing diagonal entry."""


class SignBranchMismatchError(HWCError, ArithmeticError):
    """The + and - branches of the coefficient recursion disagree."""


class MissingRowsError(HWCError, ValueError):
    """A coefficient table does not contain the requested rows."""


class InvalidGeometryError(HWCError, ValueError):
    """Teichmueller point outside the upper half-plane or a broken convention."""


class BranchPointError(HWCError, ValueError):
    """s = 0 puts -tbar/t on the branch cut of the principal logarithm."""


class VerificationError(HWCError, AssertionError):
    """An identity that must hold exactly (or within tolerance) did not."""

    def __init__(self, check: str, residual: str, detail: Optional[str] = None):
        message = f"{check} failed: residual {residual}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)
        self.check = check
        self.residual = residual
