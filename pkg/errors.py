"""
errors.py - Typed failures raised by the lacuna modules

Library code raises; only lacuna.py maps an escaping error to an exit code
and prints it on stderr.

Exit codes carried by the hierarchy:
    2  usage and precondition errors (every LacunaError unless overridden)
    3  budget exhaustion (BudgetExceeded and its subclasses)
"""


class LacunaError(Exception):
    """Base class for every toolkit error."""

    exit_code = 2


# ── Words and presentations ───────────────────────────────────────────

class PresentationSyntaxError(LacunaError):
    """A presentation file or word literal that does not parse."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyRelator(LacunaError):
    pass


class NotCyclicallyReduced(LacunaError):
    pass


class NotSymmetrized(LacunaError):
    pass


# ── Parameters ────────────────────────────────────────────────────────

class BadParameter(LacunaError):
    pass


class BadLambda(BadParameter):
    pass


class MuTooLarge(BadParameter):
    pass


class BadExponent(BadParameter):
    pass


class PhiInadmissible(BadParameter):
    pass


class IntervalOverlap(LacunaError):
    pass


# ── Preconditions of the analyses ─────────────────────────────────────

class NotSmallCancellation(LacunaError):
    pass


class TraceNotClosed(LacunaError):
    pass


class NotAQuotient(LacunaError):
    pass


class NotInBall(LacunaError):
    pass


class NotExact(LacunaError):
    pass


class BallTooSmall(LacunaError):
    pass


class TooFewExactPairs(LacunaError):
    pass


class NoFillingFound(LacunaError):
    pass


class PreconditionViolated(LacunaError):
    pass


class NonCayleyInput(LacunaError):
    pass


# ── Budgets ───────────────────────────────────────────────────────────

class BudgetExceeded(LacunaError):
    """A search ran past its explicit budget; the answer is unknown."""

    exit_code = 3


class OracleBudgetExceeded(BudgetExceeded):
    pass


class MemoryBudgetExceeded(BudgetExceeded):
    pass
