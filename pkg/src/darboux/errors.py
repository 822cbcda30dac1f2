"""Exception types shared across the package.

Every error raised on a user-facing path derives from DarbouxError so the CLI
can distinguish "computation says no" (exit 1) from "bad input or internal
failure" (exit 2).
"""

from __future__ import annotations


class DarbouxError(Exception):
    """Base class for all package errors."""


class ContextMismatch(DarbouxError):
    """Two objects built over different variable contexts were combined."""


class DivisionByZero(DarbouxError):
    """Exact division by a zero polynomial or rational function."""


class UnknownVariable(DarbouxError):
    """A variable name was referenced that the context does not declare."""


class DegreeError(DarbouxError):
    """An object violates a degree requirement (e.g. a field that is not quadratic)."""


class DenominatorVanishes(DarbouxError):
    """Evaluation of a rational function at a point where the denominator is zero."""


class FactorizationTimeout(DarbouxError):
    """Factorization exceeded its budget; partial results are not returned."""


class CandidateExplosion(DarbouxError):
    """Cofactor enumeration would exceed the configured candidate cap.

    Carries the projected count so callers can report actionable guidance
    (reduce max_exp, disable superfactors, or pass an explicit cofactor).
    """

    def __init__(self, projected: int, cap: int):
        self.projected = projected
        self.cap = cap
        super().__init__(
            f"cofactor enumeration would produce {projected} candidates "
            f"(cap {cap}); reduce --max-exp, use --no-superfactors, or pass "
            f"an explicit cofactor"
        )


class NotCubic(DarbouxError):
    """A Hamiltonian exceeding total degree 3 was passed to the closed-form
    certificate constructor (its formulas require a quadratic vector field)."""


class NotAntisymmetric(DarbouxError):
    """A structure matrix that is not antisymmetric was supplied."""


class GenericRankUnstable(DarbouxError):
    """Independent generic parameter draws disagree on the system rank."""


class UnknownExample(DarbouxError):
    """Requested builtin system name is not registered."""


class ParseError(DarbouxError):
    """Syntax error in an expression or system file.

    line and col are 1-based; expected describes what the parser would have
    accepted at that position.
    """

    def __init__(self, message: str, line: int, col: int, expected: str | None = None):
        self.line = line
        self.col = col
        self.expected = expected
        loc = f"line {line}, col {col}"
        full = f"{message} at {loc}"
        if expected:
            full += f" (expected {expected})"
        super().__init__(full)


class BudgetExceeded(DarbouxError):
    """Wall-clock budget ran out between work units."""


class VerificationFailed(DarbouxError):
    """A result failed its mandatory exact re-verification.

    Raised instead of returning silently wrong output; seeing this means an
    internal reconstruction produced a bad candidate and no fallback engine
    was able to repair it.
    """
