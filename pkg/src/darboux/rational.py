"""Rational functions as reduced fractions of polynomials.

Canonical form: denominator integer-primitive with positive leading
coefficient, gcd(numerator, denominator) trivial, zero represented as 0/1.
The numerator carries all rational content. Canonical form makes structural
equality valid, which the relation-lattice and dedup code relies on.
"""

from __future__ import annotations

from fractions import Fraction

from .context import Context
from .errors import DenominatorVanishes, DivisionByZero
from .gcd import multivariate_gcd
from .polynomial import Polynomial


class RationalFunction:
    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, *, _reduced=False):
        if den is None:
            den = Polynomial.one(num.ctx)
        num.ctx.same(den.ctx)
        if den.is_zero:
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero:
            den = Polynomial.one(num.ctx)
        elif not _reduced:
            if den.is_constant:
                num = num * (1 / den.constant_value())
                den = Polynomial.one(num.ctx)
            else:
                g = multivariate_gcd(num, den)
                if not g.is_one:
                    num = num.divexact(g)
                    den = den.divexact(g)
                uden, den = den.primitive()
                if uden != 1:
                    num = num * (1 / uden)
        self.num = num
        self.den = den

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def from_polynomial(p: Polynomial) -> "RationalFunction":
        return RationalFunction(p, None, _reduced=True)

    @staticmethod
    def constant(ctx, value) -> "RationalFunction":
        return RationalFunction(Polynomial.constant(ctx, value), None, _reduced=True)

    @staticmethod
    def one(ctx) -> "RationalFunction":
        return RationalFunction.constant(ctx, 1)

    @staticmethod
    def zero(ctx) -> "RationalFunction":
        return RationalFunction(Polynomial.zero(ctx), None, _reduced=True)

    @property
    def ctx(self):
        return self.num.ctx

    def cast(self, new_ctx) -> "RationalFunction":
        return RationalFunction(self.num.cast(new_ctx), self.den.cast(new_ctx), _reduced=True)

    # -- predicates -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_one

    @property
    def is_constant(self) -> bool:
        return self.den.is_one and self.num.is_constant

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError("not a constant rational function")
        return self.num.constant_value()

    def __bool__(self):
        return not self.num.is_zero

    # -- field operations ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            self.ctx.same(other.ctx)
            return other
        if isinstance(other, Polynomial):
            self.ctx.same(other.ctx)
            return RationalFunction.from_polynomial(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.ctx, other)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.num * other, self.den, _reduced=True)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # cross-reduce before multiplying to keep intermediates small
        a, b = self, o
        g1 = multivariate_gcd(a.num, b.den) if not (a.num.is_zero or b.den.is_one) else None
        g2 = multivariate_gcd(b.num, a.den) if not (b.num.is_zero or a.den.is_one) else None
        an = a.num.divexact(g1) if g1 is not None and not g1.is_one else a.num
        bd = b.den.divexact(g1) if g1 is not None and not g1.is_one else b.den
        bn = b.num.divexact(g2) if g2 is not None and not g2.is_one else b.num
        ad = a.den.divexact(g2) if g2 is not None and not g2.is_one else a.den
        return RationalFunction(an * bn, ad * bd)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise DivisionByZero("division by zero rational function")
        return self * RationalFunction(o.den, o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("exponent must be an integer")
        if n == 0:
            return RationalFunction.one(self.ctx)
        if n < 0:
            if self.is_zero:
                raise DivisionByZero("negative power of zero")
            base = RationalFunction(self.den, self.num)
            n = -n
        else:
            base = self
        return RationalFunction(base.num**n, base.den**n, _reduced=True)

    # -- calculus and evaluation ------------------------------------------------

    def differentiate(self, name: str) -> "RationalFunction":
        dn = self.num.differentiate(name)
        dd = self.den.differentiate(name)
        if dd.is_zero:
            return RationalFunction(dn, self.den)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, assignment: dict) -> "RationalFunction":
        num = self.num.evaluate(assignment)
        den = self.den.evaluate(assignment)
        if den.is_zero:
            raise DenominatorVanishes("denominator vanished under substitution")
        return RationalFunction(num, den)

    def value(self, assignment: dict) -> Fraction:
        dv = self.den.value(assignment)
        if dv == 0:
            raise DenominatorVanishes("denominator vanishes at evaluation point")
        return self.num.value(assignment) / dv

    def negate_var(self, name: str) -> "RationalFunction":
        return RationalFunction(self.num.negate_var(name), self.den.negate_var(name), _reduced=True)

    # -- formatting ----------------------------------------------------------------

    def to_text(self) -> str:
        if self.den.is_one:
            return self.num.to_text()
        ntxt = self.num.to_text()
        if len(self.num.terms) > 1:
            ntxt = f"({ntxt})"
        dtxt = self.den.to_text()
        if len(self.den.terms) > 1:
            dtxt = f"({dtxt})"
        return f"{ntxt}/{dtxt}"

    def __repr__(self):
        return f"<ratfunc {self.to_text()}>"


def sort_key(rf: RationalFunction):
    """Deterministic ordering key for rational functions."""
    return (
        Context.monomial_key(rf.num.leading()[0]) if not rf.num.is_zero else (-1, ()),
        rf.num.key(),
        rf.den.key(),
    )
