"""Irreducible factorization over Q in all declared variables.

Pipeline: rational unit extraction, squarefree decomposition (in-package),
trial division by caller-supplied hint divisors, then irreducible splitting
of what remains (sympy's multivariate factorizer over QQ). Every result is
re-expanded and compared with the input before being returned, so a backend
or conversion fault cannot escape; the unit/normalization conventions are
enforced on this side.

Factors with positive state degree that are irreducible over
Q[states + params] stay irreducible over Q(params)[states] by Gauss's lemma,
which is the ring the downstream cofactor machinery works in.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .context import Context
from .errors import FactorizationTimeout, VerificationFailed
from .polynomial import Polynomial


class Budget:
    """Wall-clock budget checked at work-unit boundaries."""

    def __init__(self, seconds: float | None):
        self.deadline = None if seconds is None else time.monotonic() + seconds

    def check(self, what: str):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise FactorizationTimeout(f"budget exhausted during {what}")


_NO_BUDGET = Budget(None)


def _factor_sort_key(item):
    p, m = item
    return (
        p.total_degree(),
        Context.monomial_key(p.leading()[0]),
        p.key(),
        m,
    )


@dataclass(frozen=True)
class FactorList:
    """unit * prod(factor^multiplicity); factors primitive, positive-leading,
    irreducible (unless produced by partial routines), canonically ordered."""

    ctx: Context
    unit: Fraction
    factors: tuple = field(default_factory=tuple)

    def expand(self) -> Polynomial:
        out = Polynomial.constant(self.ctx, self.unit)
        for p, m in self.factors:
            out = out * p**m
        return out

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def multiplicity_of(self, p: Polynomial) -> int:
        _, prim = p.primitive()
        for f, m in self.factors:
            if f == prim:
                return m
        return 0

    def to_text(self) -> str:
        parts = []
        if self.unit != 1 or not self.factors:
            parts.append(str(self.unit))
        for p, m in self.factors:
            t = f"({p.to_text()})"
            parts.append(t if m == 1 else f"{t}^{m}")
        return " * ".join(parts)


def _normalize(ctx, unit, raw_factors) -> FactorList:
    merged: dict = {}
    order: list = []
    for p, m in raw_factors:
        u, prim = p.primitive()
        unit *= u**m
        k = prim.key()
        if k in merged:
            merged[k] = (prim, merged[k][1] + m)
        else:
            merged[k] = (prim, m)
            order.append(k)
    factors = sorted(merged.values(), key=_factor_sort_key)
    return FactorList(ctx, unit, tuple(factors))


def verify_factorization(fl: FactorList, original: Polynomial) -> bool:
    return fl.expand() == original


# -- sympy bridge -------------------------------------------------------------------


def _sympy_gens(ctx: Context):
    return sympy.symbols(list(ctx.names)) if ctx.nvars else []


def _to_sympy_poly(p: Polynomial, gens):
    rep = {e: sympy.Rational(c.numerator, c.denominator) for e, c in p.terms.items()}
    return sympy.Poly.from_dict(rep, *gens, domain="QQ")


def _from_sympy_poly(sp, ctx: Context) -> Polynomial:
    terms = {}
    for e, c in sp.as_dict().items():
        cr = sympy.Rational(c)
        terms[tuple(int(d) for d in e)] = Fraction(int(cr.p), int(cr.q))
    return Polynomial(ctx, terms)


def _irreducible_split(p: Polynomial, budget: Budget):
    """Split a primitive polynomial into irreducibles with multiplicities."""
    budget.check("irreducible factorization")
    gens = _sympy_gens(p.ctx)
    sp = _to_sympy_poly(p, gens)
    content, pieces = sp.factor_list()
    out = [(Polynomial.constant(p.ctx, Fraction(int(content.p), int(content.q))), 1)]
    for fp, m in pieces:
        out.append((_from_sympy_poly(fp, p.ctx), int(m)))
    budget.check("irreducible factorization")
    return out


# -- public API --------------------------------------------------------------------------


def trial_divide(p: Polynomial, divisors):
    """Divide out each divisor as often as it goes.

    Returns ([(divisor_primitive, multiplicity)], remainder) with the input
    equal to remainder * prod(divisor^mult) up to the divisors' units (the
    remainder absorbs rational content).
    """
    found = []
    rem = p
    seen = set()
    normed = []
    for d in divisors:
        if d.is_zero or d.is_constant:
            continue
        _, dp = d.primitive()
        if dp.key() not in seen:
            seen.add(dp.key())
            normed.append(dp)
    normed.sort(key=lambda q: _factor_sort_key((q, 1)))
    for dp in normed:
        m = 0
        while True:
            q = rem.try_divexact(dp)
            if q is None:
                break
            rem = q
            m += 1
        if m:
            found.append((dp, m))
    return found, rem


def factor(
    p: Polynomial,
    *,
    hints=(),
    budget: Budget | None = None,
) -> FactorList:
    """Complete irreducible factorization of p over Q in all variables.

    hints: polynomials tried by exact division before general factorization;
    wrong hints are harmless (they simply do not divide).
    """
    if budget is None:
        budget = _NO_BUDGET
    if p.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    if p.is_constant:
        return FactorList(p.ctx, p.constant_value(), ())
    unit, prim = p.primitive()
    raw = []
    # strip hinted divisors first: this avoids any large gcd or search work
    # when the input is dominated by known factors (e.g. denominator powers
    # inside pulled-back composites)
    budget.check("trial division")
    pre_hits, prim = trial_divide(prim, hints)
    for d, m in pre_hits:
        budget.check("hint factor split")
        for q, mq in _irreducible_split(d, budget):
            if q.is_constant:
                unit *= q.constant_value() ** (m * mq)
            else:
                raw.append((q, m * mq))
    if prim.is_constant:
        unit *= prim.constant_value()
    else:
        for q, m in _irreducible_split(prim, budget):
            if q.is_constant:
                unit *= q.constant_value() ** m
            else:
                raw.append((q, m))
    fl = _normalize(p.ctx, unit, raw)
    if not verify_factorization(fl, p):
        raise VerificationFailed("factorization failed re-expansion check")
    return fl


def is_irreducible(p: Polynomial) -> bool:
    """True for nonconstant p irreducible over Q (up to rational units)."""
    if p.is_zero or p.is_constant:
        return False
    fl = factor(p)
    return len(fl.factors) == 1 and fl.factors[0][1] == 1
