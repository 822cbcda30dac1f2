"""Cofactor candidates: signed products of powers of the Jacobian's factors.

The factor base collects the irreducible factors of the Jacobian determinant
of a map together with their (signed) multiplicities.  Candidate cofactors are
products ``sign * unit * prod(f_i^e_i)`` whose exponent vectors range over a
box determined by the multiplicities, the configured ``max_exp``, and whether
exponents beyond the Jacobian's own ("superfactors") are allowed.  Factors
free of state variables are units of the state ring and take exponents of
either sign.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .context import Context
from .errors import CandidateExplosion
from .polynomial import Polynomial
from .rational import RationalFunction

#: Hard default on the number of enumerated candidates.
DEFAULT_CANDIDATE_CAP = 400_000


@dataclass(frozen=True)
class FactorBase:
    """Irreducible factors of a Jacobian determinant with signed multiplicities."""

    ctx: Context
    factors: tuple  # tuple[Polynomial]; canonical (primitive, positive leading)
    multiplicities: tuple  # tuple[int]; sign: + numerator of J, - denominator
    unit: Fraction  # rational unit u with J = u * prod(f_i^m_i)

    @staticmethod
    def from_map(phi) -> "FactorBase":
        sf = phi.jacobian_factored()
        return FactorBase(
            ctx=phi.ctx,
            factors=tuple(p for p, _ in sf.factors),
            multiplicities=tuple(e for _, e in sf.factors),
            unit=Fraction(sf.unit),
        )

    @property
    def size(self) -> int:
        return len(self.factors)

    def state_degrees(self):
        return tuple(p.state_total_degree() for p in self.factors)

    def jacobian(self) -> RationalFunction:
        return self._expand(self.unit, self.multiplicities)

    def _expand(self, unit: Fraction, exponents) -> RationalFunction:
        num = Polynomial.constant(self.ctx, Fraction(unit).numerator)
        den = Polynomial.constant(self.ctx, Fraction(unit).denominator)
        for p, e in zip(self.factors, exponents):
            if e > 0:
                num = num * p**e
            elif e < 0:
                den = den * p**(-e)
        # factors are pairwise-coprime primitive irreducibles split by exponent
        # sign, so the fraction is already in lowest terms; skip the gcd
        return RationalFunction(num, den, _reduced=True)

    def to_text(self) -> str:
        parts = []
        if self.unit != 1:
            parts.append(str(self.unit))
        for p, e in zip(self.factors, self.multiplicities):
            body = f"({p.to_text()})"
            parts.append(body if e == 1 else f"{body}^{e}")
        return " * ".join(parts) if parts else "1"


@dataclass(frozen=True)
class Cofactor:
    """One candidate multiplier ``sign * unit * prod(f_i^e_i)`` over a factor base."""

    base: FactorBase
    sign: int  # +1 or -1
    exponents: tuple  # tuple[int]; negative entries are denominator exponents
    unit: Fraction = field(default=Fraction(1))  # positive rational scale

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if len(self.exponents) != self.base.size:
            raise ValueError("exponent vector does not match the factor base")
        if self.unit <= 0:
            raise ValueError("unit must be a positive rational (sign is separate)")

    def expand(self) -> RationalFunction:
        return self.base._expand(self.sign * self.unit, self.exponents)

    @property
    def is_constant(self) -> bool:
        return all(
            e == 0 or p.state_total_degree() == 0
            for p, e in zip(self.base.factors, self.exponents)
        )

    def key(self):
        return (self.exponents, 0 if self.sign > 0 else 1, self.unit)

    def to_text(self) -> str:
        parts = []
        if self.unit != 1:
            parts.append(str(self.unit))
        for p, e in zip(self.base.factors, self.exponents):
            if e == 0:
                continue
            body = f"({p.to_text()})"
            parts.append(body if e == 1 else f"{body}^{e}")
        body = " * ".join(parts) if parts else "1"
        return body if self.sign > 0 else f"-{body}"


def exponent_ranges(base: FactorBase, max_exp: int, include_superfactors: bool):
    """Per-factor exponent ranges for candidate enumeration."""
    ranges = []
    for mult, sdeg in zip(base.multiplicities, base.state_degrees()):
        cap = abs(mult) + max_exp if include_superfactors else min(max_exp, abs(mult))
        if sdeg == 0:
            rng = range(-cap, cap + 1)  # state-ring unit: both signs
        elif mult > 0:
            rng = range(0, cap + 1)
        else:
            rng = range(-cap, 1)
        ranges.append(rng)
    return ranges


def jacobian_cofactor(base: FactorBase) -> Cofactor:
    """The exact Jacobian determinant as a cofactor."""
    u = base.unit
    return Cofactor(
        base=base,
        sign=1 if u > 0 else -1,
        exponents=base.multiplicities,
        unit=abs(u),
    )


def cofactor_candidates(
    base: FactorBase,
    max_exp: int = 2,
    include_superfactors: bool = True,
    cap: int = DEFAULT_CANDIDATE_CAP,
):
    """Enumerate candidate cofactors in deterministic order.

    Order: lexicographic in the exponent vector, positive sign before negative.
    The exact Jacobian determinant is appended if the box missed it (it is
    needed for measure densities regardless of enumeration settings).
    """
    ranges = exponent_ranges(base, max_exp, include_superfactors)
    projected = 2
    for rng in ranges:
        projected *= len(rng)
    if projected > cap:
        raise CandidateExplosion(projected, cap)
    out = []
    for vec in itertools.product(*ranges):
        out.append(Cofactor(base=base, sign=1, exponents=vec))
        out.append(Cofactor(base=base, sign=-1, exponents=vec))
    jc = jacobian_cofactor(base)
    if not any(c.key() == jc.key() for c in out):
        out.append(jc)
    return out
