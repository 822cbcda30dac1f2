"""Sparse multivariate polynomials with exact rational coefficients.

Representation: dict mapping exponent tuples (aligned with ``ctx.names``) to
nonzero Fractions. All operations are exact; nothing here ever rounds.

Hot-path multiplications clear denominators and convolve over int, then
rebuild Fractions only for the surviving terms; Python's bignums make this
both exact and considerably faster than Fraction-by-Fraction arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .context import Context
from .errors import DivisionByZero, UnknownVariable

_F0 = Fraction(0)
_F1 = Fraction(1)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"expected int or Fraction, got {type(v).__name__}")


def _cleared(terms):
    """(int-coefficient dict, common denominator) with den > 0."""
    den = 1
    for c in terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    return {e: c.numerator * (den // c.denominator) for e, c in terms.items()}, den


def _mul_int_dicts(a, b):
    """Convolve two int-coefficient exponent dicts.

    Exponent tuples are packed into single integers (one bit field per
    variable, sized so sums cannot overflow their field), which makes the
    inner loop pure int adds and int-keyed dict updates; the packed keys are
    expanded back to tuples at the end.
    """
    sample = next(iter(a))
    nvars = len(sample)
    maxa = [0] * nvars
    for e in a:
        for i, v in enumerate(e):
            if v > maxa[i]:
                maxa[i] = v
    maxb = [0] * nvars
    for e in b:
        for i, v in enumerate(e):
            if v > maxb[i]:
                maxb[i] = v
    shifts = []
    widths = []
    off = 0
    for i in range(nvars):
        shifts.append(off)
        w = (maxa[i] + maxb[i]).bit_length()
        widths.append(w)
        off += w

    def pack(d):
        out = {}
        for e, c in d.items():
            k = 0
            for v, s in zip(e, shifts):
                k |= v << s
            out[k] = c
        return out

    pa, pb = pack(a), pack(b)
    if len(pa) > len(pb):
        pa, pb = pb, pa
    items = list(pb.items())
    out = {}
    # most pair products land on an existing key (outputs are far smaller
    # than the pair count), so the exception path is rare
    for ea, ca in pa.items():
        for eb, cb in items:
            k = ea + eb
            try:
                out[k] += ca * cb
            except KeyError:
                out[k] = ca * cb
    masks = [(1 << w) - 1 for w in widths]
    return {
        tuple((k >> s) & m for s, m in zip(shifts, masks)): v
        for k, v in out.items()
    }


class Polynomial:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms=None):
        self.ctx = ctx
        clean = {}
        if terms:
            for e, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(ctx: Context) -> "Polynomial":
        return Polynomial(ctx)

    @staticmethod
    def one(ctx: Context) -> "Polynomial":
        return Polynomial(ctx, {ctx.zero_exponent(): _F1})

    @staticmethod
    def constant(ctx: Context, value) -> "Polynomial":
        return Polynomial(ctx, {ctx.zero_exponent(): _as_fraction(value)})

    @staticmethod
    def variable(ctx: Context, name: str) -> "Polynomial":
        return Polynomial(ctx, {ctx.unit_exponent(name): _F1})

    def cast(self, new_ctx: Context) -> "Polynomial":
        """Re-embed into a context that contains all variables this one uses."""
        if new_ctx == self.ctx:
            return self
        used = self.variables_present()
        pos = [new_ctx.index(n) if n in used else None for n in self.ctx.names]
        nv = new_ctx.nvars
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nv
            for p, d in zip(pos, e):
                if p is not None:
                    ne[p] = d
            out[tuple(ne)] = c
        return Polynomial(new_ctx, out)

    # -- predicates and inspection -------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    @property
    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(self.ctx.zero_exponent()) == 1

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return _F0
        if not self.is_constant:
            raise ValueError("not a constant polynomial")
        return self.terms[self.ctx.zero_exponent()]

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def state_total_degree(self) -> int:
        ns = self.ctx.nstate
        return max((sum(e[:ns]) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        i = self.ctx.index(name)
        return max((e[i] for e in self.terms), default=0)

    def variables_present(self):
        used = [False] * self.ctx.nvars
        for e in self.terms:
            for i, d in enumerate(e):
                if d:
                    used[i] = True
        return tuple(n for n, u in zip(self.ctx.names, used) if u)

    def leading(self):
        """(exponent, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=Context.monomial_key)
        return e, self.terms[e]

    def sorted_terms(self):
        """Terms in descending graded-lex order (deterministic)."""
        return sorted(self.terms.items(), key=lambda t: Context.monomial_key(t[0]), reverse=True)

    def key(self):
        """Hashable canonical form (for dedup sets and stable sorting)."""
        return tuple(self.sorted_terms())

    def max_abs_coeff_cleared(self) -> int:
        """Max |coefficient| after clearing denominators (0 for the zero poly)."""
        ints, _ = _cleared(self.terms)
        return max((abs(v) for v in ints.values()), default=0)

    # -- ring operations -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self.ctx.same(other.ctx)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.ctx, other)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash((self.ctx, self.key()))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e, _F0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        p = Polynomial.__new__(Polynomial)
        p.ctx = self.ctx
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Polynomial.__new__(Polynomial)
        p.ctx = self.ctx
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e, _F0) - c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        p = Polynomial.__new__(Polynomial)
        p.ctx = self.ctx
        p.terms = out
        return p

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            p = Polynomial.__new__(Polynomial)
            p.ctx = self.ctx
            p.terms = {} if not c else {e: v * c for e, v in self.terms.items()}
            return p
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.terms or not o.terms:
            return Polynomial.zero(self.ctx)
        ia, da = _cleared(self.terms)
        ib, db = _cleared(o.terms)
        prod = _mul_int_dicts(ia, ib)
        den = da * db
        p = Polynomial.__new__(Polynomial)
        p.ctx = self.ctx
        p.terms = {e: Fraction(v, den) for e, v in prod.items() if v}
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = Polynomial.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    # -- division ---------------------------------------------------------------

    def try_divexact(self, divisor: "Polynomial"):
        """Exact quotient, or None when the division leaves a remainder."""
        d = self._coerce(divisor)
        if d is None:
            raise TypeError("divisor must be a polynomial")
        if d.is_zero:
            raise DivisionByZero("exact division by zero polynomial")
        if self.is_zero:
            return Polynomial.zero(self.ctx)
        if d.is_constant:
            return self * (1 / d.constant_value())
        dlm, dlc = d.leading()
        ditems = list(d.terms.items())
        rem = dict(self.terms)
        q = {}
        key = Context.monomial_key
        while rem:
            lm = max(rem, key=key)
            e = tuple(a - b for a, b in zip(lm, dlm))
            if any(x < 0 for x in e):
                return None
            c = rem[lm] / dlc
            q[e] = c
            for em, cm in ditems:
                k = tuple(a + b for a, b in zip(e, em))
                v = rem.get(k, _F0) - c * cm
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        p = Polynomial.__new__(Polynomial)
        p.ctx = self.ctx
        p.terms = q
        return p

    def divexact(self, divisor: "Polynomial") -> "Polynomial":
        q = self.try_divexact(divisor)
        if q is None:
            raise DivisionByZero("exact division left a remainder")
        return q

    # -- calculus and evaluation ---------------------------------------------

    def differentiate(self, name: str) -> "Polynomial":
        i = self.ctx.index(name)
        out = {}
        for e, c in self.terms.items():
            d = e[i]
            if d:
                ne = e[:i] + (d - 1,) + e[i + 1 :]
                out[ne] = out.get(ne, _F0) + c * d
        return Polynomial(self.ctx, out)

    def evaluate(self, assignment: dict) -> "Polynomial":
        """Substitute rational values for some variables; others stay symbolic."""
        idx_val = {}
        for name, v in assignment.items():
            idx_val[self.ctx.index(name)] = _as_fraction(v)
        if not idx_val:
            return self
        pow_cache = {i: {0: _F1} for i in idx_val}
        out = {}
        for e, c in self.terms.items():
            scale = c
            ne = list(e)
            for i, v in idx_val.items():
                d = e[i]
                if d:
                    cache = pow_cache[i]
                    if d not in cache:
                        cache[d] = v**d
                    scale *= cache[d]
                    ne[i] = 0
            if scale:
                k = tuple(ne)
                acc = out.get(k, _F0) + scale
                if acc:
                    out[k] = acc
                else:
                    out.pop(k, None)
        return Polynomial(self.ctx, out)

    def value(self, assignment: dict) -> Fraction:
        """Evaluate with every variable assigned; returns a Fraction."""
        r = self.evaluate(assignment)
        if not r.is_constant:
            missing = r.variables_present()
            raise UnknownVariable(f"evaluation left free variables {missing}")
        return r.constant_value()

    def negate_var(self, name: str) -> "Polynomial":
        """Substitute name -> -name (cheap sign flip per exponent parity)."""
        i = self.ctx.index(name)
        return Polynomial(
            self.ctx, {e: (-c if e[i] & 1 else c) for e, c in self.terms.items()}
        )

    def substitute_polys(self, mapping: dict) -> "Polynomial":
        """Substitute polynomials for variables (exact, potentially expensive)."""
        vals = {}
        for name, p in mapping.items():
            self.ctx.index(name)
            if isinstance(p, (int, Fraction)):
                p = Polynomial.constant(self.ctx, p)
            self.ctx.same(p.ctx)
            vals[self.ctx.index(name)] = p
        out = Polynomial.zero(self.ctx)
        pow_cache = {i: {0: Polynomial.one(self.ctx)} for i in vals}
        for e, c in self.terms.items():
            ne = list(e)
            factor = None
            for i, p in vals.items():
                d = e[i]
                if d:
                    cache = pow_cache[i]
                    if d not in cache:
                        cache[d] = p**d
                    factor = cache[d] if factor is None else factor * cache[d]
                    ne[i] = 0
            term = Polynomial(self.ctx, {tuple(ne): c})
            out = out + (term if factor is None else term * factor)
        return out

    # -- normalization -----------------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive (0 for the zero poly)."""
        if not self.terms:
            return _F0
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self):
        """(unit, primitive): self == unit * primitive, primitive integer-primitive
        with positive leading coefficient."""
        if self.is_zero:
            return _F1, self
        c = self.content()
        _, lc = self.leading()
        if lc < 0:
            c = -c
        inv = 1 / c
        p = Polynomial.__new__(Polynomial)
        p.ctx = self.ctx
        p.terms = {e: v * inv for e, v in self.terms.items()}
        return c, p

    # -- grouping ------------------------------------------------------------------

    def state_coefficients(self):
        """Group terms by state-variable part: {state exponent: parameter polynomial}.

        Keys are full-width exponent tuples with zero parameter part; values are
        polynomials whose terms involve parameters only.
        """
        ns = self.ctx.nstate
        zeros = (0,) * (self.ctx.nvars - ns)
        groups: dict = {}
        for e, c in self.terms.items():
            se = e[:ns] + zeros
            pe = (0,) * ns + e[ns:]
            groups.setdefault(se, {})[pe] = c
        return {se: Polynomial(self.ctx, t) for se, t in groups.items()}

    # -- formatting ------------------------------------------------------------------

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        names = self.ctx.names
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for n, d in zip(names, e):
                if d == 1:
                    factors.append(n)
                elif d > 1:
                    factors.append(f"{n}^{d}")
            mono = "*".join(factors)
            ac = abs(c)
            if mono and ac == 1:
                body = mono
            elif mono:
                body = f"{ac}*{mono}"
            else:
                body = str(ac)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"<poly {self.to_text()}>"
