"""Exact multivariate gcd and squarefree decomposition.

Two routes, deliberately independent:

* a heuristic evaluation/reconstruction gcd (evaluate at one large integer,
  take an integer gcd one level down, lift the result from balanced base-xi
  digits, then certify by exact trial division) with growing retries, and
* a deterministic subresultant polynomial-remainder-sequence fallback.

A heuristic answer is only ever returned after it divides both inputs
exactly, so the fast path cannot be silently wrong.

All gcds returned are integer-primitive with positive leading coefficient;
callers that care about rational content handle it themselves.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd

from .context import Context
from .polynomial import Polynomial

_HEU_BIT_CAP = 600_000
_HEU_TRIES = 6


# -- helpers viewing a polynomial as univariate in one variable ----------------


def _deg_in(p: Polynomial, i: int) -> int:
    return max((e[i] for e in p.terms), default=0)


def _coeff_of_power(p: Polynomial, i: int, k: int) -> Polynomial:
    terms = {}
    for e, c in p.terms.items():
        if e[i] == k:
            terms[e[:i] + (0,) + e[i + 1 :]] = c
    return Polynomial(p.ctx, terms)

def _coeffs_wrt(p: Polynomial, i: int):
    """{power of var i: coefficient polynomial (var i zeroed out)}."""
    groups: dict = {}
    for e, c in p.terms.items():
        groups.setdefault(e[i], {})[e[:i] + (0,) + e[i + 1 :]] = c
    return {k: Polynomial(p.ctx, t) for k, t in groups.items()}


def _shift_power(p: Polynomial, i: int, k: int) -> Polynomial:
    """Multiply by (var i)^k."""
    if k == 0:
        return p
    out = Polynomial.__new__(Polynomial)
    out.ctx = p.ctx
    out.terms = {e[:i] + (e[i] + k,) + e[i + 1 :]: c for e, c in p.terms.items()}
    return out


def _vars_present(p: Polynomial):
    used = set()
    for e in p.terms:
        for i, d in enumerate(e):
            if d:
                used.add(i)
    return used


# -- heuristic gcd ---------------------------------------------------------------


def _int_content(p: Polynomial) -> int:
    g = 0
    for c in p.terms.values():
        g = int_gcd(g, c.numerator)  # inputs are integer polys here
    return g


def _balanced_digit(n: int, xi: int) -> int:
    r = n % xi
    if r + r > xi:
        r -= xi
    return r


def _lift_digits(gamma: Polynomial, xi: int, var_index: int, max_digits: int):
    """Reassemble a polynomial in var_index from balanced base-xi digits of gamma."""
    ctx = gamma.ctx
    acc: dict = {}
    work = {e: int(c) for e, c in gamma.terms.items()}
    k = 0
    while work:
        if k > max_digits:
            return None
        nxt = {}
        for e, c in work.items():
            d = _balanced_digit(c, xi)
            if d:
                ne = e[:var_index] + (k,) + e[var_index + 1 :]
                acc[ne] = Fraction(d)
            q = (c - d) // xi
            if q:
                nxt[e] = q
        work = nxt
        k += 1
    return Polynomial(ctx, acc)


def _divides_over_z(a: Polynomial, g: Polynomial) -> bool:
    """True when g divides a with an integer-coefficient quotient."""
    q = a.try_divexact(g)
    return q is not None and all(c.denominator == 1 for c in q.terms.values())


def _heu_gcd(a: Polynomial, b: Polynomial):
    """Heuristic gcd over Z of integer-coefficient polynomials; None on failure.

    Integer content is significant here: at inner recursion levels the content
    of an image encodes the evaluated-away variables, so candidates are kept
    un-normalized and certified by exact trial division over Z.
    """
    if a.is_constant or b.is_constant:
        g = int_gcd(_int_content(a), _int_content(b))
        return Polynomial.constant(a.ctx, g)
    shared = _vars_present(a) & _vars_present(b)
    if not shared:
        g = int_gcd(_int_content(a), _int_content(b))
        return Polynomial.constant(a.ctx, g)
    v = min(shared, key=lambda i: max(_deg_in(a, i), _deg_in(b, i)))
    name = a.ctx.names[v]
    max_deg = max(_deg_in(a, v), _deg_in(b, v))
    xi = 2 * min(a.max_abs_coeff_cleared(), b.max_abs_coeff_cleared()) + 29
    for _ in range(_HEU_TRIES):
        if (max_deg + 1) * xi.bit_length() > _HEU_BIT_CAP:
            return None
        av = a.evaluate({name: xi})
        bv = b.evaluate({name: xi})
        if not av.is_zero and not bv.is_zero:
            gamma = _heu_gcd(av, bv)
            if gamma is not None and not gamma.is_zero:
                g = _lift_digits(gamma, xi, v, max_deg + 1)
                if g is not None and not g.is_zero:
                    if _divides_over_z(a, g) and _divides_over_z(b, g):
                        return g
        xi = 2 * xi + 29
    return None


# -- subresultant PRS fallback ------------------------------------------------------


def _prem(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    """Pseudo-remainder of a by b with respect to variable v."""
    db = _deg_in(b, v)
    lb = _coeff_of_power(b, v, db)
    da = _deg_in(a, v)
    steps = da - db + 1
    r = a
    while not r.is_zero:
        dr = _deg_in(r, v)
        if dr < db:
            break
        lr = _coeff_of_power(r, v, dr)
        r = r * lb - _shift_power(lr * b, v, dr - db)
        steps -= 1
    if steps > 0:
        r = r * lb**steps
    return r


def _content_wrt(p: Polynomial, v: int) -> Polynomial:
    coeffs = list(_coeffs_wrt(p, v).values())
    return gcd_list(coeffs)


def _prs_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Deterministic gcd of primitive integer polynomials (both nonconstant)."""
    shared = _vars_present(a) & _vars_present(b)
    if not shared:
        return Polynomial.one(a.ctx)
    v = min(shared, key=lambda i: max(_deg_in(a, i), _deg_in(b, i)))
    ca = _content_wrt(a, v)
    cb = _content_wrt(b, v)
    c = multivariate_gcd(ca, cb)
    a = a.divexact(ca)
    b = b.divexact(cb)
    if _deg_in(a, v) < _deg_in(b, v):
        a, b = b, a
    one = Polynomial.one(a.ctx)
    g = one
    h = one
    while True:
        delta = _deg_in(a, v) - _deg_in(b, v)
        r = _prem(a, b, v)
        if r.is_zero:
            _, pp = b.divexact(_content_wrt(b, v)).primitive()
            result = pp * c
            break
        if _deg_in(r, v) == 0:
            result = c
            break
        a, b = b, r.divexact(g * h**delta)
        g = _coeff_of_power(a, v, _deg_in(a, v))
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = (g**delta).divexact(h ** (delta - 1))
    _, result = result.primitive()
    return result


# -- public entry points --------------------------------------------------------------


def multivariate_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Primitive positive-leading gcd of the primitive parts of a and b."""
    a.ctx.same(b.ctx)
    if a.is_zero and b.is_zero:
        return Polynomial.zero(a.ctx)
    if a.is_zero:
        return b.primitive()[1]
    if b.is_zero:
        return a.primitive()[1]
    _, a = a.primitive()
    _, b = b.primitive()
    if a.is_constant or b.is_constant:
        return Polynomial.one(a.ctx)
    if a == b:
        return a
    # cheap containment checks catch most real calls
    if len(a.terms) >= len(b.terms) and a.try_divexact(b) is not None:
        return b
    if len(b.terms) > len(a.terms) and b.try_divexact(a) is not None:
        return a
    g = _heu_gcd(a, b)
    if g is None:
        g = _prs_gcd(a, b)
    return g.primitive()[1]


def gcd_list(polys) -> Polynomial:
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        raise ValueError("gcd of empty/zero list")
    g = polys[0].primitive()[1]
    for p in polys[1:]:
        if g.is_one:
            break
        g = multivariate_gcd(g, p)
    return g


def lcm_poly(a: Polynomial, b: Polynomial) -> Polynomial:
    """Primitive positive-leading lcm of primitive parts."""
    if a.is_zero or b.is_zero:
        return Polynomial.zero(a.ctx)
    g = multivariate_gcd(a, b)
    _, prod = (a * b).primitive()
    return prod.divexact(g).primitive()[1]


def squarefree_decomposition(a: Polynomial):
    """(unit, [(factor, multiplicity), ...]) with a == unit * prod f_i^m_i.

    Factors are integer-primitive, positive-leading, squarefree, and pairwise
    coprime; the list is ordered by increasing multiplicity then canonical
    term order. Works in characteristic zero via gcd with all first partials.
    """
    if a.is_zero:
        raise ValueError("squarefree decomposition of zero")
    unit, a = a.primitive()
    if a.is_constant:
        return unit * a.constant_value(), []
    names = [a.ctx.names[i] for i in sorted(_vars_present(a))]
    g = a
    for n in names:
        d = a.differentiate(n)
        if not d.is_zero:
            g = multivariate_gcd(g, d)
        if g.is_one:
            break
    if g.is_constant:
        return unit, [(a, 1)]
    w = a.divexact(g)
    uw, w = w.primitive()
    ug, g = g.primitive()
    unit *= uw * ug
    factors = []
    i = 1
    while not w.is_constant:
        y = multivariate_gcd(w, g)
        z = w.divexact(y)
        uz, z = z.primitive()
        unit *= uz**i
        if not z.is_constant:
            factors.append((z, i))
        gq = g.divexact(y) if not g.is_constant else g
        w, g = y, gq
        i += 1
    unit *= w.constant_value() if w.is_constant and not w.is_zero else 1
    factors.sort(key=lambda t: (t[1], Context.monomial_key(t[0].leading()[0]), t[0].key()))
    return unit, factors
