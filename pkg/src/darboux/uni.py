"""Dense univariate polynomial helpers over Fraction.

Coefficient lists are ascending (c[0] + c[1] t + ...), always trimmed.
Used by the reconstruction solve engine (interpolation in one parameter)
and by the parametric-condition machinery (slice determinants, root finding).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd

_F0 = Fraction(0)


def trim(c):
    while c and not c[-1]:
        c.pop()
    return c


def degree(c) -> int:
    return len(c) - 1 if c else -1


def add(a, b):
    n = max(len(a), len(b))
    return trim([
        (a[i] if i < len(a) else _F0) + (b[i] if i < len(b) else _F0) for i in range(n)
    ])


def sub(a, b):
    n = max(len(a), len(b))
    return trim([
        (a[i] if i < len(a) else _F0) - (b[i] if i < len(b) else _F0) for i in range(n)
    ])


def scale(a, s):
    s = Fraction(s)
    return [] if not s else [c * s for c in a]


def mul(a, b):
    if not a or not b:
        return []
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return trim(out)


def divmod_exact_field(a, b):
    """Quotient and remainder over the field of fractions."""
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    a = list(a)
    q = [_F0] * max(0, len(a) - len(b) + 1)
    inv = 1 / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        if c:
            q[i] = c
            for j, cb in enumerate(b):
                a[i + j] -= c * cb
    return trim(q), trim(a)


def evaluate(c, x: Fraction) -> Fraction:
    acc = _F0
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def monic(c):
    if not c:
        return c
    inv = 1 / c[-1]
    return [x * inv for x in c]


def uni_gcd(a, b):
    """Monic gcd over Q (empty list for gcd(0,0))."""
    a, b = trim(list(a)), trim(list(b))
    while b:
        _, r = divmod_exact_field(a, b)
        a, b = b, r
    return monic(a)


def lagrange_interpolate(xs, ys):
    """Coefficients of the unique interpolant of degree < len(xs) (Newton form)."""
    n = len(xs)
    coeffs = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (xs[i] - xs[i - j])
    # expand Newton form to monomial basis
    poly = []
    for i in range(n - 1, -1, -1):
        poly = add(mul(poly, [-xs[i], Fraction(1)]), [coeffs[i]])
    return trim(poly)


def fit_rational(xs, ys):
    """(num, den) with num(x)/den(x) = y at every node, minimizing degree sum.

    Cauchy interpolation via the extended Euclidean scheme on
    (node polynomial, Lagrange interpolant). Returns None when no candidate
    denominator avoids all nodes. Degrees are adaptive: among EEA rows whose
    denominator is node-free, the one with the smallest deg num + deg den is
    chosen, so plain polynomial data comes back with denominator 1.
    """
    n = len(xs)
    if n == 0:
        return None
    f = lagrange_interpolate(xs, ys)
    m = [Fraction(1)]
    for x in xs:
        m = mul(m, [-x, Fraction(1)])
    # EEA rows: r = s*M + t*F; candidates r/t
    r0, r1 = m, f
    t0, t1 = [], [Fraction(1)]
    best = None
    candidates = [(r1, t1)] if r1 else [([], [Fraction(1)])]
    while r1:
        q, r = divmod_exact_field(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, sub(t0, mul(q, t1))
        if r1:
            candidates.append((r1, t1))
    for num, den in candidates:
        if not den:
            continue
        if any(evaluate(den, x) == 0 for x in xs):
            continue
        score = degree(num) + degree(den)
        if best is None or score < best[0]:
            best = (score, num, den)
    if best is None:
        return None
    _, num, den = best
    inv = 1 / den[-1]
    return scale(num, inv), scale(den, inv)


def rational_roots(c):
    """All rational roots of a nonzero Fraction-coefficient polynomial, sorted."""
    c = trim(list(c))
    if not c:
        raise ValueError("rational roots of the zero polynomial")
    # strip powers of t
    shift = 0
    while not c[shift]:
        shift += 1
    roots = set()
    if shift:
        roots.add(Fraction(0))
        c = c[shift:]
    if len(c) > 1:
        den = 1
        for x in c:
            den = den * x.denominator // int_gcd(den, x.denominator)
        ints = [int(x * den) for x in c]
        a0, an = abs(ints[0]), abs(ints[-1])

        def divisors(n):
            out = []
            d = 1
            while d * d <= n:
                if n % d == 0:
                    out.append(d)
                    out.append(n // d)
                d += 1
            return out

        for p in divisors(a0):
            for q in divisors(an):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if cand not in roots and evaluate(c, cand) == 0:
                        roots.add(cand)
    return sorted(roots)
