"""Core polynomial ring: exactness, ring axioms, division, calculus."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from darboux.context import Context
from darboux.errors import ContextMismatch, DivisionByZero, UnknownVariable
from darboux.polynomial import Polynomial

from conftest import fractions, nonzero_polynomials, polynomials

CTX = Context(["x", "y"], ["h"])
X = Polynomial.variable(CTX, "x")
Y = Polynomial.variable(CTX, "y")
H = Polynomial.variable(CTX, "h")


class TestConstruction:
    def test_zero_terms_dropped(self):
        p = Polynomial(CTX, {(1, 0, 0): Fraction(0), (0, 1, 0): Fraction(2)})
        assert len(p.terms) == 1
        assert p == 2 * Y

    def test_int_coefficients_coerced(self):
        p = Polynomial(CTX, {(1, 0, 0): 3})
        assert p.terms[(1, 0, 0)] == Fraction(3)
        assert isinstance(p.terms[(1, 0, 0)], Fraction)

    def test_float_rejected(self):
        with pytest.raises(TypeError):
            Polynomial(CTX, {(1, 0, 0): 0.5})

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            Polynomial.variable(CTX, "z")

    def test_context_mismatch(self):
        other = Context(["a", "b", "c"])
        q = Polynomial.variable(other, "a")
        with pytest.raises(ContextMismatch):
            _ = X + q


class TestRingAxioms:
    @given(polynomials(CTX), polynomials(CTX), polynomials(CTX))
    @settings(max_examples=60, deadline=None)
    def test_distributive_and_associative(self, a, b, c):
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)

    @given(polynomials(CTX), polynomials(CTX))
    @settings(max_examples=60, deadline=None)
    def test_commutative_and_inverse(self, a, b):
        assert a * b == b * a
        assert a + b == b + a
        assert (a - b) + b == a
        assert a + (-a) == Polynomial.zero(CTX)

    @given(polynomials(CTX))
    @settings(max_examples=30, deadline=None)
    def test_units(self, a):
        assert a * Polynomial.one(CTX) == a
        assert a + Polynomial.zero(CTX) == a
        assert a * 0 == Polynomial.zero(CTX)

    def test_pow_matches_repeated_mul(self):
        p = X + 2 * Y - 1
        q = Polynomial.one(CTX)
        for k in range(6):
            assert p**k == q
            q = q * p

    def test_known_product(self):
        # (x + y)(x - y) = x^2 - y^2
        assert (X + Y) * (X - Y) == X**2 - Y**2


class TestDivision:
    @given(nonzero_polynomials(CTX), polynomials(CTX))
    @settings(max_examples=60, deadline=None)
    def test_divexact_roundtrip(self, b, a):
        assert (a * b).divexact(b) == a

    def test_non_divisible_returns_none(self):
        assert (X**2 + 1).try_divexact(X + 1) is None
        assert (X * Y + 1).try_divexact(X) is None

    def test_zero_divisor_raises(self):
        with pytest.raises(DivisionByZero):
            X.divexact(Polynomial.zero(CTX))

    def test_rational_coefficients(self):
        a = Fraction(3, 2) * X + Fraction(1, 4)
        b = 2 * X + 5
        assert (a * b).divexact(b) == a


class TestCalculus:
    def test_power_rule(self):
        assert (X**5).differentiate("x") == 5 * X**4
        assert (X**5).differentiate("y").is_zero

    @given(polynomials(CTX), polynomials(CTX))
    @settings(max_examples=40, deadline=None)
    def test_product_rule(self, a, b):
        da, db = a.differentiate("x"), b.differentiate("x")
        assert (a * b).differentiate("x") == da * b + a * db

    @given(polynomials(CTX), fractions(), fractions(), fractions())
    @settings(max_examples=40, deadline=None)
    def test_evaluation_is_homomorphism(self, p, vx, vy, vh):
        pt = {"x": vx, "y": vy, "h": vh}
        direct = sum(
            (c * vx ** e[0] * vy ** e[1] * vh ** e[2] for e, c in p.terms.items()),
            Fraction(0),
        )
        assert p.value(pt) == direct

    def test_partial_evaluation_composes(self):
        p = (X + Y) ** 3 + H * X
        partial = p.evaluate({"x": Fraction(2)})
        assert partial.value({"y": Fraction(1), "h": Fraction(5)}) == p.value(
            {"x": Fraction(2), "y": Fraction(1), "h": Fraction(5)}
        )

    def test_negate_var(self):
        p = X**2 + 3 * X * H + H**3
        assert p.negate_var("h") == X**2 - 3 * X * H - H**3

    def test_substitute_polys(self):
        p = X**2 + Y
        assert p.substitute_polys({"x": Y + 1}) == (Y + 1) ** 2 + Y


class TestNormalization:
    @given(nonzero_polynomials(CTX))
    @settings(max_examples=60, deadline=None)
    def test_primitive_contract(self, p):
        unit, prim = p.primitive()
        assert unit * prim == p
        coeffs = list(prim.terms.values())
        assert all(c.denominator == 1 for c in coeffs)
        from math import gcd

        g = 0
        for c in coeffs:
            g = gcd(g, c.numerator)
        assert g == 1
        assert prim.leading()[1] > 0

    def test_leading_graded_lex(self):
        # total degree first, then earlier variable wins ties
        p = X * Y + X**2 + Y + 7
        assert p.leading()[0] == (2, 0, 0)
        q = X * Y**2 + X**2 * Y
        assert q.leading()[0] == (2, 1, 0)


class TestInspection:
    def test_degrees(self):
        p = X**2 * H**3 + Y
        assert p.total_degree() == 5
        assert p.state_total_degree() == 2
        assert p.degree_in("h") == 3

    def test_monomials_up_to_count(self):
        ctx = Context(["a", "b", "c"])
        monos = ctx.monomials_up_to(4)
        assert len(monos) == 35  # C(3+4, 4)
        assert len(set(monos)) == 35
        assert monos[-1] == (0, 0, 0)

    def test_state_coefficients(self):
        p = X**2 * H + 2 * X**2 + Y * H**2
        groups = p.state_coefficients()
        assert groups[(2, 0, 0)] == H + 2
        assert groups[(0, 1, 0)] == H**2

    def test_to_text(self):
        p = -(X**2) + Fraction(3, 2) * Y - 1
        assert p.to_text() == "-x^2 + 3/2*y - 1"

    def test_cast_preserves_values(self):
        small = Context(["x", "y"])
        p = Polynomial.variable(small, "x") ** 2 + 2
        big = small.extend(params=["h"])
        q = p.cast(big)
        assert q.value({"x": Fraction(3), "y": Fraction(0), "h": Fraction(9)}) == 11
