"""Factorization: planted-product oracles, hint path, verification contract."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from darboux.context import Context
from darboux.errors import FactorizationTimeout
from darboux.factor import (
    Budget,
    FactorList,
    factor,
    is_irreducible,
    trial_divide,
    verify_factorization,
)
from darboux.gcd import multivariate_gcd
from darboux.polynomial import Polynomial

from conftest import nonzero_polynomials

CTX = Context(["x", "y"], ["h"])
X = Polynomial.variable(CTX, "x")
Y = Polynomial.variable(CTX, "y")
H = Polynomial.variable(CTX, "h")


class TestFactor:
    def test_difference_of_squares(self):
        fl = factor(X**2 - Y**2)
        assert fl.unit == 1
        assert {f.to_text() for f, _ in fl} == {"x + y", "x - y"}

    def test_multiplicities_and_unit(self):
        p = Fraction(-3, 2) * (X + Y) ** 2 * (2 * X - 1) ** 3
        fl = factor(p)
        assert verify_factorization(fl, p)
        mults = sorted(m for _, m in fl)
        assert mults == [2, 3]
        assert fl.unit * 2 ** 3 == Fraction(-3, 2) * 2 ** 3  # unit exact

    def test_irreducible_stays_whole(self):
        p = X**2 + Y**2 + 1
        fl = factor(p)
        assert len(fl) == 1 and fl.factors[0] == (p, 1)
        assert is_irreducible(p)
        assert not is_irreducible(X**2 - Y**2)

    def test_parameters_participate(self):
        # factors mixing state and parameter variables
        p = (1 - 5 * H * X) * (1 + 3 * H * X + 12 * H * Y)
        fl = factor(p)
        assert len(fl) == 2
        assert verify_factorization(fl, p)

    def test_constant(self):
        fl = factor(Polynomial.constant(CTX, Fraction(7, 3)))
        assert fl.unit == Fraction(7, 3) and len(fl) == 0
        assert fl.expand() == Polynomial.constant(CTX, Fraction(7, 3))

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            factor(Polynomial.zero(CTX))

    @given(
        nonzero_polynomials(CTX, max_deg=2, max_terms=3),
        nonzero_polynomials(CTX, max_deg=2, max_terms=3),
    )
    @settings(max_examples=30, deadline=None)
    def test_expand_roundtrip(self, a, b):
        p = a * b
        fl = factor(p)
        assert verify_factorization(fl, p)
        # factors pairwise coprime, each dividing p
        for i, (f, _) in enumerate(fl):
            assert p.try_divexact(f) is not None
            for g, _ in fl.factors[i + 1 :]:
                assert multivariate_gcd(f, g).is_one

    def test_canonical_order_deterministic(self):
        p = (X + Y) * (X - Y) * (X + 1)
        assert factor(p).factors == factor(p * 1).factors

    def test_hints_change_nothing(self):
        p = (1 - 5 * H * X) ** 2 * (X + Y)
        plain = factor(p)
        hinted = factor(p, hints=[1 - 5 * H * X, X + 77])  # second hint wrong
        assert plain.factors == hinted.factors
        assert plain.unit == hinted.unit


class TestTrialDivide:
    def test_planted(self):
        p = (X + Y) ** 3 * (X - 1)
        found, rem = trial_divide(p, [X + Y, Y + 5])
        assert found == [(X + Y, 3)]
        assert rem == (X - 1)

    def test_unit_normalization(self):
        # divisor comes in with content; the primitive part is what is divided out
        p = (2 * X + 2 * Y) * (X - 1)
        found, rem = trial_divide(p, [4 * X + 4 * Y])
        assert found == [(X + Y, 1)]
        assert rem == 2 * (X - 1)


class TestVerification:
    def test_tampered_unit_detected(self):
        p = (X + Y) * (X - Y)
        fl = factor(p)
        bad = FactorList(fl.ctx, fl.unit * 2, fl.factors)
        assert not verify_factorization(bad, p)

    def test_budget_expired(self):
        b = Budget(0.0)
        import time

        time.sleep(0.01)
        with pytest.raises(FactorizationTimeout):
            factor((X + Y) * (X - Y), budget=b)
