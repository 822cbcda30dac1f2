"""Shared strategies and helpers for the test suite."""

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from darboux.context import Context
from darboux.polynomial import Polynomial


@pytest.fixture(scope="session")
def ctx_xy():
    return Context(["x", "y"])


@pytest.fixture(scope="session")
def ctx_xyh():
    return Context(["x", "y"], ["h"])


def fractions(max_num=9, max_den=4):
    return st.builds(
        Fraction,
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )


def polynomials(ctx, max_deg=3, max_terms=5, coeffs=None):
    """Strategy producing (possibly zero) polynomials over ctx."""
    if coeffs is None:
        coeffs = fractions()
    exponent = st.tuples(*[st.integers(0, max_deg) for _ in range(ctx.nvars)])
    return st.dictionaries(exponent, coeffs, max_size=max_terms).map(
        lambda d: Polynomial(ctx, d)
    )


def nonzero_polynomials(ctx, **kw):
    return polynomials(ctx, **kw).filter(lambda p: not p.is_zero)
