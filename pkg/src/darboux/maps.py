"""Quadratic vector fields, their birational discretization, and rational maps.

The discretization replaces x' = f(x), f quadratic, by the implicit bilinear
rule (x+ - x)/h = Q(x, x+), where Q is the symmetric bilinear form polarizing
f: products x_j x_k become (x_j x+_k + x+_j x_k)/2, linear terms average, and
constants pass through. The rule is linear in x+, so the update has the
closed form x+ = x + h A(x)^{-1} f(x) with A(x) = I - (h/2) f'(x); here the
solve is done by Cramer determinants, keeping everything polynomial over the
exact coefficient field.

A RationalMap stores its components over one shared denominator. That shape
is what the certificate machinery needs: pulling a degree-d polynomial back
through the map and clearing denominators multiplies by exactly den^d.
"""

from __future__ import annotations

from fractions import Fraction

from .context import Context
from .errors import DegreeError, DenominatorVanishes
from .factor import factor
from .gcd import lcm_poly
from .linalg import bareiss_det
from .polynomial import Polynomial
from .rational import RationalFunction


class QuadraticODE:
    """Polynomial vector field of state degree at most 2.

    Coefficients may involve parameters; only the state degree is bounded.
    """

    __slots__ = ("ctx", "components")

    def __init__(self, ctx: Context, components):
        components = [c if isinstance(c, Polynomial) else Polynomial.constant(ctx, c) for c in components]
        if len(components) != ctx.nstate:
            raise DegreeError(
                f"field has {len(components)} components for {ctx.nstate} state variables"
            )
        for i, c in enumerate(components):
            ctx.same(c.ctx)
            if c.state_total_degree() > 2:
                raise DegreeError(
                    f"component {i} has state degree {c.state_total_degree()} > 2"
                )
        self.ctx = ctx
        self.components = list(components)

    def state_jacobian(self):
        """Matrix of state partial derivatives f'."""
        return [
            [c.differentiate(n) for n in self.ctx.state_vars] for c in self.components
        ]

    def evaluate(self, point: dict):
        return [c.value(point) for c in self.components]

    def _components_in(self, ctx: Context):
        if ctx == self.ctx:
            return self.components
        return [c.cast(ctx) for c in self.components]

    def lie_derivative(self, obj):
        """Derivative of obj along the flow, sum_i f_i * d(obj)/dx_i.

        Polynomial in -> Polynomial out; rational function in -> rational
        function out (quotient rule applied to the reduced representative).
        The argument may live in an extended context (extra parameters such
        as a step size); the field is lifted to match.
        """
        if isinstance(obj, Polynomial):
            acc = Polynomial.zero(obj.ctx)
            for f, n in zip(self._components_in(obj.ctx), self.ctx.state_vars):
                acc = acc + f * obj.differentiate(n)
            return acc
        num = self.lie_derivative(obj.num) * obj.den - obj.num * self.lie_derivative(obj.den)
        return RationalFunction(num, obj.den * obj.den)

    def is_first_integral(self, obj) -> bool:
        """Exact zero test of the Lie derivative, without any gcd reduction."""
        if isinstance(obj, Polynomial):
            return self.lie_derivative(obj).is_zero
        lhs = self.lie_derivative(obj.num) * obj.den
        rhs = obj.num * self.lie_derivative(obj.den)
        return (lhs - rhs).is_zero

    def cast(self, new_ctx: Context) -> "QuadraticODE":
        return QuadraticODE(new_ctx, [c.cast(new_ctx) for c in self.components])

    def polarization(self, other_names):
        """Bilinear form Q(x, y) with Q(x, x) = f(x), over an extended context
        containing the mirror state variables other_names.

        Degree-2 state monomials x_j x_k polarize to (x_j y_k + y_j x_k)/2,
        degree-1 terms average, constants pass through; parameter factors ride
        along unchanged.
        """
        big = self.ctx.extend(state_vars=tuple(other_names))
        ns = self.ctx.nstate
        half = Fraction(1, 2)
        xs = [Polynomial.variable(big, n) for n in self.ctx.state_vars]
        ys = [Polynomial.variable(big, n) for n in other_names]
        out = []
        for c in self.components:
            acc = Polynomial.zero(big)
            for e, coef in c.terms.items():
                se = e[:ns]
                param_mono = Polynomial(
                    big, {(0,) * 2 * ns + e[ns:]: coef}
                )
                deg = sum(se)
                if deg == 0:
                    term = param_mono
                elif deg == 1:
                    j = next(i for i, d in enumerate(se) if d)
                    term = param_mono * (xs[j] + ys[j]) * half
                else:
                    idx = [i for i, d in enumerate(se) for _ in range(d)]
                    j, k = idx[0], idx[1]
                    term = param_mono * (xs[j] * ys[k] + ys[j] * xs[k]) * half
                acc = acc + term
            out.append(acc)
        return big, out


class RationalMap:
    """Birational map with components numerators[i] / den over a shared context."""

    __slots__ = (
        "ctx",
        "numerators",
        "den",
        "source_ode",
        "step",
        "_jac_factored",
        "_num_products",
    )

    def __init__(self, ctx: Context, numerators, den: Polynomial, *, source_ode=None, step=None):
        if len(numerators) != ctx.nstate:
            raise DegreeError(
                f"map has {len(numerators)} components for {ctx.nstate} state variables"
            )
        for n in numerators:
            ctx.same(n.ctx)
        ctx.same(den.ctx)
        if den.is_zero:
            raise DenominatorVanishes("map denominator is identically zero")
        self.ctx = ctx
        self.numerators = list(numerators)
        self.den = den
        self.source_ode = source_ode
        self.step = step
        self._jac_factored = None
        self._num_products = {}

    # -- constructors -------------------------------------------------------------

    @staticmethod
    def from_components(ctx: Context, components) -> "RationalMap":
        """Build from rational components by putting them over one denominator."""
        comps = []
        for c in components:
            if isinstance(c, Polynomial):
                c = RationalFunction.from_polynomial(c)
            ctx.same(c.ctx)
            comps.append(c)
        den = Polynomial.one(ctx)
        for c in comps:
            if not c.den.is_one:
                den = lcm_poly(den, c.den)
        nums = []
        for c in comps:
            scale = den.divexact(c.den)
            nums.append(c.num * scale)
        return RationalMap(ctx, nums, den)

    @staticmethod
    def identity(ctx: Context) -> "RationalMap":
        return RationalMap(
            ctx,
            [Polynomial.variable(ctx, n) for n in ctx.state_vars],
            Polynomial.one(ctx),
        )

    # -- basic interface ------------------------------------------------------------

    @property
    def components(self):
        return [RationalFunction(n, self.den) for n in self.numerators]

    def apply(self, point: dict) -> dict:
        dv = self.den.value(point)
        if dv == 0:
            raise DenominatorVanishes("map denominator vanishes at the point")
        out = dict(point)
        for name, num in zip(self.ctx.state_vars, self.numerators):
            out[name] = num.value(point) / dv
        return out

    def kahan_inverse(self) -> "RationalMap":
        """Inverse of a discretized map: reverse the step parameter's sign."""
        if self.step is None:
            raise DegreeError("map does not carry a step parameter")
        h = self.step
        return RationalMap(
            self.ctx,
            [n.negate_var(h) for n in self.numerators],
            self.den.negate_var(h),
            source_ode=self.source_ode,
            step=h,
        )

    # -- pullback machinery -----------------------------------------------------------

    def numerator_products(self, degree: int, support=None):
        """G_m = prod(N_i^m_i) * den^(degree - |m|) for state monomials m.

        support limits which monomials are built (full-width exponent tuples
        with zero parameter part); all |m| <= degree monomials by default.
        Shared prefixes are multiplied once via DFS over variables.
        """
        ns = self.ctx.nstate
        if support is None:
            support = self.ctx.monomials_up_to(degree)
        support = [tuple(m) for m in support]
        for m in support:
            if sum(m[:ns]) > degree or any(m[ns:]):
                raise DegreeError(f"bad support monomial {m} for degree {degree}")
        one = Polynomial.one(self.ctx)
        den_pows = [one]
        for _ in range(degree):
            den_pows.append(den_pows[-1] * self.den)
        pow_cache = [{0: one} for _ in range(ns)]

        def var_power(i, k):
            cache = pow_cache[i]
            if k not in cache:
                cache[k] = var_power(i, k - 1) * self.numerators[i]
            return cache[k]

        result = {}

        def rec(i, acc, used, monos):
            if i == ns:
                m = monos[0]
                result[m] = acc * den_pows[degree - used]
                return
            groups: dict = {}
            for m in monos:
                groups.setdefault(m[i], []).append(m)
            for e in sorted(groups):
                rec(i + 1, acc * var_power(i, e) if e else acc, used + e, groups[e])

        rec(0, one, 0, support)
        return result

    def pullback_numerator(self, p: Polynomial, degree: int | None = None) -> Polynomial:
        """p(map(x)) * den^degree as a polynomial (degree defaults to the state
        degree of p, the least power clearing all denominators)."""
        self.ctx.same(p.ctx)
        d = p.state_total_degree() if degree is None else degree
        groups = p.state_coefficients()
        gm = self.numerator_products(d, support=list(groups))
        out = Polynomial.zero(self.ctx)
        for m, coeff in sorted(groups.items(), key=lambda t: Context.monomial_key(t[0])):
            out = out + coeff * gm[m]
        return out

    def pullback(self, obj) -> RationalFunction:
        """Composition obj(map(x)) for a polynomial or rational function."""
        if isinstance(obj, Polynomial):
            d = obj.state_total_degree()
            return RationalFunction(self.pullback_numerator(obj, d), self.den**d)
        self.ctx.same(obj.ctx)
        dn = obj.num.state_total_degree()
        dd = obj.den.state_total_degree()
        d = max(dn, dd)
        num = self.pullback_numerator(obj.num, d)
        den = self.pullback_numerator(obj.den, d)
        return RationalFunction(num, den)

    def compose(self, inner: "RationalMap") -> "RationalMap":
        """self after inner: x -> self(inner(x))."""
        self.ctx.same(inner.ctx)
        d = max(
            max(n.state_total_degree() for n in self.numerators),
            self.den.state_total_degree(),
        )
        nums = [inner.pullback_numerator(n, d) for n in self.numerators]
        den = inner.pullback_numerator(self.den, d)
        return RationalMap.from_components(
            self.ctx, [RationalFunction(n, den) for n in nums]
        )

    # -- Jacobian -----------------------------------------------------------------------

    def jacobian_matrix(self):
        """Matrix of state partials of the components, as rational functions."""
        out = []
        dden = [self.den.differentiate(n) for n in self.ctx.state_vars]
        den2 = self.den * self.den
        for num in self.numerators:
            row = []
            for j, n in enumerate(self.ctx.state_vars):
                row.append(
                    RationalFunction(num.differentiate(n) * self.den - num * dden[j], den2)
                )
            out.append(row)
        return out

    def jacobian_factored(self) -> "SignedFactors":
        """Jacobian determinant in factored form (cached)."""
        if self._jac_factored is None:
            if self.source_ode is not None and self.step is not None:
                self._jac_factored = _kahan_jacobian_factored(self)
            else:
                self._jac_factored = _generic_jacobian_factored(self)
        return self._jac_factored

    def jacobian_determinant(self) -> RationalFunction:
        return self.jacobian_factored().expand()


class SignedFactors:
    """unit * prod(factor^exponent) with integer exponents of either sign.

    Factors are irreducible, primitive, positive-leading, pairwise distinct,
    canonically ordered. The factored Jacobian and cofactor values live here.
    """

    __slots__ = ("ctx", "unit", "factors")

    def __init__(self, ctx: Context, unit: Fraction, factors):
        self.ctx = ctx
        self.unit = Fraction(unit)
        merged: dict = {}
        for p, e in factors:
            if e == 0:
                continue
            k = p.key()
            if k in merged:
                merged[k] = (p, merged[k][1] + e)
            else:
                merged[k] = (p, e)
        self.factors = tuple(
            sorted(
                ((p, e) for p, e in merged.values() if e != 0),
                key=lambda t: (
                    t[0].total_degree(),
                    Context.monomial_key(t[0].leading()[0]),
                    t[0].key(),
                ),
            )
        )

    def expand(self) -> RationalFunction:
        num = Polynomial.constant(self.ctx, self.unit)
        den = Polynomial.one(self.ctx)
        for p, e in self.factors:
            if e > 0:
                num = num * p**e
            else:
                den = den * p ** (-e)
        return RationalFunction(num, den, _reduced=True)

    def to_text(self) -> str:
        if not self.factors:
            return str(self.unit)
        parts = [] if self.unit == 1 else [str(self.unit)]
        for p, e in self.factors:
            t = f"({p.to_text()})"
            parts.append(t if e == 1 else f"{t}^{e}")
        return " * ".join(parts)

    def __repr__(self):
        return f"<factored {self.to_text()}>"


def kahan_discretize(ode: QuadraticODE, step: str = "h") -> RationalMap:
    """Closed-form birational step map of the bilinear discretization."""
    ctx = ode.ctx
    if step not in ctx.names:
        ctx = ctx.extend(params=(step,))
        ode = ode.cast(ctx)
    elif ctx.index(step) < ctx.nstate:
        raise DegreeError(f"step symbol {step!r} is a state variable")
    h = Polynomial.variable(ctx, step)
    half_h = h * Fraction(1, 2)
    fprime = ode.state_jacobian()
    n = ctx.nstate
    a = [
        [
            (Polynomial.one(ctx) if i == j else Polynomial.zero(ctx)) - half_h * fprime[i][j]
            for j in range(n)
        ]
        for i in range(n)
    ]
    den = bareiss_det(a)
    nums = []
    for i in range(n):
        ai = [row[:i] + [f] + row[i + 1 :] for row, f in zip(a, ode.components)]
        di = bareiss_det(ai)
        xi = Polynomial.variable(ctx, ctx.state_vars[i])
        nums.append(xi * den + h * di)
    return RationalMap(ctx, nums, den, source_ode=ode, step=step)


def _kahan_jacobian_factored(phi: RationalMap) -> SignedFactors:
    """Jacobian of a discretized map, via the reversed-step identity.

    For x+ = phi(x) defined by A_h(x)(x+ - x) = h f(x) with the bilinear
    structure, differentiating the implicit relation gives
    det(dphi) = det(A_{-h}(phi(x))) / det(A_h(x)): the reversed-step matrix
    at the image over the forward matrix at the point. Both determinants are
    small; their factors are pushed through the map and refactored, which
    keeps the whole computation in factored form.
    """
    ctx = phi.ctx
    h = phi.step
    den_back = phi.den.negate_var(h)  # det(A_{-h}) as a polynomial in x
    fl_fwd = factor(phi.den)
    fl_back = factor(den_back)
    exps: list = []
    unit = fl_back.unit / fl_fwd.unit
    # denominator: det(A_h(x)) plus the clearing powers from composing factors
    neg: dict = {}

    def add_den(p: Polynomial, e: int):
        k = p.key()
        if k in neg:
            neg[k] = (p, neg[k][1] + e)
        else:
            neg[k] = (p, e)

    for p, m in fl_fwd.factors:
        add_den(p, m)
    den_hints = [p for p, _ in fl_fwd.factors] + [p for p, _ in fl_back.factors]
    for p, m in fl_back.factors:
        d = p.state_total_degree()
        comp = phi.pullback_numerator(p, d)
        if d:
            # comp = p(phi) * den^d; account for the clearing power
            for q, mq in fl_fwd.factors:
                add_den(q, mq * d * m)
            unit /= fl_fwd.unit ** (d * m)
        sub = factor(comp, hints=den_hints)
        unit *= sub.unit**m
        for q, mq in sub.factors:
            exps.append((q, mq * m))
    for p, e in neg.values():
        exps.append((p, -e))
    return SignedFactors(ctx, unit, exps)


def _generic_jacobian_factored(phi: RationalMap) -> SignedFactors:
    """Jacobian via a cleared Bareiss determinant, then factorization."""
    ctx = phi.ctx
    n = ctx.nstate
    dden = [phi.den.differentiate(v) for v in ctx.state_vars]
    m = []
    for num in phi.numerators:
        m.append(
            [
                num.differentiate(v) * phi.den - num * dden[j]
                for j, v in enumerate(ctx.state_vars)
            ]
        )
    det = bareiss_det(m)
    if det.is_zero:
        raise DegreeError("map is degenerate: Jacobian determinant vanishes")
    # each cleared entry carried a factor den^2, so det(jacobian) = det / den^(2n)
    fl_den = factor(phi.den)
    fl_num = factor(det, hints=[p for p, _ in fl_den.factors])
    exps = [(p, e) for p, e in fl_num.factors]
    exps.extend((p, -2 * n * e) for p, e in fl_den.factors)
    unit = fl_num.unit / fl_den.unit ** (2 * n)
    return SignedFactors(ctx, unit, exps)
