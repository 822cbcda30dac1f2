"""Built-in corpus of quadratic vector fields and rational maps.

Every system is registered under a short stable name (``ex1`` .. ``ex11``)
and, where a descriptive name exists, under that alias as well.  Systems with
free coefficients keep them as symbolic parameters unless the caller binds
them to exact rationals via keyword arguments; structural options (such as the
lattice size ``k`` of the ``sine-gordon`` family) select a family member
before construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import Context
from .errors import UnknownExample
from .maps import QuadraticODE, RationalMap
from .polynomial import Polynomial


@dataclass(frozen=True)
class BuiltinInfo:
    """Metadata describing one registered system."""

    name: str
    aliases: tuple
    kind: str  # "ode-quadratic" or "map-rational"
    variables: str
    parameters: str
    options: str
    summary: str


def _vars(ctx: Context):
    return [Polynomial.variable(ctx, n) for n in ctx.state_vars]


def _params(ctx: Context, names):
    return [Polynomial.variable(ctx, n) for n in names]


def _bind_values(bindings: dict) -> dict:
    return {name: Fraction(value) for name, value in bindings.items()}


def _reduced_context(ctx: Context, bound_names) -> Context:
    params = tuple(p for p in ctx.params if p not in bound_names)
    return Context(ctx.state_vars, params)


def _bind_ode(ode: QuadraticODE, bindings: dict) -> QuadraticODE:
    if not bindings:
        return ode
    values = _bind_values(bindings)
    for name in values:
        if name not in ode.ctx.params:
            raise ValueError(f"{name!r} is not a parameter of this system")
    new_ctx = _reduced_context(ode.ctx, values)
    comps = [c.evaluate(values).cast(new_ctx) for c in ode.components]
    return QuadraticODE(new_ctx, comps)


def _bind_map(phi: RationalMap, bindings: dict) -> RationalMap:
    if not bindings:
        return phi
    values = _bind_values(bindings)
    for name in values:
        if name not in phi.ctx.params:
            raise ValueError(f"{name!r} is not a parameter of this system")
    new_ctx = _reduced_context(phi.ctx, values)
    nums = [n.evaluate(values).cast(new_ctx) for n in phi.numerators]
    den = phi.den.evaluate(values).cast(new_ctx)
    step = phi.step if phi.step is not None and phi.step not in values else None
    return RationalMap(new_ctx, nums, den, step=step)


# -- systems ------------------------------------------------------------------------


def _make_ex1(**bindings):
    ctx = Context(("x1", "x2"))
    x1, x2 = _vars(ctx)
    f = [2 * x1 * x2 - 4 * x2, -3 * x1**2 - x2**2 + 4 * x1 + 1]
    return _bind_ode(QuadraticODE(ctx, f), bindings)


def _make_ex2(**bindings):
    ctx = Context(("x1", "x2", "x3"))
    x1, x2, x3 = _vars(ctx)
    # third component uses 5*x3 (not 5*x1): the field is the cross product of
    # the gradients of the two stated quadratic invariants, and only this form
    # conserves both and has zero divergence
    f = [
        (x1 + 3 * x2) * (5 * x2 + 12 * x3 + 8),
        -(x1 + x2) * (5 * x2 + 12 * x3 + 8),
        (x1 + x2) * (8 * x2 + 5 * x3 + 7),
    ]
    return _bind_ode(QuadraticODE(ctx, f), bindings)


def _make_ex3(**bindings):
    ctx = Context(("x1", "x2"))
    x1, x2 = _vars(ctx)
    f = [2 * x1**2 - 12 * x2**2, -6 * x1 * x2 - 4 * x2**2]
    return _bind_ode(QuadraticODE(ctx, f), bindings)


def _lagrange_components(ctx: Context, include_m3_equation: bool):
    m1 = Polynomial.variable(ctx, "m1")
    m2 = Polynomial.variable(ctx, "m2")
    m3 = Polynomial.variable(ctx, "m3")
    p1 = Polynomial.variable(ctx, "p1")
    p2 = Polynomial.variable(ctx, "p2")
    p3 = Polynomial.variable(ctx, "p3")
    alpha = Polynomial.variable(ctx, "alpha")
    gamma = Polynomial.variable(ctx, "gamma")
    f = [
        (alpha - 1) * m2 * m3 + gamma * p2,
        (1 - alpha) * m1 * m3 - gamma * p1,
    ]
    if include_m3_equation:
        f.append(Polynomial.zero(ctx))
    f += [
        alpha * p2 * m3 - p3 * m2,
        p3 * m1 - alpha * p1 * m3,
        p1 * m2 - p2 * m1,
    ]
    return f


def _make_ex4(reduced=False, **bindings):
    if reduced:
        ctx = Context(("m1", "m2", "p1", "p2", "p3"), ("alpha", "gamma", "m3"))
        f = _lagrange_components(ctx, include_m3_equation=False)
    else:
        ctx = Context(("m1", "m2", "m3", "p1", "p2", "p3"), ("alpha", "gamma"))
        f = _lagrange_components(ctx, include_m3_equation=True)
    return _bind_ode(QuadraticODE(ctx, f), bindings)


def _make_ex5(**bindings):
    ctx = Context(("x1", "x2", "x3", "x4"))
    x1, x2, x3, x4 = _vars(ctx)
    f = [
        9 * x1**2 + 48 * x3 * x1 - 40 * x1 * x4 + 24 * x2**2 - 48 * x2 * x3
        + 48 * x2 * x4 + 48 * x3**2 + 24 * x4 * x3 - 132 * x4**2 + x1,
        -2 * x1**2 - 12 * x3 * x1 + 12 * x1 * x4 - 5 * x2**2 + 12 * x2 * x3
        - 14 * x2 * x4 - 12 * x3**2 - 6 * x4 * x3 + 38 * x4**2 + x2,
        -4 * x1**2 - 24 * x3 * x1 + 24 * x1 * x4 - 14 * x2**2 + 28 * x2 * x3
        - 28 * x2 * x4 - 25 * x3**2 - 12 * x4 * x3 + 76 * x4**2 + x3,
        -2 * x1**2 - 12 * x3 * x1 + 12 * x1 * x4 - 6 * x2**2 + 12 * x2 * x3
        - 12 * x2 * x4 - 12 * x3**2 - 6 * x4 * x3 + 37 * x4**2 + x4,
    ]
    return _bind_ode(QuadraticODE(ctx, f), bindings)


def _make_ex6(**bindings):
    ctx = Context(("x1", "x2", "x3", "x4"))
    x1, x2, x3, x4 = _vars(ctx)
    f = [
        -2 * x4**2 + (-2 * x1 - x3 + 5) * x4 - x1**2 + x1 + x2 + 3 * x3,
        -2 * x4**2 + (-2 * x1 - x3 + 3) * x4 - x1**2 - x1 + x2 + 3 * x3,
        -2 * x4**2 + (-2 * x1 - x3 - 5) * x4 - x1**2 - 3 * x1 - 3 * x2 + x3,
        2 * x4**2 + (2 * x1 + x3) * x4 + x1**2,
    ]
    return _bind_ode(QuadraticODE(ctx, f), bindings)


def _make_ex7(**bindings):
    ctx = Context(("x1", "x2", "x3", "x4"), ("h",))
    x1, x2, x3, x4 = _vars(ctx)
    (h,) = _params(ctx, ("h",))
    den = (
        -28 * h**2 * x1**2 * x2**2 + 4 * h**2 * x1**2 * x2 * x4
        - 40 * h**2 * x1**2 * x4**2 + 4 * h**2 * x1 * x2**2 * x3
        - 28 * h**2 * x1 * x2 * x3 * x4 - 8 * h**2 * x1 * x3 * x4**2
        - 40 * h**2 * x2**2 * x3**2 - 8 * h**2 * x2 * x3**2 * x4
        - 16 * h**2 * x3**2 * x4**2 + 1
    )
    n2 = (
        2 * h * x1**2 * x2 - 6 * h * x1**2 * x4 - 12 * h * x1 * x2 * x3
        - 4 * h * x1 * x3 * x4 - 2 * h * x2 * x3**2 + 2 * h * x3**2 * x4 + x1
    )
    n4 = (
        -4 * h * x1**2 * x2 - 2 * h * x1**2 * x4 - 4 * h * x1 * x2 * x3
        + 12 * h * x1 * x3 * x4 + 6 * h * x2 * x3**2 + 2 * h * x3**2 * x4 + x3
    )
    phi = RationalMap(ctx, [x2 * den, n2, x4 * den, n4], den)
    return _bind_map(phi, bindings)


def _make_sine_gordon(k=2, **bindings):
    k = int(k)
    if k < 2:
        raise ValueError("sine-gordon requires k >= 2")
    names = tuple(f"x{i}" for i in range(k + 1))
    ctx = Context(names, ("alpha",))
    xs = _vars(ctx)
    (alpha,) = _params(ctx, ("alpha",))
    den = xs[0] * (xs[1] * xs[k] - alpha)
    nums = [xs[i + 1] * den for i in range(k)]
    nums.append(1 - alpha * xs[1] * xs[k])
    phi = RationalMap(ctx, nums, den)
    return _bind_map(phi, bindings)


def _make_ex9(**bindings):
    ctx = Context(("x1", "x2"), ("a1", "a2", "a3", "a4", "a5", "a6"))
    x1, x2 = _vars(ctx)
    a1, a2, a3, a4, a5, a6 = _params(ctx, ("a1", "a2", "a3", "a4", "a5", "a6"))
    den = a5 * x1**2 + a2 * x1 + a6
    cubic = a1 * x1**3 + a2 * x1**2 + a3 * x1 + a4
    phi = RationalMap(ctx, [-x2 * den - cubic, x1 * den], den)
    return _bind_map(phi, bindings)


def _make_ex10(**bindings):
    ctx = Context(("x1", "x2", "x3", "x4", "x5"), ("a1", "a2", "a3", "a4", "a5", "a6"))
    x1, x2, x3, x4, x5 = _vars(ctx)
    a1, a2, a3, a4, a5, a6 = _params(ctx, ("a1", "a2", "a3", "a4", "a5", "a6"))
    f = [
        a1**2 * x2 * x3,
        a2**2 * x3 * x1,
        a3**2 * x1 * x2 + a4**2 * x4 * x5,
        a5**2 * x5 * x3,
        a6**2 * x3 * x4,
    ]
    return _bind_ode(QuadraticODE(ctx, f), bindings)


#: Default quadratic form for the ``nambu-family`` system: coefficients of
#: x^2, xy, y^2, xz, yz, z^2 in that order.
NAMBU_DEFAULT_Q = (3, 1, 2, 1, 2, 1)


def _make_ex11(q=NAMBU_DEFAULT_Q, **bindings):
    coeffs = [Fraction(c) for c in q]
    if len(coeffs) != 6:
        raise ValueError("q must give the 6 coefficients of x^2, xy, y^2, xz, yz, z^2")
    ctx = Context(("x", "y", "z"), ("alpha",))
    x, y, z = _vars(ctx)
    (alpha,) = _params(ctx, ("alpha",))
    cxx, cxy, cyy, cxz, cyz, czz = coeffs
    quad = (
        cxx * x**2 + cxy * x * y + cyy * y**2
        + cxz * x * z + cyz * y * z + czz * z**2
    )
    # Cross-product field of the two conserved ratios x/y and y^alpha * quad,
    # rescaled by y^(2-alpha): polynomial and quadratic for every alpha.
    qx = quad.differentiate("x")
    qy = quad.differentiate("y")
    qz = quad.differentiate("z")
    f = [-x * qz, -y * qz, alpha * quad + x * qx + y * qy]
    return _bind_ode(QuadraticODE(ctx, f), bindings)


_ENTRIES = [
    (
        BuiltinInfo(
            name="ex1",
            aliases=(),
            kind="ode-quadratic",
            variables="x1 x2",
            parameters="",
            options="",
            summary="planar quadratic field with a cubic conserved quantity",
        ),
        _make_ex1,
    ),
    (
        BuiltinInfo(
            name="ex2",
            aliases=(),
            kind="ode-quadratic",
            variables="x1 x2 x3",
            parameters="",
            options="",
            summary="volume-preserving 3D field with two quadratic invariants",
        ),
        _make_ex2,
    ),
    (
        BuiltinInfo(
            name="ex3",
            aliases=(),
            kind="ode-quadratic",
            variables="x1 x2",
            parameters="",
            options="",
            summary="planar homogeneous field with a quartic invariant",
        ),
        _make_ex3,
    ),
    (
        BuiltinInfo(
            name="ex4",
            aliases=("lagrange-top",),
            kind="ode-quadratic",
            variables="m1 m2 m3 p1 p2 p3",
            parameters="alpha gamma (and m3 when reduced)",
            options="reduced=<bool> (drop the constant component, m3 becomes a parameter)",
            summary="heavy-top field with one linear and three quadratic invariants",
        ),
        _make_ex4,
    ),
    (
        BuiltinInfo(
            name="ex5",
            aliases=(),
            kind="ode-quadratic",
            variables="x1 x2 x3 x4",
            parameters="",
            options="",
            summary="4D quadratic field admitting many affine second integrals",
        ),
        _make_ex5,
    ),
    (
        BuiltinInfo(
            name="ex6",
            aliases=(),
            kind="ode-quadratic",
            variables="x1 x2 x3 x4",
            parameters="",
            options="",
            summary="4D field whose discretization has constant-cofactor certificates",
        ),
        _make_ex6,
    ),
    (
        BuiltinInfo(
            name="ex7",
            aliases=("polarization-4d",),
            kind="map-rational",
            variables="x1 x2 x3 x4",
            parameters="h",
            options="",
            summary="4D birational map with a quartic common denominator",
        ),
        _make_ex7,
    ),
    (
        BuiltinInfo(
            name="ex8",
            aliases=("sine-gordon",),
            kind="map-rational",
            variables="x0 .. xk",
            parameters="alpha",
            options="k=<int >= 2> (default 2; map dimension is k+1)",
            summary="lattice-reduction family of birational maps in k+1 variables",
        ),
        _make_sine_gordon,
    ),
    (
        BuiltinInfo(
            name="ex9",
            aliases=("mcmillan-extended",),
            kind="map-rational",
            variables="x1 x2",
            parameters="a1 a2 a3 a4 a5 a6",
            options="",
            summary="planar birational map family with six free coefficients",
        ),
        _make_ex9,
    ),
    (
        BuiltinInfo(
            name="ex10",
            aliases=("coupled-euler-tops",),
            kind="ode-quadratic",
            variables="x1 x2 x3 x4 x5",
            parameters="a1 a2 a3 a4 a5 a6",
            options="",
            summary="two rigid-body fields coupled through a shared component",
        ),
        _make_ex10,
    ),
    (
        BuiltinInfo(
            name="ex11",
            aliases=("nambu-family",),
            kind="ode-quadratic",
            variables="x y z",
            parameters="alpha",
            options="q=<6 rationals> coefficients of x^2, xy, y^2, xz, yz, z^2 "
            f"(default {NAMBU_DEFAULT_Q})",
            summary="cross-product field family built from two conserved ratios",
        ),
        _make_ex11,
    ),
]

_REGISTRY = {}
for _info, _factory in _ENTRIES:
    _REGISTRY[_info.name] = (_info, _factory)
    for _alias in _info.aliases:
        _REGISTRY[_alias] = (_info, _factory)


def list_builtins():
    """All registered systems in registration order (primary names only)."""
    return [info for info, _ in _ENTRIES]


def builtin_info(name: str) -> BuiltinInfo:
    try:
        return _REGISTRY[name][0]
    except KeyError:
        raise UnknownExample(
            f"unknown system {name!r}; available: "
            + ", ".join(sorted(_REGISTRY))
        ) from None


def builtin(name: str, **options):
    """Construct a registered system.

    Keyword arguments bind the system's symbolic parameters to exact rationals
    or select structural options (see ``builtin_info(name).options``).
    """
    try:
        _, factory = _REGISTRY[name]
    except KeyError:
        raise UnknownExample(
            f"unknown system {name!r}; available: "
            + ", ".join(sorted(_REGISTRY))
        ) from None
    return factory(**options)
