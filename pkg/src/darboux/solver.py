"""Exact solver for the eigenpolynomial equation p(map(x)) = C(x) * p(x).

Given a rational map phi with denominator D and a candidate cofactor
C = Cn/Cd, a polynomial p of state degree <= d satisfies the equation iff

    pullback_numerator(p, d) * Cd  -  Cn * D^d * p  ==  0.

Collecting state-monomial coefficients of the left side gives a linear system
over the parameter field for the coefficient vector of p.  Solving proceeds in
three stages:

1. modular point prescreen -- evaluate the equation at random points modulo a
   word-size prime; a full-rank specialization proves the nullspace is trivial
   (specializing can only grow the nullspace), so candidates are rejected
   soundly and cheaply, and the surviving modular nullspaces reveal which
   monomials can appear in p (support discovery);
2. exact solve on the discovered support -- plain rational elimination when no
   parameters are present, fraction-field elimination for small symbolic
   systems, or per-node specialization of a single parameter followed by
   rational-function interpolation for large ones;
3. mandatory verification -- every returned certificate is re-checked against
   the defining identity exactly, so a bad reconstruction can never escape.

Random choices only ever cause fallbacks to slower exact routes, never wrong
output.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as int_gcd, lcm as int_lcm

import numpy as np

from .context import Context
from .errors import DarbouxError, VerificationFailed
from .cofactor import Cofactor, FactorBase, cofactor_candidates
from .gcd import gcd_list, lcm_poly
from .linalg import (
    MOD_PRIMES,
    batched_det_mod_p,
    nullspace,
    nullspace_mod_p,
    rank_mod_p,
)
from .maps import RationalMap
from .polynomial import Polynomial
from .rational import RationalFunction
from . import uni

DEFAULT_SPOT_POINTS = 8
_MAX_PARAM_NODES = 64


def thread_count(threads=None) -> int:
    """Worker count for candidate batches; DARBOUX_THREADS overrides default 1."""
    if threads is not None:
        return max(1, int(threads))
    return max(1, int(os.environ.get("DARBOUX_THREADS", "1")))


def _tick(counters, key, amount=1):
    if counters is not None:
        counters[key] = counters.get(key, 0) + amount


# -- cofactor normalization --------------------------------------------------------


def cofactor_parts(ctx: Context, cof):
    """(Cn, Cd) polynomials for a Cofactor, rational function, polynomial, or number."""
    if isinstance(cof, Cofactor):
        rf = cof.expand()
    elif isinstance(cof, RationalFunction):
        rf = cof
    elif isinstance(cof, Polynomial):
        rf = RationalFunction(cof, Polynomial.one(cof.ctx))
    else:
        rf = RationalFunction(
            Polynomial.constant(ctx, Fraction(cof)), Polynomial.one(ctx)
        )
    ctx.same(rf.num.ctx)
    return rf.num, rf.den


# -- linear system construction ----------------------------------------------------


def ascending_monomials(ctx: Context, degree: int):
    """State monomials of total degree <= degree, lowest graded-lex first."""
    return tuple(reversed(ctx.monomials_up_to(degree)))


def _shift(p: Polynomial, mono) -> Polynomial:
    """Multiply by the monomial with exponent vector mono."""
    if not any(mono):
        return p
    return Polynomial(
        p.ctx, {tuple(a + b for a, b in zip(e, mono)): c for e, c in p.terms.items()}
    )


@dataclass(frozen=True)
class LinearSystem:
    """Coefficient system rows for the eigenpolynomial equation.

    columns: state exponent vectors (ascending graded-lex) indexing the
    coefficients of p; rows: one per state monomial of the expanded identity,
    entries are parameter-only polynomials.
    """

    ctx: Context
    columns: tuple
    rows: tuple  # tuple of tuples of Polynomial

    @property
    def shape(self):
        return len(self.rows), len(self.columns)

    def fraction_matrix(self):
        """Rows as Fractions; requires a parameter-free system."""
        out = []
        for row in self.rows:
            out.append([e.constant_value() if not e.is_zero else Fraction(0) for e in row])
        return out


def build_linear_system(
    phi: RationalMap, cn: Polynomial, cd: Polynomial, degree: int, support=None
) -> LinearSystem:
    """Rows of pullback_numerator(p, degree)*Cd - Cn*D^degree*p over monomial support."""
    ctx = phi.ctx
    cols = tuple(support) if support is not None else ascending_monomials(ctx, degree)
    gm = phi.numerator_products(degree, support=list(cols))
    w = cn * phi.den**degree
    row_map: dict = {}
    for j, m in enumerate(cols):
        q = gm[m] * cd - _shift(w, m)
        for se, coeff in q.state_coefficients().items():
            row_map.setdefault(se, {})[j] = coeff
    zero = Polynomial.zero(ctx)
    rows = []
    for se in sorted(row_map, key=Context.monomial_key):
        entries = row_map[se]
        rows.append(tuple(entries.get(j, zero) for j in range(len(cols))))
    return LinearSystem(ctx, cols, tuple(rows))


# -- modular evaluation helpers ----------------------------------------------------


def _poly_mod(p: Polynomial, values, prime: int) -> int:
    """Evaluate at integer residues (one per context variable) modulo prime."""
    total = 0
    for e, c in p.terms.items():
        t = c.numerator % prime
        den = c.denominator % prime
        if den != 1:
            t = t * pow(den, -1, prime) % prime
        for v, d in zip(values, e):
            if d:
                t = t * pow(v, d, prime) % prime
        total = (total + t) % prime
    return total


def _fraction_mod(f: Fraction, prime: int) -> int:
    r = f.numerator % prime
    d = f.denominator % prime
    if d != 1:
        r = r * pow(d, -1, prime) % prime
    return r


@dataclass
class PointData:
    """Shared per-point-set evaluation tables for the modular prescreen."""

    prime: int
    columns: tuple
    image_monos: np.ndarray  # (T, M) mono_j(phi(pt_t)) mod prime
    point_monos: np.ndarray  # (T, M) mono_j(pt_t) mod prime
    factor_values: np.ndarray  # (F, T) factor_i(pt_t) mod prime


def _draw_point_data(
    phi: RationalMap,
    factors,
    columns,
    count: int,
    prime: int,
    rng: random.Random,
) -> PointData:
    """Random points where the denominator and every factor are nonzero mod prime.

    Every point in the set shares one random draw for the parameters: the
    coefficient vector of a certificate is constant only once the parameters
    are frozen, so mixing parameter values across points would reject true
    candidates.
    """
    ctx = phi.ctx
    ns = ctx.nstate
    param_vals = [rng.randrange(1, prime) for _ in range(ctx.nvars - ns)]
    pts = []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 200 * count + 200:
            raise DarbouxError("could not draw nondegenerate prescreen points")
        vals = [rng.randrange(1, prime) for _ in range(ns)] + param_vals
        dv = _poly_mod(phi.den, vals, prime)
        if dv == 0:
            continue
        fv = [_poly_mod(f, vals, prime) for f in factors]
        if any(v == 0 for v in fv):
            continue
        inv_d = pow(dv, -1, prime)
        image = [(_poly_mod(n, vals, prime) * inv_d) % prime for n in phi.numerators]
        pts.append((vals, image, fv))
    T, M = count, len(columns)

    def mono_row(values):
        row = []
        for m in columns:
            t = 1
            for v, d in zip(values[:ns], m[:ns]):
                if d:
                    t = t * pow(v, d, prime) % prime
            row.append(t)
        return row

    point_monos = np.array([mono_row(vals) for vals, _, _ in pts], dtype=np.int64)
    image_monos = np.array(
        [mono_row(img + vals[ns:]) for vals, img, _ in pts], dtype=np.int64
    )
    factor_values = np.array([[fv[i] for _, _, fv in pts] for i in range(len(factors))],
                             dtype=np.int64)
    return PointData(prime, tuple(columns), image_monos, point_monos, factor_values)


def _lambda_rows(data: PointData, exponent_rows, signs, units) -> np.ndarray:
    """(C, T) cofactor values at each point for each candidate exponent vector."""
    p = data.prime
    nfac, T = data.factor_values.shape
    C = len(exponent_rows)
    lam = np.empty((C, T), dtype=np.int64)
    for c in range(C):
        lam[c, :] = _fraction_mod(units[c], p) if units[c] != 1 else 1
    sign_col = np.array([1 if s > 0 else p - 1 for s in signs], dtype=np.int64)
    lam = lam * sign_col[:, None] % p
    exp_mat = np.array(exponent_rows, dtype=np.int64).reshape(C, nfac)
    for i in range(nfac):
        es = exp_mat[:, i]
        lo, hi = int(es.min()), int(es.max())
        if lo == 0 and hi == 0:
            continue
        base = data.factor_values[i]
        table = {0: np.ones(T, dtype=np.int64)}
        acc = np.ones(T, dtype=np.int64)
        for e in range(1, hi + 1):
            acc = acc * base % p
            table[e] = acc.copy()
        if lo < 0:
            inv = np.array([pow(int(v), -1, p) for v in base], dtype=np.int64)
            acc = np.ones(T, dtype=np.int64)
            for e in range(1, -lo + 1):
                acc = acc * inv % p
                table[-e] = acc.copy()
        lut = np.stack([table[e] for e in range(lo, hi + 1)])
        lam = lam * lut[es - lo] % p
    return lam


@dataclass
class ScreenResult:
    """Modular evidence for one cofactor candidate."""

    index: int
    cofactor: Cofactor
    nullity: int  # minimum modular nullity over the point sets (upper bound hint)
    support: tuple  # column indices whose coefficient can be nonzero


def prescreen_candidates(
    phi: RationalMap,
    base: FactorBase,
    candidates,
    degree: int,
    *,
    seed: int = 0,
    point_sets: int = 2,
    prime: int | None = None,
    threads=None,
    budget=None,
    counters=None,
):
    """Reject candidates whose modular specialization has full column rank.

    Returns ScreenResult entries (candidate order preserved) for survivors
    only.  Rejection is sound: a specialized full-rank system forces the
    generic nullspace to be trivial.  Survival is not a proof; the exact solve
    decides.
    """
    candidates = list(candidates)
    if not candidates:
        return []
    ctx = phi.ctx
    p = prime if prime is not None else MOD_PRIMES[0]
    cols = ascending_monomials(ctx, degree)
    M = len(cols)
    T = M + 4
    exps = [c.exponents for c in candidates]
    signs = [c.sign for c in candidates]
    units = [c.unit for c in candidates]
    datasets = []
    for s in range(point_sets):
        rng = random.Random(f"prescreen:{seed}:{s}")
        datasets.append(_draw_point_data(phi, base.factors, cols, T, p, rng))
        _tick(counters, "prescreen_points", T)

    workers = thread_count(threads)
    alive = list(range(len(candidates)))
    for data in datasets:
        lam = _lambda_rows(data, [exps[i] for i in alive], [signs[i] for i in alive],
                           [units[i] for i in alive])
        B = data.image_monos[:M]
        E = data.point_monos[:M]
        chunk = max(1, min(4096, 8_000_000 // max(1, M * M)))
        pieces = [
            (start, min(start + chunk, len(alive)))
            for start in range(0, len(alive), chunk)
        ]

        def run(piece):
            a, b = piece
            mats = (B[None, :, :] - lam[a:b, :M, None] * E[None, :, :]) % p
            return batched_det_mod_p(mats, p)

        if workers > 1 and len(pieces) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                dets = list(pool.map(run, pieces))
        else:
            dets = [run(piece) for piece in pieces]
        if budget is not None:
            budget.check("candidate prescreen")
        _tick(counters, "prescreen_dets", len(alive))
        flat = np.concatenate(dets) if dets else np.zeros(0, dtype=np.int64)
        alive = [i for i, d in zip(alive, flat) if d == 0]
        if not alive:
            return []

    results = []
    for i in alive:
        nullity = None
        support: set = set()
        keep = True
        for data in datasets:
            lam = _lambda_rows(data, [exps[i]], [signs[i]], [units[i]])
            full = (data.image_monos - lam[0][:, None] * data.point_monos) % p
            basis = nullspace_mod_p(full, p)
            if len(basis) == 0:
                keep = False
                break
            nullity = len(basis) if nullity is None else min(nullity, len(basis))
            for vec in basis:
                support.update(int(j) for j in np.nonzero(vec)[0])
        if keep:
            results.append(
                ScreenResult(i, candidates[i], nullity, tuple(sorted(support)))
            )
    _tick(counters, "prescreen_survivors", len(results))
    return results


# -- exact nullspace engines -------------------------------------------------------


def _vector_is_zero(vec) -> bool:
    return all(not e for e in vec)


def _primitive_poly_vector(entries):
    """Scale rational-function entries to a primitive integer-coefficient
    polynomial vector whose first nonzero entry has positive leading term."""
    polys = []
    denoms = [e.den for e in entries if e]
    if not denoms:
        return None
    L = denoms[0]
    for d in denoms[1:]:
        L = lcm_poly(L, d)
    for e in entries:
        if not e:
            polys.append(Polynomial.zero(e.num.ctx))
        else:
            polys.append(e.num * L.divexact(e.den))
    nonzero = [q for q in polys if not q.is_zero]
    g = gcd_list(nonzero)
    if not g.is_one:
        polys = [q.divexact(g) if not q.is_zero else q for q in polys]
        nonzero = [q for q in polys if not q.is_zero]
    num_gcd = 0
    den_lcm = 1
    for q in nonzero:
        c = q.content()
        num_gcd = int_gcd(num_gcd, c.numerator)
        den_lcm = int_lcm(den_lcm, c.denominator)
    scale = Fraction(den_lcm, num_gcd)
    first = next(q for q in polys if not q.is_zero)
    if first.leading()[1] * scale < 0:
        scale = -scale
    return [q * scale for q in polys]


def _canonical_basis(vectors, ctx: Context):
    """Echelonize vectors over the parameter fraction field; pivot on the
    lowest column, primitive-scale each row."""
    if not vectors:
        return []
    one = Polynomial.one(ctx)
    rf_rows = [
        [e if isinstance(e, RationalFunction) else RationalFunction(e, one) for e in v]
        for v in vectors
    ]
    red, _ = _rref_field(rf_rows, len(rf_rows[0]))
    out = []
    for row in red:
        if _vector_is_zero(row):
            continue
        out.append(_primitive_poly_vector(row))
    return out


def _rref_field(rows, ncols):
    """Reduced row echelon form over any field-like entries (truthiness,
    arithmetic, division)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _nullspace_rationals(system: LinearSystem):
    """Exact rational nullspace of a parameter-free system (Fraction entries)."""
    mat = system.fraction_matrix()
    return nullspace(mat, len(system.columns))


def _nullspace_symbolic(system: LinearSystem):
    """Nullspace over the parameter fraction field for small symbolic systems."""
    ctx = system.ctx
    one = Polynomial.one(ctx)
    rows = [
        [RationalFunction(e, one) for e in row]
        for row in system.rows
        if not all(x.is_zero for x in row)
    ]
    if not rows:
        zero = RationalFunction(Polynomial.zero(ctx), one)
        one_rf = RationalFunction(one, one)
        return [
            [one_rf if j == k else zero for j in range(len(system.columns))]
            for k in range(len(system.columns))
        ]
    zero = RationalFunction(Polynomial.zero(ctx), one)
    one_rf = RationalFunction(one, one)
    return nullspace(rows, len(system.columns), one=one_rf, zero=zero)


def _specialize_map(phi: RationalMap, name: str, value: Fraction):
    assign = {name: value}
    den = phi.den.evaluate(assign)
    if den.is_zero:
        return None
    nums = [n.evaluate(assign) for n in phi.numerators]
    return RationalMap(phi.ctx, nums, den)


def _node_matrix(phi, cn, cd, degree, support, name, t):
    """Fraction matrix of the system specialized at parameter value t."""
    phi_t = _specialize_map(phi, name, t)
    if phi_t is None:
        return None
    cn_t = cn.evaluate({name: t})
    cd_t = cd.evaluate({name: t})
    if cd_t.is_zero:
        return None
    system = build_linear_system(phi_t, cn_t, cd_t, degree, support=support)
    return system.fraction_matrix()


def _nullspace_param_nodes(
    phi, cn, cd, degree, support, *, seed=0, budget=None, counters=None
):
    """Single-parameter route: exact nullspaces at rational parameter nodes,
    entrywise rational-function interpolation in the parameter, denominator
    clearing.  Returns None when no stable consensus or fit emerges (caller
    falls back to the symbolic engine)."""
    ctx = phi.ctx
    name = ctx.names[ctx.nstate]
    ncols = len(support)

    good_nodes = []  # (t, basis rows as Fractions)
    consensus = None  # (nullity, free column tuple)
    t_int = 0
    needed = 6

    def collect(upto):
        nonlocal t_int, consensus
        while len(good_nodes) < upto:
            t_int += 1
            if t_int > _MAX_PARAM_NODES:
                return False
            t = Fraction(t_int)
            mat = _node_matrix(phi, cn, cd, degree, support, name, t)
            if mat is None:
                continue
            basis = nullspace(mat, ncols)
            _tick(counters, "param_nodes")
            if budget is not None:
                budget.check("parameter node solve")
            free = _free_columns(basis, ncols)
            key = (len(basis), free)
            if consensus is None or key[0] < consensus[0]:
                consensus = key
                good_nodes.clear()
            if consensus[0] == 0:
                # the node matrix is an evaluation of the generic system, so
                # full rank at one valid node proves the generic space is zero
                return True
            if key == consensus:
                good_nodes.append((t, basis))
        return True

    if not collect(needed):
        return None
    if consensus[0] == 0:
        return []

    while True:
        if consensus[0] == 0:
            return []
        xs = [t for t, _ in good_nodes]
        fits = []
        ok = True
        k = consensus[0]
        for vi in range(k):
            row_fits = []
            for j in range(ncols):
                ys = [basis[vi][j] for _, basis in good_nodes]
                if all(y == ys[0] for y in ys):
                    row_fits.append(([ys[0]], [Fraction(1)]))
                    continue
                fit = uni.fit_rational(xs, ys)
                if fit is None:
                    ok = False
                    break
                row_fits.append(fit)
            if not ok:
                break
            fits.append(row_fits)
        if ok:
            # validate on two fresh nodes
            hold = len(good_nodes) + 2
            if not collect(hold):
                return None
            if consensus[0] != k:
                continue  # a later node lowered the nullity; refit
            valid = True
            for t, basis in good_nodes[-2:]:
                for vi in range(k):
                    for j in range(ncols):
                        num, den = fits[vi][j]
                        dv = uni.evaluate(den, t)
                        if dv == 0 or uni.evaluate(num, t) / dv != basis[vi][j]:
                            valid = False
                            break
                    if not valid:
                        break
                if not valid:
                    break
            if valid:
                return [_fits_to_vector(row_fits, ctx, name) for row_fits in fits]
        needed = max(len(good_nodes) + 4, (len(good_nodes) * 3) // 2)
        if needed > _MAX_PARAM_NODES:
            return None
        if not collect(needed):
            return None


def _free_columns(basis, ncols):
    """Identity columns of an RREF-canonical nullspace basis."""
    free = []
    for vec in basis:
        for j in range(ncols):
            if vec[j] == 1 and all(
                other[j] == 0 for other in basis if other is not vec
            ):
                free.append(j)
                break
    return tuple(sorted(free))


def _uni_to_poly(coeffs, ctx: Context, name: str) -> Polynomial:
    unit = ctx.unit_exponent(name)
    terms = {}
    for i, c in enumerate(coeffs):
        if c:
            terms[tuple(u * i for u in unit)] = Fraction(c)
    if not terms:
        return Polynomial.zero(ctx)
    return Polynomial(ctx, terms)


def _fits_to_vector(row_fits, ctx: Context, name: str):
    entries = []
    for num, den in row_fits:
        entries.append(
            RationalFunction(_uni_to_poly(num, ctx, name), _uni_to_poly(den, ctx, name))
        )
    return _primitive_poly_vector(entries)


# -- verification ------------------------------------------------------------------


def verify_certificate(
    phi: RationalMap,
    p: Polynomial,
    cofactor,
    *,
    seed: int = 0,
    spot_points: int = DEFAULT_SPOT_POINTS,
    method: str = "auto",
) -> bool:
    """Exact check of p(phi(x))*Cd == Cn*D^d*p(x), plus random spot checks.

    method "symbolic" expands the identity directly; "nodes" (single
    parameter only) proves it by specializing the parameter at one more
    rational node than the identity's parameter degree -- equally exact,
    far cheaper when the expanded product would be huge.
    """
    ctx = phi.ctx
    cn, cd = cofactor_parts(ctx, cofactor)
    if p.is_zero:
        return False
    d = p.state_total_degree()
    if method == "auto":
        nparam = ctx.nvars - ctx.nstate
        cost = len(p) * max(
            [len(phi.den)] + [len(n) for n in phi.numerators]
        ) * max(1, d)
        method = "nodes" if nparam == 1 and cost > 400_000 else "symbolic"

    if method == "nodes":
        name = ctx.names[ctx.nstate]
        db = max(n.degree_in(name) for n in list(phi.numerators) + [phi.den])
        bound = (
            p.degree_in(name)
            + d * db
            + max(cn.degree_in(name), cd.degree_in(name))
            + 1
        )
        checked = 0
        t_int = 0
        while checked < bound:
            t_int += 1
            if t_int > bound + _MAX_PARAM_NODES:
                return False
            t = Fraction(t_int)
            phi_t = _specialize_map(phi, name, t)
            if phi_t is None:
                continue
            cn_t = cn.evaluate({name: t})
            cd_t = cd.evaluate({name: t})
            p_t = p.evaluate({name: t})
            if cd_t.is_zero:
                continue
            lhs = phi_t.pullback_numerator(p_t, d) * cd_t
            rhs = cn_t * phi_t.den**d * p_t
            if not (lhs - rhs).is_zero:
                return False
            checked += 1
    else:
        lhs = phi.pullback_numerator(p, d) * cd
        rhs = cn * phi.den**d * p
        if not (lhs - rhs).is_zero:
            return False

    rng = random.Random(f"verify:{seed}")
    done = 0
    attempts = 0
    while done < spot_points and attempts < 50 * spot_points + 50:
        attempts += 1
        pt = {n: Fraction(rng.randint(-9, 9)) for n in ctx.names}
        if phi.den.value(pt) == 0 or cd.value(pt) == 0:
            continue
        image = phi.apply(pt)
        lv = p.value(image)
        rv = cn.value(pt) / cd.value(pt) * p.value(pt)
        if lv != rv:
            return False
        done += 1
    return done == spot_points


# -- top-level solve ---------------------------------------------------------------


@dataclass(frozen=True)
class DarbouxCertificate:
    """One verified solution p of p(map(x)) = C(x) p(x)."""

    polynomial: Polynomial
    cofactor: object  # Cofactor when enumerated, else rational function
    degree_bound: int
    engine: str
    verified: bool = True

    def cofactor_rational(self) -> RationalFunction:
        if isinstance(self.cofactor, Cofactor):
            return self.cofactor.expand()
        if isinstance(self.cofactor, Polynomial):
            return RationalFunction(self.cofactor, Polynomial.one(self.cofactor.ctx))
        return self.cofactor

    def to_text(self) -> str:
        c = self.cofactor.to_text() if isinstance(self.cofactor, Cofactor) else (
            self.cofactor_rational().to_text()
        )
        return f"p = {self.polynomial.to_text()}   with cofactor {c}"


def _vector_to_polynomial(vec, columns, ctx: Context) -> Polynomial:
    total = Polynomial.zero(ctx)
    for q, m in zip(vec, columns):
        if q.is_zero:
            continue
        total = total + _shift(q, m)
    return total


def solve_darboux(
    phi: RationalMap,
    cofactor,
    degree: int,
    *,
    support=None,
    seed: int = 0,
    budget=None,
    counters=None,
    prescreen: bool = True,
    engine: str | None = None,
):
    """All polynomials of state degree <= degree satisfying p(phi) = C*p.

    Returns a list of DarbouxCertificate forming an echelonized,
    primitive-scaled basis of the solution space (empty when only p = 0
    works).  Every certificate is verified before being returned.
    """
    ctx = phi.ctx
    cn, cd = cofactor_parts(ctx, cofactor)
    cols_all = ascending_monomials(ctx, degree)
    modular_nullity = None
    chosen = None
    if support is not None:
        chosen = tuple(tuple(m) for m in support)
    elif prescreen:
        if isinstance(cofactor, Cofactor):
            base = cofactor.base
            screens = prescreen_candidates(
                phi, base, [cofactor], degree,
                seed=seed, budget=budget, counters=counters,
            )
        else:
            base = FactorBase(ctx, (cn, cd), (1, -1), Fraction(1))
            probe = Cofactor(base, 1, (1, -1))
            screens = prescreen_candidates(
                phi, base, [probe], degree,
                seed=seed, budget=budget, counters=counters,
            )
        if not screens:
            return []
        modular_nullity = screens[0].nullity
        chosen = tuple(cols_all[j] for j in screens[0].support)
    if chosen is None or not chosen:
        chosen = cols_all

    vectors, used_engine = _solve_on_support(
        phi, cn, cd, degree, chosen, seed=seed, budget=budget,
        counters=counters, engine=engine,
    )

    if (
        modular_nullity is not None
        and chosen is not cols_all
        and len(vectors) < modular_nullity
        and len(chosen) < len(cols_all)
    ):
        # the modular hint may overcount (special point or prime) -- re-solve
        # without the support restriction to certify the dimension exactly
        vectors, used_engine = _solve_on_support(
            phi, cn, cd, degree, cols_all, seed=seed, budget=budget,
            counters=counters, engine=engine,
        )
        chosen = cols_all

    basis = _canonical_basis(vectors, ctx)
    certs = []
    for vec in basis:
        p = _vector_to_polynomial(vec, chosen, ctx)
        if p.is_zero:
            continue
        if not verify_certificate(phi, p, cofactor, seed=seed):
            raise VerificationFailed(
                f"candidate certificate failed exact verification "
                f"(engine {used_engine}); this is an internal error"
            )
        _tick(counters, "verified_certificates")
        certs.append(
            DarbouxCertificate(p, cofactor, degree, used_engine)
        )
    return certs


def _solve_on_support(
    phi, cn, cd, degree, columns, *, seed, budget, counters, engine=None
):
    ctx = phi.ctx
    nparam = ctx.nvars - ctx.nstate
    _tick(counters, "exact_solves")
    if nparam == 0:
        system = build_linear_system(phi, cn, cd, degree, support=columns)
        one = Polynomial.one(ctx)
        vecs = [
            [RationalFunction(Polynomial.constant(ctx, f), one) for f in v]
            for v in _nullspace_rationals(system)
        ]
        return vecs, "rational"
    if engine == "symbolic" or (engine is None and nparam > 1):
        system = build_linear_system(phi, cn, cd, degree, support=columns)
        if budget is not None:
            budget.check("symbolic solve")
        return _nullspace_symbolic(system), "symbolic"
    if nparam == 1 and engine in (None, "parameter-nodes"):
        vecs = _nullspace_param_nodes(
            phi, cn, cd, degree, columns, seed=seed, budget=budget,
            counters=counters,
        )
        if vecs is not None:
            one = Polynomial.one(ctx)
            return [
                [RationalFunction(q, one) for q in v] for v in vecs
            ], "parameter-nodes"
    system = build_linear_system(phi, cn, cd, degree, support=columns)
    if budget is not None:
        budget.check("symbolic solve")
    return _nullspace_symbolic(system), "symbolic"


def darboux_search(
    phi: RationalMap,
    degree: int,
    *,
    max_exp: int = 2,
    superfactors: bool = True,
    cap=None,
    seed: int = 0,
    budget=None,
    threads=None,
    counters=None,
    extra_cofactors=(),
):
    """Enumerate cofactor candidates from the map's Jacobian factors, screen
    them modulo a prime, and exactly solve the survivors.

    Returns (base, results) where results is a list of (cofactor,
    [DarbouxCertificate]) with a nonempty certificate list, in candidate
    enumeration order.
    """
    base = FactorBase.from_map(phi)
    kwargs = {"max_exp": max_exp, "include_superfactors": superfactors}
    if cap is not None:
        kwargs["cap"] = cap
    candidates = list(cofactor_candidates(base, **kwargs))
    for extra in extra_cofactors:
        if isinstance(extra, Cofactor) and all(
            extra.key() != c.key() for c in candidates
        ):
            candidates.append(extra)
    _tick(counters, "candidates", len(candidates))
    screens = prescreen_candidates(
        phi, base, candidates, degree,
        seed=seed, threads=threads, budget=budget, counters=counters,
    )
    cols_all = ascending_monomials(phi.ctx, degree)
    results = []
    for sc in screens:
        support = tuple(cols_all[j] for j in sc.support)
        certs = solve_darboux(
            phi, sc.cofactor, degree,
            support=support, seed=seed, budget=budget, counters=counters,
        )
        if not certs and sc.nullity:
            # support hint may have been too small; retry unrestricted
            certs = solve_darboux(
                phi, sc.cofactor, degree,
                support=None, prescreen=False, seed=seed, budget=budget,
                counters=counters,
            )
        # a state-constant solution exists exactly when the multiplier is 1
        # and divides nothing; keep only genuine invariant divisors
        certs = [c for c in certs if c.polynomial.state_total_degree() > 0]
        if certs:
            results.append((sc.cofactor, certs))
        if budget is not None:
            budget.check("candidate solve")
    return base, results
