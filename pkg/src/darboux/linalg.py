"""Exact and modular linear algebra.

Three layers:

* dense reduced row echelon form over any field-like Python type that
  supports arithmetic operators and truthiness (Fraction, RationalFunction),
* fraction-free Bareiss determinants over polynomial entries with
  sparsity-aware pivoting,
* numpy-vectorized arithmetic mod word-sized primes, used for rank bounds
  and reconstruction pipelines. Primes sit just below 2^30 so products of
  two residues stay inside int64.

Rank facts transfer one way only: full rank mod p implies full rank over Q,
never the converse; callers rely on that direction alone.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numpy as np

from .polynomial import Polynomial

# primes just below 2^30 (p*p < 2^63 keeps int64 products exact)
MOD_PRIMES = (
    1073741789,
    1073741783,
    1073741741,
    1073741723,
    1073741719,
    1073741717,
    1073741689,
    1073741671,
)


# -- generic dense RREF -------------------------------------------------------


def rref(rows, ncols):
    """Reduced row echelon form in place semantics-free (returns new rows).

    rows: list of lists of field elements. Returns (new_rows, pivot_cols).
    Pivot choice is the first nonzero entry scanning columns left to right,
    rows top to bottom, so output is deterministic.
    """
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pr = i
                break
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


def nullspace(rows, ncols, one=Fraction(1), zero=Fraction(0)):
    """Basis of the right kernel, one vector per free column, RREF-canonical."""
    red, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def rank(rows, ncols):
    return len(rref(rows, ncols)[0])


# -- Bareiss determinant over polynomial entries ----------------------------------


def bareiss_det(matrix) -> Polynomial:
    """Exact determinant of a square matrix of Polynomials.

    Fraction-free one-step Bareiss with pivoting that prefers small entries in
    sparse rows/columns; row and column swaps tracked by sign.
    """
    n = len(matrix)
    if n == 0:
        raise ValueError("determinant of empty matrix")
    ctx = matrix[0][0].ctx
    m = [list(r) for r in matrix]
    sign = 1
    prev = Polynomial.one(ctx)
    for k in range(n - 1):
        # pick pivot minimizing fill-in estimate among nonzero candidates
        best = None
        best_score = None
        for i in range(k, n):
            for j in range(k, n):
                if m[i][j].is_zero:
                    continue
                row_nnz = sum(1 for jj in range(k, n) if not m[i][jj].is_zero)
                col_nnz = sum(1 for ii in range(k, n) if not m[ii][j].is_zero)
                score = (
                    (row_nnz - 1) * (col_nnz - 1),
                    len(m[i][j].terms),
                    i,
                    j,
                )
                if best_score is None or score < best_score:
                    best_score = score
                    best = (i, j)
        if best is None:
            return Polynomial.zero(ctx)
        bi, bj = best
        if bi != k:
            m[k], m[bi] = m[bi], m[k]
            sign = -sign
        if bj != k:
            for row in m:
                row[k], row[bj] = row[bj], row[k]
            sign = -sign
        piv = m[k][k]
        for i in range(k + 1, n):
            rik = m[i][k]
            if rik.is_zero:
                for j in range(k + 1, n):
                    if not m[i][j].is_zero:
                        m[i][j] = (piv * m[i][j]).divexact(prev)
            else:
                for j in range(k + 1, n):
                    m[i][j] = (piv * m[i][j] - rik * m[k][j]).divexact(prev)
            m[i][k] = Polynomial.zero(ctx)
        prev = piv
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


# -- integer lattice algebra -----------------------------------------------------


def hnf_with_transform(mat):
    """Row Hermite normal form H = U*M with U unimodular.

    Pivots positive, entries above each pivot reduced into [0, pivot),
    zero rows pushed to the bottom. Returns (H, U) as lists of lists of int.
    """
    m = [list(map(int, r)) for r in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    r = 0
    for c in range(cols):
        # euclidean reduction on rows r..end in column c
        while True:
            nz = [i for i in range(r, rows) if m[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            if i0 != r:
                m[r], m[i0] = m[i0], m[r]
                u[r], u[i0] = u[i0], u[r]
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
                u[r] = [-x for x in u[r]]
            done = True
            for i in range(r + 1, rows):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    if q:
                        m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                        u[i] = [a - q * b for a, b in zip(u[i], u[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < rows and m[r][c]:
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[r])]
            r += 1
            if r == rows:
                break
    return m, u


def integer_row_kernel(mat):
    """Basis of {a in Z^rows : a * M = 0}, via the HNF transform."""
    h, u = hnf_with_transform(mat)
    return [u[i] for i in range(len(h)) if not any(h[i])]


def hnf_basis(vectors):
    """Canonical (HNF, zero rows dropped) basis of the lattice the rows span."""
    if not vectors:
        return []
    h, _ = hnf_with_transform(vectors)
    return [r for r in h if any(r)]


# -- modular linear algebra -------------------------------------------------------


def _as_mod_array(a, p):
    arr = np.asarray(a, dtype=np.int64) % p
    return arr


def rref_mod_p(a, p):
    """(rref, pivot columns) of an int64 array mod p."""
    m = _as_mod_array(a, p).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        other = np.nonzero(m[:, c])[0]
        other = other[other != r]
        if other.size:
            m[other] = (m[other] - np.outer(m[other, c], m[r])) % p
        pivots.append(c)
        r += 1
    return m[: len(pivots)], pivots


def rank_mod_p(a, p) -> int:
    return len(rref_mod_p(a, p)[1])


def nullspace_mod_p(a, p):
    """Right-kernel basis mod p, canonical RREF parametrization, rows = vectors."""
    m = _as_mod_array(a, p)
    red, pivots = rref_mod_p(m, p)
    cols = m.shape[1]
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = (-int(red[r, fc])) % p
    return basis


# -- reconstruction -----------------------------------------------------------------


def crt_pair(r1: int, m1: int, r2: int, m2: int):
    """Combine residues into one mod m1*m2 (moduli must be coprime)."""
    inv = pow(m1 % m2, m2 - 2, m2) if _is_probable_prime(m2) else pow(m1, -1, m2)
    t = ((r2 - r1) * inv) % m2
    return r1 + m1 * t, m1 * m2


def _is_probable_prime(n: int) -> bool:
    return n in MOD_PRIMES


def rational_reconstruct(r: int, m: int):
    """Fraction n/d with n = r*d mod m, |n|, d <= sqrt(m/2); None if absent."""
    r %= m
    if r == 0:
        return Fraction(0)
    bound = isqrt((m - 1) // 2)
    a0, a1 = m, r
    t0, t1 = 0, 1
    while a1 > bound:
        q = a0 // a1
        a0, a1 = a1, a0 - q * a1
        t0, t1 = t1, t0 - q * t1
    if a1 == 0 or abs(t1) > bound:
        return None
    if t1 < 0:
        a1, t1 = -a1, -t1
    from math import gcd as _gcd

    if _gcd(abs(a1), t1) != 1 or _gcd(t1, m) != 1:
        return None
    return Fraction(a1, t1)


def reconstruct_vector(residues, modulus):
    """Rational vector from residues mod modulus; None if any entry fails."""
    out = []
    for r in residues:
        q = rational_reconstruct(int(r), modulus)
        if q is None:
            return None
        out.append(q)
    return out


# -- batched modular kernels ---------------------------------------------------------


def mod_pow_array(base, exponent: int, p: int):
    """Elementwise base**exponent mod p for int64 arrays (square and multiply)."""
    result = np.ones_like(base)
    b = base % p
    e = exponent
    while e > 0:
        if e & 1:
            result = (result * b) % p
        b = (b * b) % p
        e >>= 1
    return result


def batched_det_mod_p(mats, p: int):
    """Determinants of a (C, M, M) int64 stack mod p, vectorized over C."""
    a = np.array(mats, dtype=np.int64) % p
    nbatch, m, m2 = a.shape
    if m != m2:
        raise ValueError("square matrices required")
    det = np.ones(nbatch, dtype=np.int64)
    for k in range(m):
        col = a[:, k:, k]
        nz = col != 0
        has_pivot = nz.any(axis=1)
        det[~has_pivot] = 0
        piv_rel = nz.argmax(axis=1)
        swap = has_pivot & (piv_rel != 0)
        idx = np.nonzero(swap)[0]
        if idx.size:
            rows_k = a[idx, k].copy()
            a[idx, k] = a[idx, k + piv_rel[idx]]
            a[idx, k + piv_rel[idx]] = rows_k
            det[idx] = (-det[idx]) % p
        live = np.nonzero(has_pivot)[0]
        if live.size == 0:
            break
        pivot = a[live, k, k]
        det[live] = (det[live] * pivot) % p
        inv = mod_pow_array(pivot, p - 2, p)
        if k + 1 < m:
            factor_col = (a[live, k + 1 :, k] * inv[:, None]) % p
            a[live, k + 1 :, :] = (
                a[live, k + 1 :, :] - factor_col[:, :, None] * a[live, None, k, :]
            ) % p
    return det % p
