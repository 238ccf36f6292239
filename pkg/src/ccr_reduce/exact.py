"""Exact rational linear algebra.

A small, dependency-free backend over :class:`fractions.Fraction` used as an
oracle for the floating point routines in :mod:`ccr_reduce.symspace`.  Matrices
are lists of rows.  Only integer or rational input is accepted.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(rows) -> Matrix:
    out = []
    for row in rows:
        out.append([Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator() for x in row])
    return out


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(row) for row in m]
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                factor = a[i][c]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix) -> int:
    """Rank by fraction-free (Bareiss) elimination on integerized rows."""
    rows = [_integer_row(row) for row in m]
    rows = [row for row in rows if any(row)]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            rows[i] = [(rows[r][c] * rows[i][j] - rows[i][c] * rows[r][j]) // prev for j in range(ncols)]
        prev = rows[r][c]
        r += 1
        if r == len(rows):
            break
    return r


def nullspace(m: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : m x = 0}, one vector per free column."""
    if not m:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    n = len(m[0])
    r, pivots = rref(m)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(r, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def integer_vector(v: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to a primitive integer vector."""
    return _integer_row(v)


def _integer_row(v) -> list[int]:
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g > 1 else ints


def columns(vectors: Sequence[Sequence]) -> Matrix:
    """Matrix whose columns are the given vectors."""
    return transpose(to_fractions(vectors)) if vectors else []


def span_rank(vectors: Sequence[Sequence]) -> int:
    return rank(to_fractions(vectors)) if vectors else 0


def commutant_basis(form: Matrix, vectors: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact basis of {f : f^T form g = 0 for all given g}."""
    n = len(form)
    if not vectors:
        return nullspace([], n)
    conditions = transpose(matmul(form, columns(vectors)))
    return nullspace(conditions)


def intersection_basis(u: Sequence[Sequence], v: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact basis of span(u) ∩ span(v)."""
    if not u or not v:
        return []
    uu, vv = to_fractions(u), to_fractions(v)
    stacked = transpose(uu + [[-x for x in row] for row in vv])
    coeffs = nullspace(stacked)
    out = []
    for c in coeffs:
        w = [sum((ci * ui[k] for ci, ui in zip(c[: len(uu)], uu)), Fraction(0)) for k in range(len(uu[0]))]
        out.append(w)
    return out if span_rank(out) == len(out) else _independent(out)


def _independent(vectors):
    kept: list = []
    for v in vectors:
        if span_rank(kept + [v]) > len(kept):
            kept.append(v)
    return kept


def restricted_form_rank(form: Matrix, vectors: Sequence[Sequence]) -> int:
    """Rank of the Gram matrix of the form on the given vectors."""
    if not vectors:
        return 0
    s = columns(vectors)
    return rank(matmul(transpose(s), matmul(form, s)))
