from fractions import Fraction

import numpy as np
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ccr_reduce import exact
from ccr_reduce.symspace import numerical_rank

small_ints = st.integers(-3, 3)


def int_matrix(rows, cols):
    return st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: int_matrix(r, c))))
def test_rank_matches_sympy(m):
    assert exact.rank(exact.to_fractions(m)) == sympy.Matrix(m).rank()


@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: int_matrix(r, c))))
def test_nullspace_is_kernel(m):
    fm = exact.to_fractions(m)
    basis = exact.nullspace(fm)
    assert len(basis) == len(m[0]) - exact.rank(fm)
    for v in basis:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in fm)


@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: int_matrix(r, c))))
def test_float_rank_agrees_with_exact(m):
    assert numerical_rank(np.array(m, dtype=float)) == exact.rank(exact.to_fractions(m))


def test_rref_example():
    r, piv = exact.rref(exact.to_fractions([[2, 4], [1, 3]]))
    assert piv == [0, 1]
    assert r == [[1, 0], [0, 1]]


def test_integer_vector_clears_denominators():
    assert exact.integer_vector([Fraction(1, 2), Fraction(-1, 3)]) == [3, -2]


def test_commutant_of_q_axis_in_darboux_plane():
    form = [[0, 1], [-1, 0]]
    comm = exact.commutant_basis(exact.to_fractions(form), [[1, 0]])
    assert len(comm) == 1
    assert exact.span_rank(comm + [[1, 0]]) == 1


def test_restricted_form_rank():
    form = exact.to_fractions([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    assert exact.restricted_form_rank(form, [[1, 0, 0, 0], [0, 1, 0, 0]]) == 2
    assert exact.restricted_form_rank(form, [[1, 0, 0, 0], [0, 0, 1, 0]]) == 0


def test_intersection_basis():
    u = [[1, 0, 0], [0, 1, 0]]
    v = [[0, 1, 0], [0, 0, 1]]
    inter = exact.intersection_basis(u, v)
    assert len(inter) == 1
    assert exact.span_rank(inter + [[0, 1, 0]]) == 1
