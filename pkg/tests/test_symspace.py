import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccr_reduce import exact
from ccr_reduce.errors import InvalidArgument, PreconditionViolation
from ccr_reduce.symspace import (
    Subspace,
    SymplecticSpace,
    commutant,
    darboux,
    double_commutant_holds,
    form_eval,
    is_first_class,
    is_nondegenerate,
    quotient,
    radical,
    subspace_contains,
    subspace_equal,
    subspace_intersect,
    subspace_sum,
)
from ccr_reduce.suites import random_first_class

# Darboux coordinates are ordered (q1, p1, q2, p2, ...)
Q1, P1, Q2, P2 = np.eye(4)


@pytest.fixture
def r4():
    return darboux(2)


def span(space, *vecs):
    return space.span(np.array(vecs)) if vecs else space.zero()


def test_form_eval_examples(r4):
    r2 = darboux(1)
    assert form_eval(r2, [1, 0], [0, 1]) == 1.0
    assert form_eval(r4, Q1 + Q2, P1 - P2) == 0.0
    f = np.array([0.3, -1.2, 2.0, 0.7])
    assert form_eval(r4, f, f) == 0.0


def test_form_eval_dimension_mismatch(r4):
    with pytest.raises(InvalidArgument):
        form_eval(r4, [1, 0], [0, 1, 0, 0])


def test_space_rejects_symmetric_form():
    with pytest.raises(InvalidArgument):
        SymplecticSpace(np.eye(2))


def test_commutant_examples(r4):
    assert subspace_equal(commutant(span(r4, Q1)), span(r4, Q1, Q2, P2))
    assert subspace_equal(commutant(r4.zero()), r4.full())
    assert commutant(r4.full()).rank == 0


def test_radical_examples(r4):
    assert radical(darboux(1).full()).rank == 0
    assert subspace_equal(radical(span(r4, Q1, Q2)), span(r4, Q1, Q2))
    assert subspace_equal(radical(span(r4, Q1, P1, Q2)), span(r4, Q2))


def test_first_class_examples(r4):
    assert is_first_class(span(r4, Q1))
    assert not is_first_class(span(r4, Q1, P1))
    assert is_first_class(r4.zero())


def test_double_commutant_examples(r4):
    assert double_commutant_holds(span(r4, Q1))
    assert double_commutant_holds(r4.zero())
    assert double_commutant_holds(r4.full())


def test_double_commutant_fails_on_degenerate_form():
    # form with a one-dimensional radical: {0}'' = radical, not {0}
    form = np.zeros((3, 3))
    form[0, 1], form[1, 0] = 1, -1
    space = SymplecticSpace(form)
    assert not double_commutant_holds(space.zero())


def test_quotient_examples(r4):
    q = quotient(span(r4, Q1, Q2, P2), span(r4, Q1))
    assert q.repDim == 2
    np.testing.assert_allclose(np.abs(q.factoredForm), [[0, 1], [1, 0]], atol=1e-12)
    assert abs(np.linalg.det(q.factoredForm) - 1) < 1e-12
    assert quotient(span(r4, Q1), span(r4, Q1)).repDim == 0
    w = span(r4, Q1, P1, Q2)
    q0 = quotient(w, r4.zero())
    assert q0.repDim == 3
    # change of basis between the stored bases
    m = w.basis.T @ q0.liftMap
    np.testing.assert_allclose(m.T @ r4.gram(w.basis) @ m, q0.factoredForm, atol=1e-12)


def test_quotient_kernel_outside_radical(r4):
    with pytest.raises(PreconditionViolation, match="radical"):
        quotient(r4.full(), span(r4, Q1))


def test_quotient_kernel_not_contained(r4):
    with pytest.raises(PreconditionViolation):
        quotient(span(r4, Q2), span(r4, Q1))


def test_nondegeneracy_examples(r4):
    assert is_nondegenerate(darboux(1).full())
    assert not is_nondegenerate(span(r4, Q1, Q2))
    assert is_nondegenerate(r4.full())


def test_lattice_operations(r4):
    assert subspace_equal(subspace_sum(span(r4, Q1), span(r4, P1)), span(r4, Q1, P1))
    assert subspace_equal(subspace_intersect(span(r4, Q1, Q2), span(r4, Q2, P2)), span(r4, Q2))
    assert subspace_contains(r4.full(), span(r4, [1.0, 2.0, -3.0, 0.5]))


def test_ambient_mismatch(r4):
    with pytest.raises(InvalidArgument):
        subspace_sum(span(r4, Q1), darboux(2).full())


def test_canonical_basis_is_span_invariant(r4):
    a = r4.span([[1, 1, 0, 0], [0, 1, 0, 0]])
    b = r4.span([[2, 0, 0, 0], [0, 3, 0, 0]])
    np.testing.assert_allclose(a.basis, b.basis, atol=1e-14)


@given(st.integers(0, 10_000))
def test_ranks_agree_with_exact_oracle(seed):
    inst = random_first_class(np.random.default_rng(seed), max_dim=8)
    form = np.array(inst["form"], dtype=float)
    space = SymplecticSpace(form)
    vecs = inst["vectors"]
    s = Subspace(space, np.array(vecs, dtype=float).T if vecs else np.zeros((len(form), 0)))
    assert s.rank == exact.span_rank(vecs)
    assert is_first_class(s)
    assert commutant(s).rank == len(exact.commutant_basis(exact.to_fractions(inst["form"]), vecs))


@given(st.integers(0, 10_000))
def test_commutant_properties(seed):
    rng = np.random.default_rng(seed)
    space = darboux(int(rng.integers(1, 5)))
    k = int(rng.integers(0, space.dim + 1))
    s = Subspace(space, rng.normal(size=(space.dim, k)))
    c = commutant(s)
    assert c.rank == space.dim - s.rank
    if s.rank and c.rank:
        assert np.max(np.abs(space.gram(s.basis, c.basis))) < 1e-10
    # nondegenerate ambient form: s'' = s
    assert double_commutant_holds(s)
    # antitone
    t = Subspace(space, np.hstack([s.basis, rng.normal(size=(space.dim, 1))]))
    assert subspace_contains(c, commutant(t))


@given(st.integers(0, 10_000))
def test_form_antisymmetry(seed):
    rng = np.random.default_rng(seed)
    space = darboux(3)
    f, h = rng.normal(size=6), rng.normal(size=6)
    assert form_eval(space, f, h) == pytest.approx(-form_eval(space, h, f), abs=1e-12)
    assert form_eval(space, f, f) == pytest.approx(0.0, abs=1e-12)
