import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccr_reduce.errors import FirstClassViolation, InvalidArgument, StageAdmissibility
from ccr_reduce.reduce import (
    equivalent_constraints,
    global_vs_local,
    maximal_linear_constraints,
    reduce_by_stages,
    t_reduce,
)
from ccr_reduce.suites import dimension_law_instance, random_chain, random_first_class, staged_instance
from ccr_reduce.symspace import darboux, subspace_equal


def e(dim, *idx):
    out = np.zeros((len(idx), dim))
    for r, i in enumerate(idx):
        out[r, i] = 1.0
    return out


# Darboux coordinates (q1, p1, q2, p2, ...): q_k is index 2k-2, p_k is 2k-1


def test_t_reduce_examples():
    r4 = darboux(2)
    res = t_reduce(r4, r4.span(e(4, 0)))
    assert subspace_equal(res.commutant, r4.span(e(4, 0, 2, 3)))
    assert res.physicalDim == 2 and res.nondegenerate and res.doubleCommutant
    res = t_reduce(r4, r4.zero())
    assert res.physicalDim == 4 and res.nondegenerate
    res = t_reduce(r4, r4.span(e(4, 0, 2)))
    assert subspace_equal(res.commutant, r4.span(e(4, 0, 2)))
    assert res.physicalDim == 0


def test_t_reduce_second_class():
    r4 = darboux(2)
    with pytest.raises(FirstClassViolation) as info:
        t_reduce(r4, r4.span(e(4, 0, 1)))
    f, h = info.value.pair
    assert abs(info.value.value) == pytest.approx(1.0)
    assert abs(f @ r4.form @ h) == pytest.approx(1.0)


def test_t_reduce_wrong_space():
    with pytest.raises(InvalidArgument):
        t_reduce(darboux(2), darboux(2).full())


def test_equivalent_constraints_examples():
    r4 = darboux(2)
    s = r4.span(e(4, 0))
    assert equivalent_constraints(s, s)
    assert equivalent_constraints(s, r4.span(2 * e(4, 0)))
    assert not equivalent_constraints(s, r4.span(e(4, 2)))


def test_maximal_linear_constraints_examples():
    r4 = darboux(2)
    for s in (r4.span(e(4, 0)), r4.zero(), r4.span(e(4, 0, 2))):
        out = maximal_linear_constraints(s)
        assert subspace_equal(out.subspace, s)
        assert out.probes > 0 and "linear level" in out.notes


def test_stages_darboux_r8():
    r8 = darboux(4)
    chain = [r8.span(e(8, 0)), r8.span(e(8, 0, 2))]
    res = reduce_by_stages(r8, chain)
    assert [q.repDim for q in res.stages] == [6, 4]
    assert res.finalDim == 4 == res.single.physicalDim
    assert res.formResidual <= 1e-12 and res.passed


def test_stages_single_element_matches_t_reduce():
    r4 = darboux(2)
    s = r4.span(e(4, 0))
    res = reduce_by_stages(r4, [s])
    single = t_reduce(r4, s)
    assert res.finalDim == single.physicalDim
    np.testing.assert_allclose(res.finalQuotient.factoredForm, single.quotient.factoredForm, atol=1e-14)


def test_stages_not_nested():
    r4 = darboux(2)
    with pytest.raises(InvalidArgument, match="nested"):
        reduce_by_stages(r4, [r4.span(e(4, 0)), r4.span(e(4, 2))])


def test_stages_admissibility():
    # s2 = span{q1, p1} contains s1 = span{q1} but leaves its commutant
    r4 = darboux(2)
    with pytest.raises(StageAdmissibility) as info:
        reduce_by_stages(r4, [r4.span(e(4, 0)), r4.span(e(4, 0, 1))])
    assert info.value.stage == 2
    assert info.value.vector is not None


def test_stages_empty_chain():
    with pytest.raises(InvalidArgument):
        reduce_by_stages(darboux(1), [])


def test_global_vs_local_strict_inclusion():
    # R^6 with one constraint q1; the local observables miss p3, so R0 has
    # dimension 3 while the global quotient s'/s has dimension 4
    r6 = darboux(3)
    obs = [r6.span(e(6, 0, 2, 3)), r6.span(e(6, 4))]
    cons = [r6.span(e(6, 0)), r6.span(e(6, 0))]
    out = global_vs_local(obs, cons)
    assert out["global_dim"] == 4 and out["local_dim"] == 3
    assert out["injective"] and not out["onto"] and out["pass"]
    assert out["form_residual"] <= 1e-12


def test_global_vs_local_single_region():
    r4 = darboux(2)
    s = r4.span(e(4, 0))
    out = global_vs_local([r4.span(e(4, 0, 2, 3))], [s])
    assert out["local_dim"] == out["global_dim"] == 2 and out["onto"]


def test_global_vs_local_observables_outside_commutant():
    r4 = darboux(2)
    out = global_vs_local([r4.span(e(4, 1))], [r4.span(e(4, 0))])
    assert not out["observables_in_commutant"] and not out["pass"]


def test_global_vs_local_needs_data():
    with pytest.raises(InvalidArgument):
        global_vs_local([], [])


@given(st.integers(0, 100_000))
def test_dimension_law_property(seed):
    out = dimension_law_instance(random_first_class(np.random.default_rng(seed)))
    assert out["agree"], out


@given(st.integers(0, 100_000))
def test_stages_property(seed):
    out = staged_instance(random_chain(np.random.default_rng(seed)))
    assert out["final_dim"] == out["single_dim"]
    assert out["form_residual"] <= 1e-10
