import numpy as np
import pytest

from ccr_reduce.errors import InvalidArgument
from ccr_reduce.net import (
    LocalAssignment,
    RegionPoset,
    check_covariance,
    check_field_causality_violation,
    check_functoriality,
    check_isotony,
    check_reduction_isotony,
    check_weak_causality,
    local_quotient,
)
from ccr_reduce.symspace import darboux, subspace_equal

R4 = darboux(2)
# Darboux coordinates (q1, p1, q2, p2)
Q1, P1, Q2, P2 = np.eye(4)


def span(*vecs):
    return R4.span(np.array(vecs)) if vecs else R4.zero()


def net(regions, X, s, leq=(), spacelike=(), actions=None, **kw):
    poset = RegionPoset(regions, leq, spacelike, actions)
    return LocalAssignment(poset, R4, X, s, **kw)


def test_observables_default_to_commutant():
    n = net(["A"], {"A": R4.full()}, {"A": span(Q1)})
    assert subspace_equal(n.o["A"], span(Q1, Q2, P2))
    n = net(["A"], {"A": span(Q1, P1)}, {"A": span()})
    assert subspace_equal(n.o["A"], span(Q1, P1))


def test_single_region_passes_everything():
    n = net(["A"], {"A": R4.full()}, {"A": span(Q1)}, actions={"id": {"A": "A"}})
    assert check_isotony(n) and check_reduction_isotony(n) and check_functoriality(n)
    assert check_covariance(n, {"id": np.eye(4)})


def test_isotony_counterexample():
    # s(B1) = span{q1} is strictly smaller than s(B2) ∩ X(B1) = span{q1, q2}
    n = net(["B1", "B2"], {"B1": span(Q1, Q2), "B2": R4.full()}, {"B1": span(Q1), "B2": span(Q1, Q2)},
            leq=[("B1", "B2")])
    res = check_isotony(n)
    assert not res.passed
    assert res.failures()[0]["pair"] == ["B1", "B2"]
    assert check_reduction_isotony(n).passed


def test_reduction_isotony_counterexample():
    # o(B1) contains q2, s(B2) contains p2, and B(q2, p2) = 1
    n = net(["B1", "B2"], {"B1": span(Q1, Q2), "B2": span(Q1, Q2, P2)}, {"B1": span(Q1), "B2": span(Q1, P2)},
            leq=[("B1", "B2")])
    assert check_isotony(n).passed
    res = check_reduction_isotony(n)
    assert not res.passed and res.residual == pytest.approx(1.0)


def test_weak_causality_exact_zero_and_mislabel():
    n = net(["A", "B"], {"A": span(Q1), "B": span(Q2)}, {"A": span(), "B": span()}, spacelike=[("A", "B")])
    res = check_weak_causality(n, 1e-12)
    assert res.passed and res.residual == 0.0
    bad = net(["A", "B"], {"A": span(Q1), "B": span(P1)}, {"A": span(), "B": span()}, spacelike=[("A", "B")])
    res = check_weak_causality(bad, 1e-12)
    assert not res.passed and res.residual == pytest.approx(1.0)


def test_weak_causality_needs_pairs():
    n = net(["A"], {"A": span(Q1)}, {"A": span()})
    with pytest.raises(InvalidArgument):
        check_weak_causality(n, 1e-12)


def test_field_witness_without_gauge_data():
    n = net(["A", "B"], {"A": span(Q1), "B": span(Q2)}, {"A": span(), "B": span()}, spacelike=[("A", "B")])
    res = check_field_causality_violation(n, 1e-12)
    assert not res.passed and res.message.startswith("NoWitnessFound")


def test_field_witness_with_gauge_data():
    gauge = {"A": lambda cols: np.array([0.0]), "B": lambda cols: np.array([0.5])}
    n = net(["A", "B"], {"A": span(Q1), "B": span(Q2)}, {"A": span(), "B": span()}, spacelike=[("A", "B")],
            gauge=gauge)
    res = check_field_causality_violation(n, 1e-12)
    assert res.passed and res.residual == 0.5


def test_covariance_scaling_fails_form_preservation():
    n = net(["A"], {"A": R4.full()}, {"A": span(Q1)}, actions={"scale": {"A": "A"}})
    res = check_covariance(n, {"scale": 2 * np.eye(4)})
    assert not res.passed
    d = res.details[0]
    assert not d["form_preserving"] and d["fields"] and d["constraints"]
    assert res.residual == pytest.approx(3.0)


def test_covariance_symplectic_swap():
    # (q1, p1) <-> (q2, p2) is symplectic and swaps the two regions
    swap = np.eye(4)[[2, 3, 0, 1]]
    n = net(["A", "B"], {"A": span(Q1, P1), "B": span(Q2, P2)}, {"A": span(Q1), "B": span(Q2)},
            spacelike=[("A", "B")], actions={"swap": {"A": "B", "B": "A"}})
    assert check_covariance(n, {"swap": swap}).passed


def test_covariance_unknown_action():
    n = net(["A"], {"A": R4.full()}, {"A": span()})
    with pytest.raises(InvalidArgument):
        check_covariance(n, {"nope": np.eye(4)})


def test_functoriality_chain():
    X = {"B1": span(Q1), "B2": span(Q1, Q2), "B3": R4.full()}
    s = {"B1": span(Q1), "B2": span(Q1), "B3": span(Q1)}
    n = net(["B1", "B2", "B3"], X, s, leq=[("B1", "B2"), ("B2", "B3")])
    assert check_isotony(n) and check_reduction_isotony(n)
    res = check_functoriality(n)
    assert res.passed
    assert any("chain" in d for d in res.details)
    assert local_quotient(n, "B3").repDim == 2


def test_poset_validation():
    with pytest.raises(InvalidArgument, match="antisymmetric"):
        RegionPoset(["A", "B"], [("A", "B"), ("B", "A")])
    with pytest.raises(InvalidArgument, match="spacelike"):
        RegionPoset(["A", "B"], [("A", "B")], [("A", "B")])
    with pytest.raises(InvalidArgument, match="unknown"):
        RegionPoset(["A"], [("A", "C")])
    with pytest.raises(InvalidArgument, match="injective"):
        RegionPoset(["A", "B"], actions={"g": {"A": "A", "B": "A"}})


def test_poset_transitive_closure():
    p = RegionPoset(["A", "B", "C"], [("A", "B"), ("B", "C")])
    assert p.leq("A", "C") and not p.leq("C", "A")
    assert p.chains3() == [("A", "B", "C")]


def test_assignment_requires_s_inside_x():
    with pytest.raises(InvalidArgument):
        net(["A"], {"A": span(Q1)}, {"A": span(Q2)})
