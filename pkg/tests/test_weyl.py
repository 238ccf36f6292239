import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccr_reduce.errors import InvalidArgument, PreconditionViolation
from ccr_reduce.suites import random_weyl_element
from ccr_reduce.symspace import darboux
from ccr_reduce.weyl import (
    LabelBasis,
    StateFunctional,
    WeylElement,
    central_state,
    char_subspace_state,
    commutator,
    generator,
    gram_psd_check,
    identity,
    is_dirac_state,
    nonregularity_probe,
    norm1,
    norm2,
    quasifree_state,
    weyl_mul,
    weyl_star,
)

# standard labels on Darboux R^4: (q1, p1, q2, p2)
Q1, P1, Q2, P2 = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)
ZERO = (0, 0, 0, 0)


@pytest.fixture
def space():
    return darboux(2)


@pytest.fixture
def basis(space):
    return LabelBasis.standard(space)


def d(basis, coords, c=1.0):
    return generator(basis, coords, c)


def test_product_examples(basis):
    f = (2, -1, 0, 3)
    assert weyl_mul(identity(basis), d(basis, f)).is_close(d(basis, f))
    assert weyl_mul(d(basis, Q1), d(basis, P1)).is_close(d(basis, (1, 1, 0, 0), cmath.exp(0.5j)))
    assert weyl_mul(d(basis, f), d(basis, tuple(-x for x in f))).is_close(identity(basis))


def test_star_examples(basis):
    assert weyl_star(d(basis, Q1)).is_close(d(basis, (-1, 0, 0, 0)))
    assert weyl_star(identity(basis, 1j)).is_close(identity(basis, -1j))
    prod = weyl_mul(d(basis, Q1), d(basis, P1))
    # (ab)* = b* a* = exp(-i/2) delta_{-q1-p1}
    expected = d(basis, (-1, -1, 0, 0), cmath.exp(-0.5j))
    assert weyl_star(prod).is_close(expected)
    assert weyl_star(prod).is_close(weyl_mul(weyl_star(d(basis, P1)), weyl_star(d(basis, Q1))))


def test_norm_examples(basis):
    assert norm1(d(basis, (3, 1, 0, 0))) == 1.0
    assert norm2(identity(basis) + d(basis, Q1)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert norm1(identity(basis, 2.0) - d(basis, Q1)) == 3.0


def test_norm2_is_central_state_of_square(basis):
    a = identity(basis) + d(basis, Q1, 0.5j) + d(basis, (1, 1, 0, 0), -2)
    assert norm2(a) ** 2 == pytest.approx(central_state(weyl_mul(weyl_star(a), a)).real, abs=1e-13)


def test_central_state_examples(basis):
    assert central_state(identity(basis)) == 1
    assert central_state(d(basis, Q1)) == 0
    a = identity(basis) + d(basis, Q1)
    assert central_state(weyl_mul(weyl_star(a), a)) == pytest.approx(2.0)


def test_char_subspace_state_examples(space, basis):
    s = space.span([Q1, Q2])
    omega = char_subspace_state(s)
    assert omega(d(basis, (3, 0, -2, 0))) == 1
    assert omega(d(basis, P1)) == 0
    assert omega(weyl_mul(d(basis, Q1), d(basis, Q2))) == pytest.approx(1.0)


def test_char_subspace_state_needs_first_class(space):
    with pytest.raises(PreconditionViolation):
        char_subspace_state(space.span([Q1, P1]))


def test_quasifree_examples(basis):
    omega = quasifree_state(np.eye(4))
    assert omega(identity(basis)) == 1
    # K(f, f) = 4 for f = 2 q1
    assert omega(d(basis, (2, 0, 0, 0))) == pytest.approx(math.exp(-1), rel=1e-15)
    degenerate = quasifree_state(np.diag([0.0, 1.0, 1.0, 1.0]))
    assert degenerate(d(basis, (5, 0, 0, 0))) == 1


def test_quasifree_shape():
    with pytest.raises(InvalidArgument):
        quasifree_state(np.ones(3))


def test_dirac_state_examples(space, basis):
    central = StateFunctional.central()
    assert is_dirac_state(central, space.zero(), basis, [])
    s = space.span([Q1])
    assert is_dirac_state(char_subspace_state(s), s, basis, [Q1])
    assert not is_dirac_state(central, s, basis, [Q1])


def test_dirac_state_rejects_probe_outside(space, basis):
    with pytest.raises(InvalidArgument):
        is_dirac_state(StateFunctional.central(), space.span([Q1]), basis, [P1])


def test_gram_examples(space, basis):
    central = StateFunctional.central()
    assert gram_psd_check(central, [identity(basis)])["min_eig"] == pytest.approx(1.0)
    g = gram_psd_check(central, [identity(basis), d(basis, Q1)])
    np.testing.assert_allclose(g["gram"], np.eye(2))
    omega = char_subspace_state(space.span([Q1]))
    g = gram_psd_check(omega, [identity(basis), d(basis, Q1)])
    np.testing.assert_allclose(g["gram"], np.ones((2, 2)))
    assert g["min_eig"] == pytest.approx(0.0, abs=1e-15)
    assert g["pass"]


def test_commutator_examples(basis):
    assert commutator(d(basis, Q1), d(basis, Q2)).terms == {}
    c = commutator(d(basis, Q1), d(basis, P1))
    assert c.is_close(d(basis, (1, 1, 0, 0), 2j * math.sin(0.5)))
    a = d(basis, (1, 2, 0, -1), 0.3)
    assert commutator(a, identity(basis)).terms == {}


def test_nonregularity_probe(space, basis):
    # extended state equal to 1 on delta_{q1}; B(q1, p1) = 1 is not in 2 pi Z
    s = space.span([Q1])
    omega = char_subspace_state(s)
    out = nonregularity_probe(omega, basis, P1, Q1)
    assert out["forced_zero"] and out["omega(delta_f)"] == 0 and out["pass"]


def test_nonregularity_probe_without_force(space, basis):
    s = space.span([Q1])
    omega = char_subspace_state(s)
    out = nonregularity_probe(omega, basis, Q2, Q1)
    assert not out["forced_zero"] and out["pass"]


def test_rational_steps_are_exact(space):
    b = LabelBasis(space, np.eye(4), step="1/3")
    lab = b.label((1, 0, 0, 0)) + b.label((2, 0, 0, 0))
    assert lab == b.label((3, 0, 0, 0))
    np.testing.assert_allclose(lab.vector(), [1, 0, 0, 0])


def test_json_round_trip(basis):
    a = d(basis, Q1, 1 + 2j) + d(basis, P2, -0.5)
    b = WeylElement.from_json(basis, a.to_json())
    assert b.is_close(a, 0.0)
    assert a.dumps() == b.dumps()


def test_non_integer_label(basis):
    with pytest.raises(InvalidArgument):
        generator(basis, (0.5, 0, 0, 0))


def test_mixed_bases(space, basis):
    other = LabelBasis.standard(space)
    with pytest.raises(InvalidArgument):
        weyl_mul(d(basis, Q1), d(other, Q1))


@given(st.integers(0, 10_000))
def test_algebra_identities(seed):
    rng = np.random.default_rng(seed)
    b = LabelBasis.standard(darboux(2))
    a, x, y = (random_weyl_element(rng, b) for _ in range(3))
    assert weyl_mul(weyl_mul(a, x), y).is_close(weyl_mul(a, weyl_mul(x, y)), 1e-12)
    assert weyl_star(weyl_star(a)).is_close(a, 0.0)
    assert weyl_star(weyl_mul(a, x)).is_close(weyl_mul(weyl_star(x), weyl_star(a)), 1e-12)
    assert norm1(weyl_mul(a, x)) <= norm1(a) * norm1(x) * (1 + 1e-12)
    assert norm2(weyl_star(a)) == pytest.approx(norm2(a), rel=1e-12)


@given(st.integers(0, 10_000))
def test_char_state_positivity(seed):
    rng = np.random.default_rng(seed)
    space = darboux(2)
    b = LabelBasis.standard(space)
    omega = char_subspace_state(space.span([Q1, Q2]))
    elems = [random_weyl_element(rng, b) for _ in range(4)]
    assert gram_psd_check(omega, elems)["pass"]


def test_dirac_extension_vanishes_off_commutant(space, basis):
    s = space.span([Q1])
    omega = StateFunctional.dirac_extension(quasifree_state(np.eye(4)), s)
    assert omega(d(basis, P1)) == 0
    assert omega(d(basis, Q2)) == pytest.approx(math.exp(-0.25))
