import math

import numpy as np
import pytest

from ccr_reduce import fock as F
from ccr_reduce import gbmodel as G
from ccr_reduce.errors import InvalidArgument


@pytest.fixture(scope="module")
def grid():
    return F.fock_grid(2)


@pytest.fixture(scope="module")
def spaces(grid):
    one = F.OneParticleSpace.full(grid)
    return {N: F.FockSpace(one, N) for N in (1, 2, 3)}


@pytest.fixture(scope="module")
def physical(spaces):
    out = {}
    for N, fk in spaces.items():
        ph = F.physical_subspace(fk)
        nu = F.null_space(fk, ph)
        out[N] = (ph, nu, F.physical_quotient(fk, ph, nu))
    return out


def coulomb_pair(grid):
    """Two Coulomb functions with B(f, h) = 1."""
    C = G.coulomb_space(grid)
    f = G.GBFunction.from_real(grid, C.basis[:, 0])
    for j in range(1, C.rank):
        h = G.GBFunction.from_real(grid, C.basis[:, j])
        b = G.B(f, h)
        if abs(b) > 1e-3:
            return f, h * (1 / b)
    raise AssertionError("no pairing found")


def test_dimensions(spaces):
    for N, fk in spaces.items():
        assert fk.dim == F.FockSpace.expected_dim(8, N)
        assert np.array_equal(fk.metric ** 2, np.ones(fk.dim))


def test_invalid_truncation(grid):
    with pytest.raises(InvalidArgument):
        F.FockSpace(F.OneParticleSpace.full(grid), 0)


def test_annihilator_and_creator_on_vacuum(spaces, grid, rng):
    fk = spaces[2]
    f = G.random_function(grid, rng)
    assert np.allclose(F.a(fk, f).apply(fk.vacuum()), 0)
    psi = F.adag(fk, f).apply(fk.vacuum())
    assert fk.krein(psi, psi) == pytest.approx(F.K_one(fk, f, f), rel=1e-12)
    assert F.K_one(fk, f, f) == pytest.approx(G.K(f, f), rel=1e-12)


def test_canonical_commutator(spaces, grid, rng):
    fk = spaces[3]
    f, h = G.random_function(grid, rng), G.random_function(grid, rng)
    comm = F.commutator(F.a(fk, f), F.adag(fk, h)).matrix
    target = F.K_one(fk, f, h) * np.eye(fk.dim)
    cols = fk.sector_mask(fk.N - 1)
    assert np.max(np.abs((comm - target)[:, cols])) <= 1e-12


def test_krein_adjoint(spaces, grid, rng):
    fk = spaces[2]
    f = G.random_function(grid, rng)
    a = F.a(fk, f)
    np.testing.assert_allclose(a.kreinAdjoint.matrix, F.adag(fk, f).matrix, atol=1e-14)
    np.testing.assert_allclose(a.kreinAdjoint.kreinAdjoint.matrix, a.matrix, atol=0)
    psi = rng.normal(size=fk.dim) + 1j * rng.normal(size=fk.dim)
    phi = rng.normal(size=fk.dim) + 1j * rng.normal(size=fk.dim)
    ad = F.adag(fk, f)
    assert fk.krein(ad.apply(psi), phi) == pytest.approx(fk.krein(psi, a.apply(phi)), abs=1e-12)


def test_ccr_examples(spaces, grid, rng):
    fk = spaces[3]
    f = G.random_function(grid, rng)
    same = F.ccr_check(fk, f, f)
    assert same.passed and abs(same.details["B"]) <= 1e-14
    f, h = coulomb_pair(grid)
    res = F.ccr_check(fk, f, h)
    assert res.passed and res.details["B"] == pytest.approx(1.0)
    comm = F.commutator(F.A_field(fk, f), F.A_field(fk, h)).matrix
    cols = fk.sector_mask(fk.N - 2)
    np.testing.assert_allclose(comm[:, cols], 1j * np.eye(fk.dim)[:, cols], atol=1e-12)
    p0 = G.GBFunction(grid, grid.p_lower * rng.normal(size=(grid.size, 1)))
    P = G.p_space(grid)
    fp = G.GBFunction.from_real(grid, P.basis @ rng.normal(size=P.rank))
    res = F.ccr_check(fk, p0, fp)
    assert res.passed and abs(res.details["B"]) <= 1e-13


def test_ccr_random(spaces, grid, rng):
    for _ in range(3):
        res = F.ccr_check(spaces[3], G.random_function(grid, rng), G.random_function(grid, rng))
        assert res.residual <= 1e-10


def test_outside_span(grid):
    one = F.OneParticleSpace.physical(grid)
    fk = F.FockSpace(one, 1)
    f = G.GBFunction(grid, np.tile([1.0, 0, 0, 0], (grid.size, 1)))
    with pytest.raises(InvalidArgument, match="outside"):
        F.a(fk, f)


def test_chi_examples(spaces, grid, rng):
    fk = spaces[2]
    assert np.max(np.abs(F.chi(fk, np.zeros(grid.size)).matrix)) == 0
    h = G.random_scalar(grid, rng)
    P = G.p_space(grid)
    fp = G.GBFunction.from_real(grid, P.basis @ rng.normal(size=P.rank))
    gen = F.gauge_generator(fk, h)
    comm = F.commutator(gen, F.A_field(fk, fp)).matrix
    assert np.max(np.abs(comm[:, fk.sector_mask(fk.N - 1)])) <= 1e-12
    with pytest.raises(InvalidArgument):
        F.chi(fk, G.random_scalar(grid, rng, real=False))


def test_gauge_commutator_and_flow(spaces, grid, rng):
    for fk in spaces.values():
        h = G.random_scalar(grid, rng)
        assert F.gauge_commutator_check(fk, h, G.random_function(grid, rng)).residual <= 1e-10
        assert F.gauge_flow_check(fk, h).passed


def test_gauge_K_relation(grid, rng):
    h = G.random_scalar(grid, rng)
    f = G.random_function(grid, rng)
    np.testing.assert_allclose(F.gauge_K(grid, h, f).values, -2 * np.pi * G.gauge_G(h, f).values, atol=1e-13)


def test_physical_subspace_dims(physical, grid):
    M = grid.size
    ph, nu, q = physical[1]
    assert ph["dim"] == 1 + 3 * M and ph["equal"]
    # vacuum is physical
    assert np.linalg.norm(ph["basis"].conj().T[:, 0]) == pytest.approx(1.0)
    for N, (ph, nu, q) in physical.items():
        assert ph["dim"] == ph["expected_dim"] and ph["equal"]
        assert nu["dim"] == nu["expected_dim"] and nu["equal"]
        assert q.isometric
    # two-particle null vectors: Sym^2(C^3M) minus Sym^2(C^2M)
    ph2, nu2, _ = physical[2]
    assert nu2["dim"] == M + (math.comb(3 * M + 1, 2) - math.comb(2 * M + 1, 2))


def test_physical_needs_full_space(grid):
    with pytest.raises(InvalidArgument):
        F.physical_subspace(F.FockSpace(F.OneParticleSpace.physical(grid), 1))


def test_quotient_fields(spaces, physical, grid, rng):
    fk = spaces[3]
    ph, _, q = physical[3]
    P = G.p_space(grid)
    fp = G.GBFunction.from_real(grid, P.basis @ rng.normal(size=P.rank))
    out = F.induced_field_check(fk, fp, q, ph)
    assert out["invariance_residual"] <= 1e-10 and out["direct_residual"] <= 1e-10
    for m in G.maxwell_functions(grid):
        assert F.induced_field_check(fk, m, q, ph)["induced_max"] <= 1e-10


def test_spectral_examples(physical, grid):
    _, _, q = physical[3]
    res = F.spectral_check(q.fock)
    assert res.passed
    d = res.details
    eigs = np.array(d["one_particle_eigs"])
    np.testing.assert_allclose(np.unique(np.round(eigs, 12)), np.unique(grid.p0))
    assert d["two_particle_min"] == pytest.approx(2 * grid.p0.min())
    assert d["dGamma_P0_min_eig"] == pytest.approx(0.0, abs=1e-14)
    assert d["vacuum_invariance"] <= 1e-14


def test_vacuum_weyl_expectation(physical, grid, rng):
    _, _, q = physical[3]
    qf = q.fock
    zero = G.GBFunction.zeros(grid)
    assert F.vacuum_weyl_expectation(qf, zero, 4)["value"] == 1
    C = G.coulomb_space(grid)
    f = G.GBFunction.from_real(grid, 0.3 * C.basis @ rng.normal(size=C.rank))
    out = F.vacuum_weyl_expectation(qf, f, 2)
    assert out["value"] == pytest.approx(1 - out["K"] / 4, abs=1e-13)
    full = F.vacuum_weyl_expectation(qf, f, 6)
    assert full["gap"] < out["gap"]
    with pytest.raises(InvalidArgument):
        F.vacuum_weyl_expectation(qf, f, 7)
