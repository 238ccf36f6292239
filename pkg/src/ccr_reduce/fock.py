"""Truncated Fock-Krein space over a few-point Gupta-Bleuler grid.

One-particle vectors are written in the scaled coordinates ``y = sqrt(2 pi w) f``
of :mod:`ccr_reduce.gbmodel` (complex, four components per point), where
``K(f, h) = sum conj(y_f) diag(eps) y_h`` with ``eps = -eta``: time components
carry ``-1`` and spatial components ``+1``.  A one-particle space is given by
columns that are orthonormal for the positive product and eigenvectors of the
fundamental symmetry, so that ``K(v_i, v_j) = eps_i delta_ij``.

With Hilbert-space mode operators ``b_i`` on occupation states,
``a(f) = sum_i eps_i conj(c_i) b_i`` and ``a^dag(f) = sum_i c_i b_i^dag``
(``c`` the coefficients of ``f``) give ``[a(f), a^dag(h)] = K(f, h)``, and
``a^dag(f)`` is the Krein adjoint ``Gamma a(f)^H Gamma`` of ``a(f)``.
Truncation at ``N`` particles is exact for every identity checked here on the
sectors stated in each function.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from . import gbmodel as gb
from .errors import InvalidArgument
from .report import CheckResult

TOL = 1e-10


def _eps(grid: gb.GBGrid) -> np.ndarray:
    return np.tile(-gb.ETA, grid.size)


def to_coords(f: gb.GBFunction) -> np.ndarray:
    """Scaled complex coordinates ``y`` of a grid function (length ``4M``)."""
    return (f.grid.coord_scale[:, None] * f.values).ravel()


def from_coords(grid: gb.GBGrid, y) -> gb.GBFunction:
    y = np.asarray(y, dtype=complex).reshape(grid.size, 4)
    return gb.GBFunction(grid, y / grid.coord_scale[:, None])


class OneParticleSpace:
    """Span of orthonormal fundamental-symmetry eigenvectors.

    Parameters
    ----------
    grid : GBGrid
    vectors : (4M, d) complex array
        Columns in scaled coordinates; orthonormal for the positive product
        and eigenvectors of ``J' = diag(eps)``.
    """

    def __init__(self, grid: gb.GBGrid, vectors, label: str = ""):
        v = np.asarray(vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != 4 * grid.size or v.shape[1] < 1:
            raise InvalidArgument(f"vectors must have shape ({4 * grid.size}, d) with d >= 1")
        if np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))) > 1e-12:
            raise InvalidArgument("vectors are not orthonormal in the positive product")
        eps = _eps(grid)
        signs = np.real(np.einsum("ij,i,ij->j", v.conj(), eps, v))
        if np.max(np.abs(eps[:, None] * v - v * signs)) > 1e-12:
            raise InvalidArgument("vectors are not eigenvectors of the fundamental symmetry")
        self.grid = grid
        self.vectors = v
        self.signs = np.rint(signs)
        self.dim = v.shape[1]
        self.label = label

    @classmethod
    def full(cls, grid: gb.GBGrid) -> "OneParticleSpace":
        """All of the realized one-particle space (``4M`` modes)."""
        return cls(grid, np.eye(4 * grid.size, dtype=complex), "Y")

    @classmethod
    def physical(cls, grid: gb.GBGrid) -> "OneParticleSpace":
        """Transverse representatives of ``p / p0`` (``2M`` modes, all positive)."""
        e1, e2 = gb._transverse_frame(grid.points)
        cols = []
        for m in range(grid.size):
            for e in (e1, e2):
                v = np.zeros(4 * grid.size, dtype=complex)
                v[4 * m + 1: 4 * m + 4] = e[m]
                cols.append(v)
        return cls(grid, np.column_stack(cols), "p/p0")

    @property
    def J(self) -> np.ndarray:
        return np.diag(self.signs)

    def gram_K(self) -> np.ndarray:
        v = self.vectors
        return v.conj().T @ (_eps(self.grid)[:, None] * v)

    def coefficients(self, f) -> np.ndarray:
        """Coordinates of ``f`` (GBFunction or scaled vector) in the basis.

        Raises
        ------
        InvalidArgument
            If ``f`` is not in the span.
        """
        y = to_coords(f) if isinstance(f, gb.GBFunction) else np.asarray(f, dtype=complex)
        c = self.vectors.conj().T @ y
        resid = np.linalg.norm(y - self.vectors @ c)
        if resid > TOL * max(np.linalg.norm(y), 1e-300):
            raise InvalidArgument(f"vector is outside the one-particle span (residual {resid:.2e})")
        return c


def _occupations(d: int, N: int) -> list[tuple]:
    out = []
    for n in range(N + 1):
        for combo in itertools.combinations_with_replacement(range(d), n):
            occ = [0] * d
            for i in combo:
                occ[i] += 1
            out.append(tuple(occ))
    # within a sector, order lexicographically from the first mode
    return sorted(out, key=lambda o: (sum(o), tuple(-x for x in o)))


class FockSpace:
    """Symmetric Fock space over a one-particle space, truncated at ``N`` particles."""

    def __init__(self, one: OneParticleSpace, N: int):
        if isinstance(N, bool) or int(N) != N or N < 1:
            raise InvalidArgument(f"truncation N must be an integer >= 1, got {N!r}")
        self.one = one
        self.N = int(N)
        self.basis = _occupations(one.dim, self.N)
        self.index = {o: i for i, o in enumerate(self.basis)}
        self.dim = len(self.basis)
        self.sectors = np.array([sum(o) for o in self.basis])
        occ = np.array(self.basis, dtype=np.int64)
        odd = (occ[:, one.signs < 0].sum(axis=1) % 2) if np.any(one.signs < 0) else np.zeros(self.dim, int)
        self.metric = np.where(odd == 1, -1.0, 1.0)

    def __repr__(self):
        return f"FockSpace(d={self.one.dim}, N={self.N}, dim={self.dim})"

    @staticmethod
    def expected_dim(d: int, N: int) -> int:
        return sum(math.comb(d + n - 1, n) for n in range(N + 1))

    @cached_property
    def modes(self) -> list[np.ndarray]:
        """Hilbert-space annihilators ``b_i`` as dense matrices."""
        out = []
        for i in range(self.one.dim):
            m = np.zeros((self.dim, self.dim))
            for col, o in enumerate(self.basis):
                if o[i]:
                    lower = list(o)
                    lower[i] -= 1
                    m[self.index[tuple(lower)], col] = math.sqrt(o[i])
            out.append(m)
        return out

    @property
    def Gamma(self) -> np.ndarray:
        return np.diag(self.metric)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def sector_mask(self, nmax: int) -> np.ndarray:
        return self.sectors <= nmax

    def krein(self, psi, phi) -> complex:
        """``<psi, phi> = (psi, Gamma phi)``."""
        return complex(np.vdot(psi, self.metric * phi))

    def operator(self, matrix) -> "KreinOperator":
        return KreinOperator(self, np.asarray(matrix, dtype=complex))

    def create_word(self, vectors) -> np.ndarray:
        """``b^dag(v_1) ... b^dag(v_n) vacuum`` for one-particle coordinate vectors ``v``."""
        psi = self.vacuum()
        for v in vectors:
            nxt = np.zeros_like(psi)
            for c, m in zip(v, self.modes):
                if c != 0:
                    nxt += c * (m.T @ psi)
            psi = nxt
        return psi


@dataclass(eq=False)
class KreinOperator:
    """Matrix on a :class:`FockSpace` with its Krein adjoint ``Gamma A^H Gamma``."""

    fock: FockSpace
    matrix: np.ndarray

    @property
    def kreinAdjoint(self) -> "KreinOperator":
        g = self.fock.metric
        return KreinOperator(self.fock, g[:, None] * self.matrix.conj().T * g[None, :])

    def __matmul__(self, other: "KreinOperator") -> "KreinOperator":
        return KreinOperator(self.fock, self.matrix @ other.matrix)

    def __add__(self, other: "KreinOperator") -> "KreinOperator":
        return KreinOperator(self.fock, self.matrix + other.matrix)

    def __sub__(self, other: "KreinOperator") -> "KreinOperator":
        return KreinOperator(self.fock, self.matrix - other.matrix)

    def __mul__(self, c) -> "KreinOperator":
        return KreinOperator(self.fock, complex(c) * self.matrix)

    __rmul__ = __mul__

    def apply(self, psi) -> np.ndarray:
        return self.matrix @ psi


def commutator(a: KreinOperator, b: KreinOperator) -> KreinOperator:
    return a @ b - b @ a


def _coeffs(fock: FockSpace, f) -> np.ndarray:
    return fock.one.coefficients(f)


def a(fock: FockSpace, f) -> KreinOperator:
    """Annihilator ``a(f) = sum eps_i conj(c_i) b_i`` (antilinear in ``f``)."""
    c = _coeffs(fock, f)
    m = sum(s * np.conj(ci) * bi for s, ci, bi in zip(fock.one.signs, c, fock.modes))
    return fock.operator(m)


def adag(fock: FockSpace, f) -> KreinOperator:
    """Creator ``a^dag(f) = sum c_i b_i^dag``, the Krein adjoint of ``a(f)``."""
    c = _coeffs(fock, f)
    m = sum(ci * bi.T for ci, bi in zip(c, fock.modes))
    return fock.operator(m)


def A_field(fock: FockSpace, f) -> KreinOperator:
    """``A(f) = (a^dag(f) + a(f)) / sqrt 2``; real-linear in ``f``."""
    return (adag(fock, f) + a(fock, f)) * (1 / math.sqrt(2))


def K_one(fock: FockSpace, f, h) -> complex:
    cf, ch = _coeffs(fock, f), _coeffs(fock, h)
    return complex(np.sum(fock.one.signs * np.conj(cf) * ch))


def _block_residual(fock: FockSpace, m: np.ndarray, nmax: int) -> float:
    cols = fock.sector_mask(nmax)
    return float(np.max(np.abs(m[:, cols]), initial=0.0))


def ccr_check(fock: FockSpace, f, h) -> CheckResult:
    """``[A(f), A(h)] = i B(f, h)`` on states with at most ``N - 2`` particles.

    The residual on ``N - 1`` particles is reported as well (the identity is
    exact there too); sector ``N`` is the truncation edge.
    """
    Bfh = K_one(fock, f, h).imag
    comm = commutator(A_field(fock, f), A_field(fock, h)).matrix - 1j * Bfh * np.eye(fock.dim)
    scale = max(1.0, abs(Bfh))
    safe = _block_residual(fock, comm, fock.N - 2) / scale if fock.N >= 2 else 0.0
    edge = _block_residual(fock, comm, fock.N - 1) / scale
    return CheckResult("fock.ccr", safe <= TOL, safe, TOL, {"B": Bfh, "safe_sectors": fock.N - 2,
                                                             "residual_N_minus_1": edge})


# ---------------------------------------------------------------- constraints

def chi_vector(grid: gb.GBGrid, h) -> np.ndarray:
    """Scaled coordinates of ``g_mu = i sqrt(pi) p_mu h``."""
    h = gb._check_scalar(grid, h)
    g = gb.GBFunction(grid, 1j * math.sqrt(math.pi) * grid.p_lower * h[:, None])
    return to_coords(g)


def chi(fock: FockSpace, h) -> KreinOperator:
    """``chi(h) = a(i sqrt(pi) p_mu h)`` for a theta-real gauge function ``h``."""
    return a(fock, chi_vector(fock.one.grid, h))


def gauge_generator(fock: FockSpace, h) -> KreinOperator:
    """``chi(h)^# chi(h)`` with ``#`` the Krein adjoint."""
    c = chi(fock, h)
    return c.kreinAdjoint @ c


def gauge_K(grid: gb.GBGrid, h, f: gb.GBFunction) -> gb.GBFunction:
    """``G^K_h f = pi p_mu h K(i p h, f)``, equal to ``-2 pi G_h f``."""
    h = gb._check_scalar(grid, h)
    iph = gb.GBFunction(grid, 1j * grid.p_lower * h[:, None])
    return gb.GBFunction(grid, np.pi * gb.K(iph, f) * grid.p_lower * h[:, None])


def one_particle_matrix(grid: gb.GBGrid, linear_map) -> np.ndarray:
    """Matrix of a complex-linear map of grid functions in scaled coordinates."""
    d = 4 * grid.size
    cols = [to_coords(linear_map(from_coords(grid, e))) for e in np.eye(d, dtype=complex)]
    return np.column_stack(cols)


def second_quantize(fock: FockSpace, T: np.ndarray, target: FockSpace | None = None) -> np.ndarray:
    """``Gamma(T)`` on occupation states: products of transformed creators.

    ``T`` maps one-particle coordinates of ``fock`` (in its basis) to those of
    ``target``; both spaces must have the same truncation.
    """
    target = target or fock
    if target.N != fock.N:
        raise InvalidArgument("source and target truncations differ")
    T = np.asarray(T, dtype=complex)
    if T.shape != (target.one.dim, fock.one.dim):
        raise InvalidArgument(f"one-particle map must have shape {(target.one.dim, fock.one.dim)}")
    out = np.zeros((target.dim, fock.dim), dtype=complex)
    for col, occ in enumerate(fock.basis):
        vecs = [T[:, i] for i, k in enumerate(occ) for _ in range(k)]
        norm = math.prod(math.sqrt(math.factorial(k)) for k in occ)
        out[:, col] = target.create_word(vecs) / norm
    return out


def basis_matrix(fock: FockSpace, T_coords: np.ndarray) -> np.ndarray:
    """Express a scaled-coordinate linear map in the one-particle basis of ``fock``."""
    v = fock.one.vectors
    return v.conj().T @ T_coords @ v


def gauge_commutator_check(fock: FockSpace, h, f: gb.GBFunction) -> CheckResult:
    """``[chi^# chi, A(f)] = i A(G^K_h f)`` on states with at most ``N - 1`` particles."""
    lhs = commutator(gauge_generator(fock, h), A_field(fock, f)).matrix
    rhs = 1j * A_field(fock, gauge_K(fock.one.grid, h, f)).matrix
    diff = lhs - rhs
    scale = max(1.0, float(np.max(np.abs(lhs))))
    r = _block_residual(fock, diff, fock.N - 1) / scale
    return CheckResult("fock.gauge_commutator", r <= TOL, r, TOL, {"scale": scale})


def gauge_flow_check(fock: FockSpace, h, steps=(1e-2, 5e-3, 2.5e-3)) -> CheckResult:
    """Richardson-extrapolated ``(Gamma(T^t) - 1) / t`` against ``-i chi^# chi``.

    ``T^t = 1 + t G^K_h`` on the one-particle space.  The exact relation
    ``Gamma(T^t) = exp(-i t chi^# chi)`` is checked alongside.
    """
    grid = fock.one.grid
    GK = basis_matrix(fock, one_particle_matrix(grid, lambda f: gauge_K(grid, h, f)))
    gen = gauge_generator(fock, h).matrix
    target = -1j * gen
    eye = np.eye(fock.dim)

    def D(t):
        return (second_quantize(fock, np.eye(fock.one.dim) + t * GK) - eye) / t

    scale = max(1.0, float(np.linalg.norm(gen, 2)))
    steps = [t / scale for t in steps]
    errs = []
    for t in steps:
        rich = 2 * D(t / 2) - D(t)
        errs.append(float(np.max(np.abs(rich - target))))
    t1 = steps[0]
    exact = float(np.max(np.abs(second_quantize(fock, np.eye(fock.one.dim) + t1 * GK) - sla.expm(-1j * t1 * gen))))
    order_ok = all(e2 < e1 or e2 <= 1e-12 * scale for e1, e2 in zip(errs, errs[1:]))
    passed = exact <= TOL * scale and order_ok
    return CheckResult("fock.gauge_flow", bool(passed), exact / scale, TOL,
                       {"richardson_errors": errs, "steps": list(steps)})


# ---------------------------------------------------------------- physical spaces

def _theta_real_basis(grid: gb.GBGrid) -> list[np.ndarray]:
    out = []
    for m in range(grid.size):
        mb = int(grid.mirror[m])
        if m < mb:
            e = np.zeros(grid.size, dtype=complex)
            e[m], e[mb] = 1.0, 1.0
            out.append(e)
            e = np.zeros(grid.size, dtype=complex)
            e[m], e[mb] = 1j, -1j
            out.append(e)
    return out


def _null(m: np.ndarray) -> np.ndarray:
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    return sla.null_space(m, rcond=1e-12)


def _orth(m: np.ndarray) -> np.ndarray:
    return sla.orth(m, rcond=1e-12) if m.size else m


def _same_span(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape[1] != b.shape[1]:
        return False
    if a.shape[1] == 0:
        return True
    return bool(np.linalg.norm(b - a @ (a.conj().T @ b)) <= 1e-8 * math.sqrt(a.shape[1]))


def _require_full(fock: FockSpace) -> None:
    if fock.one.dim != 4 * fock.one.grid.size:
        raise InvalidArgument("constraint operators need the full one-particle space")
    if fock.one.dim > 8 or fock.N > 3:
        raise InvalidArgument("physical-space computations are limited to d <= 8 and N <= 3")


def _ccp_basis(grid: gb.GBGrid) -> tuple[np.ndarray, np.ndarray]:
    """Scaled-coordinate orthonormal bases of ``C p`` and ``C p0``."""
    ell, t1, t2 = gb.p_directions(grid)

    def cols(dirs):
        out = []
        for m in range(grid.size):
            for d in dirs:
                v = np.zeros(4 * grid.size, dtype=complex)
                v[4 * m: 4 * m + 4] = d[m]
                out.append(v)
        return np.column_stack(out)

    return cols([ell, t1, t2]), cols([ell])


def physical_subspace(fock: FockSpace) -> dict:
    """``H' =`` joint kernel of ``chi(h)`` over a spanning set of theta-real ``h``.

    Compared with the occupation space generated by ``C p``: equal dimension,
    containment both ways, and the combinatorial count.
    """
    _require_full(fock)
    grid = fock.one.grid
    chis = [chi(fock, h).matrix for h in _theta_real_basis(grid)]
    blocks = []
    # chi lowers the particle number by one, so the kernel is graded by sector
    for n in range(fock.N + 1):
        cols = np.flatnonzero(fock.sectors == n)
        sub = np.vstack([c[:, cols] for c in chis])
        ker = _orth(_null(sub))
        emb = np.zeros((fock.dim, ker.shape[1]), dtype=complex)
        emb[cols] = ker
        blocks.append(emb)
    kernel = np.hstack(blocks)
    cp, _ = _ccp_basis(grid)
    gen = _fock_of_subspace(fock, cp)
    expected = FockSpace.expected_dim(cp.shape[1], fock.N)
    return {"basis": kernel, "dim": kernel.shape[1], "expected_dim": expected,
            "generated": gen, "equal": _same_span(kernel, gen)}


def _fock_of_subspace(fock: FockSpace, vecs: np.ndarray) -> np.ndarray:
    """Span of ``b^dag(v_1) ... b^dag(v_n) vacuum`` for ``v`` in the given columns, n <= N."""
    coords = fock.one.vectors.conj().T @ vecs
    cols = []
    for n in range(fock.N + 1):
        for combo in itertools.combinations_with_replacement(range(coords.shape[1]), n):
            cols.append(fock.create_word([coords[:, i] for i in combo]))
    return _orth(np.column_stack(cols))


def null_space(fock: FockSpace, phys: dict | None = None) -> dict:
    """``H''``: vectors of ``H'`` Krein-orthogonal to all of ``H'``.

    Compared with the span of states having at least one ``C p0`` factor.
    """
    phys = phys or physical_subspace(fock)
    V = phys["basis"]
    gram = V.conj().T @ (fock.metric[:, None] * V)
    nul = _orth(V @ _null(gram))
    grid = fock.one.grid
    cp, cp0 = _ccp_basis(grid)
    coords_p = fock.one.vectors.conj().T @ cp
    coords_0 = fock.one.vectors.conj().T @ cp0
    cols = []
    for n in range(1, fock.N + 1):
        for j in range(coords_0.shape[1]):
            for combo in itertools.combinations_with_replacement(range(coords_p.shape[1]), n - 1):
                cols.append(fock.create_word([coords_0[:, j]] + [coords_p[:, i] for i in combo]))
    gen = _orth(np.column_stack(cols)) if cols else np.zeros((fock.dim, 0))
    m3, m2 = cp.shape[1], cp.shape[1] - cp0.shape[1]
    expected = sum(math.comb(m3 + n - 1, n) - math.comb(m2 + n - 1, n) for n in range(fock.N + 1))
    return {"basis": nul, "dim": nul.shape[1], "expected_dim": expected, "generated": gen,
            "equal": _same_span(nul, gen)}


@dataclass(eq=False)
class PhysicalQuotient:
    fock: FockSpace
    embedding: np.ndarray
    gram_residual: float
    spans: bool

    @property
    def isometric(self) -> bool:
        return self.gram_residual <= TOL and self.spans


def physical_quotient(fock: FockSpace, phys: dict | None = None, nul: dict | None = None) -> PhysicalQuotient:
    """Fock space over ``p / p0`` with ``K~``, and its isometry onto ``H' / H''``.

    The embedding sends occupation states of the transverse modes into ``H'``;
    its Krein Gram matrix must be the identity and its image together with
    ``H''`` must span ``H'``.
    """
    phys = phys or physical_subspace(fock)
    nul = nul or null_space(fock, phys)
    grid = fock.one.grid
    q = FockSpace(OneParticleSpace.physical(grid), fock.N)
    T = fock.one.vectors.conj().T @ q.one.vectors
    E = second_quantize(q, T, target=fock)
    gram = E.conj().T @ (fock.metric[:, None] * E)
    res = float(np.max(np.abs(gram - np.diag(q.metric))))
    both = np.hstack([E, nul["basis"]])
    spans = bool(np.linalg.matrix_rank(both, tol=1e-10) == phys["dim"]
                 and np.linalg.norm(both - phys["basis"] @ (phys["basis"].conj().T @ both)) < 1e-8)
    return PhysicalQuotient(q, E, res, spans)


def induced_field_check(fock: FockSpace, f: gb.GBFunction, quotient_: PhysicalQuotient,
                        phys: dict) -> dict:
    """Field ``A(f)`` for ``f in p``: preserves ``H'`` and its induced quotient operator.

    ``induced`` holds the matrix elements ``<E phi, A(f) E psi>``; for ``f`` in
    ``p0`` they vanish (Maxwell-type smearings act trivially on the quotient).
    The direct construction on the quotient space uses the transverse part of ``f``.
    """
    A = A_field(fock, f).matrix
    V = phys["basis"]
    below_edge = np.all(np.abs(V[fock.sectors == fock.N]) < 1e-14, axis=0)
    img = A @ V[:, below_edge]
    leak = float(np.linalg.norm(img - V @ (V.conj().T @ img)))
    E = quotient_.embedding
    q = quotient_.fock
    induced = E.conj().T @ (fock.metric[:, None] * (A @ E))
    g, _, _ = gb.decompose_p(f)
    direct = np.diag(q.metric) @ A_field(q, g).matrix
    cols = q.sectors <= q.N - 1
    diff = float(np.max(np.abs((induced - direct)[:, cols]), initial=0.0))
    return {"invariance_residual": leak, "induced": induced, "induced_max": float(np.max(np.abs(induced[:, cols]))),
            "direct_residual": diff}


# ---------------------------------------------------------------- translations

def translation_generators(q: FockSpace) -> list[np.ndarray]:
    """One-particle ``P~_mu``: multiplication by ``(p0, p_vec)`` on ``p / p0`` representatives."""
    grid = q.one.grid
    v = q.one.vectors
    out = []
    for mu in range(4):
        mult = np.repeat(grid.p_upper[:, mu], 4).astype(complex)
        out.append(v.conj().T @ (mult[:, None] * v))
    return out


def second_quantize_generator(fock: FockSpace, X: np.ndarray) -> np.ndarray:
    """``dGamma(X) = sum_ij X_ij b_i^dag b_j`` (one-particle basis coordinates)."""
    m = np.zeros((fock.dim, fock.dim), dtype=complex)
    for i, bi in enumerate(fock.modes):
        for j, bj in enumerate(fock.modes):
            if X[i, j] != 0:
                m += X[i, j] * (bi.T @ bj)
    return m


def spectral_check(q: FockSpace, shift=(0.7, 0.3, -0.2, 0.5)) -> CheckResult:
    """Spectral condition on the physical Fock space.

    Checks that ``P~_0`` and ``dGamma(P~_0)`` are non-negative, that every
    one-particle eigenvector and every occupation state has total momentum in
    the closed forward cone, that the generators are ``K~``-selfadjoint, and
    that ``Gamma`` of the translation phase from the grid action fixes the
    vacuum and commutes with ``dGamma(P~_0)``.
    """
    gens = translation_generators(q)
    P0 = gens[0]
    kt = q.one.gram_K()
    selfadj = max(float(np.max(np.abs(kt @ g - (kt @ g).conj().T))) for g in gens)
    ev = np.linalg.eigvalsh(0.5 * (P0 + P0.conj().T))
    dP = [second_quantize_generator(q, g) for g in gens]
    fev = np.linalg.eigvalsh(0.5 * (dP[0] + dP[0].conj().T))
    # every operator is diagonal in the occupation basis: joint spectrum per state
    mom = np.real(np.stack([np.diag(m) for m in dP], axis=1))
    cone = mom[:, 0] - np.linalg.norm(mom[:, 1:], axis=1)
    offdiag = max(float(np.max(np.abs(m - np.diag(np.diag(m))))) for m in dP)
    grid = q.one.grid
    U = one_particle_matrix(grid, lambda f: gb.poincare_action(gb.translation(shift), f))
    Ug = second_quantize(q, q.one.vectors.conj().T @ U @ q.one.vectors)
    vac = q.vacuum()
    vac_res = float(np.linalg.norm(Ug @ vac - vac))
    comm = float(np.max(np.abs(Ug @ dP[0] - dP[0] @ Ug)))
    two = q.sectors == 2
    details = {
        "P0_min_eig": float(ev[0]), "dGamma_P0_min_eig": float(fev[0]), "one_particle_eigs": ev.tolist(),
        "cone_margin_min": float(cone.min()), "generator_offdiag": offdiag, "K_selfadjoint_residual": selfadj,
        "vacuum_invariance": vac_res, "translation_commutes": comm,
        "two_particle_min": float(mom[two, 0].min()) if np.any(two) else None,
        "min_p0": float(grid.p0.min()),
    }
    passed = (ev[0] >= -TOL and fev[0] >= -TOL and cone.min() >= -TOL and selfadj <= TOL
              and vac_res <= TOL and comm <= TOL * max(1.0, float(np.max(np.abs(dP[0])))))
    return CheckResult("fock.spectral", bool(passed), max(0.0, -float(min(ev[0], fev[0], cone.min()))), TOL, details)


def vacuum_weyl_expectation(q: FockSpace, f, seriesOrder: int) -> dict:
    """``<vacuum, sum_{k <= order} (i A(f))^k / k! vacuum>`` against ``exp(-K~(f, f) / 4)``.

    Raises
    ------
    InvalidArgument
        If ``seriesOrder`` exceeds ``2N`` (higher terms are corrupted by the
        truncation) or is negative.
    """
    if isinstance(seriesOrder, bool) or int(seriesOrder) != seriesOrder or seriesOrder < 0:
        raise InvalidArgument("seriesOrder must be a non-negative integer")
    if seriesOrder > 2 * q.N:
        raise InvalidArgument(f"seriesOrder {seriesOrder} exceeds 2N = {2 * q.N}")
    iA = 1j * A_field(q, f).matrix
    psi = q.vacuum()
    term = psi.copy()
    total = complex(psi[0])
    for k in range(1, int(seriesOrder) + 1):
        term = iA @ term / k
        total += complex(q.krein(q.vacuum(), term))
    kff = K_one(q, f, f).real
    closed = math.exp(-kff / 4)
    return {"value": total, "closed_form": closed, "gap": abs(total - closed), "K": kff}


def fock_grid(points: int = 2, extent: float = 1.0) -> gb.GBGrid:
    """Few-point grid for the Fock layer: ``+-e_z`` (2 points), then ``+-e_x``, ``+-e_y``."""
    axes = [(0, 0, 1), (1, 0, 0), (0, 1, 0)]
    if points not in (2, 4, 6):
        raise InvalidArgument("Fock grids have 2, 4 or 6 points")
    keep = []
    for ax in axes[: points // 2]:
        keep += [ax, tuple(-v for v in ax)]
    return gb.GBGrid(3, extent, keep=keep)
