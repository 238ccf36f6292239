"""Finite-dimensional presymplectic linear algebra.

A :class:`SymplecticSpace` is a real coordinate space ``R^n`` carrying an
antisymmetric, possibly degenerate, bilinear form ``B``.  Subspaces are stored
through a canonical orthonormal basis (columns), so equality, containment and
report output do not depend on how a subspace was produced.

All rank decisions go through :func:`null_space` / :func:`orth`, which use the
singular value decomposition with the cutoff ``RANK_RTOL * max(sigma_max, scale)``.

Examples
--------
>>> import numpy as np
>>> X = darboux(2)
>>> s = X.span([1, 0, 0, 0])               # span{q1}
>>> commutant(s).rank
3
>>> t = quotient(commutant(s), s)
>>> t.factoredForm.round(12)
array([[ 0.,  1.],
       [-1.,  0.]])
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import _validate as V
from .errors import InvalidArgument, PreconditionViolation

RANK_RTOL = 1e-10
# Residual tolerance for containment tests between orthonormal bases.
SPAN_TOL = 1e-8

PIVOT_TIE = 1e-9


def _svd(a: np.ndarray):
    # the full right factor is needed only for wide matrices
    full = a.shape[0] < a.shape[1]
    try:
        return sla.svd(a, full_matrices=full, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        return sla.svd(a, full_matrices=full, lapack_driver="gesvd")


def null_space(a: np.ndarray, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of ``{x : a x = 0}``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[1]
    if a.shape[0] == 0 or n == 0:
        return np.eye(n)
    _, s, vh = _svd(a)
    smax = s[0] if s.size else 0.0
    tol = RANK_RTOL * max(smax, scale)
    r = int(np.sum(s > tol))
    return vh[r:].T.copy()


def orth(a: np.ndarray, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the column span of ``a``."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = sla.svd(a, full_matrices=False)
    smax = s[0] if s.size else 0.0
    tol = RANK_RTOL * max(smax, scale)
    r = int(np.sum(s > tol))
    return u[:, :r].copy()


def numerical_rank(a: np.ndarray, scale: float = 0.0) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = sla.svdvals(a)
    tol = RANK_RTOL * max(s[0] if s.size else 0.0, scale)
    return int(np.sum(s > tol))


def _sign_fix(q: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry of non-negligible size is positive."""
    if q.shape[1] == 0:
        return q
    q = q.copy()
    for j in range(q.shape[1]):
        col = q[:, j]
        big = np.flatnonzero(np.abs(col) > 1e-8)
        if big.size and col[big[0]] < 0:
            q[:, j] = -col
    return q


def canonical_basis(a: np.ndarray, scale: float = 0.0) -> np.ndarray:
    """Orthonormal, sign-fixed basis of the column span of ``a``.

    The basis is built from the orthogonal projector onto the span, so it
    depends only on the span: a greedy pivoted Gram-Schmidt on the projector
    columns picks coordinate directions in a fixed order, with near-ties
    resolved towards the lower index.
    """
    q = orth(a, scale)
    r = q.shape[1]
    if r == 0 or r == q.shape[0]:
        return _sign_fix(np.eye(q.shape[0])[:, :r] if r else q)
    if q.shape[0] <= 600:
        rest = q @ q.T
        cols = []
        for _ in range(r):
            norms = np.linalg.norm(rest, axis=0)
            j = int(np.flatnonzero(norms >= (1 - PIVOT_TIE) * norms.max())[0])
            v = rest[:, j] / norms[j]
            cols.append(v)
            rest = rest - np.outer(v, v @ rest)
        q, _ = np.linalg.qr(np.column_stack(cols))
    return _sign_fix(q)


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    """Coordinate space ``R^dim`` with an antisymmetric form.

    Parameters
    ----------
    form : (dim, dim) array_like or sparse matrix
        Antisymmetric matrix of the form, ``B(f, h) = f^T form h``.
    label : str
        Free-text name used in reports.
    """

    form: np.ndarray | sp.spmatrix
    label: str = ""
    dim: int = field(init=False)
    scale: float = field(init=False, repr=False)

    def __post_init__(self):
        form = V.as_square(self.form, name="form")
        V.check_antisymmetric(form)
        if form.shape[0] < 1:
            raise InvalidArgument("dim must be at least 1")
        if isinstance(form, np.ndarray):
            form = form.copy()
            form.setflags(write=False)
            scale = float(np.linalg.norm(form, 2)) if form.shape[0] <= 2000 else float(np.abs(form).sum(axis=0).max())
        else:
            scale = float(abs(form).sum(axis=0).max())
        object.__setattr__(self, "form", form)
        object.__setattr__(self, "dim", form.shape[0])
        object.__setattr__(self, "scale", scale)

    def apply(self, h: np.ndarray) -> np.ndarray:
        """``form @ h`` for vectors or column blocks."""
        return self.form @ h

    def gram(self, a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
        """Matrix of pairings ``B(a_i, b_j)`` between column blocks."""
        b = a if b is None else b
        return a.T @ np.asarray(self.apply(b))

    def span(self, vectors, *, columns: bool = False) -> "Subspace":
        """Subspace spanned by the given vectors (rows by default)."""
        arr = np.asarray(vectors, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :] if arr.size else arr.reshape(0, self.dim)
        if not columns:
            arr = arr.T
        return Subspace(self, arr)

    def full(self) -> "Subspace":
        return Subspace(self, np.eye(self.dim), _canonical=True)

    def zero(self) -> "Subspace":
        return Subspace(self, np.zeros((self.dim, 0)), _canonical=True)


def darboux(n: int, label: str = "") -> SymplecticSpace:
    """Standard symplectic ``R^{2n}`` with coordinates (q1, p1, ..., qn, pn)."""
    n = V.positive_int(n, name="n")
    j = np.zeros((2 * n, 2 * n))
    for k in range(n):
        j[2 * k, 2 * k + 1] = 1.0
        j[2 * k + 1, 2 * k] = -1.0
    return SymplecticSpace(j, label or f"darboux{2 * n}")


class Subspace:
    """Linear subspace of a :class:`SymplecticSpace`.

    Parameters
    ----------
    ambient : SymplecticSpace
    basis : (dim, k) array_like
        Spanning vectors as columns.  They need not be independent; the stored
        basis is a canonical orthonormal basis of their span.
    """

    __slots__ = ("ambient", "basis", "rank")

    def __init__(self, ambient: SymplecticSpace, basis, _canonical: bool = False):
        if not isinstance(ambient, SymplecticSpace):
            raise InvalidArgument("ambient must be a SymplecticSpace")
        b = V.as_columns(basis, ambient.dim, name="basis") if np.size(basis) else np.zeros((ambient.dim, 0))
        if not _canonical:
            b = canonical_basis(b, float(np.max(np.linalg.norm(b, axis=0), initial=0.0)))
        b = np.ascontiguousarray(b)
        b.setflags(write=False)
        self.ambient = ambient
        self.basis = b
        self.rank = b.shape[1]

    def __repr__(self):
        return f"Subspace(rank={self.rank}, dim={self.ambient.dim}, ambient={self.ambient.label!r})"

    def projector_apply(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ v)

    def residual(self, v) -> float:
        """Norm of the component of ``v`` (vector or columns) outside the subspace."""
        v = np.asarray(v, dtype=float)
        if v.size == 0:
            return 0.0
        return float(np.linalg.norm(v - self.projector_apply(v)))

    def __contains__(self, v) -> bool:
        v = V.as_vector(v, self.ambient.dim)
        nv = np.linalg.norm(v)
        return nv == 0 or self.residual(v) <= SPAN_TOL * nv


def _check_ambient(*subs: Subspace) -> SymplecticSpace:
    amb = subs[0].ambient
    for s in subs[1:]:
        if s.ambient is not amb:
            raise InvalidArgument("subspaces live in different ambient spaces")
    return amb


def form_eval(space: SymplecticSpace, f, h) -> float:
    """``B(f, h) = f^T form h``."""
    f = V.as_vector(f, space.dim, name="f")
    h = V.as_vector(h, space.dim, name="h")
    return float(f @ space.apply(h))


def commutant(s: Subspace) -> Subspace:
    """``s' = {f : B(f, g) = 0 for all g in s}``."""
    amb = s.ambient
    if s.rank == 0:
        return amb.full()
    cond = np.asarray(amb.apply(s.basis)).T
    return Subspace(amb, null_space(cond, amb.scale))


def restricted_form(w: Subspace) -> np.ndarray:
    """Matrix of ``B`` on the stored basis of ``w``."""
    return w.ambient.gram(w.basis)


def radical(w: Subspace) -> Subspace:
    """``w ∩ w'``: vectors of ``w`` pairing to zero with all of ``w``."""
    if w.rank == 0:
        return w
    g = restricted_form(w)
    coeff = null_space(g, w.ambient.scale)
    return Subspace(w.ambient, w.basis @ coeff)


def is_first_class(s: Subspace, tol: float = RANK_RTOL) -> bool:
    """True iff ``s ⊆ s'``, i.e. the form vanishes on ``s``."""
    if s.rank == 0:
        return True
    g = restricted_form(s)
    return float(np.max(np.abs(g))) <= tol * max(s.ambient.scale, 1e-300)


def is_nondegenerate(w: Subspace) -> bool:
    return radical(w).rank == 0


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    amb = _check_ambient(a, b)
    return Subspace(amb, np.hstack([a.basis, b.basis]))


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the null space of the stacked bases ``[A, -B]``."""
    amb = _check_ambient(a, b)
    if a.rank == 0 or b.rank == 0:
        return amb.zero()
    coeff = null_space(np.hstack([a.basis, -b.basis]), 1.0)
    return Subspace(amb, a.basis @ coeff[: a.rank])


def subspace_contains(big: Subspace, small: Subspace, tol: float = SPAN_TOL) -> bool:
    """True iff ``small ⊆ big`` up to the projection residual ``tol``."""
    _check_ambient(big, small)
    if small.rank == 0:
        return True
    if small.rank > big.rank:
        return False
    return bool(big.residual(small.basis) <= tol * np.sqrt(small.rank))


def subspace_equal(a: Subspace, b: Subspace, tol: float = SPAN_TOL) -> bool:
    return bool(a.rank == b.rank and subspace_contains(a, b, tol) and subspace_contains(b, a, tol))


def double_commutant_holds(s: Subspace) -> bool:
    """True iff ``s'' = s``."""
    return subspace_equal(commutant(commutant(s)), s)


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    """``numerator / kernel`` with the factored form.

    Representatives are the orthogonal complement of ``kernel`` inside
    ``numerator``; ``liftMap`` (dim x repDim) embeds representative coordinates,
    ``projectMap`` (repDim x dim) sends ambient vectors of the numerator to the
    coordinates of their class.
    """

    numerator: Subspace
    kernel: Subspace
    repDim: int
    projectMap: np.ndarray
    liftMap: np.ndarray
    factoredForm: np.ndarray

    def project(self, v) -> np.ndarray:
        return self.projectMap @ np.asarray(v, dtype=float)

    def lift(self, x) -> np.ndarray:
        return self.liftMap @ np.asarray(x, dtype=float)

    def is_nondegenerate(self) -> bool:
        if self.repDim == 0:
            return True
        scale = self.numerator.ambient.scale
        return numerical_rank(self.factoredForm, scale) == self.repDim


def quotient(numerator: Subspace, kernel: Subspace) -> QuotientSpace:
    """Factor ``numerator`` by ``kernel``; ``kernel`` must lie in the radical."""
    amb = _check_ambient(numerator, kernel)
    if not subspace_contains(numerator, kernel):
        raise PreconditionViolation("kernel is not contained in the numerator")
    if kernel.rank and numerator.rank:
        cross = amb.gram(kernel.basis, numerator.basis)
        i, j = np.unravel_index(np.argmax(np.abs(cross)), cross.shape)
        if abs(cross[i, j]) > RANK_RTOL * max(amb.scale, 1e-300) * 10:
            raise PreconditionViolation(
                f"kernel is not in the radical of the numerator: B(k_{i}, n_{j}) = {cross[i, j]:.3e}"
            )
    rest = numerator.basis - kernel.projector_apply(numerator.basis) if kernel.rank else numerator.basis
    reps = canonical_basis(rest, 1.0) if numerator.rank else np.zeros((amb.dim, 0))
    lift = reps
    project = reps.T.copy()
    factored = amb.gram(lift) if reps.shape[1] else np.zeros((0, 0))
    factored = 0.5 * (factored - factored.T)
    for arr in (lift, project, factored):
        arr.setflags(write=False)
    return QuotientSpace(numerator, kernel, reps.shape[1], project, lift, factored)
