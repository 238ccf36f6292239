"""Gupta-Bleuler electromagnetism on a finite momentum grid over the light cone.

Momenta ``p = (|p|, p_vec)`` run over a cubic lattice in ``p_vec`` with the
origin removed; the quadrature weight is ``w_p = spacing**3 / |p|``.  A
:class:`GBFunction` stores the lower components ``f_mu(p)``, so that

* ``sigma(f) = p^mu f_mu = p0 f_0 + p_vec . f_vec`` (gauge invariance is ``sigma = 0``),
* ``K(f, h) = -2 pi sum_p w_p conj(f_mu) eta^{mu nu} h_nu`` with ``eta = diag(+,-,-,-)``,
* ``B(f, h) = Im K(f, h)``.

For subspace work functions are realized in ``R^{8M}`` through the scaled
coordinates ``y = sqrt(2 pi w) f``, ``x = (Re y, Im y)``.  In these coordinates
the positive product ``2 pi sum w conj(f).h`` is the Euclidean one and the
symplectic form is ``[[0, -E], [E, 0]]`` with ``E = diag(eta)`` per point.

Test functions attached to spacetime boxes are Gaussians whose width is a
fixed fraction of the box; their Fourier transforms are evaluated in closed
form at the grid momenta.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument, PreconditionViolation, UnsupportedAction
from .report import CheckResult
from .symspace import (
    QuotientSpace,
    Subspace,
    SymplecticSpace,
    null_space,
    orth,
    quotient,
    radical,
    subspace_contains,
    subspace_equal,
)

ETA = np.array([1.0, -1.0, -1.0, -1.0])
# Roundoff scale of the quadrature sums; tolQuad never drops below it.
TOLQUAD_FLOOR = 1e-12
# Box half-width in units of the Gaussian width of the sampled profiles.
SUPPORT_SIGMAS = 4.0
CAUCHY_NORM = (2 * np.pi) ** 1.5
PROBE_WIDTH = 1.0


class GBGrid:
    """Symmetric momentum shell grid ``{k * spacing : k in [-m, m]^3} \\ ball``.

    Parameters
    ----------
    n : int
        Odd number of lattice points per axis (``m = (n - 1) // 2``).
    extent : float
        Largest momentum component; ``spacing = extent / m``.
    exclusion : float
        Points with ``|p| <= exclusion`` are dropped (the origin always is).
    window : float
        Half-size of the position region in which tolQuad is calibrated.
    parent : GBGrid, optional
        Coarser grid this one refines.
    keep : iterable of integer triples, optional
        Retain only these lattice points (closed under ``k -> -k``); used for
        the few-point grids of the Fock layer.
    """

    def __init__(self, n: int, extent: float, exclusion: float = 0.0, window: float = 6.0,
                 parent: "GBGrid | None" = None, keep: Iterable | None = None):
        if isinstance(n, bool) or int(n) != n or n < 3 or n % 2 == 0:
            raise InvalidArgument(f"points per axis must be an odd integer >= 3, got {n!r}")
        if not extent > 0 or not np.isfinite(extent):
            raise InvalidArgument("extent must be positive")
        if exclusion < 0 or window <= 0:
            raise InvalidArgument("exclusion must be >= 0 and window > 0")
        self.n = int(n)
        self.extent = float(extent)
        self.exclusion = float(exclusion)
        self.window = float(window)
        self.parent = parent
        self.keep = None if keep is None else tuple(sorted(tuple(int(v) for v in k) for k in keep))
        m = (self.n - 1) // 2
        self.spacing = self.extent / m
        rng = np.arange(-m, m + 1)
        ijk = np.array(list(itertools.product(rng, rng, rng)), dtype=np.int64)
        pts = ijk * self.spacing
        norm = np.linalg.norm(pts, axis=1)
        mask = (np.any(ijk != 0, axis=1)) & (norm > self.exclusion)
        if keep is not None:
            wanted = {tuple(int(v) for v in k) for k in keep}
            if any(max(abs(v) for v in k) > m for k in wanted):
                raise InvalidArgument("kept points must lie on the lattice")
            if any(tuple(-v for v in k) not in wanted for k in wanted):
                raise InvalidArgument("kept points must be closed under p -> -p")
            mask &= np.array([tuple(k) in wanted for k in ijk.tolist()])
        keep = mask
        self.ijk = ijk[keep]
        self.points = pts[keep]
        self.p0 = norm[keep]
        if self.points.shape[0] == 0:
            raise InvalidArgument("the exclusion radius removes every grid point")
        self.weights = self.spacing ** 3 / self.p0
        lookup = {tuple(k): i for i, k in enumerate(self.ijk)}
        self._lookup = lookup
        self.mirror = np.array([lookup[tuple(-k)] for k in self.ijk], dtype=np.int64)
        self.p_upper = np.column_stack([self.p0, self.points])
        self.p_lower = np.column_stack([self.p0, -self.points])
        self.coord_scale = np.sqrt(2 * np.pi * self.weights)
        for arr in (self.ijk, self.points, self.p0, self.weights, self.mirror, self.p_upper,
                    self.p_lower, self.coord_scale):
            arr.setflags(write=False)

    def __repr__(self):
        return f"GBGrid(n={self.n}, extent={self.extent}, M={self.size})"

    @property
    def size(self) -> int:
        """Number of grid points ``M``."""
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        """Real dimension ``8M`` of the realized function space."""
        return 8 * self.size

    def index(self, ijk) -> int:
        key = tuple(int(v) for v in ijk)
        if key not in self._lookup:
            raise InvalidArgument(f"{key} is not a grid point")
        return self._lookup[key]

    def refine(self, n: int | None = None) -> "GBGrid":
        """Finer grid on the same extent, ``2n - 1`` points per axis by default."""
        n = 2 * self.n - 1 if n is None else n
        if n <= self.n:
            raise InvalidArgument("a refinement needs more points per axis")
        if self.keep is not None:
            raise InvalidArgument("point-subset grids cannot be refined")
        return GBGrid(n, self.extent, self.exclusion, self.window, parent=self)

    def levels(self, k: int, step: int | None = None) -> list["GBGrid"]:
        """``k`` grids starting here; ``step`` adds that many points per axis each time."""
        if step is not None and (step <= 0 or step % 2):
            raise InvalidArgument("step must be a positive even integer")
        out = [self]
        for _ in range(k - 1):
            out.append(out[-1].refine(None if step is None else out[-1].n + step))
        return out

    @cached_property
    def space(self) -> SymplecticSpace:
        e = sp.diags(np.tile(ETA, self.size))
        form = sp.bmat([[None, -e], [e, None]], format="csr")
        return SymplecticSpace(form, f"gb{self.n}")

    @cached_property
    def tolQuad(self) -> float:
        return calibrate_tolquad(self)

    def to_dict(self) -> dict:
        return {"n": self.n, "extent": self.extent, "spacing": self.spacing, "exclusion": self.exclusion,
                "window": self.window, "points": self.size}


def _check_grid(*objs) -> GBGrid:
    grid = objs[0].grid
    for o in objs[1:]:
        if o.grid is not grid:
            raise InvalidArgument("functions live on different grids")
    return grid


@dataclass(frozen=True, eq=False)
class Box:
    """Closed spacetime box ``[t] x [x] x [y] x [z]`` given as (lo, hi) pairs."""

    t: tuple
    x: tuple
    y: tuple
    z: tuple

    def __post_init__(self):
        for name in ("t", "x", "y", "z"):
            lo, hi = (float(v) for v in getattr(self, name))
            if not hi > lo:
                raise InvalidArgument(f"box interval {name} must have hi > lo")
            object.__setattr__(self, name, (lo, hi))

    @classmethod
    def around(cls, center, halfwidths) -> "Box":
        c = np.asarray(center, dtype=float)
        h = np.broadcast_to(np.asarray(halfwidths, dtype=float), (4,))
        return cls(*[(c[i] - h[i], c[i] + h[i]) for i in range(4)])

    @property
    def intervals(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    @property
    def center(self) -> np.ndarray:
        return self.intervals.mean(axis=1)

    @property
    def halfwidths(self) -> np.ndarray:
        iv = self.intervals
        return 0.5 * (iv[:, 1] - iv[:, 0])

    def contains(self, other: "Box") -> bool:
        a, b = self.intervals, other.intervals
        return bool(np.all(a[:, 0] <= b[:, 0]) and np.all(b[:, 1] <= a[:, 1]))

    def spacelike_to(self, other: "Box") -> bool:
        """True iff every pair of points is spacelike separated."""
        a, b = self.intervals, other.intervals
        gaps = np.maximum(0.0, np.maximum(a[1:, 0] - b[1:, 1], b[1:, 0] - a[1:, 1]))
        dt = max(a[0, 1] - b[0, 0], b[0, 1] - a[0, 0])
        return bool(np.linalg.norm(gaps) > dt)

    def translated(self, a) -> "Box":
        a = np.asarray(a, dtype=float)
        return Box.around(self.center + a, self.halfwidths)

    def rotated(self, rot) -> "Box":
        r = np.asarray(rot, dtype=float)
        c = self.center.copy()
        h = self.halfwidths.copy()
        c[1:] = r @ c[1:]
        h[1:] = np.abs(r) @ h[1:]
        return Box.around(c, h)

    def to_dict(self) -> dict:
        return {k: list(getattr(self, k)) for k in ("t", "x", "y", "z")}


@dataclass(frozen=True, eq=False)
class GBFunction:
    """Grid function with four lower Lorentz components per point.

    ``support`` records the box a sampled function was built for; ``source``
    holds construction data (for example a :class:`CauchyProbe`).
    """

    grid: GBGrid
    values: np.ndarray
    support: Box | None = None
    source: object = None
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.size, 4):
            raise InvalidArgument(f"values must have shape ({self.grid.size}, 4), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("values contain non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def realType(self) -> bool:
        """Surrogate reality: ``conj f(p0, p) == f(p0, -p)`` at every point."""
        v = self.values
        return bool(np.max(np.abs(np.conj(v[self.grid.mirror]) - v), initial=0.0)
                    <= 1e-12 * max(1.0, float(np.max(np.abs(v), initial=0.0))))

    def _new(self, values) -> "GBFunction":
        return GBFunction(self.grid, values)

    def __add__(self, other: "GBFunction") -> "GBFunction":
        _check_grid(self, other)
        return self._new(self.values + other.values)

    def __sub__(self, other: "GBFunction") -> "GBFunction":
        _check_grid(self, other)
        return self._new(self.values - other.values)

    def __neg__(self) -> "GBFunction":
        return self._new(-self.values)

    def __mul__(self, c) -> "GBFunction":
        return self._new(complex(c) * self.values)

    __rmul__ = __mul__

    def norm(self) -> float:
        """Norm in the positive product ``2 pi sum w |f|^2``."""
        return float(np.linalg.norm(self.to_real()))

    def to_real(self) -> np.ndarray:
        y = self.grid.coord_scale[:, None] * self.values
        return np.concatenate([y.real.ravel(), y.imag.ravel()])

    @classmethod
    def from_real(cls, grid: GBGrid, x) -> "GBFunction":
        x = np.asarray(x, dtype=float)
        if x.shape != (grid.dim,):
            raise InvalidArgument(f"real vector must have length {grid.dim}")
        m4 = 4 * grid.size
        y = (x[:m4] + 1j * x[m4:]).reshape(grid.size, 4)
        return cls(grid, y / grid.coord_scale[:, None])

    @classmethod
    def zeros(cls, grid: GBGrid) -> "GBFunction":
        return cls(grid, np.zeros((grid.size, 4), dtype=complex))

    def to_json(self) -> dict:
        return {"points": self.grid.points.tolist(), "re": self.values.real.tolist(),
                "im": self.values.imag.tolist()}


def as_real_columns(functions: Sequence[GBFunction]) -> np.ndarray:
    if not functions:
        raise InvalidArgument("need at least one function")
    grid = _check_grid(*functions)
    return np.column_stack([f.to_real() for f in functions]) if functions else np.zeros((grid.dim, 0))


def random_function(grid: GBGrid, rng: np.random.Generator) -> GBFunction:
    return GBFunction(grid, rng.normal(size=(grid.size, 4)) + 1j * rng.normal(size=(grid.size, 4)))


def random_scalar(grid: GBGrid, rng: np.random.Generator, real: bool = True) -> np.ndarray:
    """Random gauge function; ``real`` makes it theta-real."""
    h = rng.normal(size=grid.size) + 1j * rng.normal(size=grid.size)
    if real:
        h = 0.5 * (h + np.conj(h[grid.mirror]))
    return h


# ---------------------------------------------------------------- forms

def K(f: GBFunction, h: GBFunction) -> complex:
    """``-2 pi sum_p w conj(f_mu) eta h_nu``."""
    grid = _check_grid(f, h)
    terms = (np.conj(f.values) * h.values) @ ETA
    return complex(-2 * np.pi * np.sum(grid.weights * terms))


def B(f: GBFunction, h: GBFunction) -> float:
    """Symplectic form ``Im K(f, h)``.

    Evaluated from real and imaginary parts so that ``B(f, f) = 0`` and
    ``B(f, h) = -B(h, f)`` hold exactly in floating point.
    """
    grid = _check_grid(f, h)
    fr, fi, hr, hi = f.values.real, f.values.imag, h.values.real, h.values.imag
    terms = (fr * hi - fi * hr) @ ETA
    return float(-2 * np.pi * np.sum(grid.weights * terms))


def J(f: GBFunction) -> GBFunction:
    """Metric flip ``(Jf)_0 = f_0``, ``(Jf)_l = -f_l``."""
    return GBFunction(f.grid, f.values * ETA)


def positive_product(f: GBFunction, h: GBFunction) -> complex:
    """``(f, h)_+ = -K(f, Jh) = 2 pi sum w conj(f) . h``."""
    return -K(f, J(h))


def sigma(f: GBFunction) -> np.ndarray:
    """``p^mu f_mu`` per grid point."""
    return np.sum(f.grid.p_upper * f.values, axis=1)


# ---------------------------------------------------------------- gauge maps

def _check_scalar(grid: GBGrid, h, real: bool = True) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape != (grid.size,):
        raise InvalidArgument(f"gauge function must have shape ({grid.size},)")
    if real:
        gap = np.max(np.abs(np.conj(h[grid.mirror]) - h), initial=0.0)
        if gap > 1e-12 * max(1.0, float(np.max(np.abs(h), initial=0.0))):
            raise InvalidArgument(f"gauge function is not theta-real (residual {gap:.2e})")
    return h


@dataclass(frozen=True, eq=False)
class GaugeMap:
    """``T_h^t``: a theta-real gauge function ``h`` and a real parameter ``t``."""

    grid: GBGrid
    h: np.ndarray
    t: float = 1.0

    def __post_init__(self):
        h = _check_scalar(self.grid, self.h).copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "t", float(self.t))


def gauge_coeff(f: GBFunction, h) -> complex:
    """``c(f, h) = sum_p w p^nu f_nu conj(h)``; linear in ``f``, antilinear in ``h``."""
    grid = f.grid
    h = _check_scalar(grid, h, real=False)
    return complex(np.sum(grid.weights * sigma(f) * np.conj(h)))


def gauge_G(h, f: GBFunction) -> GBFunction:
    """``G_h f = T_h^1 f - f = -i pi p_mu h c(f, h)``."""
    grid = f.grid
    h = _check_scalar(grid, h)
    c = gauge_coeff(f, h)
    return GBFunction(grid, -1j * np.pi * c * grid.p_lower * h[:, None])


def gauge_apply(g: GaugeMap, f: GBFunction) -> GBFunction:
    """``(T_h^t f)_mu = f_mu - i t pi p_mu h c(f, h)``."""
    if g.grid is not f.grid:
        raise InvalidArgument("gauge map and function live on different grids")
    if g.t == 0.0:
        return f
    return f + g.t * gauge_G(g.h, f)


def gauge_identity_residuals(f: GBFunction, k: GBFunction, g, h, t: float, s: float) -> dict:
    """Relative residuals of the gauge identities for one tuple.

    ``antisym``: ``B(G_h f, k) + B(f, G_h k)``; ``nilpotent``: ``G_g G_h f``;
    ``composition``: ``T_h^t T_g^s f - (f + t G_h f + s G_g f)``;
    ``scaling``: ``T_{th} f - (f + t^2 (T_h f - f))``; ``unitary_K`` and
    ``unitary_B``: change of ``K`` and ``B`` under ``T_h^t``.
    """
    grid = _check_grid(f, k)
    g = _check_scalar(grid, g)
    h = _check_scalar(grid, h)
    nf, nk = f.norm(), k.norm()
    # operator-norm bounds |G_h| <= |p h|^2 / 2 (Cauchy-Schwarz on c(f, h))
    oh, og = 0.5 * _ph_norm(grid, h) ** 2, 0.5 * _ph_norm(grid, g) ** 2
    Ghf, Ghk, Ggf = gauge_G(h, f), gauge_G(h, k), gauge_G(g, f)
    tiny = 1e-300
    res = {}
    res["antisym"] = abs(B(Ghf, k) + B(f, Ghk)) / max(nf * nk * oh, tiny)
    res["nilpotent"] = gauge_G(g, Ghf).norm() / max(nf * og * oh, tiny)
    lhs = gauge_apply(GaugeMap(grid, h, t), gauge_apply(GaugeMap(grid, g, s), f))
    rhs = f + t * Ghf + s * Ggf
    res["composition"] = (lhs - rhs).norm() / max(nf * (1 + abs(t) * oh) * (1 + abs(s) * og), tiny)
    lhs = gauge_apply(GaugeMap(grid, t * h, 1.0), f)
    rhs = f + t * t * (gauge_apply(GaugeMap(grid, h, 1.0), f) - f)
    res["scaling"] = (lhs - rhs).norm() / max(nf * (1 + t * t * oh), tiny)
    Tf, Tk = gauge_apply(GaugeMap(grid, h, t), f), gauge_apply(GaugeMap(grid, h, t), k)
    denom = max(nf * nk * (1 + abs(t) * oh) ** 2, tiny)
    res["unitary_K"] = abs(K(Tf, Tk) - K(f, k)) / denom
    res["unitary_B"] = abs(B(Tf, Tk) - B(f, k)) / denom
    return res


def fixed_point_tests(f: GBFunction, rtol: float = 1e-12) -> dict:
    """Three membership tests for gauge invariance, evaluated on point gauge functions.

    ``h`` runs over the theta-real combinations ``delta_m + delta_{-m}`` and
    ``i (delta_m - delta_{-m})`` (and ``delta_m`` alone when ``m`` is its own
    mirror, which cannot happen on an origin-free grid).
    """
    grid = f.grid
    s = sigma(f)
    w = grid.weights
    mir = grid.mirror
    scale = max(f.norm(), 1e-300) * float(np.max(grid.p0 * np.sqrt(w)))
    # c(f, delta_m + delta_mbar) and c(f, i delta_m - i delta_mbar)
    c_plus = w * s + w[mir] * s[mir]
    c_minus = -1j * (w * s - w[mir] * s[mir])
    c = np.concatenate([c_plus, c_minus])
    fixed = bool(np.max(np.abs(c), initial=0.0) <= rtol * scale)
    bform = 2 * np.pi ** 2 * np.abs(c) ** 2
    b_zero = bool(np.max(bform, initial=0.0) <= 2 * np.pi ** 2 * (rtol * scale) ** 2)
    pointwise = bool(np.max(np.abs(s) * np.sqrt(w), initial=0.0) <= rtol * scale)
    return {"fixed_by_all_T": fixed, "B_f_Gf_zero": b_zero, "sigma_zero": pointwise,
            "agree": fixed == b_zero == pointwise}


# ---------------------------------------------------------------- subspaces

def _coord_index(grid: GBGrid, mu: int, part: int) -> np.ndarray:
    return part * 4 * grid.size + 4 * np.arange(grid.size) + mu


def _transverse_frame(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal vectors orthogonal to each ``p``, built deterministically."""
    u = points / np.linalg.norm(points, axis=1, keepdims=True)
    axis = np.zeros_like(u)
    axis[np.arange(len(u)), np.argmin(np.abs(u), axis=1)] = 1.0
    e1 = np.cross(axis, u)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(u, e1)
    return e1, e2


def _pointwise_basis(grid: GBGrid, dirs: Sequence[np.ndarray]) -> np.ndarray:
    """Columns ``(d, 0)`` and ``(0, d)`` per point for unit 4-vectors ``d`` (shape (M, 4))."""
    M = grid.size
    cols = []
    for part in (0, 1):
        for d in dirs:
            block = np.zeros((grid.dim, M))
            for mu in range(4):
                block[_coord_index(grid, mu, part), np.arange(M)] = d[:, mu]
            cols.append(block)
    basis = np.hstack(cols)
    # order columns point by point so the layout is local
    order = np.argsort(np.tile(np.arange(M), 2 * len(dirs)), kind="stable")
    return basis[:, order]


def _spatial(vec: np.ndarray) -> np.ndarray:
    return np.column_stack([np.zeros(len(vec)), vec])


def p_directions(grid: GBGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point real unit 4-vectors spanning ``p``: ``p_mu / |p_mu|`` and two transverse ones."""
    ell = grid.p_lower / np.linalg.norm(grid.p_lower, axis=1, keepdims=True)
    e1, e2 = _transverse_frame(grid.points)
    return ell, _spatial(e1), _spatial(e2)


@lru_cache(maxsize=16)
def p0_space(grid: GBGrid) -> Subspace:
    """``{p_mu h}``: real dimension ``2M``."""
    ell = grid.p_lower / np.linalg.norm(grid.p_lower, axis=1, keepdims=True)
    return Subspace(grid.space, _pointwise_basis(grid, [ell]), _canonical=True)


@lru_cache(maxsize=16)
def coulomb_space(grid: GBGrid) -> Subspace:
    """``{f_0 = 0, p . f = 0}`` (complex-linear): real dimension ``4M``."""
    e1, e2 = _transverse_frame(grid.points)
    return Subspace(grid.space, _pointwise_basis(grid, [_spatial(e1), _spatial(e2)]), _canonical=True)


@lru_cache(maxsize=16)
def p_space(grid: GBGrid) -> Subspace:
    """Null space of ``sigma``: real dimension ``6M``."""
    ell = grid.p_lower / np.linalg.norm(grid.p_lower, axis=1, keepdims=True)
    e1, e2 = _transverse_frame(grid.points)
    return Subspace(grid.space, _pointwise_basis(grid, [ell, _spatial(e1), _spatial(e2)]), _canonical=True)


@lru_cache(maxsize=16)
def gradient_space(grid: GBGrid) -> Subspace:
    """``{i p_mu h : h theta-real}``: real dimension ``M``."""
    M = grid.size
    pairs = [(m, int(grid.mirror[m])) for m in range(M) if m < grid.mirror[m]]
    basis = np.zeros((grid.dim, 2 * len(pairs)))
    sc = grid.coord_scale
    for j, (m, mb) in enumerate(pairs):
        nrm = 2.0 * grid.p0[m] * sc[m]
        for mu in range(4):
            # h = delta_m + delta_mb: f = i p h, imaginary part only
            basis[_coord_index(grid, mu, 1)[m], 2 * j] = sc[m] * grid.p_lower[m, mu] / nrm
            basis[_coord_index(grid, mu, 1)[mb], 2 * j] = sc[mb] * grid.p_lower[mb, mu] / nrm
            # h = i delta_m - i delta_mb: f = -p h_m at m, +p at mb, real part only
            basis[_coord_index(grid, mu, 0)[m], 2 * j + 1] = -sc[m] * grid.p_lower[m, mu] / nrm
            basis[_coord_index(grid, mu, 0)[mb], 2 * j + 1] = sc[mb] * grid.p_lower[mb, mu] / nrm
    return Subspace(grid.space, basis, _canonical=True)


def maxwell_functions(grid: GBGrid) -> list[GBFunction]:
    """``f_mu = p_mu p^nu k_nu`` for a fixed smooth family of ``k``.

    ``k_nu = e_nu g(p) m(p)`` with ``g`` a Gaussian of width ``extent / 2`` and
    ``m`` in ``{1, p_x, p_y, p_z}`` (scaled), in both real and imaginary phase.
    """
    g = np.exp(-0.5 * (grid.p0 / (0.5 * grid.extent)) ** 2)
    monos = [np.ones(grid.size)] + [grid.points[:, i] / grid.extent for i in range(3)]
    out = []
    for nu in range(4):
        for mono in monos:
            for phase in (1.0, 1j):
                scalar = phase * grid.p_upper[:, nu] * g * mono  # p^nu k_nu
                out.append(GBFunction(grid, grid.p_lower * scalar[:, None]))
    return out


@lru_cache(maxsize=16)
def maxwell_space(grid: GBGrid) -> Subspace:
    return Subspace(grid.space, as_real_columns(maxwell_functions(grid)))


def subspace_report(grid: GBGrid) -> dict:
    """Ranks of the subspace family and the verified inclusions."""
    p, p0, c, gr, mx = (p_space(grid), p0_space(grid), coulomb_space(grid), gradient_space(grid),
                        maxwell_space(grid))
    return {
        "M": grid.size,
        "rank_p": p.rank, "rank_p0": p0.rank, "rank_c": c.rank, "rank_G": gr.rank, "rank_f": mx.rank,
        "f_in_p0": subspace_contains(p0, mx), "p0_in_p": subspace_contains(p, p0),
        "c_in_p": subspace_contains(p, c), "G_in_p0": subspace_contains(p0, gr),
        "f_strict": mx.rank < p0.rank,
        "reality_surrogate": "theta(f)(p) = conj f(-p); gates gauge functions and the gradient space only",
    }


# ---------------------------------------------------------------- decomposition

def decompose_p(f: GBFunction, rtol: float = 1e-10):
    """Split ``f in p`` as ``g + p_mu h`` with ``g_0 = 0`` and ``p . g = 0``.

    Returns ``(g, s, h)`` with ``s = p_mu h`` and ``h = f_0 / |p|``.

    Raises
    ------
    PreconditionViolation
        If ``sigma(f)`` is not zero to ``rtol`` relative to ``f``.
    """
    grid = f.grid
    resid = float(np.linalg.norm(sigma(f) / grid.p0 * grid.coord_scale))
    if resid > rtol * max(f.norm(), 1e-300):
        raise PreconditionViolation(f"function is not gauge invariant: residual {resid:.3e}")
    h = f.values[:, 0] / grid.p0
    s = GBFunction(grid, grid.p_lower * h[:, None])
    g = GBFunction(grid, f.values - s.values)
    return g, s, h


# ---------------------------------------------------------------- Krein positivity

def _K_gram(grid: GBGrid, basis: np.ndarray) -> np.ndarray:
    ehat = np.tile(ETA, 2 * grid.size)
    g = -basis.T @ (ehat[:, None] * basis)
    return 0.5 * (g + g.T)


def krein_positivity_report(grid: GBGrid) -> CheckResult:
    """Gram matrix of ``K`` on a basis of ``p``: sign, kernel size and kernel span.

    ``K`` is hermitian, so its values on ``p`` are those of the real symmetric
    form ``Re K`` on the real realization; the kernel is compared with ``p0``
    both by dimension and as a subspace.  The same test on ``c`` must find a
    strictly positive Gram matrix.
    """
    P = p_space(grid)
    gram = _K_gram(grid, P.basis)
    evals, evecs = np.linalg.eigh(gram)
    knorm = float(np.max(np.abs(evals)))
    kernel = evals < 1e-8 * knorm
    ker_space = Subspace(grid.space, P.basis @ evecs[:, kernel])
    p0 = p0_space(grid)
    c = coulomb_space(grid)
    c_evals = np.linalg.eigvalsh(_K_gram(grid, c.basis))
    # K(f, f) for the p0 basis itself
    p0_vals = np.abs(np.einsum("ij,ij->j", p0.basis, -np.tile(ETA, 2 * grid.size)[:, None] * p0.basis))
    details = {
        "min_eig": float(evals[0]), "K_norm": knorm, "kernel_dim": int(kernel.sum()), "rank_p0": p0.rank,
        "kernel_equals_p0": subspace_equal(ker_space, p0), "min_positive_eig": float(evals[~kernel].min()),
        "coulomb_min_eig": float(c_evals[0]), "p0_probe_max": float(p0_vals.max(initial=0.0)),
    }
    passed = (evals[0] >= -1e-10 * knorm and details["kernel_dim"] == p0.rank and details["kernel_equals_p0"]
              and c_evals[0] > 1e-8 * knorm and details["p0_probe_max"] <= 1e-14)
    return CheckResult("gb.krein_positivity", bool(passed), max(0.0, -float(evals[0])) / knorm, 1e-10, details)


def kernel_gap(grid: GBGrid) -> float:
    """Separation of the kernel of ``K`` on ``p`` from its positive part.

    ``K`` is block diagonal over grid points; each 3x3 block on the
    directions of :func:`p_directions` is scaled by its largest eigenvalue and
    the smallest ``lambda_2 - |lambda_1|`` over points is returned (1 in exact
    arithmetic).  Works on grids too large for a global Gram matrix.
    """
    dirs = np.stack(p_directions(grid), axis=2)
    gram = -2 * np.pi * grid.weights[:, None, None] * np.einsum("mai,a,maj->mij", dirs, ETA, dirs)
    ev = np.linalg.eigvalsh(gram)
    return float(np.min((ev[:, 1] - np.abs(ev[:, 0])) / ev[:, -1]))


def coulomb_nondegenerate(target) -> bool:
    """``B`` restricted to a Coulomb-type space has trivial radical.

    ``target`` is a :class:`GBGrid` (the full Coulomb space) or any
    :class:`Subspace` of a grid's realized space.
    """
    sub = coulomb_space(target) if isinstance(target, GBGrid) else target
    if not isinstance(sub, Subspace):
        raise InvalidArgument("expected a GBGrid or a Subspace")
    return radical(sub).rank == 0


# ---------------------------------------------------------------- Cauchy data

@dataclass(frozen=True)
class CauchyProbe:
    """Real Cauchy data ``Q = curl(u g(x - xq))``, ``R = curl(v g(x - xr))``.

    ``g`` is a Gaussian of the given width.  The probe is a divergence-free,
    time-component-free grid function whose field at time zero has these data.
    """

    u: tuple
    xq: tuple
    v: tuple
    xr: tuple
    width: float = PROBE_WIDTH

    def __post_init__(self):
        for name in ("u", "xq", "v", "xr"):
            val = tuple(float(c) for c in getattr(self, name))
            if len(val) != 3:
                raise InvalidArgument(f"{name} must have three components")
            object.__setattr__(self, name, val)

    def transforms(self, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Unitary 3D Fourier transforms of ``Q`` and ``R`` at momenta ``k``."""
        s = self.width

        def curl_hat(vec, x0):
            g = s ** 3 * np.exp(-0.5 * s * s * np.sum(k * k, axis=1)) * np.exp(-1j * (k @ np.asarray(x0)))
            return 1j * np.cross(k, np.asarray(vec)) * g[:, None]

        return curl_hat(self.u, self.xq), curl_hat(self.v, self.xr)

    def fields(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``Q`` and ``R`` at positions ``x`` (shape (n, 3))."""
        s = self.width

        def curl(vec, x0):
            d = x - np.asarray(x0)
            g = np.exp(-0.5 * np.sum(d * d, axis=1) / (s * s))
            return np.cross(-d / (s * s) * g[:, None], np.asarray(vec))

        return curl(self.u, self.xq), curl(self.v, self.xr)


def probe_function(grid: GBGrid, probe: CauchyProbe) -> GBFunction:
    """Grid function whose Cauchy data are those of ``probe``.

    Inverting the transform formulas gives ``f_l = (R^/c_R - i |p| Q^/c_Q) / 2``
    with ``c_Q = (2 pi)^{3/2}`` and ``c_R = -(2 pi)^{3/2}``.
    """
    q, r = probe.transforms(grid.points)
    vals = np.zeros((grid.size, 4), dtype=complex)
    vals[:, 1:] = 0.5 * (-r / CAUCHY_NORM - 1j * grid.p0[:, None] * q / CAUCHY_NORM)
    return GBFunction(grid, vals, source=probe)


def _check_cauchy_pre(f: GBFunction, rtol: float = 1e-10) -> None:
    grid = f.grid
    scale = max(f.norm(), 1e-300)
    r0 = float(np.linalg.norm(f.values[:, 0] * grid.coord_scale))
    rdiv = float(np.linalg.norm(np.sum(grid.points * f.values[:, 1:], axis=1) / grid.p0 * grid.coord_scale))
    if max(r0, rdiv) > rtol * scale:
        raise InvalidArgument(f"Cauchy data need f_0 = 0 and p . f = 0 (residuals {r0:.2e}, {rdiv:.2e})")


def cauchy_transforms(f: GBFunction) -> tuple[np.ndarray, np.ndarray]:
    """``Q^`` and ``R^`` from grid values, the mirror point supplying ``f(-p)``."""
    _check_cauchy_pre(f)
    grid = f.grid
    fv = f.values[:, 1:]
    fm = np.conj(fv[grid.mirror])
    q = 1j * CAUCHY_NORM / grid.p0[:, None] * (fv - fm)
    r = -CAUCHY_NORM * (fv + fm)
    return q, r


@lru_cache(maxsize=8)
def _position_lattice(window: float, width: float) -> tuple[np.ndarray, float]:
    half = window + 8.0 * width
    step = 0.5 * width
    n = int(math.ceil(half / step))
    t = np.arange(-n, n + 1) * step
    x = np.stack(np.meshgrid(t, t, t, indexing="ij"), axis=-1).reshape(-1, 3)
    x.setflags(write=False)
    return x, step ** 3


def cauchy_pairing(f: GBFunction, h: GBFunction) -> float:
    """``-1/(16 pi^2) integral (Q^f . R^h - R^f . Q^h)``.

    For probe functions the integral runs over a position lattice with the
    analytic fields; otherwise it is evaluated in momentum space from the grid
    values, ``-1/(16 pi^2) sum_p spacing^3 (Q^f(-p) . R^h(p) - R^f(-p) . Q^h(p))``.

    Raises
    ------
    InvalidArgument
        If either function has a time component or a longitudinal part.
    """
    grid = _check_grid(f, h)
    _check_cauchy_pre(f)
    _check_cauchy_pre(h)
    pf, ph = f.source, h.source
    if isinstance(pf, CauchyProbe) and isinstance(ph, CauchyProbe):
        reach = max(float(np.max(np.abs(np.array([pf.xq, pf.xr, ph.xq, ph.xr])))), grid.window)
        return _lattice_pairing(pf, ph, reach)
    qf, rf = cauchy_transforms(f)
    qh, rh = cauchy_transforms(h)
    mir = grid.mirror
    val = np.sum(np.sum(qf[mir] * rh - rf[mir] * qh, axis=1)) * grid.spacing ** 3
    return float(np.real(-val / (16 * np.pi ** 2)))


@lru_cache(maxsize=4096)
def _lattice_pairing(pf: CauchyProbe, ph: CauchyProbe, reach: float) -> float:
    x, dv = _position_lattice(reach, max(pf.width, ph.width))
    qf, rf = pf.fields(x)
    qh, rh = ph.fields(x)
    return float(-np.sum(np.sum(qf * rh - rf * qh, axis=1)) * dv / (16 * np.pi ** 2))


def cauchy_residual(f: GBFunction, h: GBFunction) -> float:
    """``|cauchy_pairing(f, h) - B(f, h)| / (|f| |h|)`` in the positive norm."""
    denom = max(f.norm() * h.norm(), 1e-300)
    return abs(cauchy_pairing(f, h) - B(f, h)) / denom


def reference_probes(window: float) -> list[CauchyProbe]:
    """Probes whose data sit at ``+-window`` on the axes, plus one at the origin."""
    ax = np.eye(3)
    out = []
    for i in range(3):
        a, b = ax[(i + 1) % 3], ax[(i + 2) % 3]
        out.append(CauchyProbe(a, window * ax[i], b, -window * ax[i]))
        out.append(CauchyProbe(b, -window * ax[i], a, window * ax[i]))
    out.append(CauchyProbe((1.0, 1.0, 0.0), (0.0, 0.0, 0.0), (0.0, 1.0, 1.0), (0.0, 0.0, 0.0)))
    return out


def cauchy_self_test(grid: GBGrid, probes: Sequence[CauchyProbe] | None = None) -> float:
    """Largest relative Cauchy residual over ordered pairs of distinct probes."""
    probes = list(probes) if probes is not None else reference_probes(grid.window)
    fs = [probe_function(grid, p) for p in probes]
    worst = 0.0
    for i, j in itertools.permutations(range(len(fs)), 2):
        worst = max(worst, cauchy_residual(fs[i], fs[j]))
    return worst


def calibrate_tolquad(grid: GBGrid) -> float:
    return max(cauchy_self_test(grid), TOLQUAD_FLOOR)


# ---------------------------------------------------------------- Poincare action

@dataclass(frozen=True, eq=False)
class PoincareElement:
    """``(a, Lambda)``: a translation 4-vector and a 4x4 Lorentz matrix."""

    a: np.ndarray = field(default_factory=lambda: np.zeros(4))
    L: np.ndarray = field(default_factory=lambda: np.eye(4))

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(4)
        L = np.asarray(self.L, dtype=float).reshape(4, 4)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "L", L)


def translation(a) -> PoincareElement:
    return PoincareElement(a=a)


def rotation(r) -> PoincareElement:
    L = np.eye(4)
    L[1:, 1:] = np.asarray(r, dtype=float)
    return PoincareElement(L=L)


def _rotation_permutation(grid: GBGrid, g: PoincareElement) -> tuple[np.ndarray, np.ndarray]:
    L = g.L
    if np.any(L[0, 1:] != 0) or np.any(L[1:, 0] != 0) or L[0, 0] != 1:
        raise UnsupportedAction("boosts and time reversal are not grid symmetries")
    r = L[1:, 1:]
    ri = np.rint(r)
    if np.any(np.abs(r - ri) > 1e-12) or not np.allclose(ri @ ri.T, np.eye(3)) or np.linalg.det(ri) < 0:
        raise UnsupportedAction("only proper rotations of the cubic point group are supported")
    ri = ri.astype(np.int64)
    # (V f)(p) = R f(R^-1 p): source index of each target point
    src = np.array([grid.index(ri.T @ k) for k in grid.ijk], dtype=np.int64)
    return ri.astype(float), src


def poincare_action(g: PoincareElement, f: GBFunction) -> GBFunction:
    """``(V_g f)(p) = exp(-i p.a) Lambda f(Lambda^-1 p)`` for translations and cubic rotations.

    Raises
    ------
    UnsupportedAction
        For boosts and for rotations that do not map the grid to itself.
    """
    grid = f.grid
    r, src = _rotation_permutation(grid, g)
    vals = f.values[src].copy()
    vals[:, 1:] = vals[:, 1:] @ r.T
    pa = grid.p0 * g.a[0] - grid.points @ g.a[1:]
    return GBFunction(grid, np.exp(-1j * pa)[:, None] * vals)


def real_operator(grid: GBGrid, g: PoincareElement):
    """``V_g`` acting on column blocks of realized vectors."""
    r, src = _rotation_permutation(grid, g)

    def op(x):
        x = np.asarray(x, dtype=float)
        one = x.ndim == 1
        cols = x[:, None] if one else x
        out = np.empty_like(cols)
        for j in range(cols.shape[1]):
            out[:, j] = poincare_action(g, GBFunction.from_real(grid, cols[:, j])).to_real()
        return out[:, 0] if one else out

    return op


# ---------------------------------------------------------------- region sampling

def _profile(grid: GBGrid, box: Box, factor: float) -> np.ndarray:
    """Fourier transform (up to a constant) of a Gaussian centred in ``box``.

    Convention ``h^(p) = integral exp(-i p.x) h(x) d^4x`` with
    ``p.x = p0 t - p_vec . x_vec``; widths are ``factor * halfwidth / SUPPORT_SIGMAS``.
    """
    sig = factor * box.halfwidths / SUPPORT_SIGMAS
    c = box.center
    env = np.exp(-0.5 * (sig[0] * grid.p0) ** 2 - 0.5 * np.sum((sig[1:] * grid.points) ** 2, axis=1))
    phase = np.exp(-1j * (grid.p0 * c[0] - grid.points @ c[1:]))
    return env * phase


def _normalized(grid: GBGrid, vals: np.ndarray, box: Box, label: str) -> GBFunction:
    f = GBFunction(grid, vals, support=box, label=label)
    n = f.norm()
    if n == 0:
        raise InvalidArgument("sampled profile vanishes on the grid")
    return GBFunction(grid, vals / n, support=box, label=label)


def region_family(grid: GBGrid, box: Box, factor: float = 1.0) -> list[GBFunction]:
    """Eleven samples for one width: gradient, six curl types, four polarizations."""
    h = _profile(grid, box, factor)
    out = [_normalized(grid, 1j * grid.p_lower * h[:, None], box, "gradient")]
    for a, b in itertools.combinations(range(4), 2):
        vals = np.zeros((grid.size, 4), dtype=complex)
        vals[:, b] += 1j * grid.p_upper[:, a] * h
        vals[:, a] -= 1j * grid.p_upper[:, b] * h
        out.append(_normalized(grid, vals, box, f"curl{a}{b}"))
    for mu in range(4):
        vals = np.zeros((grid.size, 4), dtype=complex)
        vals[:, mu] = h
        out.append(_normalized(grid, vals, box, f"pol{mu}"))
    return out


def region_sample(grid: GBGrid, box: Box, n: int = 11) -> list[GBFunction]:
    """``n`` test functions attached to ``box``.

    Samples come in families of eleven per Gaussian width (widths shrink by
    0.8 per family): the gradient ``i p_mu h``, the six curl types
    ``i p^nu F_{nu mu} h`` (gauge invariant by construction) and the four
    constant polarizations.

    Raises
    ------
    InvalidArgument
        If ``n < 0`` or the box is narrower than the position resolution
        ``2 pi / extent`` of the grid.
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise InvalidArgument("n must be a non-negative integer")
    res = 2 * np.pi / grid.extent
    if np.any(box.halfwidths[1:] < res):
        raise InvalidArgument(f"box half-widths must be at least {res:.3g} for this grid")
    out: list[GBFunction] = []
    k = 0
    while len(out) < n:
        out.extend(region_family(grid, box, 0.8 ** k))
        k += 1
    return out[:n]


def gradient_scalars(grid: GBGrid, samples: Sequence[GBFunction]) -> list[np.ndarray]:
    """Gauge functions ``h`` of the gradient samples (``f = i p h``)."""
    out = []
    for f in samples:
        if f.label == "gradient":
            out.append(f.values[:, 0] / (1j * grid.p0))
    return out


def observable_coefficients(samples: Sequence[GBFunction]) -> np.ndarray:
    """Real coefficient vectors ``c`` with ``sum c_i f_i`` gauge invariant (columns)."""
    grid = _check_grid(*samples)
    sig = np.column_stack([sigma(f) * grid.coord_scale / grid.p0 for f in samples])
    return null_space(np.vstack([sig.real, sig.imag]), 1.0)


def _positive_orthonormal(grid: GBGrid, samples: Sequence[GBFunction], coeff: np.ndarray) -> np.ndarray:
    """Orthonormal (positive product) realized basis of the span of ``sum c f``."""
    x = as_real_columns(samples) @ coeff
    return orth(x, 1.0) if x.shape[1] else x


def spacelike_residual(grid: GBGrid, box1: Box, box2: Box, n: int = 11) -> dict:
    """Weak-causality and field-level quantities for two boxes.

    ``observable_B``: largest ``|B|`` between positive-orthonormal bases of
    the gauge-invariant parts of the two sample spans.  ``field_witness``:
    largest ``|c(f, h)| / (|f| |p h|)`` for ``f`` sampled in one box and a
    gradient gauge function ``h`` of the other.
    """
    s1, s2 = region_sample(grid, box1, n), region_sample(grid, box2, n)
    o1 = _positive_orthonormal(grid, s1, observable_coefficients(s1))
    o2 = _positive_orthonormal(grid, s2, observable_coefficients(s2))
    bmax = float(np.max(np.abs(grid.space.gram(o1, o2)), initial=0.0)) if o1.size and o2.size else 0.0
    witness = max(field_witness(grid, s1, s2), field_witness(grid, s2, s1))
    return {"spacing": grid.spacing, "observable_B": bmax, "field_witness": witness,
            "observable_ranks": [o1.shape[1], o2.shape[1]], "spacelike": box1.spacelike_to(box2)}


def _ph_norm(grid: GBGrid, h: np.ndarray) -> float:
    return float(np.sqrt(2 * np.pi * np.sum(grid.weights * np.sum(grid.p_lower ** 2, axis=1) * np.abs(h) ** 2)))


def field_witness(grid: GBGrid, fields: Sequence[GBFunction], gauge_samples: Sequence[GBFunction]) -> float:
    best = 0.0
    for h in gradient_scalars(grid, gauge_samples):
        nh = max(_ph_norm(grid, h), 1e-300)
        for f in fields:
            best = max(best, abs(gauge_coeff(f, h)) / (max(f.norm(), 1e-300) * nh))
    return best


# ---------------------------------------------------------------- nets and chains

@dataclass(eq=False)
class GBNet:
    """Net data built from region samples; ``net`` feeds the checkers of :mod:`ccr_reduce.net`."""

    grid: GBGrid
    boxes: dict
    samples: dict
    net: object
    operators: dict
    elements: dict


def gb_net(grid: GBGrid, regions: Mapping[str, Box], leq: Iterable = (), spacelike: Iterable = (),
           actions: Mapping[str, tuple] | None = None, n: int = 11) -> GBNet:
    """Assemble a net from boxes.

    ``X(B)`` is the real span of the samples of every region ``<= B``, ``s(B)``
    the span of their gradient samples and ``o(B) = X(B) ∩ p`` (computed from
    ``sigma`` inside the sample span).  ``actions`` maps a name to
    ``(PoincareElement, {region: image})``.  The order and spacelike relation
    are taken as declared; geometry is not re-derived, so a mislabeled pair
    shows up in the causality check.
    """
    from .net import LocalAssignment, RegionPoset

    names = list(regions)
    actions = dict(actions or {})
    poset = RegionPoset(names, leq, spacelike, {k: v[1] for k, v in actions.items()})
    samples = {r: region_sample(grid, regions[r], n) for r in names}
    space = grid.space
    X, S, O, gauge = {}, {}, {}, {}
    for r in names:
        below = [b for b in names if poset.leq(b, r)]
        fs = [f for b in below for f in samples[b]]
        X[r] = Subspace(space, as_real_columns(fs))
        grads = [f for f in fs if f.label == "gradient"]
        S[r] = Subspace(space, as_real_columns(grads)) if grads else space.zero()
        coeff = observable_coefficients(fs)
        O[r] = Subspace(space, as_real_columns(fs) @ coeff) if coeff.shape[1] else space.zero()
        gauge[r] = _gauge_probe(grid, gradient_scalars(grid, samples[r]))
    net = LocalAssignment(poset, space, X, S, O, gauge=gauge)
    ops = {k: real_operator(grid, v[0]) for k, v in actions.items()}
    return GBNet(grid, dict(regions), samples, net, ops, {k: v[0] for k, v in actions.items()})


def _gauge_probe(grid: GBGrid, scalars: list[np.ndarray]):
    norms = [max(_ph_norm(grid, h), 1e-300) for h in scalars]

    def probe(cols):
        cols = np.atleast_2d(np.asarray(cols, dtype=float))
        out = []
        for j in range(cols.shape[1]):
            f = GBFunction.from_real(grid, cols[:, j])
            nf = max(f.norm(), 1e-300)
            out.extend(abs(gauge_coeff(f, h)) / (nf * nh) for h, nh in zip(scalars, norms))
        return np.array(out)

    return probe


@dataclass(frozen=True, eq=False)
class TwoChain:
    """``G ⊆ p0``: gradient constraints, then all of ``p0``; observables ``p``."""

    grid: GBGrid
    chain: list
    observables: Subspace
    admissible: bool


def two_chain(grid: GBGrid) -> TwoChain:
    g, p0, p = gradient_space(grid), p0_space(grid), p_space(grid)
    admissible = subspace_contains(p0, g) and subspace_contains(p, p0)
    return TwoChain(grid, [g, p0], p, bool(admissible))


def first_stage_radical(grid: GBGrid) -> dict:
    """Form on ``p / G`` (observables after the first stage only): its radical is ``p0 / G``."""
    g, p = gradient_space(grid), p_space(grid)
    q: QuotientSpace = quotient(p, g)
    rad = null_space(q.factoredForm, 1.0) if q.repDim else np.zeros((0, 0))
    return {"quotient_dim": q.repDim, "radical_rank": int(rad.shape[1]), "nondegenerate": rad.shape[1] == 0}
