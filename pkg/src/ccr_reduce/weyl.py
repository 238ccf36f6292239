"""Weyl algebra of a presymplectic space and states on it.

Generators ``δ_f`` are indexed by exact group labels: integer coordinates with
respect to a :class:`LabelBasis` whose axes carry rational step sizes.  Label
arithmetic and label equality are therefore exact, while coefficients and the
phases ``exp(i B(f, h) / 2)`` are complex floats.

The product is ``δ_f δ_h = exp(i B(f,h)/2) δ_{f+h}`` and ``δ_f* = δ_{-f}``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _validate as V
from .errors import InvalidArgument, PreconditionViolation
from .symspace import SPAN_TOL, Subspace, SymplecticSpace, commutant, is_first_class

PRUNE = 1e-15

Coords = tuple


class LabelBasis:
    """Integer lattice of labels inside a symplectic space.

    A label with coordinates ``c`` realizes the vector
    ``sum_i c_i * step_i * vectors[:, i]``.

    Parameters
    ----------
    space : SymplecticSpace
    vectors : (dim, k) array_like
        Axis vectors as columns.
    step : rational or sequence of rationals, optional
        Per-axis step size (default 1).
    """

    def __init__(self, space: SymplecticSpace, vectors, step=1):
        self.space = space
        vec = V.as_columns(vectors, space.dim, name="vectors")
        self.rank = vec.shape[1]
        if isinstance(step, (int, Fraction, str)):
            step = [step] * self.rank
        if len(step) != self.rank:
            raise InvalidArgument("one step per axis is required")
        self.step = tuple(Fraction(s) for s in step)
        self.vectors = vec * np.array([float(s) for s in self.step])
        self.vectors.setflags(write=False)
        gram = space.gram(self.vectors)
        self._gram = 0.5 * (gram - gram.T)
        self.zero = (0,) * self.rank

    @classmethod
    def standard(cls, space: SymplecticSpace, step=1) -> "LabelBasis":
        return cls(space, np.eye(space.dim), step)

    def label(self, coords) -> "GroupLabel":
        return GroupLabel(self._coords(coords), self)

    def _coords(self, coords) -> Coords:
        c = tuple(int(x) for x in coords)
        if len(c) != self.rank or any(int(x) != x for x in coords):
            raise InvalidArgument(f"label needs {self.rank} integer coordinates, got {coords!r}")
        return c

    def realize(self, coords) -> np.ndarray:
        return self.vectors @ np.asarray(coords, dtype=float)

    def pairing(self, a: Coords, b: Coords) -> float:
        return float(np.asarray(a, dtype=float) @ self._gram @ np.asarray(b, dtype=float))


@dataclass(frozen=True)
class GroupLabel:
    """Exact label ``f`` of a generator ``δ_f``."""

    coords: Coords
    basis: LabelBasis

    def __add__(self, other: "GroupLabel") -> "GroupLabel":
        _same_basis(self.basis, other.basis)
        return GroupLabel(tuple(a + b for a, b in zip(self.coords, other.coords)), self.basis)

    def __neg__(self) -> "GroupLabel":
        return GroupLabel(tuple(-a for a in self.coords), self.basis)

    def __sub__(self, other: "GroupLabel") -> "GroupLabel":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, GroupLabel) and self.basis is other.basis and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.basis), self.coords))

    @property
    def scale(self) -> tuple:
        return self.basis.step

    def vector(self) -> np.ndarray:
        return self.basis.realize(self.coords)


def _same_basis(a: LabelBasis, b: LabelBasis) -> None:
    if a is not b:
        raise InvalidArgument("operands refer to different label bases")


class WeylElement:
    """Finite combination ``sum_k c_k δ_{f_k}``."""

    __slots__ = ("basis", "terms")

    def __init__(self, basis: LabelBasis, terms: Mapping | None = None):
        self.basis = basis
        clean: dict[Coords, complex] = {}
        for key, c in (terms or {}).items():
            key = basis._coords(key.coords if isinstance(key, GroupLabel) else key)
            clean[key] = clean.get(key, 0j) + complex(c)
        self.terms = {k: v for k, v in clean.items() if abs(v) > PRUNE}

    def __repr__(self):
        inner = ", ".join(f"{c:.4g}·δ{list(k)}" for k, c in sorted(self.terms.items()))
        return f"WeylElement({inner or '0'})"

    def coefficient(self, coords) -> complex:
        return self.terms.get(tuple(coords), 0j)

    def labels(self) -> list[GroupLabel]:
        return [GroupLabel(k, self.basis) for k in sorted(self.terms)]

    def __add__(self, other):
        if not isinstance(other, WeylElement):
            other = identity(self.basis, other)
        _same_basis(self.basis, other.basis)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return WeylElement(self.basis, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.basis, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return weyl_mul(self, other)
        return WeylElement(self.basis, {k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        return WeylElement(self.basis, {k: other * c for k, c in self.terms.items()})

    def star(self) -> "WeylElement":
        return weyl_star(self)

    def is_close(self, other: "WeylElement", tol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= tol for c in diff.terms.values())

    def to_json(self) -> list[dict]:
        return [{"coords": list(k), "re": c.real, "im": c.imag} for k, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, basis: LabelBasis, data: Iterable[Mapping]) -> "WeylElement":
        terms: dict = {}
        for item in data:
            if set(item) != {"coords", "re", "im"}:
                raise InvalidArgument(f"bad Weyl term {item!r}")
            key = tuple(item["coords"])
            terms[key] = terms.get(key, 0j) + complex(item["re"], item["im"])
        return cls(basis, terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def generator(basis: LabelBasis, coords, coeff: complex = 1.0) -> WeylElement:
    return WeylElement(basis, {basis._coords(coords): coeff})


def identity(basis: LabelBasis, coeff: complex = 1.0) -> WeylElement:
    return WeylElement(basis, {basis.zero: coeff})


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    """Bilinear extension of ``δ_f δ_h = exp(i B(f,h)/2) δ_{f+h}``."""
    _same_basis(a.basis, b.basis)
    out: dict[Coords, complex] = {}
    g = a.basis._gram
    for fa, ca in a.terms.items():
        va = np.asarray(fa, dtype=float) @ g
        for fb, cb in b.terms.items():
            phase = np.exp(0.5j * float(va @ np.asarray(fb, dtype=float)))
            key = tuple(x + y for x, y in zip(fa, fb))
            out[key] = out.get(key, 0j) + ca * cb * phase
    return WeylElement(a.basis, out)


def weyl_star(a: WeylElement) -> WeylElement:
    """Antilinear involution ``(c δ_f)* = conj(c) δ_{-f}``."""
    return WeylElement(a.basis, {tuple(-x for x in k): c.conjugate() for k, c in a.terms.items()})


def norm1(a: WeylElement) -> float:
    return float(sum(abs(c) for c in a.terms.values()))


def norm2(a: WeylElement) -> float:
    """``ω_0(a* a)^{1/2}``, which equals the l2 norm of the coefficients."""
    return float(np.sqrt(sum(abs(c) ** 2 for c in a.terms.values())))


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return weyl_mul(a, b) - weyl_mul(b, a)


class StateFunctional:
    """Linear functional on the Weyl algebra fixed by its values on generators.

    Use the constructors :meth:`central`, :meth:`char_subspace`,
    :meth:`quasifree` and :meth:`dirac_extension`.
    """

    def __init__(self, kind: str, value: Callable[[LabelBasis, Coords], complex], params: dict | None = None):
        self.kind = kind
        self._value = value
        self.params = params or {}

    def __repr__(self):
        return f"StateFunctional({self.kind})"

    def generator_value(self, basis: LabelBasis, coords) -> complex:
        return complex(self._value(basis, tuple(coords)))

    def __call__(self, a: WeylElement) -> complex:
        return complex(sum(c * self._value(a.basis, k) for k, c in sorted(a.terms.items())))

    @classmethod
    def central(cls) -> "StateFunctional":
        """``ω_0(δ_f) = 1`` if ``f = 0`` and ``0`` otherwise."""
        return cls("central", lambda basis, k: 1.0 if not any(k) else 0.0)

    @classmethod
    def char_subspace(cls, s: Subspace) -> "StateFunctional":
        """``ω(δ_f) = 1`` if ``f ∈ s`` and ``0`` otherwise; ``s`` must be isotropic."""
        if not is_first_class(s):
            raise PreconditionViolation("characteristic state needs a first-class subspace")

        def value(basis, k):
            _check_space(basis, s.ambient)
            return 1.0 if _member(s, basis.realize(k)) else 0.0

        return cls("charSubspace", value, {"subspace": s})

    @classmethod
    def quasifree(cls, kmat) -> "StateFunctional":
        """``ω(δ_f) = exp(-K(f,f)/4)`` for a real symmetric matrix ``K``."""
        kmat = np.asarray(kmat, dtype=float)
        if kmat.ndim != 2 or kmat.shape[0] != kmat.shape[1]:
            raise InvalidArgument("K must be a square matrix")
        ksym = 0.5 * (kmat + kmat.T)

        def value(basis, k):
            v = basis.realize(k)
            return np.exp(-0.25 * float(v @ ksym @ v))

        return cls("quasifree", value, {"K": ksym})

    @classmethod
    def dirac_extension(cls, base: "StateFunctional", s: Subspace) -> "StateFunctional":
        """Extend ``base`` from ``Δ(s')`` by zero on labels outside ``s'``."""
        sp = commutant(s)

        def value(basis, k):
            _check_space(basis, s.ambient)
            return base._value(basis, k) if _member(sp, basis.realize(k)) else 0.0

        return cls(f"diracExtension({base.kind})", value, {"base": base, "subspace": s})


def _check_space(basis: LabelBasis, space: SymplecticSpace) -> None:
    if basis.space is not space:
        raise InvalidArgument("state and element live in different spaces")


def _member(s: Subspace, v: np.ndarray) -> bool:
    nv = float(np.linalg.norm(v))
    return nv == 0.0 or s.residual(v) <= SPAN_TOL * max(nv, 1.0)


def central_state(a: WeylElement) -> complex:
    return StateFunctional.central()(a)


def char_subspace_state(s: Subspace) -> Callable[[WeylElement], complex]:
    return StateFunctional.char_subspace(s)


def quasifree_state(kmat) -> Callable[[WeylElement], complex]:
    return StateFunctional.quasifree(kmat)


def probe_labels(probes: Sequence[Coords], bound: int = 3, limit: int = 4096, seed: int = 0) -> list[Coords]:
    """Integer combinations ``sum n_i probe_i`` with ``|n_i| <= bound``.

    When the full box has more than ``limit`` points a seeded sample is used.
    """
    probes = [tuple(p) for p in probes]
    if not probes:
        return []
    k = len(probes)
    width = 2 * bound + 1
    rank = len(probes[0])
    if width**k <= limit:
        combos = itertools.product(range(-bound, bound + 1), repeat=k)
    else:
        rng = np.random.default_rng(seed)
        combos = (tuple(row) for row in rng.integers(-bound, bound + 1, size=(limit, k)))
    out = set()
    for n in combos:
        out.add(tuple(sum(ni * p[j] for ni, p in zip(n, probes)) for j in range(rank)))
    return sorted(out)


def is_dirac_state(omega: StateFunctional, s: Subspace, basis: LabelBasis, probes: Sequence[Coords],
                   bound: int = 3, tol: float = 1e-12) -> bool:
    """True iff ``ω(δ_f) = 1`` on the probes and their bounded integer combinations."""
    for p in probes:
        if not _member(s, basis.realize(p)):
            raise InvalidArgument(f"probe {list(p)} is not in the constraint subspace")
    labels = probe_labels(probes, bound) or [basis.zero]
    return all(abs(omega.generator_value(basis, k) - 1.0) <= tol for k in labels)


def gram_psd_check(omega: StateFunctional, elements: Sequence[WeylElement], rtol: float = 1e-10) -> dict:
    """Positivity surrogate: minimum eigenvalue of ``G_ij = ω(a_i* a_j)``."""
    n = len(elements)
    g = np.zeros((n, n), dtype=complex)
    for i, a in enumerate(elements):
        astar = weyl_star(a)
        for j, b in enumerate(elements):
            g[i, j] = omega(weyl_mul(astar, b))
    herm = 0.5 * (g + g.conj().T)
    eig = np.linalg.eigvalsh(herm) if n else np.zeros(0)
    scale = float(np.linalg.norm(herm, 2)) if n else 0.0
    min_eig = float(eig[0]) if n else 0.0
    return {
        "gram": g,
        "min_eig": min_eig,
        "norm": scale,
        "hermitian_residual": float(np.max(np.abs(g - g.conj().T), initial=0.0)),
        "pass": bool(min_eig >= -rtol * scale),
    }


def nonregularity_probe(omega: StateFunctional, basis: LabelBasis, f: Coords, c: Coords) -> dict:
    """Check that a state with ``ω(δ_c) = 1`` vanishes on ``δ_f`` when ``B(c, f) ∉ 2πZ``.

    For such a state ``ω(δ_c X δ_c*) = ω(X)``, while the Weyl relations give
    ``δ_c δ_f δ_c* = exp(i B(c,f)) δ_f``; hence ``ω(δ_f)(1 - exp(iB)) = 0``.
    The report records both sides and whether the forced zero is reproduced.
    """
    f, c = tuple(f), tuple(c)
    dc, df = generator(basis, c), generator(basis, f)
    conj = weyl_mul(weyl_mul(dc, df), weyl_star(dc))
    bcf = basis.pairing(c, f)
    wf = omega.generator_value(basis, f)
    wc = omega.generator_value(basis, c)
    forced = abs(np.exp(1j * bcf) - 1.0) > 1e-12
    invariance = abs(omega(conj) - wf)
    return {
        "B(c,f)": bcf,
        "omega(delta_c)": wc,
        "omega(delta_f)": wf,
        "invariance_residual": float(invariance),
        "forced_zero": bool(forced),
        "pass": bool(abs(wc - 1.0) <= 1e-12 and (not forced or wf == 0) and invariance <= 1e-12),
    }
