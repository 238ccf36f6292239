"""Local nets of constrained symplectic data and checkers for the weak axioms.

A net assigns to every region of a finite poset a field space ``X(B)``, a
constraint space ``s(B) ⊆ X(B)`` and an observable space ``o(B)``.  The
checkers return :class:`~ccr_reduce.report.CheckResult` objects; failures are
report entries, not exceptions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidArgument
from .reduce import equivalent_constraints
from .report import CheckResult, worst
from .symspace import (
    QuotientSpace,
    Subspace,
    SymplecticSpace,
    null_space,
    quotient,
    subspace_contains,
    subspace_equal,
    subspace_intersect,
)

FORM_TOL = 1e-10


class RegionPoset:
    """Finite set of regions with an order, a spacelike relation and symmetries.

    Parameters
    ----------
    regions : sequence of str
    leq : iterable of (a, b)
        Generating pairs ``a <= b``; the reflexive-transitive closure is taken
        and must be antisymmetric.
    spacelike : iterable of (a, b)
        Symmetric relation, disjoint from comparable pairs.
    actions : mapping name -> mapping region -> region
        Group elements acting on regions.  The map may be partial (a
        translation moves a finite family of regions partly out of itself);
        covariance is checked on its domain.
    """

    def __init__(self, regions: Sequence[str], leq=(), spacelike=(), actions: Mapping | None = None):
        self.regions = list(regions)
        if len(set(self.regions)) != len(self.regions):
            raise InvalidArgument("duplicate region names")
        idx = {r: i for i, r in enumerate(self.regions)}
        n = len(self.regions)
        rel = np.eye(n, dtype=bool)
        for a, b in leq:
            rel[self._index(idx, a), self._index(idx, b)] = True
        for k in range(n):
            rel |= rel[:, [k]] & rel[[k], :]
        for i, j in itertools.combinations(range(n), 2):
            if rel[i, j] and rel[j, i]:
                raise InvalidArgument(f"order is not antisymmetric on {self.regions[i]!r}, {self.regions[j]!r}")
        self._leq = rel
        self._idx = idx
        sl = set()
        for a, b in spacelike:
            i, j = self._index(idx, a), self._index(idx, b)
            if rel[i, j] or rel[j, i]:
                raise InvalidArgument(f"comparable regions {a!r}, {b!r} declared spacelike")
            sl.add(tuple(sorted((a, b), key=idx.get)))
        self.spacelikePairs = sorted(sl, key=lambda p: (idx[p[0]], idx[p[1]]))
        self.groupActions: dict[str, dict[str, str]] = {}
        for name, mapping in (actions or {}).items():
            m = dict(mapping)
            for r in list(m) + list(m.values()):
                self._index(idx, r)
            if len(set(m.values())) != len(m):
                raise InvalidArgument(f"action {name!r} is not injective")
            for a, b in self.spacelikePairs:
                if a in m and b in m and not self.is_spacelike(m[a], m[b]):
                    raise InvalidArgument(f"action {name!r} does not preserve spacelike pairs")
            self.groupActions[name] = m

    @staticmethod
    def _index(idx, r):
        if r not in idx:
            raise InvalidArgument(f"unknown region {r!r}")
        return idx[r]

    def leq(self, a: str, b: str) -> bool:
        return bool(self._leq[self._index(self._idx, a), self._index(self._idx, b)])

    def is_spacelike(self, a: str, b: str) -> bool:
        return tuple(sorted((a, b), key=self._idx.get)) in set(self.spacelikePairs)

    def comparable_pairs(self) -> list[tuple[str, str]]:
        """Pairs ``a < b`` in a fixed order."""
        return [(a, b) for a in self.regions for b in self.regions if a != b and self.leq(a, b)]

    def chains3(self) -> list[tuple[str, str, str]]:
        return [(a, b, c) for a, b in self.comparable_pairs() for c in self.regions
                if c not in (a, b) and self.leq(b, c)]


@dataclass(eq=False)
class LocalAssignment:
    """Region-indexed field, constraint and observable spaces.

    ``o`` is derived as ``X(B) ∩ s_total(B)'`` when not given, where
    ``s_total`` defaults to ``s``.  ``gauge`` optionally maps a region to a
    function returning the normalized gauge coefficients of an ambient vector
    against the gauge functions supported in that region.
    """

    poset: RegionPoset
    space: SymplecticSpace
    X: dict
    s: dict
    o: dict = field(default_factory=dict)
    s_total: dict | None = None
    gauge: Mapping[str, Callable[[np.ndarray], np.ndarray]] | None = None

    def __post_init__(self):
        for r in self.poset.regions:
            if r not in self.X or r not in self.s:
                raise InvalidArgument(f"region {r!r} lacks X or s")
            for sub in (self.X[r], self.s[r]):
                if sub.ambient is not self.space:
                    raise InvalidArgument(f"region {r!r} uses a different ambient space")
            if not subspace_contains(self.X[r], self.s[r]):
                raise InvalidArgument(f"s({r}) is not contained in X({r})")
        for r in self.poset.regions:
            if r not in self.o:
                self.o[r] = observable_space(self, r)


def observable_space(assign: LocalAssignment, region: str) -> Subspace:
    """``X(B) ∩ commutant(s_total(B))``, computed inside ``X(B)``."""
    if region not in assign.poset.regions:
        raise InvalidArgument(f"unknown region {region!r}")
    x = assign.X[region]
    st = (assign.s_total or assign.s)[region]
    if st.rank == 0 or x.rank == 0:
        return x
    cond = st.basis.T @ np.asarray(assign.space.apply(x.basis))
    coeff = null_space(cond, assign.space.scale)
    return Subspace(assign.space, x.basis @ coeff)


def _form_max(space: SymplecticSpace, a: Subspace, b: Subspace) -> float:
    if a.rank == 0 or b.rank == 0:
        return 0.0
    return float(np.max(np.abs(space.gram(a.basis, b.basis))))


def check_isotony(net: LocalAssignment) -> CheckResult:
    """``X(B1) ⊆ X(B2)`` and ``s(B1) = s(B2) ∩ X(B1)`` for ``B1 <= B2``."""
    details = []
    for a, b in net.poset.comparable_pairs():
        resid_x = net.X[b].residual(net.X[a].basis)
        inter = subspace_intersect(net.s[b], net.X[a])
        ok_x = subspace_contains(net.X[b], net.X[a])
        ok_s = subspace_equal(net.s[a], inter)
        details.append({"pair": [a, b], "x_residual": resid_x, "s_rank": net.s[a].rank,
                        "restricted_rank": inter.rank, "pass": bool(ok_x and ok_s)})
    resid = worst(d["x_residual"] for d in details)
    passed = all(d["pass"] for d in details)
    return CheckResult("net.isotony", passed, resid, 1e-8, details)


def check_reduction_isotony(net: LocalAssignment, tol: float = FORM_TOL) -> CheckResult:
    """``o(B1) ⊆ o(B2)`` and ``B(o(B1), s(B2)) = 0`` for ``B1 <= B2``."""
    details = []
    scale = max(net.space.scale, 1e-300)
    for a, b in net.poset.comparable_pairs():
        inc = subspace_contains(net.o[b], net.o[a])
        pairing = _form_max(net.space, net.o[a], net.s[b]) / scale
        details.append({"pair": [a, b], "observables_nested": bool(inc), "pairing": pairing,
                        "pass": bool(inc and pairing <= tol)})
    return CheckResult("net.reduction_isotony", all(d["pass"] for d in details),
                       worst(d["pairing"] for d in details), tol, details)


def check_weak_causality(net: LocalAssignment, tol: float) -> CheckResult:
    """Max ``|B(f, h)|`` over basis pairs of ``o(B1)``, ``o(B2)`` for spacelike pairs."""
    if not net.poset.spacelikePairs:
        raise InvalidArgument("the poset has no spacelike pairs")
    details = []
    for a, b in net.poset.spacelikePairs:
        r = _form_max(net.space, net.o[a], net.o[b])
        details.append({"pair": [a, b], "residual": r, "pass": bool(r <= tol)})
    return CheckResult("net.weak_causality", all(d["pass"] for d in details),
                       worst(d["residual"] for d in details), tol, details)


def check_field_causality_violation(net: LocalAssignment, tol: float) -> CheckResult:
    """Search for ``f ∈ X(B1)`` and a gauge function in spacelike ``B2`` with ``|c| > 10 tol``.

    Passing means the violation of strict causality by the field net was
    witnessed.  Without gauge data the report says ``NoWitnessFound``.
    """
    if not net.gauge:
        return CheckResult("net.field_causality_violation", False, 0.0, 10 * tol, [],
                           "NoWitnessFound: the net carries no gauge data")
    details = []
    for a, b in net.poset.spacelikePairs:
        for first, second in ((a, b), (b, a)):
            if second not in net.gauge:
                continue
            coeffs = np.abs(np.asarray(net.gauge[second](net.X[first].basis)))
            best = float(coeffs.max()) if coeffs.size else 0.0
            details.append({"pair": [first, second], "witness": best, "pass": bool(best > 10 * tol)})
    found = any(d["pass"] for d in details)
    resid = worst(d["witness"] for d in details)
    msg = "" if found else "NoWitnessFound"
    return CheckResult("net.field_causality_violation", found, resid, 10 * tol, details, msg)


def _as_operator(v) -> Callable[[np.ndarray], np.ndarray]:
    if callable(v):
        return v
    mat = np.asarray(v, dtype=float)
    return lambda x: mat @ x


def check_covariance(net: LocalAssignment, actions: Mapping[str, object], tol: float = FORM_TOL) -> CheckResult:
    """Covariance of the net under linear maps ``V_g``.

    For each action ``g`` (a key of ``poset.groupActions``) and region ``B``:
    (a) ``V_g`` preserves the form on the span of all field spaces,
    (b) ``V_g X(B) = X(gB)``, (c) ``V_g s(B)`` is equivalent to ``s(gB)``,
    (d) ``V_g o(B) = o(gB)``, (e) the induced map of local quotients
    preserves the reduced forms.
    """
    details = []
    stack = np.hstack([net.X[r].basis for r in net.poset.regions])
    worst_form = 0.0
    for name, vg in actions.items():
        if name not in net.poset.groupActions:
            raise InvalidArgument(f"action {name!r} is not defined on the poset")
        op = _as_operator(vg)
        gmap = net.poset.groupActions[name]
        if stack.shape[0] <= 400:
            probe = np.eye(stack.shape[0])
        else:
            probe = stack
        img = op(probe)
        form_res = float(np.max(np.abs(net.space.gram(img) - net.space.gram(probe)), initial=0.0))
        form_res /= max(net.space.scale, 1e-300)
        worst_form = max(worst_form, form_res)
        ok_a = form_res <= tol
        for r in net.poset.regions:
            if r not in gmap:
                continue
            gr = gmap[r]
            vx = Subspace(net.space, op(net.X[r].basis))
            vs = Subspace(net.space, op(net.s[r].basis)) if net.s[r].rank else net.space.zero()
            vo = Subspace(net.space, op(net.o[r].basis)) if net.o[r].rank else net.space.zero()
            ok_b = subspace_equal(vx, net.X[gr])
            try:
                ok_c = equivalent_constraints(vs, net.s[gr])
            except Exception:
                ok_c = False
            ok_d = subspace_equal(vo, net.o[gr])
            ok_e, e_res = True, 0.0
            if ok_a and ok_d:
                qa, qb = local_quotient(net, r), local_quotient(net, gr)
                if qa.repDim != qb.repDim:
                    ok_e, e_res = False, float("inf")
                elif qa.repDim:
                    m = qb.projectMap @ op(qa.liftMap)
                    e_res = float(np.max(np.abs(m.T @ qb.factoredForm @ m - qa.factoredForm)))
                    ok_e = e_res <= tol * max(net.space.scale, 1.0)
            details.append({"action": name, "region": r, "image": gr, "form_preserving": bool(ok_a),
                            "fields": bool(ok_b), "constraints": bool(ok_c), "observables": bool(ok_d),
                            "reduced_form_residual": e_res,
                            "pass": bool(ok_a and ok_b and ok_c and ok_d and ok_e)})
    return CheckResult("net.covariance", all(d["pass"] for d in details), worst_form, tol, details)


def local_quotient(net: LocalAssignment, region: str) -> QuotientSpace:
    """``o(B) / (s(B) ∩ o(B))``, the local physical space."""
    o = net.o[region]
    return quotient(o, subspace_intersect(net.s[region], o))


def check_functoriality(net: LocalAssignment, tol: float = FORM_TOL) -> CheckResult:
    """``ι13 = ι23 ∘ ι12`` for chains ``B1 <= B2 <= B3`` of local quotients.

    ``ι_ab = P_b L_a`` lifts a representative of ``B_a`` and projects it to
    the quotient of ``B_b``.  Each inclusion must also preserve the reduced form.
    """
    qs = {r: local_quotient(net, r) for r in net.poset.regions}

    def iota(a, b):
        return qs[b].projectMap @ qs[a].liftMap

    details = []
    for a, b in net.poset.comparable_pairs():
        m = iota(a, b)
        res = float(np.max(np.abs(m.T @ qs[b].factoredForm @ m - qs[a].factoredForm), initial=0.0))
        details.append({"pair": [a, b], "form_residual": res, "pass": bool(res <= tol)})
    for a, b, c in net.poset.chains3():
        res = float(np.max(np.abs(iota(a, c) - iota(b, c) @ iota(a, b)), initial=0.0))
        details.append({"chain": [a, b, c], "composition_residual": res, "pass": bool(res <= tol)})
    resid = worst(max(d.get("form_residual", 0.0), d.get("composition_residual", 0.0)) for d in details)
    return CheckResult("net.functoriality", all(d["pass"] for d in details), resid, tol, details)
