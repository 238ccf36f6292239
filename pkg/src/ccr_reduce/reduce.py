"""Reduction of linear Weyl constraints.

For an isotropic constraint subspace ``s`` the physical algebra is the Weyl
algebra of ``s'/s`` with the factored form.  This module computes that
quotient, compares constraint sets through their characteristic states,
reduces along nested chains, and compares a global reduction with the span of
local data.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FirstClassViolation, InvalidArgument, PreconditionViolation, StageAdmissibility
from .symspace import (
    RANK_RTOL,
    QuotientSpace,
    Subspace,
    SymplecticSpace,
    commutant,
    double_commutant_holds,
    numerical_rank,
    quotient,
    restricted_form,
    subspace_contains,
    subspace_equal,
    subspace_intersect,
    subspace_sum,
)
from .weyl import LabelBasis, StateFunctional, probe_labels

FORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ReductionResult:
    constraints: Subspace
    commutant: Subspace
    quotient: QuotientSpace
    firstClass: bool
    doubleCommutant: bool
    physicalDim: int
    nondegenerate: bool

    def to_dict(self) -> dict:
        return {
            "constraint_rank": self.constraints.rank,
            "commutant_rank": self.commutant.rank,
            "physical_dim": self.physicalDim,
            "first_class": self.firstClass,
            "double_commutant": self.doubleCommutant,
            "nondegenerate": self.nondegenerate,
        }


def _offending_pair(s: Subspace):
    g = restricted_form(s)
    i, j = np.unravel_index(np.argmax(np.abs(g)), g.shape)
    return (s.basis[:, i].copy(), s.basis[:, j].copy()), float(g[i, j])


def _check_first_class(s: Subspace) -> None:
    if s.rank == 0:
        return
    pair, value = _offending_pair(s)
    if abs(value) > RANK_RTOL * max(s.ambient.scale, 1e-300):
        raise FirstClassViolation(f"constraints are second class: B(f, h) = {value:.3e}", pair, value)


def t_reduce(space: SymplecticSpace, s: Subspace) -> ReductionResult:
    """Reduce by the linear constraints ``s``: ``s'/s`` with the factored form.

    Raises
    ------
    FirstClassViolation
        If the form does not vanish on ``s``.
    """
    if s.ambient is not space:
        raise InvalidArgument("constraint subspace is not in the given space")
    _check_first_class(s)
    sp = commutant(s)
    q = quotient(sp, s)
    return ReductionResult(
        constraints=s,
        commutant=sp,
        quotient=q,
        firstClass=True,
        doubleCommutant=double_commutant_holds(s),
        physicalDim=sp.rank - s.rank,
        nondegenerate=q.is_nondegenerate(),
    )


def _contains_by_states(big: Subspace, small: Subspace, bound: int = 2) -> bool:
    """Does the characteristic state of ``big`` give 1 on all ``δ`` of ``small``?"""
    if small.rank == 0:
        return True
    basis = LabelBasis(big.ambient, small.basis)
    omega = StateFunctional.char_subspace(big)
    axes = [tuple(int(i == j) for i in range(small.rank)) for j in range(small.rank)]
    labels = probe_labels(axes, bound=bound, limit=512)
    return all(abs(omega.generator_value(basis, k) - 1.0) <= 1e-12 for k in labels)


def equivalent_constraints(s1: Subspace, s2: Subspace) -> bool:
    """True iff the two constraint sets select the same Dirac states.

    At the linear level this is equality of spans; the answer is cross-checked
    by evaluating each characteristic state on the generators of the other.
    """
    for s in (s1, s2):
        _check_first_class(s)
    equal = subspace_equal(s1, s2)
    by_states = _contains_by_states(s1, s2) and _contains_by_states(s2, s1)
    if equal != by_states:
        raise PreconditionViolation("span test and characteristic-state test disagree")
    return equal


@dataclass(frozen=True, eq=False)
class MaximalResult:
    subspace: Subspace
    probes: int
    notes: str


def maximal_linear_constraints(s: Subspace, bound: int = 3) -> MaximalResult:
    """Largest subspace on whose generators the characteristic state of ``s`` is 1.

    The sweep covers the basis of ``s``, every ambient coordinate axis, and
    integer combinations of pairs of these with coefficients up to ``bound``.
    """
    _check_first_class(s)
    amb = s.ambient
    vectors = np.hstack([s.basis, np.eye(amb.dim)])
    basis = LabelBasis(amb, vectors)
    omega = StateFunctional.char_subspace(s)
    k = vectors.shape[1]
    hits = []
    count = 0
    for i in range(k):
        for j in range(i, k):
            for a in range(-bound, bound + 1):
                for b in range(-bound, bound + 1) if j > i else (0,):
                    if a == 0 and b == 0:
                        continue
                    c = [0] * k
                    c[i] += a
                    c[j] += b
                    count += 1
                    if abs(omega.generator_value(basis, c) - 1.0) <= 1e-12:
                        hits.append(basis.realize(c))
    m = Subspace(amb, np.array(hits).T) if hits else amb.zero()
    notes = "linear level only; products and non-generator unitaries of the maximal group are not represented"
    return MaximalResult(m, count, notes)


@dataclass(frozen=True, eq=False)
class StagedResult:
    chain: list
    stages: list
    finalQuotient: QuotientSpace
    isoToSingle: np.ndarray
    single: ReductionResult
    formResidual: float

    @property
    def finalDim(self) -> int:
        return self.stages[-1].repDim if self.stages else self.single.physicalDim

    @property
    def passed(self) -> bool:
        return self.finalDim == self.single.physicalDim and self.formResidual <= FORM_TOL

    def to_dict(self) -> dict:
        return {
            "stage_dims": [q.repDim for q in self.stages],
            "final_dim": self.finalDim,
            "single_dim": self.single.physicalDim,
            "form_residual": self.formResidual,
            "pass": self.passed,
        }


def _denoise(form: np.ndarray, scale: float) -> np.ndarray:
    """Zero entries below the rank cutoff of the original ambient form.

    A factored form that is pure roundoff would otherwise define its own,
    tiny, scale and make later first-class tests relative to noise.
    """
    out = np.array(form, dtype=float)
    out[np.abs(out) <= RANK_RTOL * scale] = 0.0
    return out


def reduce_by_stages(space: SymplecticSpace, chain: list[Subspace]) -> StagedResult:
    """Impose a nested chain of constraints one stage at a time.

    Stage ``k`` projects ``s_k`` into the previous quotient, takes its commutant
    there and factors.  ``isoToSingle`` maps final representatives to those of
    the one-step reduction by ``s_n`` (lift through all stages, then project).

    Raises
    ------
    InvalidArgument
        If the chain is empty or not nested.
    StageAdmissibility
        If ``s_k`` is not contained in ``s_{k-1}'``.
    """
    if not chain:
        raise InvalidArgument("chain must contain at least one subspace")
    for k, s in enumerate(chain):
        if s.ambient is not space:
            raise InvalidArgument(f"chain element {k + 1} is not in the given space")
        if k and not subspace_contains(s, chain[k - 1]):
            raise InvalidArgument(f"chain is not nested at position {k + 1}")
    for k in range(1, len(chain)):
        prev = commutant(chain[k - 1])
        resid = chain[k].basis - prev.projector_apply(chain[k].basis)
        col = int(np.argmax(np.linalg.norm(resid, axis=0)))
        if np.linalg.norm(resid[:, col]) > 1e-8:
            raise StageAdmissibility(
                f"stage {k + 1} is not contained in the commutant of stage {k}", stage=k + 1,
                vector=chain[k].basis[:, col].copy())
    single = t_reduce(space, chain[-1])

    stages: list[QuotientSpace] = []
    current = space
    to_current = np.eye(space.dim)  # ambient coordinates -> current stage coordinates
    lifts: list[np.ndarray] = []
    for k, s in enumerate(chain):
        image = to_current @ s.basis
        if current is None:
            stages.append(stages[-1])
            lifts.append(np.zeros((0, 0)))
            continue
        t = Subspace(current, image)
        try:
            res = t_reduce(current, t)
        except FirstClassViolation as exc:
            raise StageAdmissibility(f"stage {k + 1} image is not first class", stage=k + 1) from exc
        q = res.quotient
        stages.append(q)
        lifts.append(q.liftMap)
        to_current = q.projectMap @ to_current
        current = SymplecticSpace(_denoise(q.factoredForm, space.scale), f"stage{k + 1}") if q.repDim else None

    lift_all = np.eye(space.dim)
    for lm in lifts:
        if lm.size == 0 and lm.shape == (0, 0):
            lift_all = np.zeros((space.dim, 0))
            break
        lift_all = lift_all @ lm
    iso = single.quotient.projectMap @ lift_all
    final = stages[-1]
    if final.repDim != single.physicalDim:
        residual = float("inf")
    elif final.repDim == 0:
        residual = 0.0
    else:
        residual = float(np.max(np.abs(iso.T @ single.quotient.factoredForm @ iso - final.factoredForm)))
        if numerical_rank(iso, 1.0) != final.repDim:
            residual = float("inf")
    return StagedResult(list(chain), stages, final, iso, single, residual)


def global_vs_local(localObservables: list[Subspace], localConstraints: list[Subspace]) -> dict:
    """Compare the reduction of the span of local data with the global one.

    ``o0`` is the span of the local observable spaces and ``s_e`` the span of
    the local constraints.  ``R0 = o0 / (s_e ∩ o0)`` injects into
    ``R_e = s_e' / s_e``; the report gives both dimensions, the injectivity of
    the constructed map and its form-preservation residual.
    """
    if not localObservables or not localConstraints:
        raise InvalidArgument("need at least one local observable and one local constraint space")
    amb = localObservables[0].ambient
    o0 = amb.zero()
    for o in localObservables:
        o0 = subspace_sum(o0, o)
    se = amb.zero()
    for s in localConstraints:
        se = subspace_sum(se, s)
    global_red = t_reduce(amb, se)
    inside = subspace_contains(global_red.commutant, o0)
    if not inside:
        return {
            "local_dim": None, "global_dim": global_red.physicalDim, "observables_in_commutant": False,
            "injective": False, "onto": False, "form_residual": float("inf"), "map": None, "pass": False,
        }
    kernel0 = subspace_intersect(se, o0)
    r0 = quotient(o0, kernel0)
    if r0.repDim:
        inj = global_red.quotient.projectMap @ r0.liftMap
        injective = numerical_rank(inj, 1.0) == r0.repDim
        resid = float(np.max(np.abs(inj.T @ global_red.quotient.factoredForm @ inj - r0.factoredForm)))
    else:
        inj = np.zeros((global_red.physicalDim, 0))
        injective, resid = True, 0.0
    onto = injective and r0.repDim == global_red.physicalDim
    return {
        "local_dim": r0.repDim,
        "global_dim": global_red.physicalDim,
        "observables_in_commutant": bool(inside),
        "injective": bool(injective),
        "onto": bool(onto),
        "form_residual": resid,
        "map": inj,
        "pass": bool(inside and injective and resid <= FORM_TOL),
    }
