"""Registry of verification checks and the scenario context they run in.

Each :class:`Check` pairs an identifier with a descriptive anchor naming the
result it verifies, and a function ``Context -> CheckResult``.  Suites are
named groups of checks.  Randomized checks draw from a generator derived from
the scenario seed and the check identifier, so results do not depend on the
order or concurrency in which checks run.
"""
from __future__ import annotations

import itertools
import json
import threading
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import exact
from . import fock as F
from . import gbmodel as G
from . import net as N
from .errors import InvalidArgument, UnsupportedScenario
from .reduce import global_vs_local, reduce_by_stages, t_reduce
from .report import CheckResult, worst
from .symspace import Subspace, SymplecticSpace, darboux
from .weyl import (
    LabelBasis,
    StateFunctional,
    WeylElement,
    central_state,
    generator,
    gram_psd_check,
    nonregularity_probe,
    norm1,
    norm2,
    weyl_mul,
    weyl_star,
)

DEFAULT_INSTANCES = {
    "symspace.dimension_law": 200,
    "reduce.stages": 100,
    "weyl.algebra_identities": 300,
    "gb.gauge_identities": 500,
    "gb.decomposition": 200,
}


@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    suite: str
    tolerance: float
    needs_grid: bool
    run: Callable[["Context", float], CheckResult]


REGISTRY: dict[str, Check] = {}
SUITES: dict[str, list[str]] = {}


def register(id: str, anchor: str, suite: str, tolerance: float, needs_grid: bool = True):
    def deco(fn):
        REGISTRY[id] = Check(id, anchor, suite, tolerance, needs_grid, fn)
        SUITES.setdefault(suite, []).append(id)
        return fn
    return deco


# ---------------------------------------------------------------- context

class Context:
    """Lazily built objects shared by the checks of one scenario."""

    def __init__(self, scenario: dict):
        self.scenario = scenario
        self.seed = int(scenario.get("seed", 0))
        self._cache: dict = {}
        self._lock = threading.RLock()

    def _once(self, key, build):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    def rng(self, check_id: str) -> np.random.Generator:
        return np.random.default_rng([self.seed, zlib.crc32(check_id.encode())])

    def instances(self, check_id: str) -> int:
        return int(self.scenario.get("instances", {}).get(check_id, DEFAULT_INSTANCES.get(check_id, 0)))

    @property
    def is_grid(self) -> bool:
        return self.scenario["grid"]["kind"] == "gb"

    def _require_grid(self):
        if not self.is_grid:
            raise UnsupportedScenario("this check needs a momentum grid; the scenario is abstract")

    @property
    def grid(self) -> G.GBGrid:
        self._require_grid()

        def build():
            g = self.scenario["grid"]
            return G.GBGrid(g["n"], g["extent"], g.get("exclusion", 0.0), g.get("window", 6.0))
        return self._once("grid", build)

    def quadrature_levels(self, k: int | None = None) -> list[G.GBGrid]:
        self._require_grid()
        q = self.scenario.get("quadrature")
        if q is None:
            raise UnsupportedScenario("the scenario has no quadrature section")
        ns = list(q["levels"])
        if k is not None:
            if k < 2:
                raise InvalidArgument("a convergence study needs at least 2 levels")
            if k > len(ns):
                raise InvalidArgument(f"the scenario declares only {len(ns)} quadrature levels")
            ns = ns[:k]

        def build():
            out = []
            for n in q["levels"]:
                out.append(G.GBGrid(n, q["extent"], 0.0, q.get("window", 6.0), parent=out[-1] if out else None))
            return out
        return self._once("levels", build)[:len(ns)]

    @property
    def boxes(self) -> dict:
        return {r["name"]: G.Box.around(r["center"], r["halfwidths"]) for r in self.scenario.get("regions", [])}

    @property
    def spacelike(self) -> list:
        return [tuple(p) for p in self.scenario.get("spacelike", [])]

    @property
    def gbnet(self) -> G.GBNet:
        def build():
            acts = {}
            for a in self.scenario.get("actions", []):
                if "translation" in a:
                    elem = G.translation(a["translation"])
                else:
                    elem = G.rotation(a["rotation"])
                acts[a["name"]] = (elem, a["map"])
            return G.gb_net(self.grid, self.boxes, [tuple(p) for p in self.scenario.get("order", [])],
                            self.spacelike, acts, self.scenario.get("samples", 11))
        self._require_grid()
        if not self.scenario.get("regions"):
            raise UnsupportedScenario("the scenario declares no regions")
        return self._once("gbnet", build)

    @property
    def fock_config(self) -> dict:
        return {"points": 2, "extent": 1.0, "N": 3, **self.scenario.get("fock", {})}


def run_check(check_id: str, ctx: Context, tolerance: float | None = None) -> CheckResult:
    chk = REGISTRY[check_id]
    if chk.needs_grid and not ctx.is_grid:
        raise UnsupportedScenario(f"check {check_id!r} needs a momentum grid")
    tol = chk.tolerance if tolerance is None else tolerance
    return chk.run(ctx, tol)


def replay(instance: dict) -> str:
    """Re-runnable JSON for a failing randomized instance."""
    return json.dumps(instance, sort_keys=True)


def _failed(res: CheckResult, instance: dict | None) -> CheckResult:
    if instance is not None and not res.passed:
        res.message = "first failing instance: " + replay(instance)
    return res


# ---------------------------------------------------------------- random instances

def _unimodular(rng: np.random.Generator, n: int) -> np.ndarray:
    lo = np.tril(rng.integers(-1, 2, size=(n, n)), -1) + np.eye(n, dtype=int)
    up = np.triu(rng.integers(-1, 2, size=(n, n)), 1) + np.eye(n, dtype=int)
    perm = np.eye(n, dtype=int)[rng.permutation(n)]
    return (perm @ lo @ up).astype(np.int64)


def _inverse_unimodular(u: np.ndarray) -> np.ndarray:
    inv = np.rint(np.linalg.inv(u)).astype(np.int64)
    if not np.array_equal(u @ inv, np.eye(len(u), dtype=np.int64)):
        raise ArithmeticError("unimodular inverse lost precision")
    return inv


def random_first_class(rng: np.random.Generator, max_dim: int = 12) -> dict:
    """Integer form ``U^T J U`` (``J`` Darboux on ``2r`` coordinates, zero elsewhere) and isotropic vectors.

    The vectors are ``U^{-1}`` applied to a unimodular mix of standard
    isotropic directions (``q`` axes and radical axes), so entries stay small
    and the instances are well conditioned.
    """
    dim = int(rng.integers(2, max_dim + 1))
    degenerate = dim % 2 == 1 or bool(rng.integers(0, 3) == 0)
    r = int(rng.integers(0, dim // 2 + 1)) if degenerate else dim // 2
    j = np.zeros((dim, dim), dtype=np.int64)
    for a in range(r):
        j[2 * a, 2 * a + 1], j[2 * a + 1, 2 * a] = 1, -1
    u = _unimodular(rng, dim)
    iso = [2 * a for a in range(r)] + list(range(2 * r, dim))
    k = int(rng.integers(0, len(iso) + 1))
    cols = np.eye(dim, dtype=np.int64)[:, sorted(rng.choice(iso, size=k, replace=False).tolist())]
    if k:
        cols = cols @ _unimodular(rng, k)
    vecs = _inverse_unimodular(u) @ cols
    return {"form": (u.T @ j @ u).tolist(), "vectors": vecs.T.tolist()}


def dimension_law_instance(instance: dict) -> dict:
    """Float reduction against the exact oracle for one ``{form, vectors}`` instance."""
    form, vecs = instance["form"], instance["vectors"]
    dim = len(form)
    space = SymplecticSpace(np.array(form, dtype=float))
    s = Subspace(space, np.array(vecs, dtype=float).T if vecs else np.zeros((dim, 0)))
    red = t_reduce(space, s)
    fr = exact.to_fractions(form)
    rank_s = exact.span_rank(vecs)
    comm = exact.commutant_basis(fr, vecs)
    rank_c = len(comm)
    rank_cc = len(exact.commutant_basis(fr, [exact.integer_vector(c) for c in comm]))
    closed = rank_cc == rank_s
    checks = {
        "rank_s": s.rank == rank_s,
        "rank_commutant": red.commutant.rank == rank_c,
        "physical_dim": red.physicalDim == rank_c - rank_s,
        "double_commutant": red.doubleCommutant == closed,
        "nondegenerate": red.nondegenerate == closed,
    }
    return {"float": [s.rank, red.commutant.rank, red.physicalDim, red.nondegenerate],
            "exact": [rank_s, rank_c, rank_c - rank_s, closed], "agree": all(checks.values()), **checks}


def random_chain(rng: np.random.Generator, max_dim: int = 12) -> dict:
    """Nested isotropic chain of 2 to 4 stages in a random integer form."""
    while True:
        inst = random_first_class(rng, max_dim)
        if len(inst["vectors"]) >= 2:
            break
    vecs = inst["vectors"]
    stages = int(rng.integers(2, min(4, len(vecs)) + 1))
    cuts = sorted(rng.choice(np.arange(1, len(vecs)), size=stages - 1, replace=False).tolist()) + [len(vecs)]
    return {"form": inst["form"], "vectors": vecs, "cuts": [int(c) for c in cuts]}


def staged_instance(instance: dict) -> dict:
    space = SymplecticSpace(np.array(instance["form"], dtype=float))
    vecs = np.array(instance["vectors"], dtype=float).T
    chain = [Subspace(space, vecs[:, :c]) for c in instance["cuts"]]
    res = reduce_by_stages(space, chain)
    return res.to_dict()


# ---------------------------------------------------------------- abstract checks

@register("symspace.dimension_law", "T-procedure dimension law: physical dimension dim s' - dim s, "
          "reduced form nondegenerate exactly when s = s''", "symspace.dimension_law", 0.0, needs_grid=False)
def _dimension_law(ctx: Context, tol: float) -> CheckResult:
    rng = ctx.rng("symspace.dimension_law")
    bad, details = None, []
    for i in range(ctx.instances("symspace.dimension_law")):
        inst = random_first_class(rng)
        out = dimension_law_instance(inst)
        if not out["agree"] and bad is None:
            bad = {"check": "symspace.dimension_law", "index": i, **inst}
            details.append({"index": i, **out, "pass": False})
    n = ctx.instances("symspace.dimension_law")
    res = CheckResult("symspace.dimension_law", bad is None, float(bad is not None), tol,
                      details or [{"instances": n, "pass": True}])
    return _failed(res, bad)


@register("reduce.stages", "reduction by stages is isomorphic to single-step reduction",
          "reduce.stages", 1e-10, needs_grid=False)
def _stages(ctx: Context, tol: float) -> CheckResult:
    rng = ctx.rng("reduce.stages")
    bad, resid = None, 0.0
    n = ctx.instances("reduce.stages")
    for i in range(n):
        inst = random_chain(rng)
        out = staged_instance(inst)
        resid = max(resid, out["form_residual"])
        if not (out["final_dim"] == out["single_dim"] and out["form_residual"] <= tol) and bad is None:
            bad = {"check": "reduce.stages", "index": i, **inst}
    res = CheckResult("reduce.stages", bad is None, resid, tol, [{"instances": n, "pass": bad is None}])
    return _failed(res, bad)


def random_weyl_element(rng: np.random.Generator, basis: LabelBasis, terms: int = 3) -> WeylElement:
    out = {}
    for _ in range(int(rng.integers(1, terms + 1))):
        key = tuple(int(x) for x in rng.integers(-2, 3, size=basis.rank))
        out[key] = complex(rng.normal(), rng.normal())
    return WeylElement(basis, out)


def _weyl_diff(a: WeylElement, b: WeylElement) -> float:
    keys = set(a.terms) | set(b.terms)
    return max((abs(a.coefficient(k) - b.coefficient(k)) for k in keys), default=0.0)


@register("weyl.algebra_identities", "Weyl relations: associativity, involution and norm identities",
          "weyl.algebra", 1e-12, needs_grid=False)
def _weyl_identities(ctx: Context, tol: float) -> CheckResult:
    rng = ctx.rng("weyl.algebra_identities")
    basis = LabelBasis.standard(darboux(2))
    n = ctx.instances("weyl.algebra_identities")
    worst_res, bad = 0.0, None
    for i in range(n):
        a, b, c = (random_weyl_element(rng, basis) for _ in range(3))
        scale = max(1.0, norm1(a) * norm1(b) * norm1(c))
        r = {
            "associativity": _weyl_diff(weyl_mul(weyl_mul(a, b), c), weyl_mul(a, weyl_mul(b, c))) / scale,
            "involution": _weyl_diff(weyl_star(weyl_mul(a, b)), weyl_mul(weyl_star(b), weyl_star(a))) / scale,
            "star_star": _weyl_diff(weyl_star(weyl_star(a)), a),
            "norm1_submult": max(0.0, norm1(weyl_mul(a, b)) - norm1(a) * norm1(b)) / scale,
            "norm1_star": abs(norm1(weyl_star(a)) - norm1(a)),
            "norm2_star": abs(norm2(weyl_star(a)) - norm2(a)),
            "vacuum_norm": abs(central_state(weyl_mul(weyl_star(a), a)) - norm2(a) ** 2) / max(1.0, norm2(a) ** 2),
        }
        m = max(r.values())
        worst_res = max(worst_res, m)
        if m > tol and bad is None:
            bad = {"check": "weyl.algebra_identities", "index": i, "a": a.to_json(), "b": b.to_json(),
                   "c": c.to_json(), "residuals": r}
    res = CheckResult("weyl.algebra_identities", bad is None, worst_res, tol, [{"instances": n, "pass": bad is None}])
    return _failed(res, _jsonable(bad))


@register("weyl.state_positivity", "characteristic state of a first-class subspace is a positive functional",
          "weyl.algebra", 1e-10, needs_grid=False)
def _state_positivity(ctx: Context, tol: float) -> CheckResult:
    rng = ctx.rng("weyl.state_positivity")
    space = darboux(2)
    basis = LabelBasis.standard(space)
    details = []
    for label, vecs in (("q1", [[1, 0, 0, 0]]), ("q1,q2", [[1, 0, 0, 0], [0, 0, 1, 0]]),
                        ("q1+p2", [[1, 0, 0, 1]])):
        s = space.span(vecs)
        omega = StateFunctional.char_subspace(s)
        elems = [random_weyl_element(rng, basis, 4) for _ in range(12)]
        out = gram_psd_check(omega, elems, tol)
        details.append({"subspace": label, "min_eig": out["min_eig"], "norm": out["norm"],
                        "hermitian_residual": out["hermitian_residual"], "pass": out["pass"]})
    resid = worst(max(0.0, -d["min_eig"]) / max(d["norm"], 1e-300) for d in details)
    return CheckResult("weyl.state_positivity", all(d["pass"] for d in details), resid, tol, details)


@register("weyl.nonregularity", "a state equal to 1 on delta_c vanishes on delta_f when B(c, f) is not in 2 pi Z",
          "weyl.algebra", 0.0, needs_grid=False)
def _nonregularity(ctx: Context, tol: float) -> CheckResult:
    space = darboux(2)
    basis = LabelBasis.standard(space)
    s = space.span([[1, 0, 0, 0], [0, 0, 1, 0]])
    omega = StateFunctional.char_subspace(s)
    details = []
    for c in ((1, 0, 0, 0), (0, 0, 1, 0), (1, 0, 2, 0)):
        for f in ((0, 1, 0, 0), (0, 0, 0, 1), (1, 1, 0, 0), (0, 1, 0, 1), (2, 0, 0, 0)):
            out = nonregularity_probe(omega, basis, f, c)
            details.append({"c": list(c), "f": list(f), "B": out["B(c,f)"], "omega_f": abs(out["omega(delta_f)"]),
                            "forced_zero": out["forced_zero"], "pass": out["pass"]})
    forced = [d for d in details if d["forced_zero"]]
    resid = worst(d["omega_f"] for d in forced)
    return CheckResult("weyl.nonregularity", all(d["pass"] for d in details) and resid == 0.0, resid, tol, details)


# ---------------------------------------------------------------- Gupta-Bleuler checks

@register("gb.gauge_identities", "gauge maps T_h^t: B-antisymmetry of G_h, nilpotency, composition law "
          "and quadratic scaling", "gb.gauge", 1e-10)
def _gauge_identities(ctx: Context, tol: float) -> CheckResult:
    grid = ctx.grid
    rng = ctx.rng("gb.gauge_identities")
    n = ctx.instances("gb.gauge_identities")
    keys = ("antisym", "nilpotent", "composition", "scaling")
    worst_by = dict.fromkeys(keys, 0.0)
    bad = None
    for i in range(n):
        f, k = G.random_function(grid, rng), G.random_function(grid, rng)
        g, h = G.random_scalar(grid, rng), G.random_scalar(grid, rng)
        t, s = (float(x) for x in rng.uniform(-2, 2, size=2))
        r = G.gauge_identity_residuals(f, k, g, h, t, s)
        for key in keys:
            worst_by[key] = max(worst_by[key], r[key])
        if max(r[key] for key in keys) > tol and bad is None:
            bad = {"check": "gb.gauge_identities", "index": i, "seed": ctx.seed, "t": t, "s": s}
    resid = max(worst_by.values())
    return _failed(CheckResult("gb.gauge_identities", bad is None, resid, tol,
                               [{"instances": n, **worst_by, "pass": bad is None}]), bad)


@register("gb.gauge_unitarity", "gauge maps preserve the indefinite product K and the form B",
          "gb.gauge", 1e-10)
def _gauge_unitarity(ctx: Context, tol: float) -> CheckResult:
    grid = ctx.grid
    rng = ctx.rng("gb.gauge_unitarity")
    n = max(1, ctx.instances("gb.gauge_identities") // 5)
    wk = wb = 0.0
    for _ in range(n):
        f, k = G.random_function(grid, rng), G.random_function(grid, rng)
        h = G.random_scalar(grid, rng)
        t = float(rng.uniform(-2, 2))
        r = G.gauge_identity_residuals(f, k, h, h, t, 0.0)
        wk, wb = max(wk, r["unitary_K"]), max(wb, r["unitary_B"])
    resid = max(wk, wb)
    return CheckResult("gb.gauge_unitarity", resid <= tol, resid, tol,
                       [{"instances": n, "unitary_K": wk, "unitary_B": wb, "pass": resid <= tol}])


@register("gb.fixed_points", "gauge invariance: fixed points of all T_h, B(f, G_h f) = 0 and p.f = 0 agree",
          "gb.gauge", 0.0)
def _fixed_points(ctx: Context, tol: float) -> CheckResult:
    grid = ctx.grid
    rng = ctx.rng("gb.fixed_points")
    P = G.p_space(grid)
    details = []
    for kind in ("p", "p", "random", "random", "p0"):
        if kind == "p":
            f = G.GBFunction.from_real(grid, P.basis @ rng.normal(size=P.rank))
        elif kind == "p0":
            p0 = G.p0_space(grid)
            f = G.GBFunction.from_real(grid, p0.basis @ rng.normal(size=p0.rank))
        else:
            f = G.random_function(grid, rng)
        out = G.fixed_point_tests(f)
        expected = kind != "random"
        details.append({"kind": kind, **out, "pass": bool(out["agree"] and out["sigma_zero"] == expected)})
    ok = all(d["pass"] for d in details)
    return CheckResult("gb.fixed_points", ok, float(not ok), tol, details)


@register("gb.krein_positivity", "Krein positivity: K >= 0 on gauge-invariant functions with kernel exactly p0; "
          "K > 0 on the Coulomb space", "gb.krein", 1e-10)
def _krein(ctx: Context, tol: float) -> CheckResult:
    res = G.krein_positivity_report(ctx.grid)
    res.tolerance = tol
    return res


@register("gb.subspaces", "subspace family: Maxwell space inside p0 inside p, Coulomb and gradient spaces "
          "in place, Maxwell space strictly smaller than p0", "gb.krein", 0.0)
def _subspaces(ctx: Context, tol: float) -> CheckResult:
    rep = G.subspace_report(ctx.grid)
    M = rep["M"]
    ranks_ok = (rep["rank_p"], rep["rank_p0"], rep["rank_c"], rep["rank_G"]) == (6 * M, 2 * M, 4 * M, M)
    ok = ranks_ok and all(rep[k] for k in ("f_in_p0", "p0_in_p", "c_in_p", "G_in_p0", "f_strict"))
    ok = ok and G.coulomb_nondegenerate(ctx.grid)
    rep.pop("reality_surrogate")
    return CheckResult("gb.subspaces", bool(ok), float(not ok), tol, [{**rep, "pass": bool(ok)}])


@register("gb.decomposition", "unique decomposition p = c + p0 of gauge-invariant functions",
          "gb.decomposition", 1e-12)
def _decomposition(ctx: Context, tol: float) -> CheckResult:
    grid = ctx.grid
    rng = ctx.rng("gb.decomposition")
    P, C, P0 = G.p_space(grid), G.coulomb_space(grid), G.p0_space(grid)
    n = ctx.instances("gb.decomposition")
    recon = membership = 0.0
    for _ in range(n):
        f = G.GBFunction.from_real(grid, P.basis @ rng.normal(size=P.rank))
        g, s, _ = G.decompose_p(f)
        recon = max(recon, (g + s - f).norm() / f.norm())
        membership = max(membership, C.residual(g.to_real()) / f.norm(), P0.residual(s.to_real()) / f.norm())
    # uniqueness: c and p0 meet only in 0, and each part decomposes into itself
    inter = Subspace(grid.space, np.hstack([C.basis, P0.basis])).rank == C.rank + P0.rank
    gc = G.GBFunction.from_real(grid, C.basis @ rng.normal(size=C.rank))
    g2, s2, _ = G.decompose_p(gc)
    sp0 = G.GBFunction.from_real(grid, P0.basis @ rng.normal(size=P0.rank))
    g3, s3, _ = G.decompose_p(sp0)
    unique = max((g2 - gc).norm() + s2.norm(), g3.norm() + (s3 - sp0).norm())
    resid = max(recon, membership, unique)
    ok = resid <= tol and inter
    return CheckResult("gb.decomposition", bool(ok), resid, tol,
                       [{"instances": n, "reconstruction": recon, "membership": membership,
                         "uniqueness_probe": unique, "c_p0_independent": bool(inter), "pass": bool(ok)}])


def monotone(values, floor: float) -> bool:
    """Strict decrease between consecutive values, unless both sit at or below ``floor``."""
    return all(b < a or (a <= floor and b <= floor) for a, b in zip(values, values[1:]))


@register("gb.cauchy_identity", "symplectic form equals the Cauchy-data integral of the field at time zero",
          "gb.cauchy", 1e-3)
def _cauchy(ctx: Context, tol: float) -> CheckResult:
    levels = ctx.quadrature_levels()
    probes = G.reference_probes(levels[0].window)
    rows, diag = [], 0.0
    for grid in levels:
        fs = [G.probe_function(grid, p) for p in probes]
        worst_pair = max(G.cauchy_residual(fs[i], fs[j]) for i, j in itertools.permutations(range(len(fs)), 2))
        same = max(abs(G.cauchy_pairing(f, f)) + abs(G.B(f, f)) for f in fs)
        diag = max(diag, same)
        rows.append({"n": grid.n, "spacing": grid.spacing, "residual": worst_pair, "self_pairing": same})
    series = [r["residual"] for r in rows]
    ok = monotone(series, G.TOLQUAD_FLOOR) and series[-1] <= tol and diag == 0.0
    for r in rows:
        r["pass"] = bool(ok)
    return CheckResult("gb.cauchy_identity", bool(ok), series[-1], tol, rows)


def causality_table(levels: list[G.GBGrid], boxes: dict, pairs: list, samples: int = 11) -> list[dict]:
    rows = []
    for grid in levels:
        for a, b in pairs:
            r = G.spacelike_residual(grid, boxes[a], boxes[b], samples)
            rows.append({"n": grid.n, "spacing": grid.spacing, "pair": [a, b], "observable_B": r["observable_B"],
                         "field_witness": r["field_witness"], "tolQuad": grid.tolQuad,
                         "geometric_spacelike": r["spacelike"]})
    return rows


def _causality_rows(ctx: Context) -> list[dict]:
    if not ctx.spacelike:
        raise UnsupportedScenario("the scenario declares no spacelike pairs")
    return ctx._once("causality", lambda: causality_table(ctx.quadrature_levels(), ctx.boxes, ctx.spacelike,
                                                          ctx.scenario.get("samples", 11)))


@register("gb.weak_causality", "weak causality: B vanishes between gauge-invariant observables of spacelike "
          "regions, up to 10 tolQuad at the finest level and decreasing under refinement", "gb.causality", 10.0)
def _weak_causality(ctx: Context, tol: float) -> CheckResult:
    rows = _causality_rows(ctx)
    finest = ctx.quadrature_levels()[-1].n
    details, resid, ok = [], 0.0, True
    for a, b in ctx.spacelike:
        mine = [r for r in rows if r["pair"] == [a, b]]
        series = [r["observable_B"] for r in mine]
        last = mine[-1]
        bound = tol * last["tolQuad"]
        pair_ok = monotone(series, G.TOLQUAD_FLOOR) and last["observable_B"] <= bound
        ok &= pair_ok
        resid = max(resid, last["observable_B"])
        details.append({"pair": [a, b], "levels": [r["n"] for r in mine], "observable_B": series,
                        "bound_at_finest": bound, "finest": finest, "pass": bool(pair_ok)})
    bound = max(d["bound_at_finest"] for d in details)
    return CheckResult("gb.weak_causality", bool(ok), resid, bound, details)


@register("gb.field_noncausality", "the field net is not causal: gauge coefficients c(f, h) across spacelike "
          "regions need not vanish (witness above 10 tolQuad)", "gb.causality", 10.0)
def _field_noncausality(ctx: Context, tol: float) -> CheckResult:
    rows = _causality_rows(ctx)
    finest = [r for r in rows if r["n"] == ctx.quadrature_levels()[-1].n]
    details = [{"pair": r["pair"], "field_witness": r["field_witness"], "bound": tol * r["tolQuad"],
                "pass": bool(r["field_witness"] > tol * r["tolQuad"])} for r in finest]
    found = any(d["pass"] for d in details)
    return CheckResult("gb.field_noncausality", found, worst(d["field_witness"] for d in details),
                       max(d["bound"] for d in details), details,
                       "" if found else "NoWitnessFound")


@register("net.isotony", "isotony of field and constraint spaces", "net.axioms", 1e-8)
def _isotony(ctx: Context, tol: float) -> CheckResult:
    return N.check_isotony(ctx.gbnet.net)


@register("net.reduction_isotony", "reduction isotony: smaller observables commute with larger constraints",
          "net.axioms", 1e-10)
def _reduction_isotony(ctx: Context, tol: float) -> CheckResult:
    return N.check_reduction_isotony(ctx.gbnet.net, tol)


@register("net.covariance", "weak covariance under grid translations and rotations", "net.axioms", 1e-10)
def _covariance(ctx: Context, tol: float) -> CheckResult:
    gn = ctx.gbnet
    return N.check_covariance(gn.net, gn.operators, tol)


@register("net.functoriality", "local quotient inclusions compose: iota_13 = iota_23 iota_12", "net.axioms", 1e-10)
def _functoriality(ctx: Context, tol: float) -> CheckResult:
    return N.check_functoriality(ctx.gbnet.net, tol)


@register("gb.two_stage", "two-stage reduction (gradient constraints, then p0) is isomorphic to single "
          "reduction by p0", "gb.stages", 1e-10)
def _two_stage(ctx: Context, tol: float) -> CheckResult:
    grid = ctx.grid
    tc = G.two_chain(grid)
    st = reduce_by_stages(grid.space, tc.chain)
    d = st.to_dict()
    ok = tc.admissible and d["final_dim"] == d["single_dim"] and d["form_residual"] <= tol
    return CheckResult("gb.two_stage", bool(ok), d["form_residual"], tol, [{**d, "admissible": tc.admissible,
                                                                             "pass": bool(ok)}])


@register("gb.stage1_only", "observables after the gradient stage alone: the reduced form is degenerate "
          "(radical p0 / G), so the second stage is needed", "gb.stage1_only", 0.0)
def _stage1_only(ctx: Context, tol: float) -> CheckResult:
    out = G.first_stage_radical(ctx.grid)
    return CheckResult("gb.stage1_only", bool(out["nondegenerate"]), float(out["radical_rank"]), tol, [out],
                       f"reduced form degenerate: radical rank {out['radical_rank']}"
                       if not out["nondegenerate"] else "")


def _global_local_config(ctx: Context) -> dict:
    base = {"n": 3, "extent": 1.0, "halfwidths": [2, 8, 8, 8], "spatial": [-1.5, 0.0, 1.5], "times": [0.0, 1.3],
            "samples": 22}
    return {**base, **ctx.scenario.get("global_local", {})}


@register("gb.global_local", "global reduction equals the reduction of the span of local observables and "
          "constraints", "gb.global_local", 1e-10)
def _global_local(ctx: Context, tol: float) -> CheckResult:
    cfg = _global_local_config(ctx)
    grid = G.GBGrid(cfg["n"], cfg["extent"])
    obs, cons = [], []
    for x, y, z, t in itertools.product(cfg["spatial"], cfg["spatial"], cfg["spatial"], cfg["times"]):
        fs = G.region_sample(grid, G.Box.around((t, x, y, z), cfg["halfwidths"]), cfg["samples"])
        X = G.as_real_columns(fs)
        obs.append(Subspace(grid.space, X @ G.observable_coefficients(fs)))
        cons.append(Subspace(grid.space, G.as_real_columns([f for f in fs if f.label == "gradient"])))
    out = global_vs_local(obs, cons)
    out.pop("map")
    ok = out["pass"] and out["local_dim"] == out["global_dim"]
    return CheckResult("gb.global_local", bool(ok), out["form_residual"], tol, [{**out, "pass": bool(ok)}])


# ---------------------------------------------------------------- Fock layer

def _fock_spaces(ctx: Context) -> list[F.FockSpace]:
    cfg = ctx.fock_config

    def build():
        grid = F.fock_grid(cfg["points"], cfg["extent"])
        one = F.OneParticleSpace.full(grid)
        return [F.FockSpace(one, n) for n in range(1, cfg["N"] + 1)]
    return ctx._once("fock", build)


@register("fock.ccr", "canonical commutation relations of the Krein-space field operators", "fock.layer", 1e-10)
def _fock_ccr(ctx: Context, tol: float) -> CheckResult:
    rng = ctx.rng("fock.ccr")
    details = []
    for fk in _fock_spaces(ctx):
        grid = fk.one.grid
        if fk.N < 2:
            continue
        for _ in range(3):
            r = F.ccr_check(fk, G.random_function(grid, rng), G.random_function(grid, rng))
            details.append({"N": fk.N, "residual": r.residual, "pass": r.residual <= tol})
    resid = worst(d["residual"] for d in details)
    return CheckResult("fock.ccr", resid <= tol, resid, tol, details, "checked on sectors n <= N - 2")


@register("fock.gauge_commutator", "[chi^# chi, A(f)] = i A(G_h f) for the gauge generator", "fock.layer", 1e-10)
def _fock_gauge(ctx: Context, tol: float) -> CheckResult:
    rng = ctx.rng("fock.gauge_commutator")
    details = []
    for fk in _fock_spaces(ctx):
        grid = fk.one.grid
        r = F.gauge_commutator_check(fk, G.random_scalar(grid, rng), G.random_function(grid, rng))
        flow = F.gauge_flow_check(fk, G.random_scalar(grid, rng))
        details.append({"N": fk.N, "commutator": r.residual, "flow_exact": flow.residual,
                        "richardson": flow.details["richardson_errors"],
                        "pass": bool(r.residual <= tol and flow.passed)})
    resid = worst(max(d["commutator"], d["flow_exact"]) for d in details)
    return CheckResult("fock.gauge_commutator", all(d["pass"] for d in details), resid, tol, details)


def _fock_physical(ctx: Context):
    def build():
        out = []
        for fk in _fock_spaces(ctx):
            ph = F.physical_subspace(fk)
            nu = F.null_space(fk, ph)
            out.append((fk, ph, nu, F.physical_quotient(fk, ph, nu)))
        return out
    return ctx._once("fock_physical", build)


@register("fock.physical_space", "kernel of chi(h) for all h equals the Fock space over C p; its null part is "
          "the Fock space over C p0 minus the vacuum sector", "fock.layer", 0.0)
def _fock_physical_check(ctx: Context, tol: float) -> CheckResult:
    details = []
    for fk, ph, nu, _ in _fock_physical(ctx):
        details.append({"N": fk.N, "phys_dim": ph["dim"], "phys_expected": ph["expected_dim"],
                        "null_dim": nu["dim"], "null_expected": nu["expected_dim"],
                        "pass": bool(ph["equal"] and nu["equal"] and ph["dim"] == ph["expected_dim"]
                                     and nu["dim"] == nu["expected_dim"])})
    ok = all(d["pass"] for d in details)
    return CheckResult("fock.physical_space", ok, float(not ok), tol, details)


@register("fock.quotient_fields", "field operators of p descend to the positive quotient; those of the Maxwell "
          "space vanish there", "fock.layer", 1e-10)
def _fock_quotient(ctx: Context, tol: float) -> CheckResult:
    rng = ctx.rng("fock.quotient_fields")
    details = []
    for fk, ph, _, q in _fock_physical(ctx):
        grid = fk.one.grid
        P = G.p_space(grid)
        fp = G.GBFunction.from_real(grid, P.basis @ rng.normal(size=P.rank))
        rp = F.induced_field_check(fk, fp, q, ph)
        maxwell = max(F.induced_field_check(fk, m, q, ph)["induced_max"] for m in G.maxwell_functions(grid))
        resid = max(q.gram_residual, rp["invariance_residual"], maxwell)
        details.append({"N": fk.N, "isometric": bool(q.isometric), "gram_residual": q.gram_residual,
                        "invariance_residual": rp["invariance_residual"], "maxwell_induced_max": maxwell,
                        "pass": bool(q.isometric and resid <= tol)})
    resid = worst(max(d["gram_residual"], d["invariance_residual"], d["maxwell_induced_max"]) for d in details)
    return CheckResult("fock.quotient_fields", all(d["pass"] for d in details), resid, tol, details)


@register("fock.spectral", "spectral condition on the physical Fock space: translation spectrum in the closed "
          "forward cone, invariant vacuum", "fock.spectral", 1e-10)
def _fock_spectral(ctx: Context, tol: float) -> CheckResult:
    details, ok, resid = [], True, 0.0
    for fk, _, _, q in _fock_physical(ctx):
        r = F.spectral_check(q.fock)
        ok &= r.passed
        resid = max(resid, r.residual)
        details.append({"N": fk.N, **{k: v for k, v in r.details.items() if k != "one_particle_eigs"},
                        "pass": r.passed})
    return CheckResult("fock.spectral", bool(ok), resid, tol, details)


# ---------------------------------------------------------------- helpers

def _jsonable(obj):
    """Plain JSON types; large arrays are summarized by their shape."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex) or isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        if obj.size > 64:
            return {"array_shape": list(obj.shape)}
        return _jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return repr(obj)


jsonable = _jsonable
