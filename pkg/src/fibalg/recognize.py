"""Recognizing fibrations of Eilenberg-Moore algebras.

A pruned fibration p : E -> A (base with an initial object 0, fibrewise
initial objects, coproducts 0_A + E0 in E preserved by p) induces a
parametrized monad T^p on the initial fibre E_0, with T^p_A(E0) =
i_R(0_A + i E0). The comparison eta_p : E -> EM(T^p) is an equivalence
exactly when p is, up to equivalence, the EM fibration of a monad acting
trivially on 0. Opfibrations are handled by running everything on
opposites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .fincat import (
    Cone,
    FinCategory,
    Functor,
    NatTrans,
    StructuralError,
    Verdict,
    check_adjunction,
    check_equivalence,
    colimit,
    discrete_diagram,
    find_extremal,
    initial_object,
    is_colimit,
    product,
    pairing,
    terminal_object,
    validate,
)
from .grothfib import TotalCategory, build_total, is_cartesian, verify_fibration
from .monadkit import MonadData, ParamMonadData, check_param, make_monad, param_monad


def _preference(t: TotalCategory) -> Callable[[str], Any]:
    """Rank lifts so that the canonical split cleavage wins when present."""
    if t.V is not None:
        return lambda m: not t.V.cod.is_identity(t.V.mmap[m])
    s = t.param
    if t.flavor == "split" and s is not None:
        return lambda m: not s.fibre[t.p.omap[t.cat.src(m)]].is_identity(t.mor_payload[m][1])
    return lambda m: 0


def cartesian_lift(t: TotalCategory, f: str, e: str) -> str | None:
    cat, p = t.cat, t.p
    cands = [m for m, (_s, d) in cat.morphisms.items() if d == e and p.mmap[m] == f]
    rank = _preference(t)
    cands.sort(key=lambda m: (not cat.is_identity(m), rank(m), m))
    return next((m for m in cands if is_cartesian(cat, p, m)), None)


# ---------------------------------------------------------------------------
# the initial fibre


@dataclass(frozen=True, eq=False)
class InitialFibre:
    zero: str
    fibre: FinCategory
    i: Functor
    i_R: Functor
    counit: dict[str, str]  # E -> the cartesian lift i i_R E -> E


def initial_fibre(t: TotalCategory) -> InitialFibre:
    A = t.base
    z = initial_object(A)
    if z is None:
        raise StructuralError(f"{A.name} has no initial object")
    fib = t.fibre(z)
    objs = fib.objects
    i = Functor("i", fib, t.cat, {o: o for o in objs}, {m: m for m in fib.morphisms})
    lift: dict[str, str] = {}
    for e in t.cat.objects:
        u = A.hom(z, t.p.omap[e])[0]
        m = cartesian_lift(t, u, e)
        if m is None:
            raise StructuralError(f"no cartesian lift of {u} at {e}: not a fibration")
        lift[e] = m
    omap = {e: t.cat.src(m) for e, m in lift.items()}
    mmap = {}
    for m, (s, d) in t.cat.morphisms.items():
        target = t.cat.compose(m, lift[s])
        hits = [k for k in fib.hom(omap[s], omap[d]) if t.cat.compose(lift[d], k) == target]
        if len(hits) != 1:
            raise StructuralError(f"cartesian factorization of {m} is not unique")
        mmap[m] = hits[0]
    i_R = Functor("i_R", t.cat, fib, omap, mmap)
    return InitialFibre(z, fib, i, i_R, lift)


# ---------------------------------------------------------------------------
# prunedness


@dataclass
class PrunedReport:
    has_initial_base: bool
    fibrewise_initials: dict[str, str | None] = field(default_factory=dict)
    p_left_adjoint: Functor | None = None
    required_coproducts: dict[tuple[str, str], Cone | None] = field(default_factory=dict)
    p_preserves_them: Verdict = Verdict(False, "not checked")
    fibrewise_terminals_preserved: Verdict = Verdict(False, "not checked")
    failure: str | None = None

    @property
    def pruned(self) -> bool:
        return (
            self.has_initial_base
            and all(v is not None for v in self.fibrewise_initials.values())
            and self.p_left_adjoint is not None
            and all(v is not None for v in self.required_coproducts.values())
            and self.p_preserves_them.holds
        )


def _fibre_extremals(t: TotalCategory) -> tuple[dict[str, str | None], dict[str, str | None]]:
    ini, ter = {}, {}
    for a in t.base.objects:
        ex = find_extremal(t.fibre(a))
        ini[a], ter[a] = ex.initial, ex.terminal
    return ini, ter


def _left_adjoint_of_p(t: TotalCategory, ini: dict[str, str]) -> Functor | None:
    A = t.base
    mmap = {}
    for f, (a, b) in A.morphisms.items():
        over = [m for m in t.cat.hom(ini[a], ini[b]) if t.p.mmap[m] == f]
        if len(over) != 1:
            return None
        mmap[f] = over[0]
    pl = Functor("p_L", A, t.cat, dict(ini), mmap)
    if not validate(pl).ok:
        return None
    for a in A.objects:
        for b in A.objects:
            if len(t.cat.hom(ini[a], ini[b])) != len(A.hom(a, b)):
                return None
    if not check_adjunction(pl, t.p, "homset").holds:
        return None
    return pl


def _terminals_preserved(t: TotalCategory, ter: dict[str, str | None]) -> Verdict:
    missing = [a for a, o in ter.items() if o is None]
    if missing:
        return Verdict(False, f"no terminal object in the fibre over {missing[0]}", (missing[0],))
    for f, (a, b) in t.base.morphisms.items():
        m = cartesian_lift(t, f, ter[b])
        if m is None:
            return Verdict(False, f"no cartesian lift of {f} at {ter[b]}", (f, ter[b]))
        if not t.fibre(a).isomorphic(t.cat.src(m), ter[a]):
            return Verdict(False, f"reindexing along {f} does not preserve the terminal object", (f,))
    return Verdict(True, "fibrewise terminal objects preserved by reindexing")


def check_pruned(t: TotalCategory) -> PrunedReport:
    A = t.base
    z = initial_object(A)
    rep = PrunedReport(z is not None)
    if z is None:
        rep.failure = "the base has no initial object"
        return rep
    ini, ter = _fibre_extremals(t)
    rep.fibrewise_initials = ini
    rep.fibrewise_terminals_preserved = _terminals_preserved(t, ter)
    if any(v is None for v in ini.values()):
        a = next(a for a, v in ini.items() if v is None)
        rep.failure = f"the fibre over {a} has no initial object"
        return rep
    rep.p_left_adjoint = _left_adjoint_of_p(t, ini)
    if rep.p_left_adjoint is None:
        rep.failure = "initial objects do not assemble into a full and faithful left adjoint of p"
        return rep
    bad = None
    for a in A.objects:
        for e0 in t.over(z):
            d = discrete_diagram(t.cat, [ini[a], e0])
            co = colimit(d)
            rep.required_coproducts[(a, e0)] = co
            if co is None:
                if rep.failure is None:
                    rep.failure = f"no coproduct of {ini[a]} and {e0}"
                continue
            img = Cone(t.p.omap[co.apex], {j: t.p.mmap[m] for j, m in co.legs.items()})
            if bad is None and not is_colimit(discrete_diagram(A, [a, z]), img):
                bad = (a, e0)
    if bad is not None:
        rep.p_preserves_them = Verdict(False, f"p does not preserve the coproduct at {bad}", bad)
    elif rep.failure is None:
        rep.p_preserves_them = Verdict(True, "p preserves every coproduct 0_A + E0")
    if bad is not None and rep.failure is None:
        rep.failure = rep.p_preserves_them.reason
    return rep


# ---------------------------------------------------------------------------
# the copairing adjunction and the induced monad


@dataclass(frozen=True, eq=False)
class Copairing:
    functor: Functor  # A x E_0 -> E
    right: Functor  # <p, i_R> : E -> A x E_0
    cocones: dict[tuple[str, str], Cone]
    initials: dict[str, str]
    kernel: InitialFibre
    adjunction: Verdict


def _copair(cat: FinCategory, co: Cone, l: str, r: str) -> str:
    target = cat.dst(l)
    hits = [m for m in cat.hom(co.apex, target) if cat.compose(m, co.legs["j0"]) == l and cat.compose(m, co.legs["j1"]) == r]
    if len(hits) != 1:
        raise StructuralError("coproduct without a unique copairing")
    return hits[0]


def copair_left_adjoint(t: TotalCategory, report: PrunedReport | None = None) -> Copairing:
    rep = report or check_pruned(t)
    if not rep.pruned:
        raise StructuralError(f"not pruned: {rep.failure}")
    k = initial_fibre(t)
    A, E0 = t.base, k.fibre
    pl = rep.p_left_adjoint
    prod = product(A, E0, f"{A.name}x{E0.name}")
    cocones = {key: co for key, co in rep.required_coproducts.items()}
    omap = {prod.obj(a, e): cocones[(a, e)].apex for a in A.objects for e in E0.objects}
    mmap = {}
    for f, (a, b) in A.morphisms.items():
        for g, (e, e2) in E0.morphisms.items():
            src, dst = cocones[(a, e)], cocones[(b, e2)]
            mmap[prod.mor(f, g)] = _copair(t.cat, src, t.cat.compose(dst.legs["j0"], pl.mmap[f]), t.cat.compose(dst.legs["j1"], g))
    L = Functor("p_L+i", prod, t.cat, omap, mmap)
    R = pairing(t.p, k.i_R, prod, "<p,i_R>")
    return Copairing(L, R, cocones, dict(rep.fibrewise_initials), k, check_adjunction(L, R, "homset"))


def induced_param_monad(t: TotalCategory, cp: Copairing | None = None) -> ParamMonadData:
    """T^p_A(E0) = i_R(0_A + i E0), unit through the second injection, multiplication
    through the counit of i -| i_R and the fold map."""
    cp = cp or copair_left_adjoint(t)
    k = cp.kernel
    A, E0, cat = t.base, k.fibre, t.cat
    iR = k.i_R
    co = cp.cocones
    pl = cp.functor
    prod = pl.dom
    monads: dict[str, MonadData] = {}
    for a in A.objects:
        omap = {e: iR.omap[co[(a, e)].apex] for e in E0.objects}
        mmap = {g: iR.mmap[pl.mmap[prod.mor(A.identity(a), g)]] for g in E0.morphisms}
        T = Functor(f"T{a}", E0, E0, omap, mmap)
        eta = {}
        mu = {}
        for e in E0.objects:
            # i_R i E0 = E0 through the invertible unit of i -| i_R
            unit_i = [m for m in E0.hom(e, iR.omap[e]) if cat.compose(k.counit[e], m) == cat.identity(e)]
            eta[e] = E0.compose(iR.mmap[co[(a, e)].legs["j1"]], unit_i[0])
            outer = co[(a, omap[e])]
            inner = co[(a, e)]
            fold = _copair(cat, outer, inner.legs["j0"], k.counit[inner.apex])
            mu[e] = iR.mmap[fold]
        monads[a] = make_monad(f"T{a}", T, eta, mu)
    trans = {}
    for f, (a, b) in A.morphisms.items():
        trans[f] = {e: iR.mmap[pl.mmap[prod.mor(f, E0.identity(e))]] for e in E0.objects}
    return param_monad(f"T^{t.name}", A, E0, monads, trans)


def _plain(w: Any) -> Any:
    if isinstance(w, (list, tuple)):
        return [_plain(v) for v in w]
    return w


# ---------------------------------------------------------------------------
# the comparison unit


@dataclass
class RecognitionResult:
    report: PrunedReport
    T_p: ParamMonadData | None = None
    eta_p: Functor | None = None
    is_em: Verdict = Verdict(False, "not computed")
    evidence: dict[str, Any] = field(default_factory=dict)
    target: TotalCategory | None = None
    dual: bool = False

    @property
    def pruned(self) -> bool:
        return self.report.pruned

    def as_dict(self) -> dict[str, Any]:
        rep = self.report
        out: dict[str, Any] = {
            "pruned": rep.pruned,
            "clauses": {
                "has_initial_base": rep.has_initial_base,
                "fibrewise_initials": all(v is not None for v in rep.fibrewise_initials.values()) and bool(rep.fibrewise_initials),
                "p_left_adjoint": rep.p_left_adjoint is not None,
                "required_coproducts": all(v is not None for v in rep.required_coproducts.values()) and bool(rep.required_coproducts),
                "p_preserves_them": rep.p_preserves_them.holds,
                "fibrewise_terminals_preserved": rep.fibrewise_terminals_preserved.holds,
            },
            "failure": rep.failure,
            "dual": self.dual,
            "is_em": self.is_em.holds,
            "reason": self.is_em.reason,
            "witness": _plain(self.is_em.witness),
        }
        for k in ("source_objects", "target_objects", "source_iso_classes", "target_iso_classes"):
            if k in self.evidence:
                out[k] = self.evidence[k]
        if self.T_p is not None:
            out["T_p"] = {
                a: {x: self.T_p.functor(a).omap[x] for x in self.T_p.carriers.objects} for a in self.T_p.params.objects
            }
        return out


def comparison_unit(t: TotalCategory, report: PrunedReport | None = None) -> RecognitionResult:
    fib = verify_fibration(t, "fibration")
    if not fib.holds:
        rep = report or PrunedReport(initial_object(t.base) is not None, failure=f"not a fibration: {fib.reason}")
        if rep.failure is None:
            rep.failure = f"not a fibration: {fib.reason}"
        return RecognitionResult(rep, is_em=Verdict(False, rep.failure, fib.witness), evidence={"failure": rep.failure})
    rep = report or check_pruned(t)
    if not rep.pruned:
        return RecognitionResult(rep, is_em=Verdict(False, f"not pruned: {rep.failure}"), evidence={"failure": rep.failure})
    cp = copair_left_adjoint(t, rep)
    tp = induced_param_monad(t, cp)
    laws = check_param(tp)
    if not laws.ok:
        return RecognitionResult(rep, tp, is_em=Verdict(False, "induced structure is not a parametrized monad", laws.violations[0]))
    em = build_total(tp, "EM", f"EM({tp.name})")
    k = cp.kernel
    cat, iR = t.cat, k.i_R
    omap = {}
    for e in cat.objects:
        a = t.p.omap[e]
        co = cp.cocones[(a, iR.omap[e])]
        c_e = [m for m in cat.hom(cp.initials[a], e) if t.p.mmap[m] == t.base.identity(a)][0]
        xi = iR.mmap[_copair(cat, co, c_e, k.counit[e])]
        omap[e] = em.lookup(a, iR.omap[e], xi)
    mmap = {}
    for m, (s, d) in cat.morphisms.items():
        want = (t.p.mmap[m], iR.mmap[m])
        hits = [n for n in em.cat.hom(omap[s], omap[d]) if tuple(em.mor_payload[n]) == want]
        if len(hits) != 1:
            raise StructuralError(f"comparison cannot map {m}")
        mmap[m] = hits[0]
    eta = Functor("eta_p", cat, em.cat, omap, mmap)
    fibred = all(em.p.omap[omap[e]] == t.p.omap[e] for e in cat.objects) and all(
        em.p.mmap[mmap[m]] == t.p.mmap[m] for m in cat.morphisms
    )
    eq = check_equivalence(eta)
    evidence = {
        "source_objects": len(cat.objects),
        "target_objects": len(em.cat.objects),
        "source_iso_classes": iso_classes(cat),
        "target_iso_classes": iso_classes(em.cat),
        "fibred": fibred,
        "reason": eq.reason,
        "witness": eq.witness,
    }
    verdict = Verdict(eq.holds and fibred, eq.reason if fibred else "comparison is not fibred", eq.witness)
    return RecognitionResult(rep, tp, eta, verdict, evidence, em)


def iso_classes(c: FinCategory) -> int:
    reps: list[str] = []
    for o in c.objects:
        if not any(c.isomorphic(r, o) for r in reps):
            reps.append(o)
    return len(reps)


def recognize(t: TotalCategory) -> RecognitionResult:
    """The full pipeline on a fibration; opfibrations go through dualize."""
    if t.variance == "opfibration":
        return dualize(t)
    return comparison_unit(t)


def dualize(opfib: TotalCategory) -> RecognitionResult:
    """Recognition of an opfibration as a coEM opfibration: run on the opposite
    fibration and read the induced monad as a comonad (stored on opposites)."""
    r = comparison_unit(opfib.op())
    return RecognitionResult(
        r.report,
        r.T_p.dual() if r.T_p is not None else None,
        r.eta_p.op() if r.eta_p is not None else None,
        r.is_em,
        r.evidence,
        r.target.op() if r.target is not None else None,
        True,
    )


# ---------------------------------------------------------------------------
# comparing the induced monad with a given one


def monad_iso(tp: ParamMonadData, p: ParamMonadData, K: Functor) -> Verdict:
    """Is T^p isomorphic to p along the isomorphism K : E_0 -> X of carriers?

    Searches for invertible theta_{A,e} : K T^p_A e -> T_A K e, natural in e
    and A, carrying units to units and multiplications to multiplications."""
    A, E0, X = tp.params, tp.carriers, p.carriers
    if A is not p.params and A != p.params:
        return Verdict(False, "different parameter categories")
    slots = [(a, e) for a in A.objects for e in E0.objects]
    cands = {}
    for a, e in slots:
        s, d = K.omap[tp.functor(a).omap[e]], p.functor(a).omap[K.omap[e]]
        cands[(a, e)] = [m for m in X.hom(s, d) if X.is_iso(m)]
        if not cands[(a, e)]:
            return Verdict(False, f"T^p_{a}({e}) and T_{a}({e}) are not isomorphic", (a, e))
    cands = {k: sorted(v, key=lambda m: not X.is_identity(m)) for k, v in cands.items()}

    def local_ok(theta: dict, a: str, e: str) -> bool:
        Ta, Tpa = p.functor(a), tp.functor(a)
        th = theta[(a, e)]
        if X.compose(th, K.mmap[tp.eta(a, e)]) != p.eta(a, K.omap[e]):
            return False
        for g, (e1, e2) in E0.morphisms.items():
            if (a, e1) in theta and (a, e2) in theta:
                if X.compose(theta[(a, e2)], K.mmap[Tpa.mmap[g]]) != X.compose(Ta.mmap[K.mmap[g]], theta[(a, e1)]):
                    return False
        return True

    def global_ok(theta: dict) -> bool:
        for a in A.objects:
            Ta, Tpa = p.functor(a), tp.functor(a)
            for e in E0.objects:
                te = Tpa.omap[e]
                # theta * theta then mu, against theta after mu^p
                lhs = X.comp(p.mu(a, K.omap[e]), Ta.mmap[theta[(a, e)]], theta[(a, te)])
                rhs = X.compose(theta[(a, e)], K.mmap[tp.mu(a, e)])
                if lhs != rhs:
                    return False
        for f, (a, b) in A.morphisms.items():
            for e in E0.objects:
                lhs = X.compose(theta[(b, e)], K.mmap[tp.trans(f)[e]])
                rhs = X.compose(p.trans(f)[K.omap[e]], theta[(a, e)])
                if lhs != rhs:
                    return False
        return True

    theta: dict[tuple[str, str], str] = {}

    def rec(i: int) -> dict | None:
        if i == len(slots):
            return dict(theta) if global_ok(theta) else None
        a, e = slots[i]
        for m in cands[(a, e)]:
            theta[(a, e)] = m
            if local_ok(theta, a, e):
                hit = rec(i + 1)
                if hit is not None:
                    return hit
        theta.pop((a, e), None)
        return None

    found = rec(0)
    if found is None:
        return Verdict(False, "no isomorphism of parametrized monads", None)
    return Verdict(True, "isomorphic parametrized monads", None, {"theta": found})


def carrier_iso(t: TotalCategory, k: InitialFibre) -> Functor:
    """The carrier functor restricted to the initial fibre of an algebra total."""
    if t.V is None:
        raise StructuralError("needs a total with a carrier functor")
    V = t.V
    return Functor("V0", k.fibre, V.cod, {o: V.omap[o] for o in k.fibre.objects}, {m: V.mmap[m] for m in k.fibre.morphisms})


def round_trip(p: ParamMonadData) -> tuple[RecognitionResult, Verdict]:
    """Recognize the EM fibration of p and compare T^p with p."""
    t = build_total(p, "EM")
    r = comparison_unit(t)
    if r.T_p is None:
        return r, Verdict(False, "nothing to compare")
    k = initial_fibre(t)
    K = carrier_iso(t, k)
    eq = check_equivalence(K)
    if not eq.holds:
        return r, Verdict(False, f"initial fibre is not equivalent to the carriers: {eq.reason}", eq.witness)
    return r, monad_iso(r.T_p, p, K)


def base_terminal(t: TotalCategory) -> str | None:
    return terminal_object(t.base)


__all__ = [
    "Copairing",
    "InitialFibre",
    "NatTrans",
    "PrunedReport",
    "RecognitionResult",
    "base_terminal",
    "carrier_iso",
    "cartesian_lift",
    "check_pruned",
    "comparison_unit",
    "copair_left_adjoint",
    "dualize",
    "induced_param_monad",
    "initial_fibre",
    "monad_iso",
    "recognize",
    "round_trip",
]
