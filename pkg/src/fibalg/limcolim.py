"""Limits and colimits in total categories, and left adjoints to reindexing.

Limits are assembled from a base limit and a fibre limit; binary coproducts
come from a reflexive coequalizer of free algebras in a single fibre; left
adjoints to reindexing come from a pushout chain (endofunctor algebras) or
from a universal-arrow search seeded by a coequalizer candidate (EM).
Every universal object is found by exhaustive search, so the constructions
work in any finite carrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import (
    cones,
    Cone,
    FinCategory,
    Functor,
    NatTrans,
    StructuralError,
    discrete,
    enumerate_functors,
    is_colimit,
    is_limit,
    shape,
    Verdict,
    colimit,
    diagram,
    discrete_diagram,
    limit,
    parallel_diagram,
    span_diagram,
)
from .grothfib import TotalCategory, build_total
from .monadkit import AlgebraObject, ParamData

DEFAULT_CAP = 64


@dataclass(frozen=True)
class Absent:
    """A missing universal object, with the reason and a witness."""

    reason: str
    witness: tuple = ()

    def __bool__(self) -> bool:
        return False


# ---------------------------------------------------------------------------
# helpers on algebra totals


def _algebraic(t: TotalCategory) -> ParamData:
    if t.flavor not in ("Alg", "EM") or t.param is None:
        raise StructuralError(f"{t.name}: expected an Alg or EM total, got {t.flavor}")
    return t.param


def _mor_index(t: TotalCategory) -> dict[tuple[str, str, str, str], str]:
    idx = t.__dict__.get("_mor_index")
    if idx is None:
        idx = {}
        for m, (s, d) in t.cat.morphisms.items():
            f, g = t.mor_payload[m]
            idx[(s, d, f, g)] = m
        t.__dict__["_mor_index"] = idx
    return idx


def total_morphism(t: TotalCategory, s: str, d: str, f: str, g: str) -> str | None:
    """The morphism s -> d of an algebra total lying over f with carrier map g."""
    return _mor_index(t).get((s, d, f, g))


def fibre_of(t: TotalCategory, a: str) -> FinCategory:
    cache = t.__dict__.setdefault("_fibres", {})
    if a not in cache:
        cache[a] = t.fibre(a)
    return cache[a]


def _obj(t: TotalCategory, a: str, x: str, xi: str) -> str:
    return t.lookup(a, x, xi)


def pull(t: TotalCategory, f: str, o: str) -> str:
    """Reindex the object o along f (whose codomain is p(o)): xi . (T_f)_X."""
    p = t.param
    a, x, xi = t.payload[o]
    if t.base.dst(f) != a:
        raise StructuralError(f"{f} does not end at {a}")
    return _obj(t, t.base.src(f), x, p.carriers.compose(xi, p.trans(f)[x]))


def reindex_functor(t: TotalCategory, f: str) -> Functor:
    """f* from the fibre over dst(f) to the fibre over src(f)."""
    _algebraic(t)
    A = t.base
    a2, a = A.morphisms[f]
    src, dst = fibre_of(t, a), fibre_of(t, a2)
    omap = {o: pull(t, f, o) for o in src.objects}
    mmap = {}
    for m, (s, d) in src.morphisms.items():
        g = t.mor_payload[m][1]
        mmap[m] = total_morphism(t, omap[s], omap[d], A.identity(a2), g)
    return Functor(f"{f}*", src, dst, omap, mmap)


# ---------------------------------------------------------------------------
# limits


def limit_in_total(t: TotalCategory, d: Functor) -> Cone | Absent:
    """Limit of d : J -> total as the fibre limit of the reindexed diagram
    over the base limit."""
    _algebraic(t)
    A = t.base
    base_d = Functor("pD", d.dom, A, {j: t.p.omap[o] for j, o in d.omap.items()},
                     {e: t.p.mmap[m] for e, m in d.mmap.items()})
    key = (id(d.dom), tuple(base_d.omap.items()), tuple(base_d.mmap.items()))
    memo = t.__dict__.setdefault("_base_limits", {})
    if key not in memo:
        memo[key] = (d.dom, limit(base_d))
    bl = memo[key][1]
    if bl is None:
        return Absent("no limit in the base", (tuple(sorted(base_d.omap.items())),))
    a = bl.apex
    fib = fibre_of(t, a)
    objs = {j: pull(t, bl.legs[j], o) for j, o in d.omap.items()}
    ida = A.identity(a)
    mors = {}
    for e, m in d.mmap.items():
        s, dd = d.dom.morphisms[e]
        mors[e] = total_morphism(t, objs[s], objs[dd], ida, t.mor_payload[m][1])
        if mors[e] is None:
            raise StructuralError(f"reindexed image of {m} is not a fibre morphism")
    fd = diagram(d.dom, fib, objs, mors, name="fibre-diagram")
    fl = limit(fd)
    if fl is None:
        return Absent(f"no limit in the fibre over {a}", (a,))
    legs = {}
    for j, o in d.omap.items():
        g = t.mor_payload[fl.legs[j]][1]
        legs[j] = total_morphism(t, fl.apex, o, bl.legs[j], g)
    return Cone(fl.apex, legs)


# ---------------------------------------------------------------------------
# Linton coproducts


def _copair(c: FinCategory, cocone: Cone, into: dict[str, str]) -> str | None:
    """The unique map out of a coproduct apex agreeing with the given legs."""
    target = c.dst(next(iter(into.values())))
    hits = [m for m in c.hom(cocone.apex, target)
            if all(c.compose(m, cocone.legs[j]) == h for j, h in into.items())]
    return hits[0] if len(hits) == 1 else None


def linton_coproduct(t: TotalCategory, o1: str, o2: str) -> Cone | Absent:
    """Coproduct of two EM algebras as the coequalizer, in the fibre over
    A + B, of the reflexive pair T_C(T_A X + T_B Y) => T_C(X + Y).

    Returns the coproduct cocone with legs j0 (from o1) and j1 (from o2)."""
    p = _algebraic(t)
    if t.flavor != "EM":
        raise StructuralError("the coequalizer recipe needs an EM total")
    A, X = t.base, p.carriers
    (a, x, xi), (b, y, th) = t.payload[o1], t.payload[o2]
    bc = colimit(discrete_diagram(A, [a, b]))
    if bc is None:
        return Absent(f"no coproduct {a} + {b} in the base", (a, b))
    c = bc.apex
    ia, ib = bc.legs["j0"], bc.legs["j1"]
    Ta, Tb, Tc = p.functor(a), p.functor(b), p.functor(c)
    k = colimit(discrete_diagram(X, [x, y]))
    s = colimit(discrete_diagram(X, [Ta.omap[x], Tb.omap[y]]))
    if k is None or s is None:
        return _fibre_coproduct(t, o1, o2, bc)
    inx, iny = k.legs["j0"], k.legs["j1"]
    structure = _copair(X, s, {"j0": X.compose(inx, xi), "j1": X.compose(iny, th)})
    h = _copair(X, s, {
        "j0": X.compose(Tc.mmap[inx], p.trans(ia)[x]),
        "j1": X.compose(Tc.mmap[iny], p.trans(ib)[y]),
    })
    if structure is None or h is None:
        raise StructuralError("coproduct apex without a unique copairing")
    d0 = Tc.mmap[structure]
    d1 = X.compose(p.mu(c, k.apex), Tc.mmap[h])
    free_s = _obj(t, c, Tc.omap[s.apex], p.mu(c, s.apex))
    free_k = _obj(t, c, Tc.omap[k.apex], p.mu(c, k.apex))
    idc = A.identity(c)
    m0, m1 = total_morphism(t, free_s, free_k, idc, d0), total_morphism(t, free_s, free_k, idc, d1)
    if m0 is None or m1 is None:
        raise StructuralError("reflexive pair is not made of algebra morphisms")
    coeq = colimit(parallel_diagram(fibre_of(t, c), m0, m1))
    if coeq is None:
        return Absent(f"no coequalizer in the fibre over {c}", (c, m0, m1))
    q = t.mor_payload[coeq.legs["t"]][1]
    unit = X.compose(q, p.eta(c, k.apex))
    legs = {
        "j0": total_morphism(t, o1, coeq.apex, ia, X.compose(unit, inx)),
        "j1": total_morphism(t, o2, coeq.apex, ib, X.compose(unit, iny)),
    }
    if None in legs.values():
        raise StructuralError("coproduct injections are not total morphisms")
    return Cone(coeq.apex, legs)


def _fibre_coproduct(t: TotalCategory, o1: str, o2: str, bc: Cone) -> Cone | Absent:
    """Without carrier coproducts the free algebras are unavailable: push both
    objects into the fibre over A + B along universal arrows and search for
    their coproduct there."""
    c = bc.apex
    pushed = []
    for o, j in ((o1, "j0"), (o2, "j1")):
        leg = bc.legs[j]
        hit = universal_arrow(t, leg, o)
        if hit is None:
            return Absent(f"no universal arrow from {o} along {leg}", (o, leg))
        e, u = hit
        pushed.append((e, total_morphism(t, o, e, leg, t.mor_payload[u][1])))
    fib = fibre_of(t, c)
    co = colimit(discrete_diagram(fib, [pushed[0][0], pushed[1][0]]))
    if co is None:
        return Absent(f"no coproduct in the fibre over {c}", (c, pushed[0][0], pushed[1][0]))
    return Cone(co.apex, {j: t.cat.compose(co.legs[j], m) for j, (_, m) in zip(("j0", "j1"), pushed)})


# ---------------------------------------------------------------------------
# the pushout chain for endofunctor algebras


@dataclass(frozen=True)
class ChainLink:
    """P_k with t_k : P_{k-1} -> P_k and z_k : G P_{k-1} -> P_k (P_{-1} = X)."""

    obj: str
    t: str
    z: str


@dataclass
class SwindleTrace:
    start: AlgebraObject
    chain: list[ChainLink] = field(default_factory=list)
    stabilized_at: int | None = None
    result: AlgebraObject | Absent = Absent("not run")
    unit: str | None = None

    def report(self) -> list[str]:
        lines = [f"start {self.start.carrier} with structure {self.start.xi}"]
        for k, link in enumerate(self.chain):
            lines.append(f"P_{k} = {link.obj}  t_{k} = {link.t}  z_{k} = {link.z}")
        if self.stabilized_at is None:
            lines.append(f"no result: {self.result.reason}")
        else:
            lines.append(f"stabilized at {self.stabilized_at}: {self.result.carrier} with structure {self.result.xi}")
        return lines


def pushout(c: FinCategory, f: str, g: str) -> Cone | None:
    """Pushout of the span dst(f) <- . -> dst(g); legs l and r."""
    return colimit(span_diagram(c, f, g))


def swindle_left_adjoint(alpha: NatTrans, a: AlgebraObject, cap: int = DEFAULT_CAP) -> SwindleTrace:
    """Free G-algebra on the F-algebra a along alpha : F => G, by iterated pushouts."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    F, G = alpha.source, alpha.target
    X = F.dom
    if X.morphisms.get(a.xi) != (F.omap[a.carrier], a.carrier):
        raise StructuralError(f"{a.xi} is not an F-algebra structure on {a.carrier}")
    trace = SwindleTrace(a)
    po = pushout(X, a.xi, alpha[a.carrier])
    if po is None:
        trace.result = Absent("no pushout at step 0", (a.xi, alpha[a.carrier]))
        return trace
    trace.chain.append(ChainLink(po.apex, po.legs["l"], po.legs["r"]))
    unit = po.legs["l"]
    for k in range(cap):
        link = trace.chain[-1]
        if X.is_iso(link.t):
            zeta = X.compose(link.z, G.mmap[X.inverse(link.t)])
            trace.stabilized_at = k
            trace.result = AlgebraObject(a.param, link.obj, zeta)
            trace.unit = unit
            return trace
        if k + 1 == cap:
            break
        nxt = pushout(X, G.mmap[link.t], link.z)
        if nxt is None:
            trace.result = Absent(f"no pushout at step {k + 1}", (G.mmap[link.t], link.z))
            return trace
        trace.chain.append(ChainLink(nxt.apex, nxt.legs["r"], nxt.legs["l"]))
        unit = X.compose(nxt.legs["r"], unit)
    trace.result = Absent(f"did not stabilize within {cap} steps", (cap,))
    return trace


def _alg_homs(X: FinCategory, s: str, s_str: str, d: str, d_str: str, E: Functor) -> list[str]:
    return [g for g in X.hom(s, d) if X.compose(d_str, E.mmap[g]) == X.compose(g, s_str)]


def check_swindle(alpha: NatTrans, trace: SwindleTrace) -> Verdict:
    """Exhaustive check of Hom_G(result, b) = Hom_F(a, alpha* b), h -> h . unit."""
    if trace.stabilized_at is None:
        return Verdict(False, "no result to check", None)
    F, G = alpha.source, alpha.target
    X = F.dom
    a, r, u = trace.start, trace.result, trace.unit
    if X.compose(X.compose(r.xi, alpha[r.carrier]), F.mmap[u]) != X.compose(u, a.xi):
        return Verdict(False, "unit is not an F-algebra map", (u,))
    for y in X.objects:
        for th in X.hom(G.omap[y], y):
            left = _alg_homs(X, r.carrier, r.xi, y, th, G)
            right = set(_alg_homs(X, a.carrier, a.xi, y, X.compose(th, alpha[y]), F))
            image = [X.compose(h, u) for h in left]
            if len(set(image)) != len(image) or set(image) != right:
                return Verdict(False, f"no bijection at the G-algebra ({y}, {th})", (y, th))
    return Verdict(True, "hom-set bijection holds against every G-algebra")


# ---------------------------------------------------------------------------
# left adjoints to reindexing


@dataclass(frozen=True)
class LeftAdjoint:
    functor: Functor
    right: Functor
    units: dict[str, str]


def _universal(R: Functor, o: str, e: str, u: str) -> bool:
    """Does u : o -> R e factor every o -> R e' uniquely through R?"""
    src, tgt = R.cod, R.dom
    for e2 in tgt.objects:
        hs = tgt.hom(e, e2)
        images = [src.compose(R.mmap[h], u) for h in hs]
        if len(set(images)) != len(images):
            return False
        if set(images) != set(src.hom(o, R.omap[e2])):
            return False
    return True


def _em_candidate(t: TotalCategory, f: str, o: str) -> tuple[str, str] | None:
    """The coequalizer of T_A(xi), mu . T_A((T_f)_X) : T_A T_A' X => T_A X."""
    p = t.param
    A, X = t.base, p.carriers
    a2, a = A.morphisms[f]
    _, x, xi = t.payload[o]
    Ta = p.functor(a)
    tx = p.functor(a2).omap[x]
    d0 = Ta.mmap[xi]
    d1 = X.compose(p.mu(a, x), Ta.mmap[p.trans(f)[x]])
    s = _obj(t, a, Ta.omap[tx], p.mu(a, tx))
    d = _obj(t, a, Ta.omap[x], p.mu(a, x))
    m0, m1 = total_morphism(t, s, d, A.identity(a), d0), total_morphism(t, s, d, A.identity(a), d1)
    if m0 is None or m1 is None:
        return None
    coeq = colimit(parallel_diagram(fibre_of(t, a), m0, m1))
    if coeq is None:
        return None
    q = t.mor_payload[coeq.legs["t"]][1]
    return coeq.apex, X.compose(q, p.eta(a, x))


def universal_arrow(t: TotalCategory, f: str, o: str, R: Functor | None = None) -> tuple[str, str] | None:
    """(e, u : o -> f* e) universal from o to f*, with u a fibre morphism."""
    R = R or reindex_functor(t, f)
    a2 = t.base.src(f)
    cands: list[tuple[str, str]] = []
    if t.flavor == "EM":
        c = _em_candidate(t, f, o)
        if c is not None:
            e, g = c
            m = total_morphism(t, o, R.omap[e], t.base.identity(a2), g)
            if m is not None:
                cands.append((e, m))
    for e in sorted(R.dom.objects):
        cands.extend((e, u) for u in R.cod.hom(o, R.omap[e]))
    return next((c for c in cands if _universal(R, o, *c)), None)


def fibre_left_adjoint(p: ParamData, f: str, t: TotalCategory | None = None) -> LeftAdjoint | Absent:
    """Left adjoint to f* between fibres, one universal arrow at a time.

    EM totals try the coequalizer candidate first; every object of the target
    fibre (in id order) is searched otherwise."""
    t = t or build_total(p, "EM" if p.is_monad else "Alg")
    R = reindex_functor(t, f)
    src, tgt = R.cod, R.dom
    found: dict[str, tuple[str, str]] = {}
    for o in src.objects:
        hit = universal_arrow(t, f, o, R)
        if hit is None:
            return Absent(f"no universal arrow from {o} to {f}*", (o,))
        found[o] = hit
    mmap = {}
    for m, (s, d) in src.morphisms.items():
        (es, us), (ed, ud) = found[s], found[d]
        target = src.compose(ud, m)
        hs = [h for h in tgt.hom(es, ed) if src.compose(R.mmap[h], us) == target]
        mmap[m] = hs[0]
    L = Functor(f"{f}!", src, tgt, {o: e for o, (e, _) in found.items()}, mmap)
    return LeftAdjoint(L, R, {o: u for o, (_, u) in found.items()})


# ---------------------------------------------------------------------------
# oracle sweeps


def _square() -> FinCategory:
    return shape("square", ["p", "l", "r", "q"],
                 [("a", "p", "l"), ("b", "p", "r"), ("c", "l", "q"), ("d", "r", "q"), ("e", "p", "q")],
                 {("c", "a"): "e", ("d", "b"): "e"})


SMALL_SHAPES: dict[str, FinCategory] = {
    "empty": discrete("empty", []),
    "point": discrete("point", ["j0"]),
    "pair": discrete("pair", ["j0", "j1"]),
    "triple": discrete("triple", ["j0", "j1", "j2"]),
    "quad": discrete("quad", ["j0", "j1", "j2", "j3"]),
    "arrow": shape("arrow", ["s", "t"], [("u", "s", "t")]),
    "chain": shape("chain", ["s", "m", "t"], [("u", "s", "m"), ("v", "m", "t"), ("w", "s", "t")], {("v", "u"): "w"}),
    "parallel": shape("parallel", ["s", "t"], [("u", "s", "t"), ("v", "s", "t")]),
    "span": shape("span", ["l", "m", "r"], [("a", "m", "l"), ("b", "m", "r")]),
    "cospan": shape("cospan", ["l", "m", "r"], [("a", "l", "m"), ("b", "r", "m")]),
    "cospan3": shape("cospan3", ["l", "c", "r", "m"], [("a", "l", "m"), ("b", "c", "m"), ("d", "r", "m")]),
    "square": _square(),
}


def coproduct_oracle(t: TotalCategory, o1: str, o2: str) -> Cone | None:
    return colimit(discrete_diagram(t.cat, [o1, o2]))


@dataclass
class SweepReport:
    checked: int = 0
    agreed: int = 0
    present: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked == self.agreed


def limit_sweep(t: TotalCategory, shapes: dict[str, FinCategory] | None = None) -> SweepReport:
    """Compare limit_in_total with direct search on every diagram of the given shapes."""
    rep = SweepReport()
    for nm, j in (shapes or SMALL_SHAPES).items():
        for d in enumerate_functors(j, t.cat):
            rep.checked += 1
            every = list(cones(d))
            ours, direct = limit_in_total(t, d), limit(d, every)
            if direct is None:
                good = not ours
            else:
                rep.present += 1
                good = bool(ours) and t.cat.isomorphic(ours.apex, direct.apex) and is_limit(d, ours, every)
            if good:
                rep.agreed += 1
            else:
                rep.disagreements.append((nm, dict(d.omap), ours, direct))
    return rep


def coproduct_sweep(t: TotalCategory) -> SweepReport:
    """Compare linton_coproduct with direct initial-cocone search on all pairs."""
    rep = SweepReport()
    for o1 in t.cat.objects:
        for o2 in t.cat.objects:
            rep.checked += 1
            ours, direct = linton_coproduct(t, o1, o2), coproduct_oracle(t, o1, o2)
            if direct is None:
                good = not ours
            else:
                rep.present += 1
                good = (bool(ours) and t.cat.isomorphic(ours.apex, direct.apex)
                        and is_colimit(discrete_diagram(t.cat, [o1, o2]), ours))
            if good:
                rep.agreed += 1
            else:
                rep.disagreements.append((o1, o2, ours, direct))
    return rep
