"""Total categories of fibrations of algebras and split fibrations.

Flavors: Alg and EM (fibrations of algebras), Kl (opfibration of free
algebras), and the comonadic duals coAlg, coEM (opfibrations) and coKl
(fibration of cofree coalgebras). Comonadic flavors are built as opposites
of the monadic construction applied to the stored (dual) data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .fincat import (
    ConstructionError,
    FinCategory,
    Functor,
    FunctorCategory,
    NatTrans,
    ProductCategory,
    StructuralError,
    ValidationError,
    Verdict,
    check_equivalence,
    compose_functors,
    enumerate_functors,
    enumerate_nat_trans,
    find_isomorphism,
    functor_category,
    guard,
    identity_functor,
    product,
    pullback,
    unique_names,
    validate,
    LawReport,
)
from .monadkit import (
    AlgebraObject,
    MonadData,
    MonadMorphismData,
    ParamData,
    ParamEndofunctorData,
    ParamMonadData,
    check_monad,
    check_monad_morphism,
    check_param,
    enumerate_algebras,
    hat,
    is_em_algebra,
    make_monad,
    tf,
)

FLAVORS = {"alg": "Alg", "em": "EM", "kl": "Kl", "cokl": "coKl", "coalg": "coAlg", "coem": "coEM"}
FIBRATION_FLAVORS = {"Alg", "EM", "coKl"}


def normalize_flavor(flavor: str) -> str:
    try:
        return FLAVORS[flavor.lower()]
    except KeyError:
        raise StructuralError(f"unknown flavor {flavor!r}") from None


@dataclass(frozen=True, eq=False)
class TotalCategory:
    """A category over a base, with optional carrier functor and payloads.

    ``variance`` is "fibration" or "opfibration" for built totals; loaded or
    Grothendieck-constructed ones record how they were presented.
    """

    name: str
    cat: FinCategory
    p: Functor
    V: Functor | None = None
    flavor: str = "given"
    payload: Mapping[str, tuple] = field(default_factory=dict)
    mor_payload: Mapping[str, tuple[str, str]] = field(default_factory=dict)
    param: Any = None
    variance: str = "fibration"

    @property
    def base(self) -> FinCategory:
        return self.p.cod

    def over(self, a: str) -> list[str]:
        return [e for e in self.cat.objects if self.p.omap[e] == a]

    def lookup(self, *key: str) -> str:
        for o, k in self.payload.items():
            if tuple(k) == tuple(key):
                return o
        raise StructuralError(f"{self.name}: no object {key}")

    def fibre(self, a: str) -> FinCategory:
        objs = self.over(a)
        ident = self.base.identity(a)
        ms = [m for m in self.cat.morphisms if self.p.mmap[m] == ident]
        return self.cat.subcategory(f"{self.name}|{a}", objs, ms)

    def op(self) -> "TotalCategory":
        return TotalCategory(
            self.name + "^op" if not self.name.endswith("^op") else self.name[:-3],
            self.cat.op(),
            self.p.op(),
            self.V.op() if self.V is not None else None,
            self.flavor,
            self.payload,
            self.mor_payload,
            self.param,
            "opfibration" if self.variance == "fibration" else "fibration",
        )


def _name_objects(raw: list[str]) -> list[str]:
    return unique_names(raw)


def _algebra_total(p: ParamData, flavor: str, name: str) -> TotalCategory:
    A, X = p.params, p.carriers
    guard(A, X)
    objs: list[AlgebraObject] = []
    for a in A.objects:
        objs.extend(enumerate_algebras(p, a, flavor))
    oid = _name_objects([f"{o.param}_{o.carrier}_{o.xi}" for o in objs])
    payload = {i: (o.param, o.carrier, o.xi) for i, o in zip(oid, objs)}
    entries = []
    for si, s in zip(oid, objs):
        for ti, t in zip(oid, objs):
            for f in A.hom(s.param, t.param):
                for g in X.hom(s.carrier, t.carrier):
                    if X.compose(t.xi, tf(p, f, g)) == X.compose(g, s.xi):
                        entries.append((si, ti, f, g))
    if len(entries) > 4 * len(oid) ** 2 + 64:
        guard(FinCategory(name, tuple(oid), {str(i): ("", "") for i in range(len(entries))}, {}, {}))
    raw = []
    for si, ti, f, g in entries:
        if si == ti and f == A.identity(payload[si][0]) and g == X.identity(payload[si][1]):
            raw.append(f"id_{si}")
        else:
            raw.append(f"{f}_{g}")
    order = sorted(range(len(entries)), key=lambda i: not raw[i].startswith("id_") or entries[i][0] != entries[i][1])
    names: list[str] = [""] * len(entries)
    for i, n in zip(order, unique_names([raw[i] for i in order])):
        names[i] = n
    morphisms = {n: (e[0], e[1]) for n, e in zip(names, entries)}
    guard(FinCategory(name, tuple(oid), morphisms, {}, {}))
    mor_payload = {n: (e[2], e[3]) for n, e in zip(names, entries)}
    key = {(e[0], e[1], e[2], e[3]): n for n, e in zip(names, entries)}
    identities = {o: key[(o, o, A.identity(payload[o][0]), X.identity(payload[o][1]))] for o in oid}
    composition = {}
    for gname, (b, c) in morphisms.items():
        f2, g2 = mor_payload[gname]
        for fname, (a, b2) in morphisms.items():
            if b2 != b:
                continue
            f1, g1 = mor_payload[fname]
            composition[(gname, fname)] = key[(a, c, A.compose(f2, f1), X.compose(g2, g1))]
    cat = FinCategory(name, tuple(oid), morphisms, identities, composition)
    pf = Functor("p", cat, A, {o: payload[o][0] for o in oid}, {m: mor_payload[m][0] for m in morphisms})
    vf = Functor("V", cat, X, {o: payload[o][1] for o in oid}, {m: mor_payload[m][1] for m in morphisms})
    return TotalCategory(name, cat, pf, vf, flavor, payload, mor_payload, p, "fibration")


def _kleisli_total(p: ParamMonadData, name: str) -> TotalCategory:
    A, X = p.params, p.carriers
    guard(A, X)
    pairs = [(a, x) for a in A.objects for x in X.objects]
    oid = _name_objects([f"{a}_{x}" for a, x in pairs])
    payload = dict(zip(oid, pairs))
    entries = []
    for si, (a, x) in zip(oid, pairs):
        for ti, (b, y) in zip(oid, pairs):
            tb = p.functor(b)
            for u in A.hom(a, b):
                for k in X.hom(x, tb.omap[y]):
                    entries.append((si, ti, u, k))
    raw = []
    for si, ti, u, k in entries:
        a, x = payload[si]
        if si == ti and u == A.identity(a) and k == p.eta(a, x):
            raw.append(f"id_{si}")
        else:
            raw.append(f"{u}_{k}")
    order = sorted(range(len(entries)), key=lambda i: not (raw[i] == f"id_{entries[i][0]}" and entries[i][0] == entries[i][1]))
    names: list[str] = [""] * len(entries)
    for i, n in zip(order, unique_names([raw[i] for i in order])):
        names[i] = n
    morphisms = {n: (e[0], e[1]) for n, e in zip(names, entries)}
    guard(FinCategory(name, tuple(oid), morphisms, {}, {}))
    mor_payload = {n: (e[2], e[3]) for n, e in zip(names, entries)}
    key = {e: n for n, e in zip(names, entries)}
    identities = {o: key[(o, o, A.identity(payload[o][0]), p.eta(*payload[o]))] for o in oid}
    composition = {}
    for gname, (b, c) in morphisms.items():
        u2, k2 = mor_payload[gname]
        a2, z = payload[c]
        t2 = p.functor(a2)
        for fname, (a, b2) in morphisms.items():
            if b2 != b:
                continue
            u1, k1 = mor_payload[fname]
            y = payload[b][1]
            k = X.comp(p.mu(a2, z), t2.mmap[k2], p.trans(u2)[y], k1)
            composition[(gname, fname)] = key[(a, c, A.compose(u2, u1), k)]
    cat = FinCategory(name, tuple(oid), morphisms, identities, composition)
    pf = Functor("p", cat, A, {o: payload[o][0] for o in oid}, {m: mor_payload[m][0] for m in morphisms})
    vmap = {}
    for m, (s, t) in morphisms.items():
        u, k = mor_payload[m]
        b, y = payload[t]
        x = payload[s][1]
        tb = p.functor(b)
        vmap[m] = X.comp(p.mu(b, y), tb.mmap[k], p.trans(u)[x])
    vf = Functor("V", cat, X, {o: p.functor(a).omap[x] for o, (a, x) in payload.items()}, vmap)
    return TotalCategory(name, cat, pf, vf, "Kl", payload, mor_payload, p, "opfibration")


def build_total(p: ParamData, flavor: str, name: str | None = None) -> TotalCategory:
    """Total category of the requested flavor.

    Comonadic flavors expect comonad-flagged data (stored on opposites) and
    return the opposite of the monadic construction, re-read over the base."""
    fl = normalize_flavor(flavor)
    co = fl.startswith("co")
    if co != bool(p.comonad):
        raise StructuralError(f"flavor {fl} does not match {'comonad' if p.comonad else 'monad'} data")
    if fl in ("EM", "Kl", "coEM", "coKl") and not p.is_monad:
        raise StructuralError(f"flavor {fl} needs (co)monad data")
    nm = name or f"{p.name}_{fl}"
    core_flavor = fl[2:] if co else fl
    if core_flavor == "Kl":
        core = _kleisli_total(p, nm)
    else:
        core = _algebra_total(p, core_flavor, nm)
    if not co:
        return core
    out = core.op()
    return TotalCategory(
        nm,
        FinCategory(nm, out.cat.objects, out.cat.morphisms, out.cat.identities, out.cat.composition),
        out.p,
        out.V,
        fl,
        out.payload,
        out.mor_payload,
        p,
        out.variance,
    )


def check_total(t: TotalCategory) -> LawReport:
    rep = validate(t.cat)
    rep.extend(validate(t.p))
    if t.V is not None:
        rep.extend(validate(t.V))
    return rep


# ---------------------------------------------------------------------------
# Reindexing and cartesian lifts


def reindex(p: ParamMonadData, f: str, alg: AlgebraObject) -> AlgebraObject:
    """Along f : A' -> A, carry an algebra over A to xi . (T_f)_X over A'."""
    a2, a = p.params.morphisms[f]
    if alg.param != a:
        raise StructuralError(f"algebra lives over {alg.param}, but {f} ends at {a}")
    if not is_em_algebra(p, a, alg.carrier, alg.xi):
        raise ValidationError(f"({alg.param}, {alg.carrier}, {alg.xi}) is not an EM algebra")
    X = p.carriers
    return AlgebraObject(a2, alg.carrier, X.compose(alg.xi, p.trans(f)[alg.carrier]))


def is_cartesian(cat: FinCategory, p: Functor, m: str) -> bool:
    B = p.cod
    e1, e = cat.morphisms[m]
    f = p.mmap[m]
    for m2 in _into(cat, e):
        e2 = cat.src(m2)
        for h in B.hom(p.omap[e2], p.omap[e1]):
            if B.compose(f, h) != p.mmap[m2]:
                continue
            n = 0
            for k in cat.hom(e2, e1):
                if p.mmap[k] == h and cat.compose(m, k) == m2:
                    n += 1
                    if n > 1:
                        return False
            if n != 1:
                return False
    return True


def _into(cat: FinCategory, o: str) -> list[str]:
    from .fincat import _into as into

    return into(cat, o)


def cartesian_lifts(
    cat: FinCategory, p: Functor, prefer: Any = None
) -> tuple[dict[tuple[str, str], str], tuple | None]:
    """A cartesian lift for every base morphism f and object over dst(f).

    Returns the cleavage and the first (f, object) without a lift, if any.
    ``prefer`` ranks candidates (lower first); identities over identities win."""
    B = p.cod
    cleavage: dict[tuple[str, str], str] = {}
    missing = None
    for f, (a2, a) in B.morphisms.items():
        for e in cat.objects:
            if p.omap[e] != a:
                continue
            cands = [m for m in _into(cat, e) if p.mmap[m] == f]
            cands.sort(key=lambda m: (not cat.is_identity(m), prefer(m) if prefer else 0))
            hit = next((m for m in cands if is_cartesian(cat, p, m)), None)
            if hit is None:
                if missing is None:
                    missing = (f, e)
                continue
            cleavage[(f, e)] = hit
    return cleavage, missing


def verify_fibration(t: TotalCategory | Any, variance: str | None = None) -> Verdict:
    """Decide whether p is a fibration ("fibration") or an opfibration."""
    var = variance or getattr(t, "variance", "fibration")
    cat, p = t.cat, t.p
    if var == "opfibration":
        cat, p = cat.op(), p.op()
    elif var != "fibration":
        raise ValueError(f"unknown variance {var!r}")
    prefer = None
    if getattr(t, "V", None) is not None:
        V = t.V.op() if var == "opfibration" else t.V
        prefer = lambda m: not V.cod.is_identity(V.mmap[m])  # noqa: E731
    cleavage, missing = cartesian_lifts(cat, p, prefer)
    word = "cartesian" if var == "fibration" else "opcartesian"
    if missing is not None:
        f, e = missing
        return Verdict(False, f"no {word} lift of {f} at {e}", missing, {"variance": var})
    return Verdict(True, f"every base morphism has a {word} lift", None, {"variance": var, "cleavage": cleavage})


# ---------------------------------------------------------------------------
# Split fibrations


@dataclass(frozen=True, eq=False)
class SplitFibrationData:
    name: str
    base: FinCategory
    fibre: Mapping[str, FinCategory]
    reindex: Mapping[str, Functor]


def check_split(s: SplitFibrationData) -> LawReport:
    rep = LawReport(f"split fibration {s.name}")
    B = s.base
    for a in B.objects:
        if a not in s.fibre:
            raise StructuralError(f"{s.name}: no fibre over {a}")
        rep.extend(validate(s.fibre[a]))
    for f, (a, b) in B.morphisms.items():
        if f not in s.reindex:
            raise StructuralError(f"{s.name}: no reindexing along {f}")
        r = s.reindex[f]
        if r.dom != s.fibre[b] or r.cod != s.fibre[a]:
            raise StructuralError(f"{s.name}: reindexing along {f} must go from the fibre over {b} to {a}")
        rep.extend(validate(r))
    if not rep.ok:
        return rep
    for a in B.objects:
        r = s.reindex[B.identity(a)]
        if dict(r.omap) != {o: o for o in r.dom.objects} or dict(r.mmap) != {m: m for m in r.dom.morphisms}:
            rep.add("split-identity", B.identity(a))
    for (g, f), h in B.composition.items():
        fg = compose_functors(s.reindex[f], s.reindex[g])
        if dict(fg.omap) != dict(s.reindex[h].omap) or dict(fg.mmap) != dict(s.reindex[h].mmap):
            rep.add("split-composition", g, f)
    return rep


def grothendieck(s: SplitFibrationData, name: str | None = None) -> TotalCategory:
    """Objects (A, x); morphisms (f : A -> B, phi : x -> f*(y)) in the fibre over A."""
    B = s.base
    nm = name or s.name
    pairs = [(a, x) for a in B.objects for x in s.fibre[a].objects]
    oid = _name_objects([f"{a}_{x}" for a, x in pairs])
    payload = dict(zip(oid, pairs))
    entries = []
    for si, (a, x) in zip(oid, pairs):
        for ti, (b, y) in zip(oid, pairs):
            for f in B.hom(a, b):
                fa = s.fibre[a]
                for phi in fa.hom(x, s.reindex[f].omap[y]):
                    entries.append((si, ti, f, phi))
    raw = [
        f"id_{e[0]}" if e[0] == e[1] and B.is_identity(e[2]) and s.fibre[payload[e[0]][0]].is_identity(e[3]) else f"{e[2]}_{e[3]}"
        for e in entries
    ]
    order = sorted(range(len(entries)), key=lambda i: not (raw[i] == f"id_{entries[i][0]}"))
    names: list[str] = [""] * len(entries)
    for i, n in zip(order, unique_names([raw[i] for i in order])):
        names[i] = n
    morphisms = {n: (e[0], e[1]) for n, e in zip(names, entries)}
    mor_payload = {n: (e[2], e[3]) for n, e in zip(names, entries)}
    key = {e: n for n, e in zip(names, entries)}
    identities = {o: key[(o, o, B.identity(a), s.fibre[a].identity(x))] for o, (a, x) in payload.items()}
    composition = {}
    for gname, (b, c) in morphisms.items():
        g, psi = mor_payload[gname]
        for fname, (a, b2) in morphisms.items():
            if b2 != b:
                continue
            f, phi = mor_payload[fname]
            fa = s.fibre[payload[a][0]]
            composition[(gname, fname)] = key[(a, c, B.compose(g, f), fa.compose(s.reindex[f].mmap[psi], phi))]
    cat = FinCategory(nm, tuple(oid), morphisms, identities, composition)
    guard(cat)
    pf = Functor("p", cat, B, {o: payload[o][0] for o in oid}, {m: mor_payload[m][0] for m in morphisms})
    return TotalCategory(nm, cat, pf, None, "split", payload, mor_payload, s, "fibration")


def as_total(name: str, cat: FinCategory, p: Functor, variance: str = "fibration") -> TotalCategory:
    """Wrap a category with a projection functor."""
    return TotalCategory(name, cat, p, None, "given", {o: (p.omap[o], o) for o in cat.objects}, {}, None, variance)


# ---------------------------------------------------------------------------
# The EM(T^) comparison


@dataclass(frozen=True, eq=False)
class EMCategory:
    cat: FinCategory
    payload: Mapping[str, tuple[str, str]]
    forget: Functor


def eilenberg_moore(m: MonadData, name: str | None = None) -> EMCategory:
    c = m.cat
    algs = enumerate_algebras(m)
    oid = _name_objects([f"{a.carrier}_{a.xi}" for a in algs])
    payload = {i: (a.carrier, a.xi) for i, a in zip(oid, algs)}
    entries = []
    for si, (x, xi) in payload.items():
        for ti, (y, th) in payload.items():
            for g in c.hom(x, y):
                if c.compose(th, m.T.mmap[g]) == c.compose(g, xi):
                    entries.append((si, ti, g))
    raw = [f"id_{e[0]}" if e[0] == e[1] and c.is_identity(e[2]) else e[2] for e in entries]
    order = sorted(range(len(entries)), key=lambda i: not (raw[i] == f"id_{entries[i][0]}"))
    names: list[str] = [""] * len(entries)
    for i, n in zip(order, unique_names([raw[i] for i in order])):
        names[i] = n
    morphisms = {n: (e[0], e[1]) for n, e in zip(names, entries)}
    key = {e: n for n, e in zip(names, entries)}
    under = {n: e[2] for n, e in zip(names, entries)}
    identities = {o: key[(o, o, c.identity(payload[o][0]))] for o in oid}
    composition = {
        (g, f): key[(morphisms[f][0], morphisms[g][1], c.compose(under[g], under[f]))]
        for g in morphisms
        for f in morphisms
        if morphisms[f][1] == morphisms[g][0]
    }
    cat = FinCategory(name or f"EM({m.name})", tuple(oid), morphisms, identities, composition)
    return EMCategory(cat, payload, Functor("U", cat, c, {o: payload[o][0] for o in oid}, under))


def em_hat_comparison(p: ParamMonadData) -> tuple[Functor, Verdict]:
    """(A, X, xi) -> (id_A, xi) from the EM total into EM(T^)."""
    total = build_total(p, "EM")
    h = hat(p)
    prod: ProductCategory = h.cat
    em = eilenberg_moore(h, f"EM({h.name})")
    A = p.params
    lookup = {v: k for k, v in em.payload.items()}
    omap = {}
    for o, (a, x, xi) in total.payload.items():
        omap[o] = lookup[(prod.obj(a, x), prod.mor(A.identity(a), xi))]
    mmap = {}
    for m, (f, g) in total.mor_payload.items():
        s, t = total.cat.morphisms[m]
        hits = [n for n in em.cat.hom(omap[s], omap[t]) if em.forget.mmap[n] == prod.mor(f, g)]
        if len(hits) != 1:
            raise ConstructionError(f"comparison cannot map {m}")
        mmap[m] = hits[0]
    comp = Functor("K", total.cat, em.cat, omap, mmap)
    rep = validate(comp)
    if not rep.ok:
        return comp, Verdict(False, "comparison is not a functor", rep.violations[0])
    eq = check_equivalence(comp)
    pi = prod.proj(0)
    over = compose_functors(pi, compose_functors(em.forget, comp))
    triangle = dict(over.omap) == dict(total.p.omap) and dict(over.mmap) == dict(total.p.mmap)
    counts = {}
    mismatch = None
    for s in total.cat.objects:
        for t in total.cat.objects:
            left, right = len(total.cat.hom(s, t)), len(em.cat.hom(omap[s], omap[t]))
            counts[(s, t)] = (left, right)
            if left != right and mismatch is None:
                mismatch = (s, t, left, right)
    data = {
        "total_objects": len(total.cat.objects),
        "hat_objects": len(em.cat.objects),
        "hom_counts_match": mismatch is None,
        "triangle_commutes": triangle,
        "em_category": em,
        "total": total,
    }
    if not eq.holds:
        return comp, Verdict(False, eq.reason, eq.witness, data)
    if not triangle:
        return comp, Verdict(False, "comparison does not commute with the projections", None, data)
    if mismatch is not None:
        return comp, Verdict(False, "hom-set cardinalities differ", mismatch, data)
    return comp, Verdict(True, "equivalence over the base", None, data)


# ---------------------------------------------------------------------------
# Oplax cells and functoriality


@dataclass(frozen=True, eq=False)
class OplaxCell:
    """(U, V, delta) with delta_{AX} : G_{UA} V X -> V F_A X."""

    name: str
    U: Functor
    V: Functor
    delta: Mapping[tuple[str, str], str]
    monad_flavored: bool = False


def check_cell(c: OplaxCell, p: ParamData, q: ParamData) -> LawReport:
    A, X, Y = p.params, p.carriers, q.carriers
    rep = LawReport(f"oplax cell {c.name}")
    if c.U.dom != A or c.U.cod != q.params or c.V.dom != X or c.V.cod != Y:
        raise StructuralError(f"{c.name}: U, V have the wrong endpoints")
    rep.extend(validate(c.U))
    rep.extend(validate(c.V))
    for a in A.objects:
        for x in X.objects:
            if (a, x) not in c.delta:
                raise StructuralError(f"{c.name}: no component at ({a}, {x})")
            d = c.delta[(a, x)]
            want = (q.functor(c.U.omap[a]).omap[c.V.omap[x]], c.V.omap[p.functor(a).omap[x]])
            if Y.morphisms.get(d) != want:
                rep.add("cell-typing", a, x, detail=d)
    if not rep.ok:
        return rep
    V, U = c.V, c.U
    for f, (a, a2) in A.morphisms.items():
        for g, (x, x2) in X.morphisms.items():
            lhs = Y.compose(V.mmap[tf(p, f, g)], c.delta[(a, x)])
            rhs = Y.compose(c.delta[(a2, x2)], tf(q, U.mmap[f], V.mmap[g]))
            if lhs != rhs:
                rep.add("cell-naturality", f, g)
    if c.monad_flavored:
        for a in A.objects:
            ua = U.omap[a]
            ta, gb = p.functor(a), q.functor(ua)
            for x in X.objects:
                vx = V.omap[x]
                if Y.compose(c.delta[(a, x)], q.eta(ua, vx)) != V.mmap[p.eta(a, x)]:
                    rep.add("cell-unit", a, x)
                lhs = Y.comp(V.mmap[p.mu(a, x)], c.delta[(a, ta.omap[x])], gb.mmap[c.delta[(a, x)]])
                rhs = Y.compose(c.delta[(a, x)], q.mu(ua, vx))
                if lhs != rhs:
                    rep.add("cell-multiplication", a, x)
    return rep


def identity_cell(p: ParamData) -> OplaxCell:
    A, X = p.params, p.carriers
    return OplaxCell(
        "id",
        identity_functor(A),
        identity_functor(X),
        {(a, x): X.identity(p.functor(a).omap[x]) for a in A.objects for x in X.objects},
        p.is_monad,
    )


def compose_cells(c2: OplaxCell, c1: OplaxCell, p: ParamData) -> OplaxCell:
    """delta''_{AX} = V'(delta_{AX}) . delta'_{UA, VX}."""
    Z = c2.V.cod
    delta = {
        (a, x): Z.compose(c2.V.mmap[d], c2.delta[(c1.U.omap[a], c1.V.omap[x])])
        for (a, x), d in c1.delta.items()
    }
    return OplaxCell(
        f"{c2.name}.{c1.name}",
        compose_functors(c2.U, c1.U),
        compose_functors(c2.V, c1.V),
        delta,
        c1.monad_flavored and c2.monad_flavored,
    )


def map_total(c: OplaxCell, p: ParamData, q: ParamData, flavor: str = "EM",
              source: TotalCategory | None = None, target: TotalCategory | None = None) -> Functor:
    """(A, X, xi) -> (UA, VX, V(xi) . delta_{AX}); (f, g) -> (Uf, Vg)."""
    fl = normalize_flavor(flavor)
    if fl not in ("Alg", "EM"):
        raise StructuralError("map_total handles Alg and EM totals")
    rep = check_cell(c, p, q)
    if fl == "EM" and not c.monad_flavored:
        raise ValidationError(f"{c.name} is not declared monad-flavored", rep)
    if not rep.ok:
        raise ValidationError(f"{c.name}: {rep.violations[0]}", rep)
    s = source or build_total(p, fl)
    t = target or build_total(q, fl)
    Y = q.carriers
    lookup = {v: k for k, v in t.payload.items()}
    omap = {}
    for o, (a, x, xi) in s.payload.items():
        key = (c.U.omap[a], c.V.omap[x], Y.compose(c.V.mmap[xi], c.delta[(a, x)]))
        if key not in lookup:
            raise ConstructionError(f"image of {o} is not an object of {t.name}")
        omap[o] = lookup[key]
    mmap = {}
    for m, (f, g) in s.mor_payload.items():
        a, b = s.cat.morphisms[m]
        want = (c.U.mmap[f], c.V.mmap[g])
        hit = [n for n in t.cat.hom(omap[a], omap[b]) if tuple(t.mor_payload[n]) == want]
        if len(hit) != 1:
            raise ConstructionError(f"image of {m} is not a morphism of {t.name}")
        mmap[m] = hit[0]
    return Functor(f"{c.U.name}x({c.V.name},{c.name})", s.cat, t.cat, omap, mmap)


# ---------------------------------------------------------------------------
# Universal fibrations


@dataclass(frozen=True, eq=False)
class UniversalTotal:
    total: TotalCategory
    index: FunctorCategory
    structure: ParamData


def monads_on(x: FinCategory) -> list[MonadData]:
    out = []
    for T in enumerate_functors(x, x):
        ident = identity_functor(x)
        tt = compose_functors(T, T)
        for eta in enumerate_nat_trans(ident, T):
            for mu in enumerate_nat_trans(tt, T):
                m = make_monad(f"M{len(out)}", T, eta.components, mu.components)
                if check_monad(m).ok:
                    out.append(m)
    return out


def universal_total(x: FinCategory, flavor: str = "Alg", opt_in: bool = False) -> UniversalTotal:
    """The total category over End(X) (Alg) or Mnd(X) (EM) of the tautological
    parametrized structure. Combinatorially explosive, hence opt-in."""
    if not opt_in:
        raise ConstructionError("universal_total must be requested explicitly (opt_in=True)")
    fl = normalize_flavor(flavor)
    if fl == "Alg":
        fc = functor_category(x, x, f"End({x.name})")
        per_obj = {k: f for k, f in fc.functors.items()}
        per_mor = {k: a for k, a in fc.transformations.items()}
        struct: ParamData = ParamEndofunctorData(f"Id_End({x.name})", fc.cat, x, per_obj, per_mor)
    elif fl == "EM":
        mons = monads_on(x)
        objs = [(f"M{i}", m.T) for i, m in enumerate(mons)]
        byname = {f"M{i}": m for i, m in enumerate(mons)}
        renamed = {
            k: MonadData(k, m.cat, m.T.renamed(k), m.eta, m.mu) for k, m in byname.items()
        }

        def is_mm(a: NatTrans) -> bool:
            s = next(k for k, v in renamed.items() if dict(v.T.omap) == dict(a.source.omap) and dict(v.T.mmap) == dict(a.source.mmap) and v.T.name == a.source.name)
            t = next(k for k, v in renamed.items() if dict(v.T.omap) == dict(a.target.omap) and dict(v.T.mmap) == dict(a.target.mmap) and v.T.name == a.target.name)
            return check_monad_morphism(MonadMorphismData(renamed[s], renamed[t], a)).ok

        fc = functor_category(x, x, f"Mnd({x.name})", objects=objs, admissible=is_mm)
        per_mor = {
            k: MonadMorphismData(renamed[fc.cat.src(k)], renamed[fc.cat.dst(k)], a)
            for k, a in fc.transformations.items()
        }
        struct = ParamMonadData(f"Id_Mnd({x.name})", fc.cat, x, renamed, per_mor)
    else:
        raise StructuralError("universal totals exist for Alg and EM")
    total = build_total(struct, fl, f"U_{fl}({x.name})")
    return UniversalTotal(total, fc, struct)


def classifying_functor(p: ParamData, u: UniversalTotal) -> Functor:
    """A -> End(X) (or Mnd(X)), A -> F_A, f -> F_f."""
    fc = u.index
    omap = {}
    for a in p.params.objects:
        k = fc.object_of(p.functor(a))
        if k is None:
            raise ConstructionError(f"F_{a} is not an object of {fc.cat.name}")
        omap[a] = k
    mmap = {}
    for f in p.params.morphisms:
        t = p.trans(f)
        s, d = omap[p.params.src(f)], omap[p.params.dst(f)]
        hit = [m for m in fc.cat.hom(s, d) if dict(fc.transformations[m].components) == dict(t.components)]
        if not hit:
            raise ConstructionError(f"F_{f} is not a morphism of {fc.cat.name}")
        mmap[f] = hit[0]
    return Functor(f"chi_{p.name}", p.params, fc.cat, omap, mmap)


def check_pullback(p: ParamData, flavor: str = "Alg", u: UniversalTotal | None = None) -> Verdict:
    """build_total(p) is isomorphic to the pullback of the universal total along chi."""
    fl = normalize_flavor(flavor)
    u = u or universal_total(p.carriers, fl, opt_in=True)
    chi = classifying_functor(p, u)
    pb, _l, _r = pullback(chi, u.total.p, f"pb_{p.name}")
    mine = build_total(p, fl)
    iso = find_isomorphism(mine.cat, pb)
    if iso is None:
        return Verdict(False, "total category is not isomorphic to the pullback", None,
                       {"total": len(mine.cat.morphisms), "pullback": len(pb.morphisms)})
    return Verdict(True, "total category is the pullback of the universal fibration", None,
                   {"objects": len(pb.objects), "morphisms": len(pb.morphisms), "iso": iso})
