"""Monads, comonads, monad morphisms and strict parametrized monads as tables.

A comonad on X is stored as a monad on X^op (flag ``comonad=True``); every
comonadic operation goes through that dualization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .fincat import (
    ConstructionError,
    FinCategory,
    Functor,
    LawReport,
    NatTrans,
    ProductCategory,
    StructuralError,
    compose_functors,
    enumerate_nat_trans,
    guard,
    identity_functor,
    identity_nat,
    product,
    unique_names,
    validate,
    vertical,
)


@dataclass(frozen=True, eq=False)
class MonadData:
    name: str
    cat: FinCategory
    T: Functor
    eta: NatTrans
    mu: NatTrans
    comonad: bool = False

    @property
    def base(self) -> FinCategory:
        """The category the (co)monad acts on."""
        return self.cat.op() if self.comonad else self.cat

    def dual(self) -> "MonadData":
        """The same tables read as the dual structure on the opposite category."""
        return MonadData(self.name, self.cat, self.T, self.eta, self.mu, not self.comonad)

    def __repr__(self) -> str:
        kind = "Comonad" if self.comonad else "Monad"
        return f"<{kind} {self.name} on {self.base.name}>"


def make_monad(name: str, T: Functor, eta: Mapping[str, str], mu: Mapping[str, str]) -> MonadData:
    c = T.dom
    return MonadData(
        name,
        c,
        T,
        NatTrans(f"eta_{name}", identity_functor(c), T, dict(eta)),
        NatTrans(f"mu_{name}", compose_functors(T, T), T, dict(mu)),
    )


def make_comonad(name: str, S: Functor, counit: Mapping[str, str], comult: Mapping[str, str]) -> MonadData:
    """S on X with counit S => Id and comultiplication S => SS, stored on X^op."""
    m = make_monad(name, S.op(), counit, comult)
    return MonadData(name, m.cat, m.T, m.eta, m.mu, comonad=True)


def identity_monad(c: FinCategory, name: str | None = None) -> MonadData:
    i = identity_functor(c)
    ids = {o: c.identity(o) for o in c.objects}
    return make_monad(name or f"Id_{c.name}", i, ids, ids)


def _thin_arrow(c: FinCategory, s: str, t: str) -> str:
    hs = c.hom(s, t)
    if len(hs) != 1:
        raise ConstructionError(f"{c.name} has {len(hs)} arrows {s} -> {t}; a thin category is required")
    return hs[0]


def thin_functor(c: FinCategory, omap: Mapping[str, str], name: str) -> Functor:
    """A monotone map of a thin category, extended to morphisms."""
    return Functor(name, c, c, dict(omap), {m: _thin_arrow(c, omap[c.src(m)], omap[c.dst(m)]) for m in c.morphisms})


def thin_monad(c: FinCategory, omap: Mapping[str, str], name: str) -> MonadData:
    """Closure operator on a poset: every component is the unique arrow."""
    T = thin_functor(c, omap, name)
    eta = {o: _thin_arrow(c, o, omap[o]) for o in c.objects}
    mu = {o: _thin_arrow(c, omap[omap[o]], omap[o]) for o in c.objects}
    return make_monad(name, T, eta, mu)


def thin_comonad(c: FinCategory, omap: Mapping[str, str], name: str) -> MonadData:
    """Interior operator on a poset."""
    S = thin_functor(c, omap, name)
    counit = {o: _thin_arrow(c, omap[o], o) for o in c.objects}
    comult = {o: _thin_arrow(c, omap[o], omap[omap[o]]) for o in c.objects}
    return make_comonad(name, S, counit, comult)


def _same_functor(f: Functor, g: Functor) -> bool:
    return dict(f.omap) == dict(g.omap) and dict(f.mmap) == dict(g.mmap)


def check_monad(m: MonadData) -> LawReport:
    c, T = m.cat, m.T
    rep = LawReport(f"{'comonad' if m.comonad else 'monad'} {m.name}")
    if T.dom != c or T.cod != c:
        raise StructuralError(f"{m.name}: T is not an endofunctor of {c.name}")
    if not _same_functor(m.eta.source, identity_functor(c)) or not _same_functor(m.eta.target, T):
        raise StructuralError(f"{m.name}: unit is not Id => T")
    if not _same_functor(m.mu.source, compose_functors(T, T)) or not _same_functor(m.mu.target, T):
        raise StructuralError(f"{m.name}: multiplication is not TT => T")
    for part in (T, m.eta, m.mu):
        sub = validate(part)
        rep.extend(sub)
    if not rep.ok:
        return rep
    eta, mu = m.eta.components, m.mu.components
    for x in c.objects:
        tx = T.omap[x]
        ident = c.identity(tx)
        if c.compose(mu[x], T.mmap[eta[x]]) != ident:
            rep.add("left-unit", x)
        if c.compose(mu[x], eta[tx]) != ident:
            rep.add("right-unit", x)
        if c.compose(mu[x], T.mmap[mu[x]]) != c.compose(mu[x], mu[tx]):
            rep.add("associativity", x)
    return rep


# ---------------------------------------------------------------------------
# Monad morphisms


@dataclass(frozen=True, eq=False)
class MonadMorphismData:
    source: MonadData
    target: MonadData
    alpha: NatTrans


def star(alpha: NatTrans, S: Functor, c: FinCategory) -> dict[str, str]:
    """(alpha * alpha)_X = alpha_{TX} . S(alpha_X)."""
    T = alpha.target
    return {x: c.compose(alpha[T.omap[x]], S.mmap[alpha[x]]) for x in c.objects}


def check_monad_morphism(mm: MonadMorphismData) -> LawReport:
    S, T = mm.source, mm.target
    if S.cat != T.cat or S.comonad != T.comonad:
        raise StructuralError("monad morphism between monads on different categories")
    c = S.cat
    rep = LawReport(f"monad morphism {mm.alpha.name}")
    if not _same_functor(mm.alpha.source, S.T) or not _same_functor(mm.alpha.target, T.T):
        raise StructuralError(f"{mm.alpha.name} is not a transformation {S.name} => {T.name}")
    rep.extend(validate(mm.alpha))
    if not rep.ok:
        return rep
    a = mm.alpha
    aa = star(a, S.T, c)
    for x in c.objects:
        if T.eta[x] != c.compose(a[x], S.eta[x]):
            rep.add("unit-compatibility", x)
        if c.compose(a[x], S.mu[x]) != c.compose(T.mu[x], aa[x]):
            rep.add("multiplication-compatibility", x)
    return rep


def identity_monad_morphism(m: MonadData) -> MonadMorphismData:
    return MonadMorphismData(m, m, identity_nat(m.T, f"id_{m.name}"))


def find_monad_morphisms(s: MonadData, t: MonadData) -> list[MonadMorphismData]:
    if s.cat != t.cat:
        raise StructuralError("monads live on different categories")
    out = []
    for a in enumerate_nat_trans(s.T, t.T):
        mm = MonadMorphismData(s, t, a)
        if check_monad_morphism(mm).ok:
            out.append(mm)
    return out


def derive_monad_morphism(s: MonadData, t: MonadData, name: str | None = None) -> MonadMorphismData:
    """The monad morphism s => t when exactly one exists."""
    if not any(True for _ in enumerate_nat_trans(s.T, t.T)):
        raise StructuralError(f"no transformation {s.name} => {t.name}: components do not exist")
    found = find_monad_morphisms(s, t)
    if len(found) != 1:
        raise ConstructionError(f"{len(found)} monad morphisms {s.name} => {t.name}; pick one explicitly")
    a = found[0].alpha
    return MonadMorphismData(s, t, NatTrans(name or f"{s.name}=>{t.name}", a.source, a.target, a.components))


# ---------------------------------------------------------------------------
# Parametrized endofunctors and monads


@dataclass(frozen=True, eq=False)
class ParamEndofunctorData:
    name: str
    params: FinCategory
    carriers: FinCategory
    per_object: Mapping[str, Functor]
    per_morphism: Mapping[str, NatTrans]
    comonad: bool = False  # read on the opposites: coalgebras instead of algebras

    def functor(self, a: str) -> Functor:
        return self.per_object[a]

    def trans(self, f: str) -> NatTrans:
        return self.per_morphism[f]

    @property
    def is_monad(self) -> bool:
        return False

    def dual(self) -> "ParamEndofunctorData":
        return ParamEndofunctorData(
            self.name, self.params, self.carriers, self.per_object, self.per_morphism, not self.comonad
        )


@dataclass(frozen=True, eq=False)
class ParamMonadData:
    name: str
    params: FinCategory
    carriers: FinCategory
    per_object: Mapping[str, MonadData]
    per_morphism: Mapping[str, MonadMorphismData]
    comonad: bool = False

    def monad(self, a: str) -> MonadData:
        return self.per_object[a]

    def functor(self, a: str) -> Functor:
        return self.per_object[a].T

    def trans(self, f: str) -> NatTrans:
        return self.per_morphism[f].alpha

    def eta(self, a: str, x: str) -> str:
        return self.per_object[a].eta[x]

    def mu(self, a: str, x: str) -> str:
        return self.per_object[a].mu[x]

    @property
    def is_monad(self) -> bool:
        return True

    @property
    def base_params(self) -> FinCategory:
        return self.params.op() if self.comonad else self.params

    @property
    def base_carriers(self) -> FinCategory:
        return self.carriers.op() if self.comonad else self.carriers

    def dual(self) -> "ParamMonadData":
        return ParamMonadData(
            self.name, self.params, self.carriers, self.per_object, self.per_morphism, not self.comonad
        )

    def underlying(self) -> ParamEndofunctorData:
        return ParamEndofunctorData(
            self.name,
            self.params,
            self.carriers,
            {a: m.T for a, m in self.per_object.items()},
            {f: mm.alpha for f, mm in self.per_morphism.items()},
            self.comonad,
        )


ParamData = ParamEndofunctorData | ParamMonadData


def param_monad(
    name: str,
    params: FinCategory,
    carriers: FinCategory,
    monads: Mapping[str, MonadData],
    transformations: Mapping[str, Mapping[str, str]] | None = None,
) -> ParamMonadData:
    """Assemble a parametrized monad. Transformations for non-identity
    morphisms may be omitted when the monad morphism is unique."""
    transformations = dict(transformations or {})
    mors = {}
    for f, (a, b) in params.morphisms.items():
        s, t = monads[a], monads[b]
        if params.is_identity(f):
            comps = transformations.get(f) or {x: carriers.identity(s.T.omap[x]) for x in carriers.objects}
            mors[f] = MonadMorphismData(s, t, NatTrans(f"T_{f}", s.T, t.T, dict(comps)))
        elif f in transformations:
            mors[f] = MonadMorphismData(s, t, NatTrans(f"T_{f}", s.T, t.T, dict(transformations[f])))
        else:
            mors[f] = derive_monad_morphism(s, t, f"T_{f}")
    return ParamMonadData(name, params, carriers, dict(monads), mors)


def param_comonad(
    name: str,
    params: FinCategory,
    carriers: FinCategory,
    comonads: Mapping[str, MonadData],
    transformations: Mapping[str, Mapping[str, str]] | None = None,
) -> ParamMonadData:
    """A parametrized comonad over (A, X), stored as a param monad over (A^op, X^op).

    Each comonad must already be flagged (stored on X^op); for f : A -> B of A the
    comonad morphism S_f : S_A => S_B becomes a monad morphism on X^op from S_B to S_A,
    i.e. along f read in A^op.
    """
    pop, cop = params.op(), carriers.op()
    for a, m in comonads.items():
        if not m.comonad or m.cat != cop:
            raise StructuralError(f"{m.name} is not a comonad on {carriers.name}")
    transformations = dict(transformations or {})
    mors = {}
    for f, (a, b) in params.morphisms.items():
        # in params^op, f : b -> a; the transformation S_f : S_A => S_B on X is S_B^op => S_A^op on X^op
        s, t = comonads[b], comonads[a]
        if params.is_identity(f):
            comps = {x: cop.identity(s.T.omap[x]) for x in cop.objects}
            mors[f] = MonadMorphismData(s, t, NatTrans(f"S_{f}", s.T, t.T, comps))
        elif f in transformations:
            mors[f] = MonadMorphismData(s, t, NatTrans(f"S_{f}", s.T, t.T, dict(transformations[f])))
        else:
            mors[f] = derive_monad_morphism(s, t, f"S_{f}")
    return ParamMonadData(name, pop, cop, dict(comonads), mors, comonad=True)


def constant_param_monad(params: FinCategory, m: MonadData, name: str | None = None) -> ParamMonadData:
    return param_monad(
        name or f"const_{m.name}",
        params,
        m.cat,
        {a: m for a in params.objects},
        {f: {x: m.cat.identity(m.T.omap[x]) for x in m.cat.objects} for f in params.morphisms},
    )


def check_param(p: ParamData) -> LawReport:
    A, X = p.params, p.carriers
    rep = LawReport(f"parametrized {'monad' if p.is_monad else 'endofunctor'} {p.name}")
    for a in A.objects:
        if a not in p.per_object:
            raise StructuralError(f"{p.name}: no endofunctor at parameter {a}")
        f = p.functor(a)
        if f.dom != X or f.cod != X:
            raise StructuralError(f"{p.name}: functor at {a} is not an endofunctor of {X.name}")
        rep.extend(check_monad(p.monad(a)) if p.is_monad else validate(f))
    for f in A.morphisms:
        if f not in p.per_morphism:
            raise StructuralError(f"{p.name}: no transformation at {f}")
        t = p.trans(f)
        s, d = A.morphisms[f]
        if not _same_functor(t.source, p.functor(s)) or not _same_functor(t.target, p.functor(d)):
            raise StructuralError(f"{p.name}: transformation at {f} has the wrong endpoints")
        rep.extend(validate(t))
    if not rep.ok:
        return rep
    for a in A.objects:
        ta = p.trans(A.identity(a))
        if any(ta[x] != X.identity(p.functor(a).omap[x]) for x in X.objects):
            rep.add("param-identity", A.identity(a))
    for (g, f), h in A.composition.items():
        gf = vertical(p.trans(g), p.trans(f))
        if dict(gf.components) != dict(p.trans(h).components):
            rep.add("param-composition", g, f)
    if p.is_monad:
        for f in A.morphisms:
            rep.extend(check_monad_morphism(p.per_morphism[f]))
    return rep


def tf(p: ParamData, f: str, g: str) -> str:
    """T_f g = (T_f)_Y . T_A(g) for f : A -> A', g : X -> Y."""
    X = p.carriers
    a = p.params.src(f)
    return X.compose(p.trans(f)[X.dst(g)], p.functor(a).mmap[g])


def hat(p: ParamData, name: str | None = None) -> MonadData | Functor:
    """The endofunctor (A, X) -> (A, T_A X) of A x X, with unit and multiplication
    assembled componentwise for the monad flavor."""
    A, X = p.params, p.carriers
    guard(A, X)
    prod = product(A, X)
    guard(prod)
    nm = name or f"{p.name}^"
    omap = {o: prod.obj(a, p.functor(a).omap[x]) for o, (a, x) in prod.split_obj.items()}
    mmap = {m: prod.mor(f, tf(p, f, g)) for m, (f, g) in prod.split_mor.items()}
    T = Functor(nm, prod, prod, omap, mmap)
    if not p.is_monad:
        return T
    eta = {o: prod.mor(A.identity(a), p.eta(a, x)) for o, (a, x) in prod.split_obj.items()}
    mu = {o: prod.mor(A.identity(a), p.mu(a, x)) for o, (a, x) in prod.split_obj.items()}
    m = make_monad(nm, T, eta, mu)
    return MonadData(m.name, m.cat, m.T, m.eta, m.mu, p.comonad)


def uncurry(p: ParamData, prod: ProductCategory | None = None) -> Functor:
    """T : A x X -> X, (A, X) -> T_A X, (f, g) -> T_f g."""
    prod = prod or product(p.params, p.carriers)
    return Functor(
        f"{p.name}~",
        prod,
        p.carriers,
        {o: p.functor(a).omap[x] for o, (a, x) in prod.split_obj.items()},
        {m: tf(p, f, g) for m, (f, g) in prod.split_mor.items()},
    )


def cokleisli_square(p: ParamData) -> tuple[Functor, Functor]:
    """T.T built as T . (A x T) . (Delta x X), next to the direct tabulation
    (A, X) -> T_A T_A X; the two must agree."""
    A, X = p.params, p.carriers
    ax = product(A, X)
    aax = product(A, ax, f"{A.name}x({ax.name})")
    t = uncurry(p, ax)
    delta = Functor(
        "DxX",
        ax,
        aax,
        {o: aax.obj(a, o) for o, (a, _x) in ax.split_obj.items()},
        {m: aax.mor(f, m) for m, (f, _g) in ax.split_mor.items()},
    )
    a_t = Functor(
        "AxT",
        aax,
        ax,
        {o: ax.obj(a, t.omap[inner]) for o, (a, inner) in aax.split_obj.items()},
        {m: ax.mor(f, t.mmap[inner]) for m, (f, inner) in aax.split_mor.items()},
    )
    composite = compose_functors(t, compose_functors(a_t, delta), f"{p.name}.{p.name}")
    direct = Functor(
        f"{p.name}{p.name}",
        ax,
        X,
        {o: p.functor(a).omap[p.functor(a).omap[x]] for o, (a, x) in ax.split_obj.items()},
        {m: tf(p, f, tf(p, f, g)) for m, (f, g) in ax.split_mor.items()},
    )
    return composite, direct


def cokleisli_mult(p: ParamMonadData) -> NatTrans:
    """mu as a 2-cell T.T => T between functors A x X -> X."""
    composite, _ = cokleisli_square(p)
    t = uncurry(p, composite.dom)
    return NatTrans(
        f"mu_{p.name}",
        composite,
        t,
        {o: p.mu(a, x) for o, (a, x) in composite.dom.split_obj.items()},
    )


# ---------------------------------------------------------------------------
# Algebras


@dataclass(frozen=True)
class AlgebraObject:
    param: str
    carrier: str
    xi: str


def _as_param(p: ParamData | MonadData) -> ParamData:
    if isinstance(p, MonadData):
        c = FinCategory.build("1", ["*"], [])
        q = constant_param_monad(c, p, p.name)
        return ParamMonadData(q.name, q.params, q.carriers, q.per_object, q.per_morphism, p.comonad)
    return p


def is_em_algebra(p: ParamData | MonadData, a: str | None, x: str, xi: str) -> bool:
    p = _as_param(p)
    a = a if a is not None else p.params.objects[0]
    m = p.monad(a)
    X = p.carriers
    if X.morphisms[xi] != (m.T.omap[x], x):
        return False
    return X.compose(xi, m.eta[x]) == X.identity(x) and X.compose(xi, m.T.mmap[xi]) == X.compose(xi, m.mu[x])


def enumerate_algebras(p: ParamData | MonadData, a: str | None = None, flavor: str = "EM") -> list[AlgebraObject]:
    """All xi : F_A X -> X over every carrier X, ordered by carrier then xi.

    On comonad-flagged data these are coalgebras X -> S_A X of the base."""
    p = _as_param(p)
    a = a if a is not None else p.params.objects[0]
    if flavor not in ("Alg", "EM"):
        raise ValueError(f"unknown flavor {flavor!r}")
    if flavor == "EM" and not p.is_monad:
        raise StructuralError("EM algebras need monad data")
    X = p.carriers
    f = p.functor(a)
    out = []
    for x in X.objects:
        for xi in X.hom(f.omap[x], x):
            if flavor == "Alg" or is_em_algebra(p, a, x, xi):
                out.append(AlgebraObject(a, x, xi))
    return out


# ---------------------------------------------------------------------------
# (co)Kleisli categories


def _kleisli_core(m: MonadData, name: str) -> FinCategory:
    c, T = m.cat, m.T
    guard(c)
    objs = list(c.objects)
    entries = []  # (id-candidate, x, y, k)
    for x in objs:
        for y in objs:
            for k in c.hom(x, T.omap[y]):
                raw = f"id_{x}" if x == y and k == m.eta[x] else f"{k}_{y}"
                entries.append((raw, x, y, k))
    # identities first so they keep their id_<obj> names
    order = sorted(range(len(entries)), key=lambda i: not (entries[i][1] == entries[i][2] and entries[i][3] == m.eta[entries[i][1]]))
    names = [None] * len(entries)
    for i, n in zip(order, unique_names([entries[i][0] for i in order])):
        names[i] = n
    morphisms = {names[i]: (e[1], e[2]) for i, e in enumerate(entries)}
    by_key = {(e[1], e[2], e[3]): names[i] for i, e in enumerate(entries)}
    under = {names[i]: e[3] for i, e in enumerate(entries)}
    identities = {x: by_key[(x, x, m.eta[x])] for x in objs}
    composition = {}
    for g, (y, z) in morphisms.items():
        for f, (x, y2) in morphisms.items():
            if y != y2:
                continue
            k = c.comp(m.mu[z], T.mmap[under[g]], under[f])
            composition[(g, f)] = by_key[(x, z, k)]
    cat = FinCategory(name, tuple(objs), morphisms, identities, composition)
    cat.__dict__["_underlying"] = under
    return cat


def kleisli(m: MonadData, flavor: str = "Kl", name: str | None = None) -> FinCategory:
    """Kl(T): hom(X, Y) = X -> TY; coKl(S): hom(X, Y) = SX -> Y.

    The underlying morphism of each arrow is available via ``underlying``."""
    if flavor == "Kl":
        if m.comonad:
            raise StructuralError("Kleisli category requested for comonad data")
        return _kleisli_core(m, name or f"Kl({m.name})")
    if flavor == "coKl":
        if not m.comonad:
            raise StructuralError("coKleisli category requested for monad data")
        core = _kleisli_core(m, f"Kl({m.name})^op")
        out = core.op()
        named = FinCategory(name or f"coKl({m.name})", out.objects, out.morphisms, out.identities, out.composition)
        named.__dict__["_underlying"] = core.__dict__["_underlying"]
        return named
    raise ValueError(f"unknown flavor {flavor!r}")


def underlying(k: FinCategory, m: str) -> str:
    return k.__dict__["_underlying"][m]
