"""Bundled example structures, built programmatically.

The catalog `.fib` files are generated from these builders by
scripts/build_catalog.py and compared against them in the test suite.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .fincat import (
    FinCategory,
    Functor,
    NatTrans,
    chain,
    discrete,
    monoid_category,
    poset,
)
from .monadkit import (
    MonadData,
    ParamEndofunctorData,
    ParamMonadData,
    constant_param_monad,
    identity_monad,
    make_monad,
    param_comonad,
    param_monad,
    thin_comonad,
    thin_monad,
)

BOOL4 = ["bot", "a", "b", "top"]


def _bool_leq(x: str, y: str) -> bool:
    return x == y or x == "bot" or y == "top"


def bool_join(x: str, y: str) -> str:
    if _bool_leq(x, y):
        return y
    if _bool_leq(y, x):
        return x
    return "top"


def bool_meet(x: str, y: str) -> str:
    if _bool_leq(x, y):
        return x
    if _bool_leq(y, x):
        return y
    return "bot"


def chain_join(x: str, y: str) -> str:
    return max(x, y, key=lambda o: int(o[1:]))


# -- plain categories -----------------------------------------------------


@lru_cache(maxsize=None)
def terminal_cat() -> FinCategory:
    return discrete("one", ["pt"])


@lru_cache(maxsize=None)
def chain2() -> FinCategory:
    return chain("chain2", 2)


@lru_cache(maxsize=None)
def chain3() -> FinCategory:
    return chain("chain3", 3)


@lru_cache(maxsize=None)
def bool4() -> FinCategory:
    return poset("bool4", BOOL4, _bool_leq)


@lru_cache(maxsize=None)
def discrete2() -> FinCategory:
    return discrete("disc2", ["x", "y"])


@lru_cache(maxsize=None)
def bz2() -> FinCategory:
    """Z/2 as a one-object category."""
    mult = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
    return monoid_category("BZ2", ["e", "s"], mult, "e")


@lru_cache(maxsize=None)
def splitepi() -> FinCategory:
    """0 -r-> 1 -s-> 0 with r.s = id_1; e = s.r is idempotent."""
    return FinCategory.build(
        "splitepi",
        ["o0", "o1"],
        [("r", "o0", "o1"), ("s", "o1", "o0"), ("e", "o0", "o0")],
        {
            ("r", "s"): "id_o1",
            ("s", "r"): "e",
            ("e", "e"): "e",
            ("r", "e"): "r",
            ("e", "s"): "s",
        },
    )


@lru_cache(maxsize=None)
def finset2() -> FinCategory:
    """Finite sets of size 0, 1, 2 and all functions; f<a><b>_<images>."""
    arrows = []
    fn = {}
    for a in range(3):
        for b in range(3):
            for imgs in itertools.product(range(b), repeat=a):
                if a == b and imgs == tuple(range(a)):
                    name = f"id_n{a}"
                else:
                    name = f"f{a}{b}_" + ("".join(map(str, imgs)) or "e")
                    arrows.append((name, f"n{a}", f"n{b}"))
                fn[(a, b, imgs)] = name
    comp = {}
    for (b, c, g), gn in fn.items():
        for (a, b2, f), fname in fn.items():
            if b2 == b:
                comp[(gn, fname)] = fn[(a, c, tuple(g[i] for i in f))]
    return FinCategory.build("finset2", ["n0", "n1", "n2"], arrows, comp)


def isopair() -> FinCategory:
    """x and y isomorphic, both mapping to z."""
    return FinCategory.build(
        "isopair",
        ["x", "y", "z"],
        [("i", "x", "y"), ("j", "y", "x"), ("p", "x", "z"), ("q", "y", "z")],
        {("j", "i"): "id_x", ("i", "j"): "id_y", ("q", "i"): "p", ("p", "j"): "q"},
    )


# -- monads ---------------------------------------------------------------


def writer_monad(c: FinCategory, join, a: str) -> MonadData:
    return thin_monad(c, {x: join(a, x) for x in c.objects}, f"W{a}")


def coreader_comonad(c: FinCategory, meet, a: str) -> MonadData:
    return thin_comonad(c, {x: meet(a, x) for x in c.objects}, f"R{a}")


@lru_cache(maxsize=None)
def z2_monad() -> MonadData:
    """T = Id on BZ2 with unit and multiplication both the generator s."""
    c = bz2()
    from .fincat import identity_functor

    return make_monad("Z2s", identity_functor(c), {"pt": "s"}, {"pt": "s"})


@lru_cache(maxsize=None)
def z2_monad_broken() -> MonadData:
    c = bz2()
    from .fincat import identity_functor

    return make_monad("Z2bad", identity_functor(c), {"pt": "s"}, {"pt": "e"})


# -- parametrized monads --------------------------------------------------


def writer_param(c: FinCategory, join, name: str) -> ParamMonadData:
    """T_A(x) = A v x over A = X = c."""
    return param_monad(name, c, c, {a: writer_monad(c, join, a) for a in c.objects})


@lru_cache(maxsize=None)
def writer_chain3() -> ParamMonadData:
    return writer_param(chain3(), chain_join, "writer_chain3")


@lru_cache(maxsize=None)
def writer_chain2() -> ParamMonadData:
    return writer_param(chain2(), chain_join, "writer_chain2")


@lru_cache(maxsize=None)
def writer_bool4() -> ParamMonadData:
    return writer_param(bool4(), bool_join, "writer_bool4")


@lru_cache(maxsize=None)
def const_chain3() -> ParamMonadData:
    """Every parameter acts by the identity monad."""
    return constant_param_monad(chain3(), identity_monad(chain3(), "Id"), "const_chain3")


@lru_cache(maxsize=None)
def finset_param() -> ParamMonadData:
    """Over the 2-chain: T_c0 = Id, T_c1 = constant at the one-point set."""
    x = finset2()
    const1 = thin_like_const(x, "n1", "K1")
    return param_monad("finset_param", chain2(), x, {"c0": identity_monad(x, "Id"), "c1": const1})


def thin_like_const(x: FinCategory, pt: str, name: str) -> MonadData:
    """Constant monad at a terminal object."""
    from .fincat import constant_functor

    T = constant_functor(x, x, pt, name)
    eta = {o: x.hom(o, pt)[0] for o in x.objects}
    mu = {o: x.identity(pt) for o in x.objects}
    return make_monad(name, T, eta, mu)


@lru_cache(maxsize=None)
def coreader_bool4() -> ParamMonadData:
    """S_a(x) = a ^ x over A = X = bool4, a parametrized comonad."""
    c = bool4()
    return param_comonad("coreader_bool4", c, c, {a: coreader_comonad(c, bool_meet, a) for a in c.objects})


@lru_cache(maxsize=None)
def semiauto_m2() -> ParamEndofunctorData:
    """Z/2 acting on BZ2: F_pt = Id, F_m the transformation with component m."""
    from .fincat import identity_functor

    m = bz2()
    i = identity_functor(m, "Id")
    return ParamEndofunctorData(
        "semiauto_m2", m, m, {"pt": i}, {g: NatTrans(f"F_{g}", i, i, {"pt": g}) for g in m.morphisms}
    )


@lru_cache(maxsize=None)
def idem_monoid() -> FinCategory:
    """The two-element monoid {1, z} with z.z = z, as a one-object category."""
    mult = {("one", "one"): "one", ("one", "z"): "z", ("z", "one"): "z", ("z", "z"): "z"}
    return monoid_category("Bidem", ["one", "z"], mult, "one")


@lru_cache(maxsize=None)
def collapse_alg() -> ParamEndofunctorData:
    """Over the 2-chain on the idempotent monoid: F_c0 kills z, F_c1 = Id and
    the transition has component z. Its Alg total is a fibration whose
    reindexing has no left adjoint, so it is not an opfibration."""
    from .fincat import identity_nat

    c, m = chain2(), idem_monoid()
    kill = Functor("K", m, m, {"pt": "pt"}, {"one": "one", "z": "one"})
    i = Functor("Id", m, m, {"pt": "pt"}, {"one": "one", "z": "z"})
    return ParamEndofunctorData(
        "collapse_alg",
        c,
        m,
        {"c0": kill, "c1": i},
        {"id_c0": identity_nat(kill), "id_c1": identity_nat(i), "c0_c1": NatTrans("zeta", kill, i, {"pt": "z"})},
    )


def chain_into_bool() -> Functor:
    """The lattice embedding c0 -> bot, c1 -> a, c2 -> top."""
    c, b = chain3(), bool4()
    omap = {"c0": "bot", "c1": "a", "c2": "top"}
    return Functor(
        "emb", c, b, omap, {m: (b.identity(omap[c.src(m)]) if omap[c.src(m)] == omap[c.dst(m)] else f"{omap[c.src(m)]}_{omap[c.dst(m)]}") for m in c.morphisms}
    )


def writer_embedding_cell():
    """The oplax cell writer_chain3 -> writer_bool4 along the embedding; the
    embedding preserves joins so every comparison component is an identity."""
    from .grothfib import OplaxCell

    u = chain_into_bool()
    b = bool4()
    delta = {(a, x): b.identity(bool_join(u.omap[a], u.omap[x])) for a in chain3().objects for x in chain3().objects}
    return OplaxCell("delta", u, u, delta, monad_flavored=True)


# -- random concrete categories ------------------------------------------


def random_category(rng, max_objects: int = 6, max_morphisms: int = 20, name: str = "R") -> FinCategory:
    """A random subcategory of finite sets: a few objects (sets of size <= 3)
    and the composition closure of random generating functions, regenerated
    until it fits the morphism bound. ``rng`` is a ``random.Random``."""
    while True:
        n = rng.randint(1, max_objects)
        sizes = [rng.randint(0, 3) for _ in range(n)]
        objs = [f"o{i}" for i in range(n)]
        fns: dict[tuple, str] = {(i, i, tuple(range(sizes[i]))): f"id_o{i}" for i in range(n)}
        for _ in range(rng.randint(0, 2 * n)):
            i, j = rng.randrange(n), rng.randrange(n)
            if sizes[j] == 0 and sizes[i] > 0:
                continue
            img = tuple(rng.randrange(sizes[j]) for _ in range(sizes[i]))
            fns.setdefault((i, j, img), "")
        changed = True
        while changed and len(fns) <= max_morphisms:
            changed = False
            for (b, c, g) in list(fns):
                for (a, b2, f) in list(fns):
                    if b2 == b:
                        key = (a, c, tuple(g[k] for k in f))
                        if key not in fns:
                            fns[key] = ""
                            changed = True
        if len(fns) > max_morphisms:
            continue
        names = {}
        count = 0
        for key, nm in fns.items():
            if nm:
                names[key] = nm
            else:
                names[key] = f"m{count}"
                count += 1
        arrows = [(nm, f"o{k[0]}", f"o{k[1]}") for k, nm in names.items() if not nm.startswith("id_")]
        comp = {}
        for (b, c, g), gn in names.items():
            for (a, b2, f), fname in names.items():
                if b2 == b:
                    comp[(gn, fname)] = names[(a, c, tuple(g[k] for k in f))]
        return FinCategory.build(name, objs, arrows, comp)


# -- fibrations given directly ---------------------------------------------


def codomain2():
    """The codomain fibration of the 2-chain: objects are arrows, the fibre
    over c is the slice over c, reindexing is pullback."""
    from .fincat import FinCategory as _C
    from .grothfib import SplitFibrationData, grothendieck

    base = chain2()
    over0 = discrete("slice_c0", ["c0_c0"])
    over1 = _C.build("slice_c1", ["c0_c1", "c1_c1"], [("le", "c0_c1", "c1_c1")], {})
    down = Functor(
        "pb", over1, over0, {"c0_c1": "c0_c0", "c1_c1": "c0_c0"},
        {m: "id_c0_c0" for m in over1.morphisms},
    )
    s = SplitFibrationData(
        "codomain2", base, {"c0": over0, "c1": over1},
        {"id_c0": identity_functor_(over0), "id_c1": identity_functor_(over1), "c0_c1": down},
    )
    return grothendieck(s)


def identity_functor_(c: FinCategory) -> Functor:
    from .fincat import identity_functor

    return identity_functor(c)


def identity_fibration(c: FinCategory | None = None):
    """id : C -> C, the EM fibration of the trivial parametrized monad."""
    from .grothfib import as_total

    c = c or chain3()
    return as_total(f"id_{c.name}", c, identity_functor_(c))


def points_splitepi():
    """Endofunctors of splitepi over splitepi by evaluation at o1."""
    from .fincat import functor_category
    from .grothfib import as_total

    c = splitepi()
    fc = functor_category(c, c)
    cat = fc.cat
    omap = {o: fc.functors[o].omap["o1"] for o in cat.objects}
    mmap = {m: fc.transformations[m]["o1"] for m in cat.morphisms}
    return as_total("points_splitepi", cat, Functor("ev_o1", cat, c, omap, mmap))


def swindle_shift() -> NatTrans:
    """alpha : const c0 => G on the 3-chain, G shifting c0 -> c1 -> c2 -> c2."""
    from .fincat import constant_functor

    c = chain3()
    omap = {"c0": "c1", "c1": "c2", "c2": "c2"}
    G = Functor("G", c, c, omap, {m: c.hom(omap[c.src(m)], omap[c.dst(m)])[0] for m in c.morphisms})
    F = constant_functor(c, c, "c0")
    return NatTrans("alpha", F, G, {o: c.hom("c0", G.omap[o])[0] for o in c.objects})


# -- deliberately broken structures ----------------------------------------


def broken_category() -> FinCategory:
    """id_y . f is set to g: left identity fails at (id_y, f)."""
    c = FinCategory.build("broken", ["x", "y"], [("f", "x", "y"), ("g", "x", "y")])
    comp = dict(c.composition)
    comp[("id_y", "f")] = "g"
    return FinCategory("broken", c.objects, c.morphisms, c.identities, comp)


def broken_param() -> ParamEndofunctorData:
    """Constant BZ2 with F_f = s off identities: s . s = e != s breaks
    composition at (c1_c2, c0_c1)."""
    from .fincat import identity_functor

    c, m = chain3(), bz2()
    i = identity_functor(m, "Id")
    per = {f: NatTrans(f"F_{f}", i, i, {"pt": "e" if c.is_identity(f) else "s"}) for f in c.morphisms}
    return ParamEndofunctorData("bad", c, m, {o: i for o in c.objects}, per)


def broken_action():
    """Z2 on Z3 with the flip sending z2 to z0: not an endomorphism at (z1, z1, z1)."""
    from .algkit import action, cyclic

    z2, z3 = cyclic(2), cyclic(3)
    return action("bad", z2, z3, lambda g, x: x if g == "z0" else {"z0": "z0", "z1": "z1", "z2": "z0"}[x])


def broken_monoid():
    """a * a = b, a * b = a, b * x = b: associativity fails at (a, a, a)."""
    from .algkit import FinMonoid

    els = ("e", "a", "b")
    table = {("e", x): x for x in els} | {(x, "e"): x for x in els}
    table |= {("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "b", ("b", "b"): "b"}
    return FinMonoid("nonassoc", els, "e", table)


def broken_fixtures() -> dict:
    """name -> (builder, checker, law, witness) with the witness each must report."""
    from .fincat import validate
    from .monadkit import check_monad, check_param

    return {
        "broken_category": (broken_category, validate, "left-identity", ("id_y", "f")),
        "z2_monad_broken": (z2_monad_broken, check_monad, "left-unit", ("pt",)),
        "broken_param": (broken_param, check_param, "param-composition", ("c1_c2", "c0_c1")),
        "broken_action": (broken_action, lambda a: a.laws(), "endomorphism", ("z1", "z1", "z1")),
        "broken_monoid": (broken_monoid, lambda m: m.laws(), "associativity", ("a", "a", "a")),
    }
