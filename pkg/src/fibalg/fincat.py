"""Finite, fully tabulated categories, functors and natural transformations.

Everything here is decided by scanning tables: law checks, limit and colimit
search, extremal objects, adjunction and equivalence checks, isomorphism
search between categories.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

DEFAULT_SIZE_GUARD = 512


class FibalgError(Exception):
    """Base class for all errors raised by the workbench."""


class StructuralError(FibalgError):
    """A reference does not resolve or data has the wrong shape."""


class SizeGuardError(FibalgError):
    """A category exceeds the configured morphism-count bound."""


class ConstructionError(FibalgError):
    """A construction could not be carried out on the given input."""


class ValidationError(FibalgError):
    """An input fails the laws it is required to satisfy."""

    def __init__(self, message: str, report: "LawReport | None" = None):
        super().__init__(message)
        self.report = report


def size_bound() -> int:
    raw = os.environ.get("FIBALG_SIZE_GUARD")
    return int(raw) if raw else DEFAULT_SIZE_GUARD


def guard(*cats: "FinCategory", bound: int | None = None) -> None:
    limit = size_bound() if bound is None else bound
    for c in cats:
        if len(c.morphisms) > limit:
            raise SizeGuardError(
                f"category {c.name!r} has {len(c.morphisms)} morphisms (bound {limit})"
            )


def unique_names(names: Sequence[str]) -> list[str]:
    """Make names distinct by appending primes, keeping the first occurrence."""
    seen: set[str] = set()
    out = []
    for n in names:
        m = n
        while m in seen:
            m += "'"
        seen.add(m)
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple
    detail: str = ""

    def __str__(self) -> str:
        w = ", ".join(map(str, self.witness))
        return f"{self.law} at ({w})" + (f": {self.detail}" if self.detail else "")


@dataclass
class LawReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, *witness: Any, detail: str = "") -> None:
        self.violations.append(Violation(law, tuple(witness), detail))

    def extend(self, other: "LawReport") -> None:
        self.violations.extend(other.violations)

    def laws(self) -> set[str]:
        return {v.law for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: all laws hold"
        return f"{self.subject}:\n" + "\n".join(f"  {v}" for v in self.violations)


@dataclass
class Verdict:
    holds: bool
    reason: str = ""
    witness: Any = None
    data: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds


# ---------------------------------------------------------------------------
# Categories


@dataclass(frozen=True, eq=False)
class FinCategory:
    name: str
    objects: tuple[str, ...]
    morphisms: Mapping[str, tuple[str, str]]
    identities: Mapping[str, str]
    composition: Mapping[tuple[str, str], str]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (
            self.objects == other.objects
            and dict(self.morphisms) == dict(other.morphisms)
            and dict(self.identities) == dict(other.identities)
            and dict(self.composition) == dict(other.composition)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<FinCategory {self.name}: {len(self.objects)} objects, {len(self.morphisms)} morphisms>"

    # -- constructors -------------------------------------------------------

    @classmethod
    def build(
        cls,
        name: str,
        objects: Iterable[str],
        arrows: Iterable[tuple[str, str, str]],
        compose: Mapping[tuple[str, str], str] | None = None,
        identities: Mapping[str, str] | None = None,
    ) -> "FinCategory":
        """Build from non-identity arrows plus their composites; identities are added."""
        objects = tuple(objects)
        ids = dict(identities) if identities else {o: f"id_{o}" for o in objects}
        morphisms: dict[str, tuple[str, str]] = {ids[o]: (o, o) for o in objects}
        for m, s, t in arrows:
            morphisms[m] = (s, t)
        composition: dict[tuple[str, str], str] = {}
        idset = set(ids.values())
        for m, (s, t) in morphisms.items():
            composition[(ids[t], m)] = m
            composition[(m, ids[s])] = m
        for (g, f), h in (compose or {}).items():
            if g in idset or f in idset:
                continue
            composition[(g, f)] = h
        return cls(name, objects, morphisms, ids, composition)

    # -- queries ------------------------------------------------------------

    def src(self, m: str) -> str:
        return self.morphisms[m][0]

    def dst(self, m: str) -> str:
        return self.morphisms[m][1]

    def identity(self, o: str) -> str:
        return self.identities[o]

    def is_identity(self, m: str) -> bool:
        return self._identity_set().__contains__(m)

    def _identity_set(self) -> frozenset:
        cached = self.__dict__.get("_idset")
        if cached is None:
            cached = frozenset(self.identities.values())
            self.__dict__["_idset"] = cached
        return cached

    def _homs(self) -> dict[tuple[str, str], tuple[str, ...]]:
        cached = self.__dict__.get("_hom")
        if cached is None:
            acc: dict[tuple[str, str], list[str]] = {}
            for m, (s, t) in self.morphisms.items():
                acc.setdefault((s, t), []).append(m)
            cached = {k: tuple(v) for k, v in acc.items()}
            self.__dict__["_hom"] = cached
        return cached

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._homs().get((a, b), ())

    def compose(self, g: str, f: str) -> str:
        """g after f."""
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise StructuralError(f"{self.name}: no composite {g} . {f}") from None

    def comp(self, *ms: str) -> str:
        """Composite of a path written right to left: comp(h, g, f) = h.g.f."""
        out = ms[-1]
        for m in reversed(ms[:-1]):
            out = self.compose(m, out)
        return out

    def is_iso(self, m: str) -> bool:
        return self.inverse(m) is not None

    def inverse(self, m: str) -> str | None:
        s, t = self.morphisms[m]
        for n in self.hom(t, s):
            if self.compose(n, m) == self.identities[s] and self.compose(m, n) == self.identities[t]:
                return n
        return None

    def isomorphism(self, a: str, b: str) -> str | None:
        for m in self.hom(a, b):
            if self.is_iso(m):
                return m
        return None

    def isomorphic(self, a: str, b: str) -> bool:
        return a == b or self.isomorphism(a, b) is not None

    def op(self) -> "FinCategory":
        cached = self.__dict__.get("_op")
        if cached is None:
            name = self.name[:-3] if self.name.endswith("^op") else self.name + "^op"
            cached = FinCategory(
                name,
                self.objects,
                {m: (t, s) for m, (s, t) in self.morphisms.items()},
                dict(self.identities),
                {(f, g): h for (g, f), h in self.composition.items()},
            )
            cached.__dict__["_op"] = self
            self.__dict__["_op"] = cached
        return cached

    def subcategory(self, name: str, objects: Iterable[str], morphisms: Iterable[str]) -> "FinCategory":
        objs = tuple(objects)
        ms = [m for m in self.morphisms if m in set(morphisms)]
        mset = set(ms)
        comp = {k: v for k, v in self.composition.items() if k[0] in mset and k[1] in mset}
        return FinCategory(
            name, objs, {m: self.morphisms[m] for m in ms}, {o: self.identities[o] for o in objs}, comp
        )


def poset(name: str, elements: Sequence[str], leq: Callable[[str, str], bool]) -> FinCategory:
    """A poset as a thin category; the arrow a <= b is named a_b."""
    arrows = [(f"{a}_{b}", a, b) for a in elements for b in elements if a != b and leq(a, b)]
    byends = {(s, t): m for m, s, t in arrows}
    comp = {}
    for (g, b, c) in arrows:
        for (f, a, b2) in arrows:
            if b == b2:
                comp[(g, f)] = f"id_{a}" if a == c else byends[(a, c)]
    return FinCategory.build(name, elements, arrows, comp)


def chain(name: str, n: int, prefix: str = "c") -> FinCategory:
    elems = [f"{prefix}{i}" for i in range(n)]
    return poset(name, elems, lambda a, b: int(a[len(prefix):]) <= int(b[len(prefix):]))


def discrete(name: str, objects: Sequence[str]) -> FinCategory:
    return FinCategory.build(name, objects, [])


def monoid_category(
    name: str, elements: Sequence[str], mult: Mapping[tuple[str, str], str], unit: str, obj: str = "pt"
) -> FinCategory:
    """One-object category; mult[(g, f)] is the composite g after f."""
    return FinCategory(
        name,
        (obj,),
        {m: (obj, obj) for m in elements},
        {obj: unit},
        {(g, f): mult[(g, f)] for g in elements for f in elements},
    )


# ---------------------------------------------------------------------------
# Functors and natural transformations


@dataclass(frozen=True, eq=False)
class Functor:
    name: str
    dom: FinCategory
    cod: FinCategory
    omap: Mapping[str, str]
    mmap: Mapping[str, str]

    def ob(self, o: str) -> str:
        return self.omap[o]

    def mor(self, m: str) -> str:
        return self.mmap[m]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Functor):
            return NotImplemented
        return (
            dict(self.omap) == dict(other.omap)
            and dict(self.mmap) == dict(other.mmap)
            and self.dom == other.dom
            and self.cod == other.cod
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<Functor {self.name}: {self.dom.name} -> {self.cod.name}>"

    def op(self) -> "Functor":
        return Functor(self.name, self.dom.op(), self.cod.op(), self.omap, self.mmap)

    def renamed(self, name: str) -> "Functor":
        return Functor(name, self.dom, self.cod, self.omap, self.mmap)


def identity_functor(c: FinCategory, name: str | None = None) -> Functor:
    return Functor(name or f"Id_{c.name}", c, c, {o: o for o in c.objects}, {m: m for m in c.morphisms})


def compose_functors(g: Functor, f: Functor, name: str | None = None) -> Functor:
    """g after f."""
    return Functor(
        name or f"{g.name}.{f.name}",
        f.dom,
        g.cod,
        {o: g.omap[f.omap[o]] for o in f.dom.objects},
        {m: g.mmap[f.mmap[m]] for m in f.dom.morphisms},
    )


def constant_functor(dom: FinCategory, cod: FinCategory, obj: str, name: str | None = None) -> Functor:
    i = cod.identity(obj)
    return Functor(name or f"const_{obj}", dom, cod, {o: obj for o in dom.objects}, {m: i for m in dom.morphisms})


@dataclass(frozen=True, eq=False)
class NatTrans:
    name: str
    source: Functor
    target: Functor
    components: Mapping[str, str]

    def __getitem__(self, o: str) -> str:
        return self.components[o]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, NatTrans):
            return NotImplemented
        return (
            dict(self.components) == dict(other.components)
            and self.source == other.source
            and self.target == other.target
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<NatTrans {self.name}: {self.source.name} => {self.target.name}>"

    def op(self) -> "NatTrans":
        return NatTrans(self.name, self.target.op(), self.source.op(), self.components)


def identity_nat(f: Functor, name: str | None = None) -> NatTrans:
    return NatTrans(name or f"id_{f.name}", f, f, {o: f.cod.identity(f.omap[o]) for o in f.dom.objects})


def vertical(beta: NatTrans, alpha: NatTrans, name: str | None = None) -> NatTrans:
    """beta after alpha."""
    c = alpha.source.cod
    return NatTrans(
        name or f"{beta.name}*{alpha.name}",
        alpha.source,
        beta.target,
        {o: c.compose(beta[o], alpha[o]) for o in alpha.source.dom.objects},
    )


def whisker_left(alpha: NatTrans, h: Functor) -> NatTrans:
    """alpha H : F H => G H."""
    return NatTrans(
        f"{alpha.name}{h.name}",
        compose_functors(alpha.source, h),
        compose_functors(alpha.target, h),
        {o: alpha[h.omap[o]] for o in h.dom.objects},
    )


def whisker_right(k: Functor, alpha: NatTrans) -> NatTrans:
    """K alpha : K F => K G."""
    return NatTrans(
        f"{k.name}{alpha.name}",
        compose_functors(k, alpha.source),
        compose_functors(k, alpha.target),
        {o: k.mmap[alpha[o]] for o in alpha.source.dom.objects},
    )


def horizontal(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    """beta * alpha : K F => L G, components beta_{G x} . K(alpha_x)."""
    k = beta.source
    c = k.cod
    g = alpha.target
    return NatTrans(
        f"{beta.name}.{alpha.name}",
        compose_functors(k, alpha.source),
        compose_functors(beta.target, g),
        {o: c.compose(beta[g.omap[o]], k.mmap[alpha[o]]) for o in alpha.source.dom.objects},
    )


# ---------------------------------------------------------------------------
# Validation


def validate(entity: FinCategory | Functor | NatTrans) -> LawReport:
    """Exhaustive law check; dangling references raise StructuralError."""
    if isinstance(entity, FinCategory):
        return _validate_category(entity)
    if isinstance(entity, Functor):
        return _validate_functor(entity)
    if isinstance(entity, NatTrans):
        return _validate_nat(entity)
    raise TypeError(f"cannot validate {type(entity).__name__}")


def _validate_category(c: FinCategory) -> LawReport:
    rep = LawReport(f"category {c.name}")
    objs = set(c.objects)
    if len(objs) != len(c.objects):
        raise StructuralError(f"{c.name}: duplicate object ids")
    for m, (s, t) in c.morphisms.items():
        if s not in objs or t not in objs:
            raise StructuralError(f"{c.name}: morphism {m} references an undeclared object")
    for o in c.objects:
        if o not in c.identities:
            raise StructuralError(f"{c.name}: object {o} has no identity")
    for o, i in c.identities.items():
        if i not in c.morphisms:
            raise StructuralError(f"{c.name}: identity {i} is not a morphism")
        if c.morphisms[i] != (o, o):
            rep.add("identity-typing", o, i)
    for (g, f), h in c.composition.items():
        for x in (g, f, h):
            if x not in c.morphisms:
                raise StructuralError(f"{c.name}: composition mentions unknown morphism {x}")
    ms = list(c.morphisms)
    for g in ms:
        for f in ms:
            composable = c.morphisms[f][1] == c.morphisms[g][0]
            h = c.composition.get((g, f))
            if composable and h is None:
                rep.add("composite-missing", g, f)
            elif not composable and h is not None:
                rep.add("composite-not-composable", g, f)
            elif h is not None and c.morphisms[h] != (c.morphisms[f][0], c.morphisms[g][1]):
                rep.add("composite-typing", g, f, detail=h)
    if not rep.ok:
        return rep
    for m, (s, t) in c.morphisms.items():
        if c.composition[(c.identities[t], m)] != m:
            rep.add("left-identity", c.identities[t], m)
        if c.composition[(m, c.identities[s])] != m:
            rep.add("right-identity", m, c.identities[s])
    comp = c.composition
    for (g, f), gf in comp.items():
        s = c.morphisms[f][0]
        for e in _into(c, s):
            if comp[(g, comp[(f, e)])] != comp[(gf, e)]:
                rep.add("associativity", g, f, e)
    return rep


def _into(c: FinCategory, o: str) -> list[str]:
    cache = c.__dict__.get("_into")
    if cache is None:
        cache = {}
        for m, (s, t) in c.morphisms.items():
            cache.setdefault(t, []).append(m)
        c.__dict__["_into"] = cache
    return cache.get(o, [])


def _outof(c: FinCategory, o: str) -> list[str]:
    cache = c.__dict__.get("_outof")
    if cache is None:
        cache = {}
        for m, (s, t) in c.morphisms.items():
            cache.setdefault(s, []).append(m)
        c.__dict__["_outof"] = cache
    return cache.get(o, [])


def _validate_functor(f: Functor) -> LawReport:
    rep = LawReport(f"functor {f.name}")
    for o in f.dom.objects:
        if o not in f.omap:
            raise StructuralError(f"{f.name}: object {o} is not mapped")
        if f.omap[o] not in f.cod.identities:
            raise StructuralError(f"{f.name}: {o} maps to unknown object {f.omap[o]}")
    for m in f.dom.morphisms:
        if m not in f.mmap:
            raise StructuralError(f"{f.name}: morphism {m} is not mapped")
        if f.mmap[m] not in f.cod.morphisms:
            raise StructuralError(f"{f.name}: {m} maps to unknown morphism {f.mmap[m]}")
    for m, (s, t) in f.dom.morphisms.items():
        if f.cod.morphisms[f.mmap[m]] != (f.omap[s], f.omap[t]):
            rep.add("functor-typing", m, detail=f"{f.mmap[m]}")
    for o, i in f.dom.identities.items():
        if f.mmap[i] != f.cod.identities[f.omap[o]]:
            rep.add("functor-identity", o)
    if not rep.ok:
        return rep
    for (g, h), gh in f.dom.composition.items():
        if f.cod.composition.get((f.mmap[g], f.mmap[h])) != f.mmap[gh]:
            rep.add("functor-composition", g, h)
    return rep


def _validate_nat(a: NatTrans) -> LawReport:
    rep = LawReport(f"transformation {a.name}")
    F, G = a.source, a.target
    if F.dom is not G.dom and F.dom != G.dom or F.cod is not G.cod and F.cod != G.cod:
        raise StructuralError(f"{a.name}: source and target functors are not parallel")
    c = F.cod
    for o in F.dom.objects:
        if o not in a.components:
            raise StructuralError(f"{a.name}: no component at {o}")
        m = a.components[o]
        if m not in c.morphisms:
            raise StructuralError(f"{a.name}: component {m} at {o} is not a morphism")
        if c.morphisms[m] != (F.omap[o], G.omap[o]):
            rep.add("component-typing", o, detail=m)
    if not rep.ok:
        return rep
    for m, (s, t) in F.dom.morphisms.items():
        if c.compose(G.mmap[m], a[s]) != c.compose(a[t], F.mmap[m]):
            rep.add("naturality", m)
    return rep


# ---------------------------------------------------------------------------
# Shapes and diagrams


def shape(name: str, nodes: Sequence[str], edges: Sequence[tuple[str, str, str]] = (),
          compose: Mapping[tuple[str, str], str] | None = None) -> FinCategory:
    return FinCategory.build(name, nodes, edges, compose or {})


def diagram(j: FinCategory, c: FinCategory, objects: Mapping[str, str],
            morphisms: Mapping[str, str] | None = None, name: str = "D") -> Functor:
    mm = {i: c.identity(objects[o]) for o, i in j.identities.items()}
    mm.update(morphisms or {})
    return Functor(name, j, c, dict(objects), mm)


def discrete_diagram(c: FinCategory, objs: Sequence[str], name: str = "D") -> Functor:
    nodes = [f"j{i}" for i in range(len(objs))]
    return diagram(discrete(f"disc{len(objs)}", nodes), c, dict(zip(nodes, objs)), name=name)


SPAN = shape("span", ["l", "m", "r"], [("a", "m", "l"), ("b", "m", "r")])
COSPAN = shape("cospan", ["l", "m", "r"], [("a", "l", "m"), ("b", "r", "m")])
PARALLEL = shape("parallel", ["s", "t"], [("u", "s", "t"), ("v", "s", "t")])


def span_diagram(c: FinCategory, f: str, g: str) -> Functor:
    """The span  dst(f) <-f- x -g-> dst(g)  (pushout input)."""
    if c.src(f) != c.src(g):
        raise StructuralError("span legs must share a source")
    return diagram(SPAN, c, {"m": c.src(f), "l": c.dst(f), "r": c.dst(g)}, {"a": f, "b": g}, name="span")


def parallel_diagram(c: FinCategory, f: str, g: str) -> Functor:
    if c.morphisms[f] != c.morphisms[g]:
        raise StructuralError("parallel pair must share endpoints")
    s, t = c.morphisms[f]
    return diagram(PARALLEL, c, {"s": s, "t": t}, {"u": f, "v": g}, name="pair")


# ---------------------------------------------------------------------------
# Limits


@dataclass(frozen=True, eq=False)
class Cone:
    apex: str
    legs: Mapping[str, str]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cone):
            return NotImplemented
        return self.apex == other.apex and dict(self.legs) == dict(other.legs)

    __hash__ = None  # type: ignore[assignment]


def _edge_plan(d: Functor) -> tuple[list[str], list[list[tuple[str, str, str]]]]:
    j = d.dom
    nodes = list(j.objects)
    pos = {n: i for i, n in enumerate(nodes)}
    plan: list[list[tuple[str, str, str]]] = [[] for _ in nodes]
    for e, (s, t) in j.morphisms.items():
        if j.is_identity(e):
            continue
        plan[max(pos[s], pos[t])].append((s, t, d.mmap[e]))
    return nodes, plan


def cones(d: Functor, apexes: Iterable[str] | None = None) -> Iterator[Cone]:
    """All cones over d, apex by apex (object order), legs in morphism order."""
    c = d.cod
    nodes, plan = _edge_plan(d)
    comp = c.composition
    homs = c._homs()
    targets = [d.omap[n] for n in nodes]
    for apex in (c.objects if apexes is None else apexes):
        options = [homs.get((apex, x), ()) for x in targets]
        if not all(options):
            continue
        legs: dict[str, str] = {}

        def rec(k: int) -> Iterator[Cone]:
            if k == len(nodes):
                yield Cone(apex, dict(legs))
                return
            n = nodes[k]
            for leg in options[k]:
                legs[n] = leg
                if all(comp[(dm, legs[s])] == legs[t] for s, t, dm in plan[k]):
                    yield from rec(k + 1)
            legs.pop(n, None)

        yield from rec(0)


def _factorizations(c: FinCategory, k: Cone, l: Cone) -> int:
    n = 0
    comp = c.composition
    for u in c.hom(k.apex, l.apex):
        if all(comp[(l.legs[j], u)] == leg for j, leg in k.legs.items()):
            n += 1
            if n > 1:
                break
    return n


def is_limit(d: Functor, cone: Cone, all_cones: list[Cone] | None = None) -> bool:
    c = d.cod
    for k in (list(cones(d)) if all_cones is None else all_cones):
        if _factorizations(c, k, cone) != 1:
            return False
    return True


def is_colimit(d: Functor, cocone: Cone) -> bool:
    return is_limit(d.op(), cocone)


def limit(d: Functor, all_cones: list[Cone] | None = None) -> Cone | None:
    """A limiting cone found by exhaustive search, or None when absent.

    Ties between limiting cones go to the lexicographically least apex id.
    """
    guard(d.cod)
    every = list(cones(d)) if all_cones is None else all_cones
    for cand in sorted(every, key=lambda k: k.apex):
        if is_limit(d, cand, every):
            return cand
    return None


def all_limits(d: Functor) -> list[Cone]:
    guard(d.cod)
    every = list(cones(d))
    return [k for k in every if is_limit(d, k, every)]


def colimit(d: Functor) -> Cone | None:
    """A colimiting cocone (legs point into the apex), via the opposite category."""
    return limit(d.op())


# ---------------------------------------------------------------------------
# Extremal objects


@dataclass(frozen=True)
class Extremal:
    initial: str | None
    terminal: str | None


def find_extremal(c: FinCategory) -> Extremal:
    def first(pred):
        return next((o for o in c.objects if pred(o)), None)

    return Extremal(
        initial=first(lambda o: all(len(c.hom(o, x)) == 1 for x in c.objects)),
        terminal=first(lambda o: all(len(c.hom(x, o)) == 1 for x in c.objects)),
    )


def initial_object(c: FinCategory) -> str | None:
    return find_extremal(c).initial


def terminal_object(c: FinCategory) -> str | None:
    return find_extremal(c).terminal


# ---------------------------------------------------------------------------
# Adjunctions and equivalences


def _check_pair(f: Functor, g: Functor) -> None:
    if f.cod != g.dom or g.cod != f.dom:
        raise StructuralError(f"{f.name} and {g.name} do not form a pair C -> D -> C")


def _universal(f: Functor, g: Functor, c: str, u: str) -> bool:
    C, D = f.dom, f.cod
    fc = f.omap[c]
    for d in D.objects:
        images = {C.compose(g.mmap[h], u) for h in D.hom(fc, d)}
        if len(images) != len(D.hom(fc, d)) or len(images) != len(C.hom(c, g.omap[d])):
            return False
    return True


def find_unit(f: Functor, g: Functor) -> dict[str, str] | None:
    """A natural family of universal arrows c -> G F c, if one exists."""
    C = f.dom
    cands = {}
    for c in C.objects:
        cs = [u for u in C.hom(c, g.omap[f.omap[c]]) if _universal(f, g, c, u)]
        if not cs:
            return None
        cands[c] = cs
    objs = list(C.objects)
    pos = {o: i for i, o in enumerate(objs)}
    checks: list[list[str]] = [[] for _ in objs]
    for m, (s, t) in C.morphisms.items():
        checks[max(pos[s], pos[t])].append(m)
    chosen: dict[str, str] = {}

    def rec(k: int) -> bool:
        if k == len(objs):
            return True
        o = objs[k]
        for u in cands[o]:
            chosen[o] = u
            ok = True
            for m in checks[k]:
                s, t = C.morphisms[m]
                if C.compose(g.mmap[f.mmap[m]], chosen[s]) != C.compose(chosen[t], m):
                    ok = False
                    break
            if ok and rec(k + 1):
                return True
        chosen.pop(o, None)
        return False

    return dict(chosen) if rec(0) else None


def counit_from_unit(f: Functor, g: Functor, unit: Mapping[str, str]) -> dict[str, str]:
    """eps_d is the transpose of id_{Gd}."""
    C, D = f.dom, f.cod
    out = {}
    for d in D.objects:
        gd = g.omap[d]
        target = C.identity(gd)
        hits = [h for h in D.hom(f.omap[gd], d) if C.compose(g.mmap[h], unit[gd]) == target]
        if len(hits) != 1:
            raise ConstructionError(f"no unique transpose of id at {d}")
        out[d] = hits[0]
    return out


def check_adjunction(
    f: Functor,
    g: Functor,
    mode: str = "homset",
    unit: NatTrans | None = None,
    counit: NatTrans | None = None,
) -> Verdict:
    """Decide whether F is left adjoint to G.

    mode="triangle" checks the given unit and counit; mode="homset" searches
    for a natural bijection Hom(Fc, d) = Hom(c, Gd) of the form h -> G(h).u_c.
    """
    _check_pair(f, g)
    C, D = f.dom, f.cod
    if mode == "triangle":
        if unit is None or counit is None:
            raise StructuralError("triangle mode needs a unit and a counit")
        gf, fg = compose_functors(g, f), compose_functors(f, g)
        if unit.source != identity_functor(C) or unit.target != gf:
            raise StructuralError("unit must be Id => G F")
        if counit.source != fg or counit.target != identity_functor(D):
            raise StructuralError("counit must be F G => Id")
        for rep in (validate(unit), validate(counit)):
            if not rep.ok:
                return Verdict(False, "unnatural unit or counit", rep.violations[0])
        for c in C.objects:
            if D.compose(counit[f.omap[c]], f.mmap[unit[c]]) != D.identity(f.omap[c]):
                return Verdict(False, "first triangle identity fails", c)
        for d in D.objects:
            if C.compose(g.mmap[counit[d]], unit[g.omap[d]]) != C.identity(g.omap[d]):
                return Verdict(False, "second triangle identity fails", d)
        return Verdict(True, "triangle identities hold")
    if mode != "homset":
        raise ValueError(f"unknown mode {mode!r}")
    for c in C.objects:
        for d in D.objects:
            left, right = len(D.hom(f.omap[c], d)), len(C.hom(c, g.omap[d]))
            if left != right:
                return Verdict(
                    False,
                    f"|Hom(F{c}, {d})| = {left} but |Hom({c}, G{d})| = {right}",
                    (c, d, left, right),
                )
    u = find_unit(f, g)
    if u is None:
        return Verdict(False, "no natural family of universal arrows", None)
    return Verdict(True, "natural hom-set bijection found", data={"unit": u})


def check_equivalence(f: Functor) -> Verdict:
    C, D = f.dom, f.cod
    for a in C.objects:
        for b in C.objects:
            hs = C.hom(a, b)
            images = [f.mmap[m] for m in hs]
            if len(set(images)) != len(images):
                dup = next(m for m in hs if images.count(f.mmap[m]) > 1)
                twin = next(m for m in hs if m != dup and f.mmap[m] == f.mmap[dup])
                return Verdict(False, "not faithful", (a, b, dup, twin))
            if len(images) != len(D.hom(f.omap[a], f.omap[b])):
                missing = next(m for m in D.hom(f.omap[a], f.omap[b]) if m not in images)
                return Verdict(False, "not full", (a, b, missing))
    image = {f.omap[a] for a in C.objects}
    for d in D.objects:
        if d in image:
            continue
        if not any(D.isomorphism(x, d) is not None for x in image):
            return Verdict(
                False,
                "not essentially surjective",
                d,
                data={"dom_objects": len(C.objects), "cod_objects": len(D.objects)},
            )
    return Verdict(True, "full, faithful and essentially surjective")


# ---------------------------------------------------------------------------
# Products, pullbacks, functor categories


@dataclass(frozen=True, eq=False)
class ProductCategory(FinCategory):
    left: FinCategory | None = None
    right: FinCategory | None = None
    pair_obj: Mapping[tuple[str, str], str] = field(default_factory=dict)
    pair_mor: Mapping[tuple[str, str], str] = field(default_factory=dict)
    split_obj: Mapping[str, tuple[str, str]] = field(default_factory=dict)
    split_mor: Mapping[str, tuple[str, str]] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def obj(self, a: str, x: str) -> str:
        return self.pair_obj[(a, x)]

    def mor(self, f: str, g: str) -> str:
        return self.pair_mor[(f, g)]

    def proj(self, side: int) -> Functor:
        base = self.left if side == 0 else self.right
        return Functor(
            f"pi{side}",
            self,
            base,
            {o: self.split_obj[o][side] for o in self.objects},
            {m: self.split_mor[m][side] for m in self.morphisms},
        )


def product(c: FinCategory, d: FinCategory, name: str | None = None) -> ProductCategory:
    guard(c, d)
    if len(c.morphisms) * len(d.morphisms) > size_bound():
        raise SizeGuardError(f"product {c.name} x {d.name} exceeds the size bound")
    opairs = [(a, x) for a in c.objects for x in d.objects]
    oids = unique_names([f"{a}_{x}" for a, x in opairs])
    pair_obj = dict(zip(opairs, oids))
    idpairs = {(c.identity(a), d.identity(x)): a_x for (a, x), a_x in pair_obj.items()}
    mpairs = [(f, g) for f in c.morphisms for g in d.morphisms]
    raw = [f"id_{idpairs[p]}" if p in idpairs else f"{p[0]}_{p[1]}" for p in mpairs]
    # identities first so they keep the id_<obj> names
    order = sorted(range(len(mpairs)), key=lambda i: mpairs[i] not in idpairs)
    named = unique_names([raw[i] for i in order])
    pair_mor = {mpairs[i]: n for i, n in zip(order, named)}
    pair_mor = {p: pair_mor[p] for p in mpairs}
    morphisms = {
        pair_mor[(f, g)]: (pair_obj[(c.src(f), d.src(g))], pair_obj[(c.dst(f), d.dst(g))])
        for f, g in mpairs
    }
    identities = {pair_obj[(a, x)]: pair_mor[(c.identity(a), d.identity(x))] for a, x in opairs}
    composition = {}
    for (f2, f1), f in c.composition.items():
        for (g2, g1), g in d.composition.items():
            composition[(pair_mor[(f2, g2)], pair_mor[(f1, g1)])] = pair_mor[(f, g)]
    return ProductCategory(
        name or f"{c.name}x{d.name}",
        tuple(oids),
        morphisms,
        identities,
        composition,
        left=c,
        right=d,
        pair_obj=pair_obj,
        pair_mor=pair_mor,
        split_obj={v: k for k, v in pair_obj.items()},
        split_mor={v: k for k, v in pair_mor.items()},
    )


def pairing(f: Functor, g: Functor, prod: ProductCategory, name: str | None = None) -> Functor:
    """<F, G> : E -> A x X."""
    return Functor(
        name or f"<{f.name},{g.name}>",
        f.dom,
        prod,
        {o: prod.obj(f.omap[o], g.omap[o]) for o in f.dom.objects},
        {m: prod.mor(f.mmap[m], g.mmap[m]) for m in f.dom.morphisms},
    )


def product_functor(f: Functor, g: Functor, dom: ProductCategory, cod: ProductCategory,
                    name: str | None = None) -> Functor:
    """F x G between product categories."""
    return Functor(
        name or f"{f.name}x{g.name}",
        dom,
        cod,
        {o: cod.obj(f.omap[a], g.omap[x]) for o, (a, x) in dom.split_obj.items()},
        {m: cod.mor(f.mmap[a], g.mmap[x]) for m, (a, x) in dom.split_mor.items()},
    )


def pullback(f: Functor, g: Functor, name: str = "pb") -> tuple[ProductCategory, Functor, Functor]:
    """Strict pullback of A -F-> B <-G- E, as a subcategory of A x E."""
    if f.cod != g.cod:
        raise StructuralError("pullback legs must share a codomain")
    full = product(f.dom, g.dom, name)
    objs = [o for o in full.objects if f.omap[full.split_obj[o][0]] == g.omap[full.split_obj[o][1]]]
    ms = [m for m in full.morphisms if f.mmap[full.split_mor[m][0]] == g.mmap[full.split_mor[m][1]]]
    keep = set(ms)
    sub = ProductCategory(
        name,
        tuple(objs),
        {m: full.morphisms[m] for m in ms},
        {o: full.identities[o] for o in objs},
        {k: v for k, v in full.composition.items() if k[0] in keep and k[1] in keep},
        left=f.dom,
        right=g.dom,
        pair_obj={k: v for k, v in full.pair_obj.items() if v in set(objs)},
        pair_mor={k: v for k, v in full.pair_mor.items() if v in keep},
        split_obj={o: full.split_obj[o] for o in objs},
        split_mor={m: full.split_mor[m] for m in ms},
    )
    return sub, sub.proj(0), sub.proj(1)


def _triples(c: FinCategory) -> dict[str, list[tuple[str, str, str]]]:
    cache = c.__dict__.get("_triples")
    if cache is None:
        cache = {m: [] for m in c.morphisms}
        for (g, f), h in c.composition.items():
            for x in {g, f, h}:
                cache[x].append((g, f, h))
        c.__dict__["_triples"] = cache
    return cache


def _extend_morphisms(
    c: FinCategory, d: FinCategory, omap: Mapping[str, str], fixed: Mapping[str, str],
    injective: bool = False,
) -> Iterator[dict[str, str]]:
    """All morphism maps c -> d over omap that respect composition."""
    order = [m for m in c.morphisms if m not in fixed]
    triples = _triples(c)
    mm = dict(fixed)
    used = set(fixed.values()) if injective else set()

    def consistent(m: str) -> bool:
        for g, f, h in triples[m]:
            if g in mm and f in mm and h in mm:
                if d.composition.get((mm[g], mm[f])) != mm[h]:
                    return False
        return True

    def rec(k: int) -> Iterator[dict[str, str]]:
        if k == len(order):
            yield dict(mm)
            return
        m = order[k]
        s, t = c.morphisms[m]
        for n in d.hom(omap[s], omap[t]):
            if injective and n in used:
                continue
            mm[m] = n
            if consistent(m):
                if injective:
                    used.add(n)
                yield from rec(k + 1)
                if injective:
                    used.discard(n)
            del mm[m]

    yield from rec(0)


def enumerate_functors(c: FinCategory, d: FinCategory) -> Iterator[Functor]:
    """Every functor c -> d, objects in lexicographic image order."""
    guard(c, d)
    n = 0
    for images in itertools.product(d.objects, repeat=len(c.objects)):
        omap = dict(zip(c.objects, images))
        fixed = {c.identity(o): d.identity(omap[o]) for o in c.objects}
        for mm in _extend_morphisms(c, d, omap, fixed):
            yield Functor(f"F{n}", c, d, omap, mm)
            n += 1


def enumerate_nat_trans(f: Functor, g: Functor) -> Iterator[NatTrans]:
    C, D = f.dom, f.cod
    objs = list(C.objects)
    pos = {o: i for i, o in enumerate(objs)}
    checks: list[list[str]] = [[] for _ in objs]
    for m, (s, t) in C.morphisms.items():
        checks[max(pos[s], pos[t])].append(m)
    comps: dict[str, str] = {}
    count = itertools.count()

    def rec(k: int) -> Iterator[NatTrans]:
        if k == len(objs):
            yield NatTrans(f"n{next(count)}", f, g, dict(comps))
            return
        o = objs[k]
        for a in D.hom(f.omap[o], g.omap[o]):
            comps[o] = a
            if all(
                D.compose(g.mmap[m], comps[C.src(m)]) == D.compose(comps[C.dst(m)], f.mmap[m])
                for m in checks[k]
            ):
                yield from rec(k + 1)
        comps.pop(o, None)

    yield from rec(0)


@dataclass(frozen=True, eq=False)
class FunctorCategory:
    cat: FinCategory
    functors: Mapping[str, Functor]
    transformations: Mapping[str, NatTrans]

    def object_of(self, f: Functor) -> str | None:
        for k, v in self.functors.items():
            if dict(v.omap) == dict(f.omap) and dict(v.mmap) == dict(f.mmap):
                return k
        return None

    def morphism_of(self, a: NatTrans) -> str | None:
        s, t = self.object_of(a.source), self.object_of(a.target)
        for m in self.cat.hom(s, t):
            if dict(self.transformations[m].components) == dict(a.components):
                return m
        return None


def functor_category(
    c: FinCategory,
    d: FinCategory,
    name: str | None = None,
    objects: Sequence[tuple[str, Functor]] | None = None,
    admissible: Callable[[NatTrans], bool] | None = None,
) -> FunctorCategory:
    """[c, d] with all natural transformations, or a subcategory given by
    `objects` and an `admissible` predicate on transformations (closed under
    vertical composition and containing identities)."""
    if objects is None:
        objects = [(f"F{i}", f) for i, f in enumerate(enumerate_functors(c, d))]
    funs = {k: f.renamed(k) for k, f in objects}
    keys = list(funs)
    trans: dict[str, NatTrans] = {}
    ends: dict[str, tuple[str, str]] = {}
    idents: dict[str, str] = {}
    for a in keys:
        for b in keys:
            for t in enumerate_nat_trans(funs[a], funs[b]):
                if admissible is not None and not admissible(t):
                    continue
                is_id = a == b and all(t[o] == d.identity(funs[a].omap[o]) for o in c.objects)
                nm = f"id_{a}" if is_id else f"{a}_{b}_{len([k for k in ends if ends[k] == (a, b)])}"
                trans[nm] = NatTrans(nm, funs[a], funs[b], t.components)
                ends[nm] = (a, b)
                if is_id:
                    idents[a] = nm
    lookup = {}
    for nm, t in trans.items():
        lookup[(ends[nm], tuple(sorted(t.components.items())))] = nm
    composition = {}
    for gname, (b, cc) in ends.items():
        for fname, (a, b2) in ends.items():
            if b != b2:
                continue
            comp = vertical(trans[gname], trans[fname])
            key = ((a, cc), tuple(sorted(comp.components.items())))
            if key not in lookup:
                raise ConstructionError("admissible transformations are not closed under composition")
            composition[(gname, fname)] = lookup[key]
    cat = FinCategory(name or f"[{c.name},{d.name}]", tuple(keys), ends, idents, composition)
    guard(cat)
    return FunctorCategory(cat, funs, trans)


# ---------------------------------------------------------------------------
# Isomorphism search


def _profile(c: FinCategory, o: str) -> tuple:
    return (
        len(c.hom(o, o)),
        tuple(sorted(len(c.hom(o, x)) for x in c.objects)),
        tuple(sorted(len(c.hom(x, o)) for x in c.objects)),
    )


def find_isomorphism(c: FinCategory, d: FinCategory) -> Functor | None:
    """A structural isomorphism of categories, found by backtracking."""
    if len(c.objects) != len(d.objects) or len(c.morphisms) != len(d.morphisms):
        return None
    pc = {o: _profile(c, o) for o in c.objects}
    pd = {o: _profile(d, o) for o in d.objects}
    if sorted(pc.values()) != sorted(pd.values()):
        return None
    objs = list(c.objects)
    omap: dict[str, str] = {}
    used: set[str] = set()

    def rec(k: int) -> Functor | None:
        if k == len(objs):
            fixed = {c.identity(o): d.identity(omap[o]) for o in objs}
            for mm in _extend_morphisms(c, d, omap, fixed, injective=True):
                return Functor(f"iso_{c.name}_{d.name}", c, d, dict(omap), mm)
            return None
        o = objs[k]
        for x in d.objects:
            if x in used or pd[x] != pc[o]:
                continue
            if any(
                len(c.hom(o, p)) != len(d.hom(x, omap[p])) or len(c.hom(p, o)) != len(d.hom(omap[p], x))
                for p in objs[:k]
            ):
                continue
            omap[o] = x
            used.add(x)
            res = rec(k + 1)
            if res is not None:
                return res
            used.discard(x)
            del omap[o]
        return None

    return rec(0)


def is_isomorphism(f: Functor) -> bool:
    return (
        len(set(f.omap.values())) == len(f.dom.objects) == len(f.cod.objects)
        and len(set(f.mmap.values())) == len(f.dom.morphisms) == len(f.cod.morphisms)
    )


def inverse_functor(f: Functor) -> Functor:
    if not is_isomorphism(f):
        raise StructuralError(f"{f.name} is not bijective")
    return Functor(
        f"{f.name}^-1", f.cod, f.dom, {v: k for k, v in f.omap.items()}, {v: k for k, v in f.mmap.items()}
    )
