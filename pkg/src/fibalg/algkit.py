"""Finite monoids and groups, actions, semidirect products and the adjunction
between semidirect products and conjugation actions.

Actions are right actions: psi(g2, psi(g1, x)) = psi(g1 g2, x), which is what
makes (g1, x)(g2, y) = (g1 g2, psi(g2, x) y) associative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Mapping, Sequence

from .fincat import LawReport, ValidationError, Verdict


@dataclass(frozen=True, eq=False)
class FinMonoid:
    name: str
    elements: tuple[str, ...]
    unit: str
    mult: Mapping[tuple[str, str], str]

    def __len__(self) -> int:
        return len(self.elements)

    def op(self, a: str, b: str) -> str:
        return self.mult[(a, b)]

    def prod(self, *xs: str) -> str:
        out = self.unit
        for x in xs:
            out = self.mult[(out, x)]
        return out

    @cached_property
    def generators(self) -> tuple[str, ...]:
        """A small generating set, chosen greedily (largest submonoid first)."""
        gens: list[str] = []
        span = {self.unit}
        while len(span) < len(self.elements):
            best = max(
                (x for x in self.elements if x not in span),
                key=lambda x: (len(_closure(self, gens + [x])), -self.elements.index(x)),
            )
            gens.append(best)
            span = _closure(self, gens)
        return tuple(gens)

    def laws(self) -> LawReport:
        rep = LawReport(f"monoid {self.name}")
        els = set(self.elements)
        if self.unit not in els:
            rep.add("unit-element", self.unit)
            return rep
        for a, b in itertools.product(self.elements, repeat=2):
            if self.mult.get((a, b)) not in els:
                rep.add("closure", a, b)
        if not rep.ok:
            return rep
        for a in self.elements:
            if self.op(self.unit, a) != a or self.op(a, self.unit) != a:
                rep.add("unit", a)
        for a, b, c in itertools.product(self.elements, repeat=3):
            if self.op(self.op(a, b), c) != self.op(a, self.op(b, c)):
                rep.add("associativity", a, b, c)
        return rep


def _closure(m: FinMonoid, gens: Sequence[str]) -> set[str]:
    span = {m.unit}
    frontier = [m.unit]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = m.op(x, g)
                if y not in span:
                    span.add(y)
                    nxt.append(y)
        frontier = nxt
    return span


@dataclass(frozen=True, eq=False)
class FinGroup(FinMonoid):
    inverse: Mapping[str, str] = field(default_factory=dict)

    def inv(self, a: str) -> str:
        return self.inverse[a]

    def laws(self) -> LawReport:
        rep = super().laws()
        if not rep.ok:
            return rep
        for a in self.elements:
            b = self.inverse.get(a)
            if b is None or self.op(a, b) != self.unit or self.op(b, a) != self.unit:
                rep.add("inverse", a)
        rep.subject = f"group {self.name}"
        return rep


def monoid(name: str, elements: Sequence[str], mult: Callable[[str, str], str] | Mapping, unit: str | None = None) -> FinMonoid:
    els = tuple(elements)
    table = dict(mult) if isinstance(mult, Mapping) else {(a, b): mult(a, b) for a in els for b in els}
    if unit is None:
        unit = next((e for e in els if all(table[(e, x)] == x == table[(x, e)] for x in els)), els[0])
    return FinMonoid(name, els, unit, table)


def as_group(m: FinMonoid) -> FinGroup:
    """Promote a monoid whose elements all have inverses."""
    inv = {}
    for a in m.elements:
        b = next((b for b in m.elements if m.op(a, b) == m.unit == m.op(b, a)), None)
        if b is None:
            raise ValidationError(f"{m.name}: {a} has no inverse")
        inv[a] = b
    return FinGroup(m.name, m.elements, m.unit, m.mult, inv)


def group(name: str, elements: Sequence[str], mult: Callable[[str, str], str] | Mapping, unit: str | None = None) -> FinGroup:
    g = as_group(monoid(name, elements, mult, unit))
    rep = g.laws()
    if not rep.ok:
        raise ValidationError(str(rep), rep)
    return g


def check_monoid(m: FinMonoid) -> LawReport:
    return m.laws()


# -- standard groups --------------------------------------------------------


def cyclic(n: int, name: str | None = None) -> FinGroup:
    els = [f"z{i}" for i in range(n)]
    return group(name or f"Z{n}", els, lambda a, b: f"z{(int(a[1:]) + int(b[1:])) % n}", "z0")


def trivial_group() -> FinGroup:
    return group("1", ["e"], lambda a, b: "e", "e")


def direct_product(g: FinMonoid, h: FinMonoid, name: str | None = None) -> FinMonoid:
    split = _pairs(g, h)
    els = list(split)
    table = {}
    for x in els:
        for y in els:
            (a1, b1), (a2, b2) = split[x], split[y]
            table[(x, y)] = _pair(g.op(a1, a2), h.op(b1, b2))
    m = FinMonoid(name or f"{g.name}x{h.name}", tuple(els), _pair(g.unit, h.unit), table)
    if isinstance(g, FinGroup) and isinstance(h, FinGroup):
        return as_group(m)
    return m


def _pair(a: str, b: str) -> str:
    return f"{a}_{b}"


def _pairs(g: FinMonoid, h: FinMonoid) -> dict[str, tuple[str, str]]:
    split = {_pair(a, b): (a, b) for a in g.elements for b in h.elements}
    if len(split) != len(g) * len(h):
        raise ValidationError(f"element names of {g.name} x {h.name} collide")
    return split


def permutation_group(name: str, gens: Sequence[tuple[int, ...]]) -> FinGroup:
    """The closure of some permutations, elements named in one-line notation.
    Composition is (p q)(i) = q(p(i)): apply p first, so the product is
    read left to right."""
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in gens:
                r = tuple(q[p[i]] for i in range(n))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    perms = sorted(seen)
    nm = {p: "p" + "".join(map(str, p)) for p in perms}
    table = {(nm[p], nm[q]): nm[tuple(q[p[i]] for i in range(n))] for p in perms for q in perms}
    return group(name, [nm[p] for p in perms], table, nm[ident])


def s3() -> FinGroup:
    return permutation_group("S3", [(1, 0, 2), (0, 2, 1)])


def d4() -> FinGroup:
    return permutation_group("D4", [(1, 2, 3, 0), (0, 3, 2, 1)])


def klein() -> FinGroup:
    return as_group(direct_product(cyclic(2), cyclic(2), "Z2xZ2"))


def bundled_groups() -> dict[str, FinGroup]:
    return {
        "1": trivial_group(),
        "Z2": cyclic(2),
        "Z3": cyclic(3),
        "Z4": cyclic(4),
        "Z2xZ2": klein(),
        "S3": s3(),
        "D4": d4(),
    }


def idem_monoid() -> FinMonoid:
    return monoid("Bidem", ["one", "z"], {("one", "one"): "one", ("one", "z"): "z", ("z", "one"): "z", ("z", "z"): "z"}, "one")


# -- table text format ------------------------------------------------------


def parse_table(text: str, name: str = "M") -> FinMonoid:
    """Header line with the elements, then one row per element: ``x: x*y1 x*y2 ...``.
    Lines starting with # are comments; a ``name:`` header line is optional."""
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if rows and rows[0].lower().startswith("name:"):
        name = rows.pop(0).split(":", 1)[1].strip()
    if not rows:
        raise ValidationError("empty table")
    els = rows[0].split()
    table = {}
    for r in rows[1:]:
        head, _, rest = r.partition(":")
        a, vals = head.strip(), rest.split()
        if a not in els or len(vals) != len(els):
            raise ValidationError(f"bad table row {r!r}")
        for b, v in zip(els, vals):
            table[(a, b)] = v
    if len(table) != len(els) ** 2:
        raise ValidationError("table is not square")
    m = monoid(name, els, table)
    rep = m.laws()
    if not rep.ok:
        raise ValidationError(str(rep), rep)
    try:
        return as_group(m)
    except ValidationError:
        return m


def format_table(m: FinMonoid) -> str:
    lines = [f"name: {m.name}", " ".join(m.elements)]
    lines += [f"{a}: " + " ".join(m.op(a, b) for b in m.elements) for a in m.elements]
    return "\n".join(lines) + "\n"


# -- homomorphisms and isomorphisms -----------------------------------------


def is_homomorphism(m: FinMonoid, n: FinMonoid, f: Mapping[str, str]) -> bool:
    if f.get(m.unit) != n.unit:
        return False
    return all(f[m.op(a, b)] == n.op(f[a], f[b]) for a in m.elements for b in m.elements)


def homomorphisms(m: FinMonoid, n: FinMonoid) -> Iterator[dict[str, str]]:
    """All monoid homomorphisms, by choosing images of generators and
    extending along words."""
    gens = m.generators
    # every element as a word: reached from the unit by right multiplication
    word: dict[str, tuple[str, str]] = {}
    order = [m.unit]
    seen = {m.unit}
    for x in order:
        for g in gens:
            y = m.op(x, g)
            if y not in seen:
                seen.add(y)
                word[y] = (x, g)
                order.append(y)
    for imgs in itertools.product(n.elements, repeat=len(gens)):
        gi = dict(zip(gens, imgs))
        f = {m.unit: n.unit}
        for y in order[1:]:
            x, g = word[y]
            f[y] = n.op(f[x], gi[g])
        if all(f[g] == gi[g] for g in gens) and is_homomorphism(m, n, f):
            yield f


def _profile(m: FinMonoid, a: str) -> tuple:
    powers, x = [], a
    seen = []
    while x not in seen:
        seen.append(x)
        x = m.op(x, a)
    return (len(seen), seen.index(x), a == m.unit)


def find_monoid_isomorphism(m: FinMonoid, n: FinMonoid) -> dict[str, str] | None:
    """Backtracking over generator images, pruned by the (order, tail) profile."""
    if len(m) != len(n):
        return None
    pm = {a: _profile(m, a) for a in m.elements}
    pn = {b: _profile(n, b) for b in n.elements}
    if sorted(pm.values()) != sorted(pn.values()):
        return None
    gens = m.generators
    cands = [[b for b in n.elements if pn[b] == pm[g]] for g in gens]
    for imgs in itertools.product(*cands):
        for f in _extend(m, n, dict(zip(gens, imgs))):
            if len(set(f.values())) == len(n):
                return f
    return None


def _extend(m: FinMonoid, n: FinMonoid, gi: dict[str, str]) -> Iterator[dict[str, str]]:
    f = {m.unit: n.unit}
    frontier = [m.unit]
    while frontier:
        nxt = []
        for x in frontier:
            for g, b in gi.items():
                y, v = m.op(x, g), n.op(f[x], b)
                if y in f:
                    if f[y] != v:
                        return
                else:
                    f[y] = v
                    nxt.append(y)
        frontier = nxt
    if is_homomorphism(m, n, f):
        yield f


# -- actions ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ActionAlgebra:
    """A right action of G on H by endomorphisms: psi[(g, x)]."""

    name: str
    G: FinMonoid
    H: FinMonoid
    psi: Mapping[tuple[str, str], str]

    def act(self, g: str, x: str) -> str:
        return self.psi[(g, x)]

    def laws(self) -> LawReport:
        rep = LawReport(f"action {self.name}")
        G, H = self.G, self.H
        for g in G.elements:
            for x in H.elements:
                if self.psi.get((g, x)) not in H.elements:
                    rep.add("closure", g, x)
        if not rep.ok:
            return rep
        for x in H.elements:
            if self.act(G.unit, x) != x:
                rep.add("action-unit", G.unit, x)
        for g in G.elements:
            if self.act(g, H.unit) != H.unit:
                rep.add("endomorphism-unit", g)
            for x, y in itertools.product(H.elements, repeat=2):
                if self.act(g, H.op(x, y)) != H.op(self.act(g, x), self.act(g, y)):
                    rep.add("endomorphism", g, x, y)
        for g1, g2 in itertools.product(G.elements, repeat=2):
            for x in H.elements:
                if self.act(g2, self.act(g1, x)) != self.act(G.op(g1, g2), x):
                    rep.add("action-composition", g1, g2, x)
        return rep


def action(name: str, G: FinMonoid, H: FinMonoid, psi: Callable[[str, str], str] | Mapping) -> ActionAlgebra:
    table = dict(psi) if isinstance(psi, Mapping) else {(g, x): psi(g, x) for g in G.elements for x in H.elements}
    return ActionAlgebra(name, G, H, table)


def trivial_action(G: FinMonoid, H: FinMonoid) -> ActionAlgebra:
    return action(f"triv_{G.name}_{H.name}", G, H, lambda g, x: x)


def conjugation_rep(G: FinGroup) -> ActionAlgebra:
    """psi(g, h) = g^-1 h g."""
    a = action(f"conj_{G.name}", G, G, lambda g, h: G.prod(G.inv(g), h, g))
    rep = a.laws()
    if not rep.ok:
        raise ValidationError(str(rep), rep)
    return a


def inversion_action(G: FinGroup, H: FinGroup) -> ActionAlgebra:
    """Z2 acting on an abelian H by x -> x^-1 through its generator."""
    return action(f"inv_{G.name}_{H.name}", G, H, lambda g, x: x if g == G.unit else H.inv(x))


def _validated(a: ActionAlgebra) -> None:
    for rep in (a.G.laws(), a.H.laws(), a.laws()):
        if not rep.ok:
            raise ValidationError(str(rep), rep)


def monoid_semidirect(a: ActionAlgebra, name: str | None = None) -> FinMonoid:
    """(g1, x)(g2, y) = (g1 g2, psi(g2, x) y) on the product of carriers."""
    _validated(a)
    G, H = a.G, a.H
    split = _pairs(G, H)
    els = list(split)
    table = {}
    for p in els:
        g1, x = split[p]
        for q in els:
            g2, y = split[q]
            table[(p, q)] = _pair(G.op(g1, g2), H.op(a.act(g2, x), y))
    m = FinMonoid(name or f"{G.name}x|{H.name}", tuple(els), _pair(G.unit, H.unit), table)
    rep = m.laws()
    if not rep.ok:
        raise ValidationError(str(rep), rep)
    return m


def semidirect(a: ActionAlgebra, name: str | None = None) -> FinGroup | FinMonoid:
    m = monoid_semidirect(a, name)
    if isinstance(a.G, FinGroup) and isinstance(a.H, FinGroup):
        return as_group(m)
    return m


def canonical_maps(a: ActionAlgebra) -> tuple[dict[str, str], dict[str, str]]:
    """g -> (g, e) and x -> (e, x)."""
    return (
        {g: _pair(g, a.H.unit) for g in a.G.elements},
        {x: _pair(a.G.unit, x) for x in a.H.elements},
    )


# -- morphisms of actions and the adjunction --------------------------------


def action_morphism_check(src: ActionAlgebra, dst: ActionAlgebra, u: Mapping[str, str], f: Mapping[str, str]) -> Verdict:
    if not is_homomorphism(src.G, dst.G, u):
        raise ValidationError(f"{dict(u)} is not a homomorphism {src.G.name} -> {dst.G.name}")
    if not is_homomorphism(src.H, dst.H, f):
        raise ValidationError(f"{dict(f)} is not a homomorphism {src.H.name} -> {dst.H.name}")
    for g in src.G.elements:
        for x in src.H.elements:
            if f[src.act(g, x)] != dst.act(u[g], f[x]):
                return Verdict(False, "action square does not commute", (g, x))
    return Verdict(True, "morphism of actions")


def action_morphisms(src: ActionAlgebra, dst: ActionAlgebra) -> list[tuple[dict[str, str], dict[str, str]]]:
    us = list(homomorphisms(src.G, dst.G))
    fs = list(homomorphisms(src.H, dst.H))
    out = []
    for u in us:
        for f in fs:
            if all(f[src.act(g, x)] == dst.act(u[g], f[x]) for g in src.G.elements for x in src.H.elements):
                out.append((u, f))
    return out


def semidirect_map(a: ActionAlgebra, b: ActionAlgebra, u: Mapping[str, str], f: Mapping[str, str]) -> dict[str, str]:
    """u x| f : (g, x) -> (u g, f x)."""
    return {_pair(g, x): _pair(u[g], f[x]) for g in a.G.elements for x in a.H.elements}


def check_semidirect_adjunction(a: ActionAlgebra, target: FinGroup) -> Verdict:
    """Hom(G x| H, G') against morphisms of actions into the conjugation action
    of G', matched by (u, f) -> phi(g, x) = u(g) f(x)."""
    sd = semidirect(a)
    conj = conjugation_rep(target)
    left = list(homomorphisms(sd, target))
    right = action_morphisms(a, conj)
    key = lambda phi: tuple(sorted(phi.items()))  # noqa: E731
    left_keys = {key(phi) for phi in left}
    bijection = []
    images = set()
    for u, f in right:
        phi = {_pair(g, x): target.op(u[g], f[x]) for g in a.G.elements for x in a.H.elements}
        k = key(phi)
        if k not in left_keys:
            return Verdict(False, "the induced map is not a homomorphism", (tuple(sorted(u.items())), tuple(sorted(f.items()))))
        images.add(k)
        bijection.append(((u, f), phi))
    # the inverse direction: restrict along the canonical maps
    i_g, i_h = canonical_maps(a)
    for phi in left:
        u = {g: phi[i_g[g]] for g in a.G.elements}
        f = {x: phi[i_h[x]] for x in a.H.elements}
        if (u, f) not in right:
            return Verdict(False, "restriction is not a morphism of actions", key(phi))
    counts = {"semidirect_homs": len(left), "action_morphisms": len(right)}
    if len(images) != len(right) or images != left_keys:
        return Verdict(False, "correspondence is not bijective", None, counts)
    return Verdict(True, "hom-sets in bijection", None, {**counts, "bijection": bijection})


def bundled_actions() -> dict[str, ActionAlgebra]:
    gs = bundled_groups()
    z2, z3, z4, v = gs["Z2"], gs["Z3"], gs["Z4"], gs["Z2xZ2"]
    swap = action("swap_Z2xZ2", z2, v, lambda g, x: x if g == "z0" else "_".join(reversed(x.split("_"))))
    # Z3 cycling the three non-identity elements of the Klein group
    cyc = {"z0_z0": "z0_z0", "z1_z0": "z0_z1", "z0_z1": "z1_z1", "z1_z1": "z1_z0"}

    def rot(g: str, x: str) -> str:
        for _ in range(int(g[1:])):
            x = cyc[x]
        return x

    acts = {
        "z2_on_z3_inv": inversion_action(z2, z3),
        "z2_on_z4_inv": inversion_action(z2, z4),
        "z2_on_klein_swap": swap,
        "z3_on_klein_cycle": action("cycle_Z3_Z2xZ2", z3, v, rot),
        "z4_on_z3_inv": action("inv_Z4_Z3", z4, z3, lambda g, x: x if int(g[1:]) % 2 == 0 else z3.inv(x)),
        "z2_on_s3_conj": action("tconj_Z2_S3", z2, gs["S3"], lambda g, x: x if g == "z0" else gs["S3"].prod("p102", x, "p102")),
        "conj_Z3": conjugation_rep(z3),
        "conj_S3": conjugation_rep(gs["S3"]),
    }
    for g, h in [("1", "Z2"), ("Z2", "Z2"), ("Z2", "Z3"), ("Z3", "Z2"), ("Z2", "Z4"), ("Z4", "Z2"), ("Z2", "Z2xZ2"), ("Z3", "Z3"), ("S3", "Z2"), ("Z2", "S3"), ("D4", "Z2"), ("S3", "Z4")]:
        a = trivial_action(gs[g], gs[h])
        acts[a.name] = a
    return acts
