from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from fibalg.fincat import (
    FinCategory,
    Functor,
    NatTrans,
    SizeGuardError,
    StructuralError,
    all_limits,
    chain,
    check_adjunction,
    check_equivalence,
    colimit,
    compose_functors,
    constant_functor,
    counit_from_unit,
    diagram,
    discrete,
    discrete_diagram,
    enumerate_functors,
    enumerate_nat_trans,
    find_extremal,
    find_isomorphism,
    find_unit,
    functor_category,
    identity_functor,
    identity_nat,
    limit,
    parallel_diagram,
    poset,
    product,
    pullback,
    shape,
    span_diagram,
    validate,
)


def bool4() -> FinCategory:
    return poset("bool4", ["bot", "a", "b", "top"], lambda x, y: x == y or x == "bot" or y == "top")


def monotone(c: FinCategory, fmap: dict, name: str) -> Functor:
    def arrow(s, t):
        return c.identity(s) if s == t else f"{s}_{t}"

    return Functor(name, c, c, fmap, {m: arrow(fmap[c.src(m)], fmap[c.dst(m)]) for m in c.morphisms})


def meet_a(c):
    return monotone(c, {"bot": "bot", "a": "a", "b": "bot", "top": "a"}, "a^-")


def implies_a(c):
    return monotone(c, {"bot": "b", "a": "top", "b": "b", "top": "top"}, "a=>-")


def point():
    return discrete("1", ["pt"])


def iso_pair():
    # x and y are isomorphic; z receives one arrow from each
    return FinCategory.build(
        "isopair",
        ["x", "y", "z"],
        [("i", "x", "y"), ("j", "y", "x"), ("p", "x", "z"), ("q", "y", "z")],
        {("j", "i"): "id_x", ("i", "j"): "id_y", ("q", "i"): "p", ("p", "j"): "q"},
    )


# -- validate -------------------------------------------------------------


def test_terminal_category_validates():
    assert validate(point()).ok


def test_three_chain_validates():
    c = chain("chain3", 3)
    assert len(c.morphisms) == 6
    assert validate(c).ok


def test_broken_identity_absorption_is_reported():
    c = FinCategory.build("broken", ["x", "y"], [("f", "x", "y"), ("g", "x", "y")])
    comp = dict(c.composition)
    comp[("id_y", "f")] = "g"
    bad = FinCategory("broken", c.objects, c.morphisms, c.identities, comp)
    rep = validate(bad)
    assert not rep.ok
    assert ("id_y", "f") in [v.witness for v in rep.violations if v.law == "left-identity"]


def test_missing_composite_is_reported():
    c = FinCategory.build("gap", ["x", "y", "z"], [("f", "x", "y"), ("g", "y", "z")])
    assert "composite-missing" in validate(c).laws()


def test_dangling_reference_is_structural():
    c = FinCategory("bad", ("x",), {"id_x": ("x", "w")}, {"x": "id_x"}, {})
    with pytest.raises(StructuralError):
        validate(c)


def test_functor_and_nat_validation():
    b = bool4()
    assert validate(meet_a(b)).ok
    assert validate(identity_nat(meet_a(b))).ok
    broken = Functor("bad", b, b, {o: "top" for o in b.objects}, {m: "id_bot" for m in b.morphisms})
    assert "functor-typing" in validate(broken).laws()


def test_nat_violation_is_reported():
    c = FinCategory.build("pair", ["x", "y"], [("f", "x", "y"), ("g", "x", "y")])
    f = Functor("F", c, c, {"x": "x", "y": "y"}, {"id_x": "id_x", "id_y": "id_y", "f": "f", "g": "f"})
    g = identity_functor(c)
    # components at x and y are identities but F(g) = f while G(g) = g
    t = NatTrans("t", f, g, {"x": "id_x", "y": "id_y"})
    assert "naturality" in validate(t).laws()


def test_opposite_is_involutive_and_valid():
    c = iso_pair()
    assert validate(c.op()).ok
    assert c.op().op() is c


# -- limits ---------------------------------------------------------------


def test_empty_limit_is_terminal():
    c = chain("chain3", 3)
    assert limit(diagram(shape("empty", []), c, {})).apex == "c2"
    assert colimit(diagram(shape("empty", []), c, {})).apex == "c0"


def test_meet_and_join_in_boolean_lattice():
    b = bool4()
    d = discrete_diagram(b, ["a", "b"])
    assert limit(d).apex == "bot"
    assert colimit(d).apex == "top"


def test_discrete_two_objects_has_no_product():
    d = discrete("d2", ["x", "y"])
    assert limit(discrete_diagram(d, ["x", "y"])) is None


def test_equalizer_and_pushout():
    c = FinCategory.build(
        "eq",
        ["e", "x", "y"],
        [("k", "e", "x"), ("f", "x", "y"), ("g", "x", "y"), ("fk", "e", "y")],
        {("f", "k"): "fk", ("g", "k"): "fk"},
    )
    assert validate(c).ok
    lim = limit(parallel_diagram(c, "f", "g"))
    assert lim.apex == "e" and lim.legs["s"] == "k"
    b = bool4()
    po = colimit(span_diagram(b, "bot_a", "bot_b"))
    assert po.apex == "top"


def test_limit_apexes_are_isomorphic():
    c = iso_pair()
    d = diagram(shape("one", ["j"]), c, {"j": "z"})
    lims = all_limits(d)
    assert {k.apex for k in lims} == {"z"}
    t = diagram(shape("empty", []), c.op(), {})
    apexes = [k.apex for k in all_limits(t)]
    assert set(apexes) == {"x", "y"}
    assert c.isomorphic(apexes[0], apexes[1])
    assert limit(t).apex == "x"


def test_colimit_equals_opposite_limit():
    b = bool4()
    for objs in (["a"], ["a", "b"], ["bot", "a", "b"], ["a", "b", "top", "bot"]):
        d = discrete_diagram(b, objs)
        assert colimit(d).apex == limit(d.op()).apex


# -- extremal -------------------------------------------------------------


def test_extremal_objects():
    e = find_extremal(chain("chain3", 3))
    assert (e.initial, e.terminal) == ("c0", "c2")
    e = find_extremal(discrete("d2", ["x", "y"]))
    assert (e.initial, e.terminal) == (None, None)
    e = find_extremal(point())
    assert (e.initial, e.terminal) == ("pt", "pt")


# -- adjunctions ----------------------------------------------------------


def test_identity_adjunction_both_modes():
    c = chain("chain3", 3)
    i = identity_functor(c)
    assert check_adjunction(i, i, "triangle", identity_nat(compose_functors(i, i)), identity_nat(compose_functors(i, i)))
    assert check_adjunction(i, i)


def test_meet_left_adjoint_to_implication():
    b = bool4()
    f, g = meet_a(b), implies_a(b)
    v = check_adjunction(f, g)
    assert v.holds
    unit = v.data["unit"]
    eps = counit_from_unit(f, g, unit)
    eta = NatTrans("eta", identity_functor(b), compose_functors(g, f), unit)
    epsn = NatTrans("eps", compose_functors(f, g), identity_functor(b), eps)
    assert check_adjunction(f, g, "triangle", eta, epsn).holds


def test_swapped_adjunction_fails_with_witness():
    b = bool4()
    v = check_adjunction(implies_a(b), meet_a(b))
    assert not v.holds
    c, d, left, right = v.witness
    assert left != right


def test_triangle_shape_mismatch_is_structural():
    b = bool4()
    f, g = meet_a(b), implies_a(b)
    bogus = identity_nat(identity_functor(b))
    with pytest.raises(StructuralError):
        check_adjunction(f, g, "triangle", bogus, bogus)


def test_triangle_failure_detected():
    # the monoid {e, s} with s.s = s has idempotent s; F = G = Id, unit = counit = s is natural but
    # fails the triangle identity s.s = s != e
    from fibalg.fincat import monoid_category

    m = monoid_category("idem", ["e", "s"], {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "s"}, "e")
    i = identity_functor(m)
    t = NatTrans("s", i, compose_functors(i, i), {"pt": "s"})
    assert validate(t).ok
    assert not check_adjunction(i, i, "triangle", t, NatTrans("s", compose_functors(i, i), i, {"pt": "s"})).holds


# -- equivalences ---------------------------------------------------------


def test_identity_is_equivalence():
    assert check_equivalence(identity_functor(bool4())).holds


def test_skeleton_inclusion_is_equivalence():
    c = iso_pair()
    skel = c.subcategory("skel", ["x", "z"], ["id_x", "id_z", "p"])
    assert validate(skel).ok
    inc = Functor("inc", skel, c, {"x": "x", "z": "z"}, {m: m for m in skel.morphisms})
    assert check_equivalence(inc).holds


def test_constant_from_two_chain_is_not_an_equivalence():
    v = check_equivalence(constant_functor(chain("chain2", 2), point(), "pt"))
    assert not v.holds
    assert v.witness is not None


def test_collapsing_parallel_arrows_is_not_faithful():
    c = FinCategory.build("pair", ["x", "y"], [("f", "x", "y"), ("g", "x", "y")])
    v = check_equivalence(constant_functor(c, point(), "pt"))
    assert v.reason == "not faithful"


# -- enumeration, products, isomorphisms ---------------------------------


def test_functor_enumeration_counts():
    c2 = chain("chain2", 2)
    assert len(list(enumerate_functors(c2, c2))) == 3
    assert len(list(enumerate_functors(chain("c3", 3), c2))) == 4
    fc = functor_category(c2, c2)
    assert validate(fc.cat).ok
    assert len(fc.cat.morphisms) == 6


def test_nat_trans_enumeration():
    b = bool4()
    f = identity_functor(b)
    assert len(list(enumerate_nat_trans(f, meet_a(b)))) == 0
    assert len(list(enumerate_nat_trans(meet_a(b), f))) == 1


def test_product_and_pullback():
    c2 = chain("chain2", 2)
    p = product(c2, c2)
    assert validate(p).ok
    assert len(p.morphisms) == 9
    assert validate(p.proj(0)).ok
    pb, l, r = pullback(identity_functor(c2), identity_functor(c2))
    assert validate(pb).ok
    assert len(pb.objects) == 2 and len(pb.morphisms) == 3


def test_isomorphism_search():
    b = bool4()
    iso = find_isomorphism(b, b.op())
    assert iso is not None and validate(iso).ok
    assert find_isomorphism(chain("c4", 4), b) is None


def test_size_guard(monkeypatch):
    monkeypatch.setenv("FIBALG_SIZE_GUARD", "5")
    with pytest.raises(SizeGuardError):
        limit(discrete_diagram(chain("c3", 3), ["c0"]))


# -- properties -----------------------------------------------------------


@st.composite
def random_posets(draw):
    n = draw(st.integers(1, 5))
    rel = {(i, j) for i in range(n) for j in range(n) if i < j and draw(st.booleans())}
    # transitive closure keeps it a partial order
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    names = [f"p{i}" for i in range(n)]
    return poset("rand", names, lambda x, y: x == y or (int(x[1:]), int(y[1:])) in rel)


@settings(max_examples=40, deadline=None)
@given(random_posets(), st.data())
def test_random_poset_properties(c, data):
    assert validate(c).ok
    objs = data.draw(st.lists(st.sampled_from(c.objects), min_size=0, max_size=3))
    d = discrete_diagram(c, objs)
    lim = limit(d)
    if lim is not None:
        assert all(c.isomorphic(lim.apex, k.apex) for k in all_limits(d))
    col = colimit(d)
    op_lim = limit(d.op())
    assert (col is None) == (op_lim is None)
    if col is not None:
        assert col.apex == op_lim.apex


@settings(max_examples=30, deadline=None)
@given(random_posets(), st.data())
def test_adjunction_modes_agree(c, data):
    funs = list(enumerate_functors(c, c))
    f = data.draw(st.sampled_from(funs))
    g = data.draw(st.sampled_from(funs))
    hom = check_adjunction(f, g)
    unit = find_unit(f, g)
    if unit is None:
        assert not hom.holds
        return
    eta = NatTrans("eta", identity_functor(c), compose_functors(g, f), unit)
    eps = NatTrans("eps", compose_functors(f, g), identity_functor(c), counit_from_unit(f, g, unit))
    assert check_adjunction(f, g, "triangle", eta, eps).holds == hom.holds
