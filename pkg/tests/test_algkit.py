from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fibalg.algkit import (
    action,
    action_morphism_check,
    action_morphisms,
    bundled_actions,
    bundled_groups,
    canonical_maps,
    check_semidirect_adjunction,
    conjugation_rep,
    cyclic,
    direct_product,
    find_monoid_isomorphism,
    format_table,
    homomorphisms,
    idem_monoid,
    is_homomorphism,
    monoid_semidirect,
    parse_table,
    semidirect,
    semidirect_map,
    trivial_action,
)
from fibalg.fincat import ValidationError

GROUPS = bundled_groups()
ACTIONS = bundled_actions()
SMALL = {k: a for k, a in ACTIONS.items() if len(a.G) * len(a.H) <= 24}


def is_abelian(g):
    return all(g.op(a, b) == g.op(b, a) for a in g.elements for b in g.elements)


@pytest.mark.parametrize("name", list(GROUPS))
def test_bundled_groups_lawful(name):
    assert GROUPS[name].laws().ok


@pytest.mark.parametrize("name", list(ACTIONS))
def test_bundled_actions_lawful(name):
    assert ACTIONS[name].laws().ok


def test_broken_action_reports_witness():
    z2, z3 = GROUPS["Z2"], GROUPS["Z3"]
    # doubling is not a homomorphism shape here: fix 1 but send 2 to 0
    bad = action("bad", z2, z3, lambda g, x: x if g == "z0" else {"z0": "z0", "z1": "z1", "z2": "z0"}[x])
    rep = bad.laws()
    assert not rep.ok
    assert "endomorphism" in rep.laws()


def test_group_order_sizes():
    assert {k: len(g) for k, g in GROUPS.items()} == {"1": 1, "Z2": 2, "Z3": 3, "Z4": 4, "Z2xZ2": 4, "S3": 6, "D4": 8}
    assert not is_abelian(GROUPS["S3"]) and not is_abelian(GROUPS["D4"])


@pytest.mark.parametrize("name", list(ACTIONS))
def test_semidirect_size_and_laws(name):
    a = ACTIONS[name]
    s = semidirect(a)
    assert len(s) == len(a.G) * len(a.H)
    assert s.laws().ok


def test_trivial_action_gives_direct_product():
    for g, h in itertools.product(["Z2", "Z3", "Z2xZ2", "S3"], repeat=2):
        G, H = GROUPS[g], GROUPS[h]
        s = semidirect(trivial_action(G, H))
        d = direct_product(G, H)
        assert dict(s.mult) == dict(d.mult)
        assert find_monoid_isomorphism(s, d) is not None


def test_inversion_on_z3_is_s3():
    s = semidirect(ACTIONS["z2_on_z3_inv"])
    iso = find_monoid_isomorphism(s, GROUPS["S3"])
    assert iso is not None
    assert is_homomorphism(s, GROUPS["S3"], iso) and len(set(iso.values())) == 6
    assert find_monoid_isomorphism(s, cyclic(6)) is None


def test_inversion_on_z4_is_d4():
    assert find_monoid_isomorphism(semidirect(ACTIONS["z2_on_z4_inv"]), GROUPS["D4"]) is not None


def test_isomorphism_search_against_brute_force():
    # all bijections fixing the unit, checked directly
    def brute(m, n):
        rest_m = [x for x in m.elements if x != m.unit]
        rest_n = [x for x in n.elements if x != n.unit]
        for perm in itertools.permutations(rest_n):
            f = {m.unit: n.unit, **dict(zip(rest_m, perm))}
            if is_homomorphism(m, n, f):
                return True
        return False

    small = [g for g in GROUPS.values() if len(g) <= 6] + [semidirect(ACTIONS["z2_on_z3_inv"]), cyclic(6)]
    for m in small:
        for n in small:
            if len(m) == len(n):
                assert (find_monoid_isomorphism(m, n) is not None) == brute(m, n)


@pytest.mark.parametrize("name", list(GROUPS))
def test_conjugation_rep(name):
    g = GROUPS[name]
    c = conjugation_rep(g)
    assert c.laws().ok
    assert all(c.act(g.unit, x) == x for x in g.elements)
    if is_abelian(g):
        assert all(c.act(a, x) == x for a in g.elements for x in g.elements)
    assert len(semidirect(c)) == len(g) ** 2


def test_s3_conjugation_fixes_only_the_unit_for_all():
    g = GROUPS["S3"]
    c = conjugation_rep(g)
    central = [x for x in g.elements if all(c.act(a, x) == x for a in g.elements)]
    assert central == [g.unit]
    fixed_by_transposition = [x for x in g.elements if c.act("p102", x) == x]
    assert len(fixed_by_transposition) == 2


def test_action_morphism_identity():
    for a in ACTIONS.values():
        ids = ({x: x for x in a.G.elements}, {x: x for x in a.H.elements})
        assert action_morphism_check(a, a, *ids).holds


def test_action_morphism_broken_f():
    a = ACTIONS["z2_on_z3_inv"]
    b = trivial_action(GROUPS["Z2"], GROUPS["Z3"])
    v = action_morphism_check(a, b, {"z0": "z0", "z1": "z1"}, {x: x for x in GROUPS["Z3"].elements})
    assert not v.holds
    assert v.witness == ("z1", "z1")


def test_action_morphism_rejects_non_homomorphism():
    a = ACTIONS["z2_on_z3_inv"]
    with pytest.raises(ValidationError):
        action_morphism_check(a, a, {"z0": "z1", "z1": "z0"}, {x: x for x in GROUPS["Z3"].elements})


def test_into_conjugation_via_group_homs():
    a = trivial_action(GROUPS["Z2"], GROUPS["Z3"])
    target = GROUPS["S3"]
    conj = conjugation_rep(target)
    for u in homomorphisms(a.G, target):
        for h in homomorphisms(a.H, target):
            square = all(h[x] == conj.act(u[g], h[x]) for g in a.G.elements for x in a.H.elements)
            assert action_morphism_check(a, conj, u, h).holds == square


@pytest.mark.parametrize("name", list(SMALL))
def test_adjunction_bijection(name):
    a = SMALL[name]
    for tname, t in GROUPS.items():
        v = check_semidirect_adjunction(a, t)
        assert v.holds, (tname, v.reason)
        assert v.data["semidirect_homs"] == v.data["action_morphisms"]


def test_adjunction_examples():
    z2 = GROUPS["Z2"]
    v = check_semidirect_adjunction(trivial_action(z2, z2), z2)
    assert v.data["semidirect_homs"] == v.data["action_morphisms"] == 4
    v = check_semidirect_adjunction(conjugation_rep(GROUPS["Z3"]), GROUPS["S3"])
    assert v.holds
    for a in SMALL.values():
        v = check_semidirect_adjunction(a, GROUPS["1"])
        assert v.data["semidirect_homs"] == v.data["action_morphisms"] == 1


def test_semidirect_functorial():
    pairs = [("z2_on_z3_inv", "z2_on_z3_inv"), ("triv_Z2_Z3", "z2_on_z3_inv"), ("z2_on_klein_swap", "z2_on_klein_swap")]
    for s, t in pairs:
        a, b = ACTIONS[s], ACTIONS[t]
        sa, sb = semidirect(a), semidirect(b)
        for u, f in action_morphisms(a, b):
            assert is_homomorphism(sa, sb, semidirect_map(a, b, u, f))


def test_monoid_semidirect_idempotent():
    m = idem_monoid()
    kill = action("kill", m, m, lambda g, x: x if g == "one" else "one")
    assert kill.laws().ok
    s = monoid_semidirect(kill)
    assert s.laws().ok and len(s) == 4
    i_g, i_h = canonical_maps(kill)
    assert is_homomorphism(m, s, i_g) and is_homomorphism(m, s, i_h)
    assert dict(monoid_semidirect(trivial_action(m, m)).mult) == dict(direct_product(m, m).mult)


def test_wrong_orientation_rejected():
    # a left action of S3 on itself by conjugation g h g^-1 violates the right-action axiom
    g = GROUPS["S3"]
    left = action("left", g, g, lambda a, h: g.prod(a, h, g.inv(a)))
    assert "action-composition" in left.laws().laws()
    with pytest.raises(ValidationError):
        semidirect(left)


@pytest.mark.parametrize("name", list(GROUPS))
def test_table_round_trip(name):
    g = GROUPS[name]
    back = parse_table(format_table(g))
    assert back.elements == g.elements and dict(back.mult) == dict(g.mult) and back.name == g.name


def test_table_parse_errors():
    with pytest.raises(ValidationError):
        parse_table("a b\na: a b\n")
    with pytest.raises(ValidationError):
        parse_table("a b\na: b a\nb: a a\n")  # no two-sided unit
    m = parse_table("one z\none: one z\nz: z z\n")
    assert m.unit == "one" and not hasattr(m, "inverse")


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(GROUPS)), st.sampled_from(list(GROUPS)))
def test_homs_are_homs(g, h):
    G, H = GROUPS[g], GROUPS[h]
    homs = list(homomorphisms(G, H))
    assert homs
    keys = {tuple(sorted(f.items())) for f in homs}
    assert len(keys) == len(homs)
    assert all(is_homomorphism(G, H, f) for f in homs)
