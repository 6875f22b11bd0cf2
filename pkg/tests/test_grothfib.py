from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fibalg import fixtures as fx
from fibalg.fincat import (
    ConstructionError,
    Functor,
    StructuralError,
    ValidationError,
    chain,
    compose_functors,
    enumerate_functors,
    find_isomorphism,
    identity_functor,
    validate,
)
from fibalg.grothfib import (
    OplaxCell,
    SplitFibrationData,
    build_total,
    check_cell,
    check_pullback,
    check_split,
    check_total,
    compose_cells,
    em_hat_comparison,
    grothendieck,
    identity_cell,
    map_total,
    reindex,
    universal_total,
    verify_fibration,
)
from fibalg.monadkit import AlgebraObject, enumerate_algebras, is_em_algebra

EM_PARAMS = [fx.writer_chain3, fx.writer_bool4, fx.const_chain3, fx.finset_param]


def idx(o: str) -> int:
    return int(o[1:])


def test_writer_em_total_objects():
    t = build_total(fx.writer_chain3(), "em")
    oracle = {(a, x) for a in fx.chain3().objects for x in fx.chain3().objects if idx(a) <= idx(x)}
    assert {(a, x) for a, x, _ in t.payload.values()} == oracle
    assert len(t.cat.objects) == 6
    assert check_total(t).ok


def test_writer_em_hom_needs_base_arrow():
    t = build_total(fx.writer_chain3(), "em")
    assert t.cat.hom(t.lookup("c1", "c1", "id_c1"), t.lookup("c0", "c2", "id_c2")) == ()
    assert len(t.cat.hom(t.lookup("c0", "c1", "id_c1"), t.lookup("c1", "c2", "id_c2"))) == 1


def test_flavor_mismatch_rejected():
    with pytest.raises(StructuralError):
        build_total(fx.writer_chain3(), "coem")
    with pytest.raises(StructuralError):
        build_total(fx.coreader_bool4(), "em")
    with pytest.raises(StructuralError):
        build_total(fx.semiauto_m2(), "em")


@pytest.mark.parametrize("build", EM_PARAMS)
@pytest.mark.parametrize("flavor", ["em", "alg", "kl"])
def test_totals_validate(build, flavor):
    assert check_total(build_total(build(), flavor)).ok


@pytest.mark.parametrize("flavor", ["coem", "coalg", "cokl"])
def test_comonadic_totals_validate(flavor):
    assert check_total(build_total(fx.coreader_bool4(), flavor)).ok


def test_reindex_along_identity():
    p = fx.writer_chain3()
    for al in enumerate_algebras(p, "c1"):
        assert reindex(p, "id_c1", al) == al


def test_reindex_writer_example():
    p = fx.writer_chain3()
    (al,) = [a for a in enumerate_algebras(p, "c2") if a.carrier == "c2"]
    out = reindex(p, "c1_c2", al)
    (want,) = [a for a in enumerate_algebras(p, "c1") if a.carrier == "c2"]
    assert out == want


def test_reindex_rejects_non_algebra():
    with pytest.raises(ValidationError):
        # a point included into a two-element set is not a retraction
        reindex(fx.finset_param(), "c0_c1", AlgebraObject("c1", "n2", "f12_0"))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(EM_PARAMS), st.data())
def test_reindex_keeps_carrier(build, data):
    p = build()
    f = data.draw(st.sampled_from(sorted(p.params.morphisms)))
    b = p.params.dst(f)
    al = data.draw(st.sampled_from(enumerate_algebras(p, b)))
    out = reindex(p, f, al)
    assert out.carrier == al.carrier
    assert is_em_algebra(p, out.param, out.carrier, out.xi)


def test_writer_em_cartesian_lifts():
    t = build_total(fx.writer_chain3(), "em")
    v = verify_fibration(t, "fibration")
    assert v.holds
    X = fx.chain3()
    for (f, e), m in v.data["cleavage"].items():
        assert t.mor_payload[m] == (f, X.identity(t.payload[e][1]))


@pytest.mark.parametrize("build", EM_PARAMS)
def test_variances_as_documented(build):
    p = build()
    assert verify_fibration(build_total(p, "em"), "fibration").holds
    assert verify_fibration(build_total(p, "alg"), "fibration").holds
    assert verify_fibration(build_total(p, "kl"), "opfibration").holds


def test_comonadic_variances():
    p = fx.coreader_bool4()
    assert verify_fibration(build_total(p, "cokl"), "fibration").holds
    assert verify_fibration(build_total(p, "coem"), "opfibration").holds
    assert verify_fibration(build_total(p, "coalg"), "opfibration").holds


def test_wrong_variance_fails_with_witness():
    t = build_total(fx.collapse_alg(), "alg")
    assert verify_fibration(t, "fibration").holds
    v = verify_fibration(t, "opfibration")
    assert not v.holds
    assert v.witness == ("c0_c1", "c0_pt_one")


def test_constant_total_is_trivial_bundle():
    t = build_total(fx.const_chain3(), "em")
    c = fx.chain3()
    from fibalg.fincat import product

    assert find_isomorphism(t.cat, product(c, c)) is not None
    assert verify_fibration(t).holds


@pytest.mark.parametrize("build", EM_PARAMS)
@pytest.mark.parametrize("flavor", ["em", "alg"])
def test_projection_and_carrier_are_jointly_faithful(build, flavor):
    t = build_total(build(), flavor)
    for s, d in itertools.product(t.cat.objects, repeat=2):
        images = [(t.p.mmap[m], t.V.mmap[m]) for m in t.cat.hom(s, d)]
        assert len(images) == len(set(images))


@pytest.mark.parametrize("build", EM_PARAMS)
def test_cartesian_lifts_keep_carrier(build):
    t = build_total(build(), "em")
    for (_f, e), m in verify_fibration(t).data["cleavage"].items():
        assert t.V.omap[t.cat.src(m)] == t.V.omap[e]


def test_em_hat_comparison_writer():
    k, v = em_hat_comparison(fx.writer_chain3())
    assert v.holds, v.reason
    assert v.data["total_objects"] == v.data["hat_objects"] == 6
    assert v.data["hom_counts_match"] and v.data["triangle_commutes"]
    assert validate(k).ok


@pytest.mark.parametrize("build", EM_PARAMS)
def test_em_hat_comparison_fixtures(build):
    assert em_hat_comparison(build())[1].holds


def test_map_total_identity_cell():
    p = fx.writer_chain3()
    t = build_total(p, "em")
    f = map_total(identity_cell(p), p, p, "em", t, t)
    assert dict(f.omap) == {o: o for o in t.cat.objects}
    assert dict(f.mmap) == {m: m for m in t.cat.morphisms}


def test_map_total_along_embedding():
    p, q = fx.writer_chain3(), fx.writer_bool4()
    c = fx.writer_embedding_cell()
    assert check_cell(c, p, q).ok
    s, t = build_total(p, "em"), build_total(q, "em")
    f = map_total(c, p, q, "em", s, t)
    assert validate(f).ok
    B = fx.bool4()
    for o, (a, x, xi) in s.payload.items():
        assert t.payload[f.omap[o]] == (c.U.omap[a], c.V.omap[x], B.compose(c.V.mmap[xi], c.delta[(a, x)]))
    assert all(t.p.omap[f.omap[o]] == c.U.omap[s.p.omap[o]] for o in s.cat.objects)


def _thin_cell(p, q, omap, name):
    """An oplax cell between join writers along a join-preserving monotone map."""
    A, B = p.params, q.params
    u = Functor(
        name, A, B, omap,
        {m: B.hom(omap[A.src(m)], omap[A.dst(m)])[0] for m in A.morphisms},
    )
    delta = {
        (a, x): B.hom(q.functor(omap[a]).omap[omap[x]], omap[p.functor(a).omap[x]])[0]
        for a in A.objects
        for x in A.objects
    }
    return OplaxCell(f"d_{name}", u, u, delta, monad_flavored=True)


def test_map_total_functorial_on_composites():
    p2, p3, q = fx.writer_chain2(), fx.writer_chain3(), fx.writer_bool4()
    c1 = _thin_cell(p2, p3, {"c0": "c0", "c1": "c2"}, "top")
    c2 = fx.writer_embedding_cell()
    s, m, t = build_total(p2, "em"), build_total(p3, "em"), build_total(q, "em")
    whole = map_total(compose_cells(c2, c1, p2), p2, q, "em", s, t)
    parts = compose_functors(map_total(c2, p3, q, "em", m, t), map_total(c1, p2, p3, "em", s, m))
    assert dict(whole.omap) == dict(parts.omap)
    assert dict(whole.mmap) == dict(parts.mmap)


def test_map_total_rejects_unnatural_cell():
    p = fx.writer_chain3()
    c = identity_cell(p)
    # a bottom element cannot be the comparison out of T_c2(c0) = c2
    bad = dict(c.delta)
    bad[("c2", "c0")] = "id_c0"
    broken = OplaxCell("bad", c.U, c.V, bad, True)
    with pytest.raises(ValidationError) as err:
        map_total(broken, p, p, "em")
    assert "cell-typing" in err.value.report.laws()


def test_universal_total_requires_opt_in():
    with pytest.raises(ConstructionError):
        universal_total(fx.chain2(), "alg")


def test_universal_total_of_point():
    u = universal_total(fx.terminal_cat(), "alg", opt_in=True)
    assert len(u.index.cat.objects) == 1
    assert len(u.total.cat.objects) == 1


def test_universal_alg_total_on_two_chain():
    x = fx.chain2()
    u = universal_total(x, "alg", opt_in=True)
    fs = list(enumerate_functors(x, x))
    assert len(fs) == 3
    assert len(u.total.cat.objects) == sum(len(x.hom(f.omap[o], o)) for f in fs for o in x.objects)
    assert verify_fibration(u.total).holds


@pytest.mark.parametrize("flavor", ["alg", "em"])
def test_writer_total_is_pullback_of_universal(flavor):
    v = check_pullback(fx.writer_chain2(), flavor)
    assert v.holds, v.reason


def _split_example():
    base = fx.chain2()
    lo, hi = chain("lo", 3), chain("hi", 2)
    r = Functor("r", hi, lo, {"c0": "c0", "c1": "c2"}, {"id_c0": "id_c0", "id_c1": "id_c2", "c0_c1": "c0_c2"})
    return SplitFibrationData(
        "split", base, {"c0": lo, "c1": hi},
        {"id_c0": identity_functor(lo), "id_c1": identity_functor(hi), "c0_c1": r},
    )


def test_grothendieck_of_split_fibration():
    s = _split_example()
    assert check_split(s).ok
    t = grothendieck(s)
    assert validate(t.cat).ok
    assert len(t.cat.objects) == 5
    assert verify_fibration(t).holds


def test_split_identity_violation_reported():
    s = _split_example()
    lo = s.fibre["c0"]
    shifted = Functor("sh", lo, lo, {"c0": "c0", "c1": "c2", "c2": "c2"},
                      {m: lo.hom("c0" if lo.src(m) == "c0" else "c2", "c0" if lo.dst(m) == "c0" else "c2")[0] for m in lo.morphisms})
    rep = check_split(SplitFibrationData("bad", s.base, s.fibre, {**s.reindex, "id_c0": shifted}))
    assert "split-identity" in rep.laws()
