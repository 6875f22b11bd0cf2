from __future__ import annotations

import pytest

from fibalg import fixtures as fx
from fibalg.fincat import (
    StructuralError,
    check_adjunction,
    check_equivalence,
    compose_functors,
    discrete,
    identity_functor,
)
from fibalg.grothfib import as_total, build_total
from fibalg.monadkit import check_param, constant_param_monad, identity_monad
from fibalg.recognize import (
    check_pruned,
    comparison_unit,
    copair_left_adjoint,
    dualize,
    induced_param_monad,
    initial_fibre,
    iso_classes,
    monad_iso,
    recognize,
    round_trip,
)

PRUNED = [fx.writer_chain2, fx.writer_chain3, fx.writer_bool4, fx.const_chain3, fx.finset_param]


def test_initial_fibre_of_identity_fibration():
    t = fx.identity_fibration()
    k = initial_fibre(t)
    assert k.fibre.objects == ("c0",)
    assert set(k.i_R.omap.values()) == {"c0"}
    assert check_adjunction(k.i, k.i_R, "homset").holds


def test_initial_fibre_of_writer_is_the_carrier_chain():
    t = build_total(fx.writer_chain3(), "em")
    k = initial_fibre(t)
    assert len(k.fibre.objects) == 3
    assert sorted(t.payload[o][1] for o in k.fibre.objects) == ["c0", "c1", "c2"]
    back = compose_functors(k.i_R, k.i)
    assert dict(back.omap) == {o: o for o in k.fibre.objects}
    assert dict(back.mmap) == {m: m for m in k.fibre.morphisms}
    assert check_adjunction(k.i, k.i_R, "homset").holds


def test_initial_fibre_needs_initial_base():
    d = discrete("d2", ["x", "y"])
    with pytest.raises(StructuralError):
        initial_fibre(as_total("d", d, identity_functor(d)))


def test_not_pruned_without_initial_base():
    d = discrete("d2", ["x", "y"])
    rep = check_pruned(as_total("d", d, identity_functor(d)))
    assert not rep.has_initial_base and not rep.pruned


@pytest.mark.parametrize("build", PRUNED)
def test_em_totals_are_pruned(build):
    rep = check_pruned(build_total(build(), "em"))
    assert rep.pruned, rep.failure
    assert rep.fibrewise_terminals_preserved.holds


def test_codomain_fibration_is_pruned():
    t = fx.codomain2()
    assert len(t.cat.objects) == 3
    assert check_pruned(t).pruned


def test_copairing_writer():
    p = fx.writer_chain3()
    t = build_total(p, "em")
    cp = copair_left_adjoint(t)
    assert cp.adjunction.holds
    prod = cp.functor.dom
    for (a, e), o in ((prod.split_obj[k], v) for k, v in cp.functor.omap.items()):
        x = t.payload[e][1]
        assert t.payload[o][:2] == (a, fx.chain_join(a, x))


def test_copairing_identity():
    t = fx.identity_fibration()
    cp = copair_left_adjoint(t)
    assert {cp.functor.dom.split_obj[k][0]: v for k, v in cp.functor.omap.items()} == {o: o for o in t.cat.objects}


def test_induced_monad_of_identity_fibration_is_trivial():
    t = fx.identity_fibration()
    tp = induced_param_monad(t)
    assert check_param(tp).ok
    for a in t.base.objects:
        assert dict(tp.functor(a).omap) == {"c0": "c0"}


def test_induced_monad_of_writer_is_join():
    p = fx.writer_chain3()
    t = build_total(p, "em")
    tp = induced_param_monad(t)
    for a in p.params.objects:
        for e in tp.carriers.objects:
            x = t.payload[e][1]
            assert t.payload[tp.functor(a).omap[e]][1] == fx.chain_join(a, x)


@pytest.mark.parametrize("build", PRUNED)
def test_round_trip(build):
    r, iso = round_trip(build())
    assert r.pruned and r.is_em.holds
    assert iso.holds, iso.reason
    # initial parameter acts trivially
    tp = r.T_p
    z = "c0" if "c0" in tp.params.objects else "bot"
    assert all(tp.functor(z).omap[e] == e for e in tp.carriers.objects)


@pytest.mark.parametrize("build", PRUNED)
def test_comparison_is_fibred(build):
    t = build_total(build(), "em")
    r = comparison_unit(t)
    em = r.target
    assert all(em.p.omap[r.eta_p.omap[e]] == t.p.omap[e] for e in t.cat.objects)
    assert all(em.p.mmap[r.eta_p.mmap[m]] == t.p.mmap[m] for m in t.cat.morphisms)


def test_monad_iso_detects_a_different_monad():
    p = fx.writer_chain3()
    r, _ = round_trip(p)
    k = initial_fibre(build_total(p, "em"))
    from fibalg.recognize import carrier_iso

    K = carrier_iso(build_total(p, "em"), k)
    other = constant_param_monad(fx.chain3(), identity_monad(fx.chain3()))
    assert not monad_iso(r.T_p, other, K).holds


def test_codomain_not_em_with_count_witness():
    r = recognize(fx.codomain2())
    assert r.pruned
    assert not r.is_em.holds
    assert (r.evidence["source_objects"], r.evidence["target_objects"]) == (3, 2)
    assert iso_classes(fx.codomain2().cat) == 3
    tp = r.T_p
    assert len(tp.carriers.objects) == 1


def test_identity_fibration_recognized():
    r = recognize(fx.identity_fibration())
    assert r.is_em.holds
    assert check_equivalence(r.eta_p).holds


def test_points_of_split_epi_not_a_fibration():
    r = recognize(fx.points_splitepi())
    assert not r.pruned and not r.is_em.holds
    assert "not a fibration" in r.report.failure


def test_coreader_dual_recognized():
    t = build_total(fx.coreader_bool4(), "coem")
    r = dualize(t)
    assert r.dual and r.pruned and r.is_em.holds
    assert r.T_p.comonad
    # S_top is the identity comonad
    assert all(r.T_p.functor("top").omap[e] == e for e in r.T_p.carriers.objects)


def test_dual_of_identity_fibration():
    t = fx.identity_fibration()
    r = dualize(as_total("idop", t.cat, t.p, "opfibration"))
    assert r.is_em.holds


def _same(r1, r2):
    assert r1.pruned == r2.pruned and r1.is_em.holds == r2.is_em.holds
    if r1.T_p is None:
        return r2.T_p is None
    assert r1.T_p.comonad != r2.T_p.comonad
    for a in r1.T_p.params.objects:
        assert dict(r1.T_p.functor(a).omap) == dict(r2.T_p.functor(a).omap)
        assert dict(r1.T_p.monad(a).eta.components) == dict(r2.T_p.monad(a).eta.components)
        assert dict(r1.T_p.monad(a).mu.components) == dict(r2.T_p.monad(a).mu.components)
    assert dict(r1.eta_p.omap) == dict(r2.eta_p.omap)
    assert dict(r1.eta_p.mmap) == dict(r2.eta_p.mmap)
    return True


FIBS = [
    lambda: build_total(fx.writer_chain3(), "em"),
    lambda: build_total(fx.finset_param(), "em"),
    fx.codomain2,
    fx.identity_fibration,
    fx.points_splitepi,
]


@pytest.mark.parametrize("build", FIBS)
def test_duality_agrees(build):
    t = build()
    _same(recognize(t), recognize(t.op()))
