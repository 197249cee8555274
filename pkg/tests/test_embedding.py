import json

import pytest
from hypothesis import given, strategies as st

from cloneembed.classify import spoilt_inventory
from cloneembed.config import Bounds
from cloneembed.construction import M, Phi, build_system
from cloneembed.embedding import (
    PASS,
    FAIL,
    NotInGeneratedIdeal,
    clone_fragment,
    derive_phi_witness,
    pair_witness,
    verify_embedding,
    when4_case_terms,
    when4_holds,
    when4_suite,
)
from cloneembed.family import independent_family, singleton_family
from cloneembed.lattice import FIXTURES, generated_ideal, principal_ideal
from cloneembed.terms import App, Var, depth, evaluate, phi_leaves_on, subterms

from conftest import lattice, system

SMALL = Bounds(max_arity=2, depth=3, budget=50_000)


def statuses(report):
    return {c["name"]: c["status"] for c in report["checks"]}


def test_witness_for_a_generator_is_the_leaf(chain2):
    assert derive_phi_witness(chain2, [0], 0) == App(Phi(0), (Var(1),))


def test_witness_below_a_generator(chain2):
    bot, top = 0, 1
    x = Var(1)
    expected = App(M(bot, top, top), (x, App(Phi(top), (x,)), App(Phi(top), (x,))))
    assert derive_phi_witness(chain2, [top], bot) == expected
    assert evaluate(pair_witness(chain2, bot, top, top), chain2, 1) == chain2.phi[bot]


def test_two_stage_witness_in_m3(m3sys):
    L = m3sys.lattice
    a, b, c, top = (L.index(n) for n in ("a", "b", "c", "top"))
    t = derive_phi_witness(m3sys, [a, b], c)
    syms = {s.sym for s in subterms(t) if isinstance(s, App)}
    assert M(top, a, b) in syms and M(c, top, top) in syms
    assert depth(t) == 3
    assert evaluate(t, m3sys, 1) == m3sys.phi[c]


def test_witness_outside_the_ideal_is_refused(m3sys):
    L = m3sys.lattice
    with pytest.raises(NotInGeneratedIdeal):
        derive_phi_witness(m3sys, [L.index("a")], L.index("b"))


@given(st.sampled_from(sorted(FIXTURES)), st.data())
def test_witnesses_only_use_allowed_phis(name, data):
    sys = system(name)
    L = sys.lattice
    gens = data.draw(st.sets(st.sampled_from(list(L.elements)), min_size=1))
    p = data.draw(st.sampled_from(sorted(generated_ideal(L, gens).members)))
    t = derive_phi_witness(sys, gens, p)
    used = {s.sym.p for s in subterms(t) if isinstance(s, App) and isinstance(s.sym, Phi)}
    assert used <= set(gens)
    assert evaluate(t, sys, 1) == sys.phi[p]


def test_fragment_of_the_full_ideal_holds_all_phi(m3sys):
    frag = clone_fragment(m3sys, m3sys.lattice.elements, Bounds(max_arity=1))
    for op in m3sys.phi.values():
        assert op.table.tobytes() in frag.members(1)


def test_bottom_fragment_of_chain2(chain2):
    bounds = Bounds(max_arity=1, depth=4, budget=50_000)
    inv = spoilt_inventory(chain2, 1, 4, 50_000)
    frag = clone_fragment(chain2, principal_ideal(chain2.lattice, 0), bounds, inv)
    members = frag.members(1)
    assert chain2.phi[0].table.tobytes() in members
    assert bytes(range(6)) in members
    assert inv.spoilt_keys(1) and inv.spoilt_keys(1) <= members
    assert chain2.phi[1].table.tobytes() not in members
    assert frag.signature() == {0}


def test_one_element_fragment_is_the_whole_slice():
    sys = system("one")
    inv = spoilt_inventory(sys, 2, 3, 50_000)
    frag = clone_fragment(sys, [0], SMALL, inv)
    for n in (1, 2):
        assert not inv.slices[n].exhausted
        assert frag.members(n) == inv.slices[n].keys()


def test_when4_case_examples(m3sys):
    for sym in m3sys.m_symbols:
        for name, term, qs in when4_case_terms(sym):
            op = evaluate(term, m3sys, 2)
            cover = set().union(*(m3sys.family.sets[q] for q in qs))
            for a in m3sys.A:
                assert op(2, a) == (4 if a in cover else 2)
            assert when4_holds(m3sys, term, op.table) is None
    sym = m3sys.m_symbols[0]
    _, middle, _ = when4_case_terms(sym)
    assert phi_leaves_on(middle[1], 2) == frozenset()


def test_when4_suite_small():
    for name in ("one", "chain2"):
        res = when4_suite(system(name), SMALL)
        assert res["status"] == PASS and res["checked"] > 0 and res["counterexample"] is None


def test_chain2_embedding(chain2):
    r = verify_embedding(chain2.lattice, chain2, SMALL)
    assert r["status"] == PASS
    assert all(s == PASS for s in statuses(r).values())
    sound = next(c for c in r["checks"] if c["name"] == "soundness")
    assert [s["signature"] for s in sound["per_ideal"]] == [["bot"], ["bot", "top"]]
    json.dumps(r)


def test_m3_meet_and_join_signatures(m3sys):
    r = verify_embedding(m3sys.lattice, m3sys, SMALL)
    meet = next(c for c in r["checks"] if c["name"] == "meet")
    join = next(c for c in r["checks"] if c["name"] == "join")
    ab_meet = next(p for p in meet["per_pair"] if p["pair"] == ["a", "b"])
    ab_join = next(p for p in join["per_pair"] if p["pair"] == ["a", "b"])
    assert ab_meet["signature"] == ["bot"] and ab_meet["status"] == PASS
    assert ab_join["signature"] == ["bot", "a", "b", "c", "top"] and ab_join["status"] == PASS
    assert len(r["ideals"]) == 5


def test_verdicts_survive_relabeling():
    L = lattice("b2")
    perm = [3, 1, 0, 2]
    R = L.relabel(perm)
    r0 = verify_embedding(L, build_system(L, singleton_family(L.size)), SMALL)
    r1 = verify_embedding(R, build_system(R, singleton_family(R.size)), SMALL)
    assert statuses(r0) == statuses(r1)
    pairs0 = {frozenset(p["pair"]): p["status"] for c in r0["checks"] if "per_pair" in c for p in c["per_pair"]}
    pairs1 = {frozenset(p["pair"]): p["status"] for c in r1["checks"] if "per_pair" in c for p in c["per_pair"]}
    assert pairs0 == pairs1


def test_soundness_is_stable_as_depth_grows(chain2):
    seen = []
    for d in (1, 2, 3, 4):
        r = verify_embedding(chain2.lattice, chain2, Bounds(max_arity=2, depth=d, budget=50_000))
        seen.append(statuses(r)["soundness"])
    assert FAIL not in seen


def test_independent_family_embedding():
    L = lattice("chain3")
    sys = build_system(L, independent_family(L.size))
    r = verify_embedding(L, sys, Bounds(max_arity=2, depth=2, budget=50_000))
    assert r["status"] == PASS


def test_threaded_run_matches_sequential(monkeypatch):
    sys = system("chain3")
    r1 = verify_embedding(sys.lattice, sys, SMALL, threads=1)
    r2 = verify_embedding(sys.lattice, sys, SMALL, threads=3)
    assert json.dumps(r1) == json.dumps(r2)
