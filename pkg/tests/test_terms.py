import pytest
from hypothesis import given, strategies as st

from cloneembed.construction import M, Phi
from cloneembed.enumeration import representations
from cloneembed.ops import compose, identity
from cloneembed.terms import (
    App,
    MalformedTerm,
    Var,
    app,
    depth,
    evaluate,
    is_reduced,
    leaves,
    node_count,
    parse_sexpr,
    phi_leaves_on,
    reduce,
    substitute,
    to_sexpr,
)

x, y = Var(1), Var(2)


def phi(p, t):
    return App(Phi(p), (t,))


def test_eval_basics(chain2):
    assert evaluate(x, chain2, 1) == identity(6)
    sym = M(0, 1, 1)
    t = app(sym, x, phi(1, x), phi(1, x))
    assert evaluate(t, chain2, 1) == chain2.phi[0]
    comp = evaluate(phi(0, phi(1, x)), chain2, 1)
    assert comp.values() == {2, 4}
    assert comp == compose(chain2.phi[0], [chain2.phi[1]])


def test_arity_is_checked():
    with pytest.raises(MalformedTerm):
        App(M(0, 0, 0), (x, x))


def test_variable_out_of_range(chain2):
    with pytest.raises(MalformedTerm):
        evaluate(y, chain2, 1)


def test_leaves_of_the_displayed_example():
    p, u, g, l, r, d = (M(0, 1, 2), M(3, 4, 5), M(6, 7, 8), Phi(10), Phi(11), Phi(12))
    inner = app(u, x, app(l, y), app(r, x))
    t = app(p, inner, app(d, y), app(g, x, x, x))
    assert leaves(t) == {app(l, y), app(r, x), app(d, y), app(g, x, x, x)}
    assert phi_leaves_on(t, 2) == {10, 12}
    assert phi_leaves_on(t, 1) == {11}
    assert leaves(phi(3, x)) == {phi(3, x)}
    assert leaves(x) == frozenset()


def test_reduce_examples(chain2):
    sym = M(0, 1, 1)
    assert reduce(app(sym, x, phi(1, x), phi(1, x))) == phi(0, x)
    done = app(sym, x, y, phi(1, x))
    assert reduce(done) == done
    inner = app(M(1, 0, 1), x, phi(0, x), phi(1, x))
    outer = app(M(0, 1, 0), inner, phi(1, inner), phi(0, inner))
    r = reduce(outer)
    assert r == phi(0, phi(1, x))
    assert evaluate(r, chain2, 1) == evaluate(outer, chain2, 1)


def test_sexpr_round_trip():
    t = app(M(0, 1, 1), x, phi(1, x), y)
    s = to_sexpr(t)
    assert s == "(m0_1_1 x1 (phi1 x1) x2)"
    assert parse_sexpr(s) == t
    with pytest.raises(MalformedTerm):
        parse_sexpr("(m0_1_1 x1")
    with pytest.raises(MalformedTerm):
        parse_sexpr("(bogus x1)")


def test_substitute_and_measures():
    t = app(M(0, 1, 1), x, phi(1, y), y)
    s = substitute(t, {2: phi(0, x)})
    assert s == app(M(0, 1, 1), x, phi(1, phi(0, x)), phi(0, x))
    assert depth(s) == 3 and node_count(s) == 7


def chain2_terms(max_leaves=12):
    syms = [Phi(0), Phi(1)] + [M(p, q1, q2) for p in (0, 1) for q1 in (0, 1) for q2 in (0, 1) if p <= max(q1, q2)]
    base = st.sampled_from([x, y])

    def extend(children):
        return st.one_of(
            st.builds(lambda c: App(Phi(0), (c,)), children),
            st.builds(lambda c: App(Phi(1), (c,)), children),
            st.builds(lambda s, a, b, c: App(s, (a, b, c)), st.sampled_from(syms[2:]), children, children, children),
            # redex-shaped nodes so reduction has something to do
            st.builds(lambda s, c: App(s, (c, App(Phi(s.q1), (c,)), App(Phi(s.q2), (c,)))), st.sampled_from(syms[2:]), children),
        )

    return st.recursive(base, extend, max_leaves=max_leaves)


@given(chain2_terms())
def test_reduction_preserves_meaning(t):
    from conftest import system

    sys = system("chain2")
    r = reduce(t)
    assert is_reduced(r)
    assert reduce(r) == r
    assert node_count(r) <= node_count(t)
    assert evaluate(r, sys, 2) == evaluate(t, sys, 2)
    assert parse_sexpr(to_sexpr(t)) == t


def test_reduction_on_every_retained_representation(chain2):
    reps = representations(chain2, 2, 3, 20000)
    for t, row in zip(reps.terms, reps.tables):
        assert is_reduced(t)
        assert (evaluate(t, chain2, 2).table == row).all()
