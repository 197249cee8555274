import numpy as np
import pytest
from hypothesis import given, strategies as st

from cloneembed.ops import (
    ArityMismatch,
    Operation,
    PositionOutOfRange,
    add_dummies,
    compose,
    depends_on,
    essential_positions,
    identity,
    projection,
)


def test_projections():
    assert projection(6, 1, 1)(5) == 5
    assert projection(6, 2, 1)(3, 4) == 3
    assert projection(6, 3, 3)(0, 1, 2) == 2
    assert projection(6, 1, 1) == identity(6)
    with pytest.raises(PositionOutOfRange):
        projection(6, 2, 3)


def test_tuple_encoding_last_variable_fastest():
    f = projection(3, 2, 2)
    assert list(f.table) == [0, 1, 2] * 3


@st.composite
def ops(draw, size=None, arity=None):
    size = size or draw(st.integers(2, 6))
    arity = arity or draw(st.integers(1, 2))
    vals = draw(st.lists(st.integers(0, size - 1), min_size=size**arity, max_size=size**arity))
    return Operation(size, arity, vals)


@st.composite
def composable(draw):
    size = draw(st.integers(2, 5))
    m = draw(st.integers(1, 2))
    n = draw(st.integers(1, 2))
    f = draw(ops(size, m))
    gs = [draw(ops(size, n)) for _ in range(m)]
    hs = [draw(ops(size, n)) for _ in range(n)]
    return f, gs, hs


@given(composable())
def test_projection_picks_argument(data):
    f, gs, _ = data
    for i in range(1, len(gs) + 1):
        assert compose(projection(f.size, len(gs), i), gs) == gs[i - 1]


@given(composable())
def test_identity_substitution(data):
    f, _, _ = data
    assert compose(f, [projection(f.size, f.arity, i) for i in range(1, f.arity + 1)]) == f


@given(composable())
def test_superposition_is_associative(data):
    f, gs, hs = data
    left = compose(compose(f, gs), hs)
    right = compose(f, [compose(g, hs) for g in gs])
    assert left == right


@given(ops())
def test_equality_is_extensional(f):
    g = Operation(f.size, f.arity, np.array(f.table))
    assert f == g and hash(f) == hash(g) and f.key == g.key


def test_compose_arity_checks():
    f = projection(5, 2, 1)
    with pytest.raises(ArityMismatch):
        compose(f, [identity(5)])
    with pytest.raises(ArityMismatch):
        compose(f, [identity(5), projection(5, 2, 1)])


def test_dependence():
    p = projection(6, 2, 1)
    assert depends_on(p, 1) and not depends_on(p, 2)
    with pytest.raises(PositionOutOfRange):
        depends_on(p, 3)


def test_dummies(chain2):
    phi = chain2.phi[0]
    assert add_dummies(identity(6), 2, 2) == projection(6, 2, 2)
    d = add_dummies(phi, 2, 1)
    assert all(d(x, y) == phi(x) for x in range(6) for y in range(6))
    assert essential_positions(d) == (1,)
    d3 = add_dummies(phi, 3, 2)
    assert [depends_on(d3, j) for j in (1, 2, 3)] == [False, True, False]


def test_composite_of_two_phis(chain2):
    g = compose(chain2.phi[0], [chain2.phi[1]])
    assert g.values() <= {2, 4}
    assert g(2) == 2 and all(g(a) == 4 for a in chain2.A)


def test_every_chain2_m_depends_on_all_positions(chain2):
    for op in chain2.m.values():
        assert essential_positions(op) == (1, 2, 3)


def test_json_round_trip():
    f = projection(5, 2, 2)
    assert Operation.from_json(5, f.to_json()) == f
