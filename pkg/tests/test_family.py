import itertools
import json

import pytest

from cloneembed.family import (
    GroundSet,
    IndexFamily,
    SizeLimit,
    check_noncovering,
    independent_family,
    is_independent,
    singleton_family,
)

from oracles import ground_A


def test_singleton_family_shapes():
    f = singleton_family(2)
    assert f.ground.size == 6 and f.ground.A == (3, 5)
    assert f.sets == (frozenset({3}), frozenset({5}))
    f1 = singleton_family(1)
    assert f1.ground.size == 5 and f1.sets == (frozenset({3}),)
    f5 = singleton_family(5)
    assert f5.ground.size == 9 and len(f5.ground.A) == 5
    assert all(len(s) == 1 for s in f5.sets) and len(set().union(*f5.sets)) == 5
    assert f5.ground.A == tuple(ground_A(9))


def test_independent_family_shapes():
    f = independent_family(2)
    assert len(f.ground.A) == 4 and all(len(s) == 2 for s in f.sets)
    f1 = independent_family(1)
    assert len(f1.ground.A) == 2 and len(f1.sets[0]) == 1
    f3 = independent_family(3)
    assert len(f3.ground.A) == 8
    a = set(f3.ground.A)
    assert f3.sets[0] & f3.sets[1] & (a - f3.sets[2])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_independent_family_passes_exhaustive_scan(k):
    f = independent_family(k, cap=2**k + 4)
    assert is_independent(f)
    assert check_noncovering(f) is None
    # every sign pattern, counted directly
    a = set(f.ground.A)
    for signs in itertools.product((True, False), repeat=k):
        region = set(a)
        for s, sign in zip(f.sets, signs):
            region = region & s if sign else region - s
        assert len(region) == 1


def test_independent_family_cap():
    with pytest.raises(SizeLimit):
        independent_family(4)


def test_noncovering_examples():
    assert check_noncovering(singleton_family(3)) is None
    assert check_noncovering(independent_family(2)) is None
    bad = IndexFamily(GroundSet(6), (frozenset({3, 5}), frozenset({3}), frozenset({5})))
    p, cover = check_noncovering(bad)
    assert p == 0 and set(cover) == {1, 2}
    assert not is_independent(bad)


@pytest.mark.parametrize("fam", [singleton_family(4), independent_family(3)])
def test_witness_points_escape_the_other_sets(fam):
    for p in range(len(fam)):
        w = fam.witness(p)
        assert w in fam.sets[p]
        assert all(w not in s for q, s in enumerate(fam.sets) if q != p)


def test_family_json_round_trip():
    f = independent_family(2)
    assert IndexFamily.from_json(json.loads(json.dumps(f.to_json()))) == f


def test_ground_set_needs_a():
    with pytest.raises(ValueError):
        GroundSet(4)
