import pytest

from cloneembed.config import Bounds
from cloneembed.construction import inject_fault
from cloneembed.embedding import FAIL, PASS
from cloneembed.lemmas import (
    LEMMA_SUITES,
    composition_suite,
    construction_suite,
    lemma_context,
    run_lemma_suites,
)

from conftest import system

SMALL = Bounds(max_arity=3, depth=2, budget=20_000)


@pytest.mark.parametrize("name", ["one", "chain2"])
def test_all_lemma_suites_pass_on_small_fixtures(name):
    results = run_lemma_suites(system(name), SMALL)
    assert [r["name"] for r in results] == list(LEMMA_SUITES)
    for r in results:
        assert r["status"] == PASS, r
        assert r["instances"] > 0


def test_construction_suite_counts(chain2):
    r = construction_suite(chain2)
    assert r["status"] == PASS
    assert r["instances"] == 2 + 7 * (6**3 + 6)


@pytest.mark.parametrize("kind", ["phi", "m"])
def test_faults_break_composition(chain2, kind):
    bad, _ = inject_fault(chain2, kind)
    assert composition_suite(bad)["status"] == FAIL
    assert composition_suite(chain2)["status"] == PASS


def test_phi_fault_is_seen_by_construction_suite(chain2):
    bad, _ = inject_fault(chain2, "phi")
    r = construction_suite(bad)
    assert r["status"] == FAIL and r["counterexample"]


def test_counterexamples_carry_terms_and_tables(chain2):
    bad, _ = inject_fault(chain2, "m")
    ctx = lemma_context(bad, SMALL)
    failing = [fn(ctx) for fn in LEMMA_SUITES.values()]
    failing = [r for r in failing if r["status"] == FAIL]
    assert failing
    for r in failing:
        assert r["counterexample"]
