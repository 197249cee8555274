import functools

import pytest
from hypothesis import HealthCheck, settings

from cloneembed.construction import build_system
from cloneembed.family import singleton_family
from cloneembed.lattice import FIXTURES

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL = ("one", "chain2", "chain3")


@functools.lru_cache(maxsize=None)
def lattice(name):
    return FIXTURES[name]()


@functools.lru_cache(maxsize=None)
def system(name):
    L = lattice(name)
    return build_system(L, singleton_family(L.size))


@pytest.fixture(params=sorted(FIXTURES))
def fixture_name(request):
    return request.param


@pytest.fixture(scope="session")
def chain2():
    return system("chain2")


@pytest.fixture(scope="session")
def m3sys():
    return system("m3")
