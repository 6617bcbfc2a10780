import functools

import pytest

from latcoh.corpus import load_graph
from latcoh.engine import lattice_cohomology
from latcoh.lattice import Lattice


@functools.lru_cache(maxsize=None)
def lattice(name):
    return Lattice(load_graph(name))


@functools.lru_cache(maxsize=None)
def canonical(name, qmax=None, engine="auto", n_max=None):
    lat = lattice(name)
    return lattice_cohomology(lat, lat.K, qmax=qmax, engine=engine, n_max=n_max)


@pytest.fixture
def lat_of():
    return lattice


@pytest.fixture
def cohom():
    return canonical
