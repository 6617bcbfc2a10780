import itertools
import random

import pytest

from latcoh.cubes import (RegionError, WeightSystem, build_region, cube_boundary, cube_vertices,
                          enumerate_sublevel, genus_correction)
from latcoh.lattice import sub

from conftest import lattice

# the 8 points of one half of S_{-1} for NV1, in coordinates (E1, E2, E3)
NV1_A = [(1, 2, 1), (1, 3, 1), (2, 3, 1), (2, 4, 1), (2, 4, 2), (2, 5, 2), (3, 5, 2), (3, 6, 2)]


def nv1_minimum_set():
    b = [sub((7, 14, 5), a) for a in NV1_A]
    pts = set()
    for x, y in itertools.product(NV1_A, NV1_A):
        pts.add(x + (1,) + y)
    for x, y in itertools.product(b, b):
        pts.add(x + (2,) + y)
    return pts


def test_nv1_minimum_set():
    lat = lattice("nv1")
    ws = WeightSystem(lat, lat.K)
    cx = enumerate_sublevel(ws, build_region(lat, lat.K, "effective"), -1, qmax=0)
    assert cx.m_w == -1
    got = set(cx.points(-1))
    assert len(got) == 128
    assert got == nv1_minimum_set()


def test_el4_sublevels():
    lat = lattice("el4")
    ws = WeightSystem(lat, lat.K)
    full = enumerate_sublevel(ws, build_region(lat, lat.K, "full"), 1)
    assert sorted(full.points(0)) == [(0, 0, 0), (1, 1, 1)]
    assert full.counts(1) == [16, 22, 8, 1]
    eff = enumerate_sublevel(ws, build_region(lat, lat.K, "effective"), 1)
    assert eff.counts(1) == [12, 17, 7, 1]


def test_genus_edge_weight():
    lat = lattice("el5")
    ws = WeightSystem(lat, lat.K)
    assert ws.w0((0,)) == 0 and ws.w0((1,)) == 0
    # the segment [0, E] carries the genus correction M^1(0) = 1
    assert ws.w1((0,), 0) == 1


@pytest.mark.parametrize("g,row", [
    (0, [0, 0, 0, 0]),
    (1, [1, 0, 0, 0]),
    (2, [1, 1, 0, 0]),
    (3, [2, 1, 1, 0]),
    (4, [2, 2, 1, 1]),
])
def test_genus_correction_table(g, row):
    assert [genus_correction(g, n) for n in range(4)] == row


def test_genus_correction_rejects_negative():
    with pytest.raises(ValueError):
        genus_correction(1, -1)


def test_step_matches_w0():
    lat = lattice("c4")
    ws = WeightSystem(lat, lat.K)
    rng = random.Random(2)
    for _ in range(50):
        l = tuple(rng.randint(0, 6) for _ in range(lat.s))
        j = rng.randrange(lat.s)
        up = tuple(x + (i == j) for i, x in enumerate(l))
        assert ws.step(l, j) == ws.w0(up) - ws.w0(l)
        assert ws.w0(l) == lat.chi(lat.K, l)


def test_weights_are_compatible():
    # the weight of a cube bounds the weights of its faces
    lat = lattice("el5")
    ws = WeightSystem(lat, lat.K)
    for base in [(-1,), (0,), (2,)]:
        assert ws.wq(base, (0,)) >= max(ws.w0(v) for v in cube_vertices(base, (0,)))
    lat = lattice("star_334")
    ws = WeightSystem(lat, lat.K)
    rng = random.Random(7)
    for _ in range(40):
        base = tuple(rng.randint(-1, 3) for _ in range(lat.s))
        dirs = tuple(sorted(rng.sample(range(lat.s), rng.randint(1, lat.s))))
        w = ws.wq(base, dirs)
        for (fb, fd), _sign in cube_boundary((base, dirs)):
            assert ws.wq(fb, fd) <= w


def test_boundary_squares_to_zero():
    cube = ((0, 0, 0), (0, 1, 2))
    total = {}
    for face, a in cube_boundary(cube):
        for f2, b in cube_boundary(face):
            total[f2] = total.get(f2, 0) + a * b
    assert all(v == 0 for v in total.values())


def test_region_modes():
    lat = lattice("a3")
    assert build_region(lat, lat.K).kind == "effective"
    r = build_region(lat, lat.K, "box", 2)
    assert r.contains((0, 0, 0)) and not r.contains((100, 0, 0))
    with pytest.raises(RegionError):
        build_region(lat, (2, 0, 0), "effective")
    with pytest.raises(RegionError):
        build_region(lat, lat.K, "box", ([0, 0, 0], [1, -1, 1]))
    with pytest.raises(RegionError):
        build_region(lat, lat.K, "sphere")


def test_enumeration_budget():
    lat = lattice("e8")
    ws = WeightSystem(lat, lat.K)
    with pytest.raises(RegionError):
        enumerate_sublevel(ws, build_region(lat, lat.K, "full"), 30, budget=100)
