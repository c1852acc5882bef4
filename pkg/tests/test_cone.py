import itertools
import json
import random
from fractions import Fraction

import pytest
import sympy

from netrep.cone import (ConeError, ConeSpec, Ray, build_cone, capacity_vector, decompose,
                         export_rays, extreme_rays, is_extreme, permute_vector, swap_signs,
                         swap_variables, symmetry_reduce)
from netrep.encoding import standard_encoding
from netrep.network import Network, gadget, is_retractable
from netrep.ratlp import Feasible, Infeasible, LinSystem

from oracles import random_network, random_skew

PAIR = standard_encoding("pair")


@pytest.fixture(scope="module")
def cone2():
    spec = ConeSpec(2, PAIR)
    sys = build_cone(spec)
    return spec, sys, extreme_rays(sys)


def _dense(sys):
    m = sys.num_vars
    rows = []
    for row, _ in sys.inequalities:
        d = [0] * m
        for j, a in row:
            d[j] = a
        rows.append(d)
    rows += [[int(i == j) for i in range(m)] for j in sys.nonneg]
    return rows


def _brute_rays(sys):
    """Every (m-1)-subset of rows with a one-dimensional nullspace, kept if the line meets the cone."""
    rows = _dense(sys)
    m = sys.num_vars
    out = set()
    for sel in itertools.combinations(rows, m - 1):
        ns = sympy.Matrix(sel).nullspace()
        if len(ns) != 1:
            continue
        v = ns[0]
        v = v * sympy.lcm([x.q for x in v])
        for sign in (1, -1):
            w = [int(sign * x) for x in v]
            if all(sum(a * b for a, b in zip(r, w)) >= 0 for r in rows):
                g = 0
                for x in w:
                    g = sympy.igcd(g, x)
                out.add(tuple(x // g for x in w))
    return out


def test_orthant_rays():
    sys = LinSystem.build(3, nonneg=range(3))
    assert [r.vector for r in extreme_rays(sys)] == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_simple_cone():
    # x, y >= 0 and x - y >= 0: rays (1, 0) and (1, 1)
    sys = LinSystem.build(2, inequalities=[({0: 1, 1: -1}, 0)], nonneg=range(2))
    assert sorted(r.vector for r in extreme_rays(sys)) == [(1, 0), (1, 1)]
    assert is_extreme(sys, (2, 2)) and not is_extreme(sys, (2, 1)) and not is_extreme(sys, (0, 1))


def test_n1_against_brute_force():
    spec = ConeSpec(1, PAIR)
    sys = build_cone(spec)
    assert sys.num_vars == 6 and len(sys.inequalities) == 1
    rays = extreme_rays(sys)
    assert len(rays) == 8
    assert {r.vector for r in rays} == _brute_rays(sys)


def test_n2_shape(cone2):
    spec, sys, rays = cone2
    assert len(spec.edges) == 20 and len(sys.inequalities) == 7
    assert len(rays) == 118
    m = sys.num_vars
    rows = _dense(sys)
    for r in rays:
        tight = [row for row in rows if sum(a * b for a, b in zip(row, r.vector)) == 0]
        assert sympy.Matrix(tight).rank() == m - 1


def test_rays_are_retractable(cone2):
    spec, _, rays = cone2
    for r in rays:
        assert is_retractable(r.network(spec), 2, PAIR)


def test_symmetry(cone2):
    spec, _, rays = cone2
    vecs = {r.vector for r in rays}
    for g in (swap_signs(2), swap_variables(2)):
        assert {permute_vector(spec.edges, g, v) for v in vecs} == vecs
    orbits = symmetry_reduce(rays, spec.edges, [swap_signs(2), swap_variables(2)])
    assert sum(o.size for o in orbits) == 118
    assert len(orbits) == 31
    assert all(o.size in (1, 2, 4) for o in orbits)


def test_symmetry_needs_closed_set(cone2):
    spec, _, rays = cone2
    lopsided = [r for r in rays if r.vector != max(r.vector for r in rays)]
    with pytest.raises(ConeError):
        symmetry_reduce(lopsided, spec.edges, [swap_signs(2)])


def test_row_order_independent(cone2):
    spec, sys, rays = cone2
    shuffled = list(sys.inequalities)
    random.Random(4).shuffle(shuffled)
    other = LinSystem.build(sys.num_vars, inequalities=[(dict(r), b) for r, b in shuffled],
                            nonneg=sorted(sys.nonneg, reverse=True))
    assert extreme_rays(other) == rays


def test_retractable_networks_decompose(cone2):
    spec, _, rays = cone2
    rng = random.Random(13)
    done = 0
    while done < 50:
        net = random_network(rng, 2, 2, density=0.5)
        if any(u == "s" and v == "t" for u, v, _ in net.edges):
            net = Network.build([e for e in net.edges if (e[0], e[1]) != ("s", "t")], 2, 2)
        if not is_retractable(net, 2, PAIR):
            continue
        res = decompose(net, rays, spec)
        assert isinstance(res, Feasible)
        vec = capacity_vector(net, spec)
        assert tuple(sum(l * r.vector[j] for l, r in zip(res.x, rays)) for j in range(20)) == vec
        done += 1


def test_skew_networks_decompose(cone2):
    spec, _, rays = cone2
    rng = random.Random(5)
    for _ in range(10):
        caps = random_skew(rng, 2, spec.edges)
        net = Network.build([(u, v, c) for (u, v), c in zip(spec.edges, caps) if c], 2, 2)
        assert is_retractable(net, 2, PAIR)
        assert isinstance(decompose(net, rays, spec), Feasible)


def test_nonretractable_network_fails_to_decompose(cone2):
    spec, _, rays = cone2
    rng = random.Random(6)
    while True:
        net = random_network(rng, 2, 2, density=0.5)
        net = Network.build([e for e in net.edges if (e[0], e[1]) != ("s", "t")], 2, 2)
        if not is_retractable(net, 2, PAIR):
            break
    assert isinstance(decompose(net, rays, spec), Infeasible)


def test_halfpair_in_star_cone():
    net, enc, _ = gadget("halfpair")
    spec = ConeSpec(2, enc)
    rays = extreme_rays(build_cone(spec))
    assert all(is_retractable(r.network(spec), 2, enc) for r in rays)
    assert isinstance(decompose(net, rays, spec), Feasible)


def test_ray_decomposes_to_itself(cone2):
    spec, _, rays = cone2
    r = rays[17]
    res = decompose(r.network(spec), rays, spec)
    assert isinstance(res, Feasible)
    assert [i for i, x in enumerate(res.x) if x] == [17] and res.x[17] == 1


def test_capacity_vector_errors(cone2):
    spec, _, _ = cone2
    with pytest.raises(ConeError):
        capacity_vector(Network.build([("s", "x0", 1), ("x0", "t", 1)], 2, 2, ["x0"]), spec)
    with pytest.raises(ConeError):
        capacity_vector(Network.build([("s", "1^1", 1)], 1, 2), spec)


def test_export(tmp_path, cone2):
    spec, _, rays = cone2
    orbits = symmetry_reduce(rays, spec.edges, [swap_signs(2), swap_variables(2)])
    manifest = export_rays(tmp_path, spec, rays, orbits)
    assert manifest["ray_count"] == 118 and manifest["orbit_count"] == 31
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk == manifest and on_disk["spec_sha256"] == spec.digest()
    net = Network.from_json(json.loads((tmp_path / "ray_000.json").read_text()))
    assert capacity_vector(net, spec) == tuple(Fraction(c) for c in rays[0].vector)
