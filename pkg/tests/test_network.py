import itertools
import random
from fractions import Fraction

import pytest

from netrep.costfn import CostFunction, builtin_function, brute_force_min, complement_function, add
from netrep.encoding import encode_tuple, retract_blocks, standard_encoding
from netrep.extrat import INF
from netrep.network import (S, T, Network, NetworkError, NotRetractableError, c_min, cmin_table,
                            complement_network, designated, eval_representation, gadget,
                            is_retractable, min_cut, network_sum, node, pinned_min_cut)

from oracles import brute_cut, random_network

HALF = Fraction(1, 2)


def test_min_cut_examples():
    assert min_cut(Network.build([])).value == 0
    res = min_cut(Network.build([(S, T, Fraction(3, 2))]))
    assert res.value == Fraction(3, 2) and res.cut == {S}
    net = gadget("halfpair")[0]
    res = min_cut(net)
    assert res.value == 0 and res.cut == {S}


def test_min_cut_infinite():
    net = Network.build([(S, "a", INF), ("a", T, INF)])
    assert min_cut(net).value is INF
    net = Network.build([(S, "a", INF), ("a", T, 2), (S, T, INF)], nodes=["b"])
    assert min_cut(net).value is INF
    net = Network.build([(S, "a", INF), ("a", T, 2)])
    res = min_cut(net)
    assert res.value == 2 and res.cut == {S, "a"}


def test_validation():
    with pytest.raises(NetworkError):
        Network.build([("a", S, 1)])
    with pytest.raises(NetworkError):
        Network.build([(T, "a", 1)])
    with pytest.raises(NetworkError):
        Network.build([("a", "a", 1)])
    with pytest.raises(NetworkError):
        Network.build([("a", "b", -1)])
    with pytest.raises(NetworkError):
        Network.build([(node(3, 1), T, 1)], 2, 1)
    net = Network.build([("a", "b", 1), ("a", "b", 2)])
    assert net.capacity[("a", "b")] == 3


def test_min_cut_against_enumeration():
    rng = random.Random(4)
    for _ in range(150):
        net = random_network(rng, 2, 2, extra=rng.randint(0, 2), frac=True, inf_prob=0.1)
        res = min_cut(net)
        assert res.value == brute_cut(net)
        assert net.cut_value(res.cut - {S}) == res.value
        if res.value is not INF:
            # the minimal minimum cut lies inside every minimum cut
            free = [v for v in net.nodes if v not in (S, T)]
            for bits in itertools.product((0, 1), repeat=len(free)):
                side = {v for v, b in zip(free, bits) if b}
                if net.cut_value(side) == res.value:
                    assert res.cut - {S} <= side


def test_c_min_examples():
    h0 = gadget("h0")[0]
    assert c_min(h0, 1, 1, (1,)) is INF and c_min(h0, 1, 1, (0,)) == 0
    net = gadget("halfpair")[0]
    assert c_min(net, 2, 2, (1, 0, 1, 0)) == 1
    assert c_min(net, 2, 2, {node(1, 1): 0, node(1, 2): 0, node(2, 1): 0, node(2, 2): 0}) == 0
    with pytest.raises(NetworkError):
        c_min(net, 2, 2, (1, 0, 1))
    with pytest.raises(NetworkError):
        c_min(net, 2, 2, {node(1, 1): 1})


def test_c_min_against_enumeration():
    rng = random.Random(6)
    for _ in range(40):
        net = random_network(rng, 2, 1, extra=2, frac=True, inf_prob=0.1)
        for x in itertools.product((0, 1), repeat=2):
            pins = dict(zip(designated(2, 1), x))
            assert c_min(net, 2, 1, x) == brute_cut(net, pins)


def test_c_min_monotone_in_capacity():
    rng = random.Random(9)
    for _ in range(40):
        net = random_network(rng, 2, 1, extra=1)
        u, v, c = rng.choice(net.edges) if net.edges else (S, T, Fraction(0))
        bigger = Network.build(list(net.edges) + [(u, v, 1)], 2, 1, net.nodes)
        for x in itertools.product((0, 1), repeat=2):
            assert c_min(bigger, 2, 1, x) >= c_min(net, 2, 1, x)


def test_retractable_examples():
    assert is_retractable(gadget("halfpair")[0], 2, standard_encoding("star1"))
    assert is_retractable(gadget("h2")[0], 2, standard_encoding("identity"))
    pair = standard_encoding("pair")
    net = Network.build([(node(1, 1), T, 1)], 1, 2)
    want = all(c_min(net, 1, 2, x) >= c_min(net, 1, 2, retract_blocks(pair, x))
               for x in itertools.product((0, 1), repeat=2))
    assert is_retractable(net, 1, pair).holds == want
    bad = Network.build([(S, node(1, 1), 1), (S, node(1, 2), 1)], 1, 2)
    res = is_retractable(bad, 1, pair)
    assert not res and res.counterexample == (1, 1)  # c_min 0 retracts to c_min 2
    with pytest.raises(NotRetractableError):
        eval_representation(bad, 1, pair, verify=True)


def test_gadgets_reproduce_fixtures():
    for name in ("h0", "h1", "h2"):
        net, enc, kappa = gadget(name)
        assert eval_representation(net, net.n, enc, kappa, verify=True) == builtin_function(name)
    net, enc, kappa = gadget("halfpair")
    assert eval_representation(net, 2, enc, kappa) == builtin_function("and2")
    assert set(net.nodes) == {S, T, "1^1", "1^2", "2^1", "2^2"}
    assert net.capacity == {("1^1", "2^2"): HALF, ("2^1", "1^2"): HALF}
    with pytest.raises(NetworkError):
        gadget("h9")


def test_eval_constant():
    net = Network.build([], 2, 2)
    f = eval_representation(net, 2, standard_encoding("pair"), Fraction(7, 3))
    assert set(f.table) == {Fraction(7, 3)}


def test_complement_network():
    h0, h1 = gadget("h0")[0], gadget("h1")[0]
    assert complement_network(h0) == h1
    rng = random.Random(12)
    ident = standard_encoding("identity")
    for _ in range(30):
        net = random_network(rng, 2, 1, extra=2, inf_prob=0.1)
        assert complement_network(complement_network(net)) == net
        f = eval_representation(net, 2, ident)
        assert eval_representation(complement_network(net), 2, ident) == complement_function(f)


def test_network_sum_represents_sum():
    ident = standard_encoding("identity")
    rng = random.Random(13)
    for _ in range(20):
        a = random_network(rng, 2, 1, extra=1)
        b = random_network(rng, 2, 1, extra=1)
        fa = eval_representation(a, 2, ident)
        fb = eval_representation(b, 2, ident)
        fs = eval_representation(network_sum(a, b), 2, ident)
        assert fs == add(fa, fb, (1, 2), (1, 2), 2)


def test_property_one_minimization():
    """min over sigma-image pinnings of c_min equals the represented function's minimum."""
    rng = random.Random(14)
    pair = standard_encoding("pair")
    seen = 0
    while seen < 15:
        net = random_network(rng, 2, 2, extra=1, density=0.3)
        if not is_retractable(net, 2, pair):
            continue
        seen += 1
        f = eval_representation(net, 2, pair)
        table = cmin_table(net, 2, 2)
        assert min(table.values()) == brute_force_min(f)[0]


def test_json_roundtrip():
    net = gadget("halfpair")[0]
    assert Network.from_json(net.to_json()) == net
    with pytest.raises(NetworkError):
        Network.from_json({"edges": [{"from": "s"}]})
