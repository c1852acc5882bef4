import random
from fractions import Fraction

import numpy as np
import pytest

from netrep.costfn import CostFunction, builtin_function
from netrep.encoding import standard_encoding
from netrep.extrat import INF
from netrep.network import eval_representation, is_retractable
from netrep.replp import decide_representable
from netrep.wpol import (OMEGA2_TUPLES, OMEGA_K_TUPLES, OperationTable, WeightedPolymorphism,
                         WpolError, apply_operation, certificate, parse_wpol_name, projection,
                         refutation_terms, refutation_value, standard_wpol, validate_wpol,
                         verify_certificate)

from oracles import random_network

TABLE1 = [
    ((0, 2), 0), ((0, 2), 0), ((0, 3), 0), ((0, 3), 0), ((2, 0), 0), ((3, 0), 0), ((2, 0), 0),
    ((3, 0), 0), ((1, 0), 0), ((1, 1), 1), ((1, 1), 1), ((1, 1), 1), ((0, 1), 0), ((0, 3), 0),
    ((0, 2), 0), ((0, 0), -2),
]


@pytest.fixture(scope="module")
def omega2():
    return standard_wpol("omega2")


@pytest.fixture(scope="module")
def omega3():
    return standard_wpol("omega_k", 3)


def _op(omega, name):
    return next(op for op, _ in omega.support if op.name == name)


def test_projection_applies_first(omega2):
    e1 = projection((0, 1, -1), 4, 1)
    assert apply_operation(e1, OMEGA2_TUPLES) == OMEGA2_TUPLES[0]
    assert e1.projection_index() == 1


def test_omega2_phi_outputs(omega2):
    om = omega2[0]
    assert apply_operation(_op(om, "phi1"), OMEGA2_TUPLES) == (0, 0, -1)
    assert apply_operation(_op(om, "phi4"), OMEGA2_TUPLES) == (-1, 0, 0)


def test_omega2_shape(omega2):
    om = omega2[0]
    assert om.arity == 4 and len(om.support) == 8
    assert sorted(om.weights) == [-1] * 4 + [1] * 4
    for op, w in om.support:
        assert (op.projection_index() is not None) == (w < 0)


def test_omega2_refutes_bisub3(omega2):
    om, tuples, f = omega2
    assert refutation_value(om, f, tuples) == 1
    positive = [c.name for c in refutation_terms(om, f, tuples) if c.contribution > 0]
    assert positive == ["phi3"]


def test_weight_sums(omega2, omega3):
    assert sum(omega2[0].weights) == 0
    w = omega3[0].weights
    assert sum(x for x in w if x < 0) == -26 and sum(w) == 0


def test_table1(omega3):
    om, tuples, f = omega3
    assert tuples == OMEGA_K_TUPLES and f == builtin_function("ksub2", 3)
    terms = [c for c in refutation_terms(om, f, tuples) if c.weight > 0]
    assert [c.name for c in terms] == [f"phi{i}" for i in range(1, 17)]
    assert [(c.output, c.contribution) for c in terms] == TABLE1
    assert refutation_value(om, f, tuples) == 1


def test_omega_k_larger_k():
    om, tuples, f = standard_wpol("omega_k", 4)
    assert "embedded" in om.note
    assert refutation_value(om, f, tuples) == 1
    with pytest.raises(WpolError):
        standard_wpol("omega_k", 2)


def test_equal_tuples_give_zero(omega2, omega3):
    rng = random.Random(3)
    for om, _, f in (omega2, omega3):
        for _ in range(5):
            x = tuple(rng.choice(f.domain) for _ in range(f.arity))
            assert refutation_value(om, f, [x] * om.arity) == 0


def test_tuple_outside_dom(omega2):
    om, tuples, f = omega2
    g = CostFunction(f.domain, f.arity, tuple(INF if x == OMEGA2_TUPLES[0] else f(x)
                                              for x in f.points()))
    with pytest.raises(WpolError):
        refutation_value(om, g, tuples)


def test_validate_finds_bisub3_violation(omega2):
    om, tuples, f = omega2
    res = validate_wpol(om, [f])
    assert res.weights_sum_zero and res.negatives_are_projections
    assert not res.inequality_holds and not res
    assert res.exhaustive and res.violation[0] == 0


def test_negative_weight_on_non_projection(omega2):
    om = omega2[0]
    support = tuple((op, -w) for op, w in om.support)
    bad = WeightedPolymorphism(om.arity, om.domain, support, "flipped")
    res = validate_wpol(bad, [])
    assert res.weights_sum_zero and not res.negatives_are_projections and not res


def test_validate_passes_on_representable(omega2):
    om = omega2[0]
    enc = standard_encoding("pair")
    rng = random.Random(8)
    fs = []
    while len(fs) < 3:
        net = random_network(rng, 2, 2, extra=1, density=0.5)
        if is_retractable(net, 2, enc):
            fs.append(eval_representation(net, 2, enc))
    res = validate_wpol(om, fs)
    assert res and res.exhaustive and res.tuples_checked == 3 * 9 ** 4


def test_representable_functions_never_refuted(omega2):
    om = omega2[0]
    enc = standard_encoding("pair")
    rng = random.Random(11)
    done = 0
    while done < 200:
        net = random_network(rng, 2, 2, extra=rng.randint(0, 1), density=0.5)
        if not is_retractable(net, 2, enc):
            continue
        f = eval_representation(net, 2, enc)
        for _ in range(10):
            tuples = [tuple(rng.choice(f.domain) for _ in range(2)) for _ in range(4)]
            assert refutation_value(om, f, tuples) <= 0
            done += 1


def test_refutations_agree_with_lp(omega2, omega3):
    for om, tuples, f in (omega2, omega3):
        assert refutation_value(om, f, tuples) > 0
        enc = standard_encoding("pair") if om.name == "omega2" else standard_encoding("unary", 3)
        assert not decide_representable(f, enc).feasible


def test_operation_json_roundtrip(omega2):
    om = omega2[0]
    for op, _ in om.support:
        assert OperationTable.from_json(op.to_json(), om.domain) == op
    assert WeightedPolymorphism.from_json(om.to_json()) == om
    assert WeightedPolymorphism.from_json(om.to_json(tables=False)) == om


def test_operation_table_checks():
    with pytest.raises(WpolError):
        OperationTable((0, 1), 2, np.array([0, 1, 1]))
    with pytest.raises(WpolError):
        OperationTable((0, 1), 1, np.array([0, 2]))
    op = OperationTable((0, 1), 2, np.array([0, 0, 0, 1]))  # min
    assert op.projection_index() is None and op(1, 1) == 1
    with pytest.raises(WpolError):
        apply_operation(op, [(0, 1)])


def test_certificate_roundtrip(omega2):
    om, tuples, f = omega2
    cert = certificate(om, f, tuples)
    assert cert["total"] == "1" and cert["refutes"]
    assert verify_certificate(cert)
    cert["contributions"][6]["contribution"] = "0"
    assert not verify_certificate(cert)


def test_parse_names():
    assert parse_wpol_name("omega2") == ("omega2", None)
    assert parse_wpol_name("omega_k:3") == parse_wpol_name("omega_k(3)") == ("omega_k", 3)
    with pytest.raises(WpolError):
        parse_wpol_name("omega7")
