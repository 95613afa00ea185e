import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import K3, P3, random_function_set, random_measures
from semiring_dp.algebra import BOOL, DELTANAT, INF, NAT, TROP, prod
from semiring_dp.cds import parse_kexpr, solve_semiring_cds
from semiring_dp.errors import CostOverflowError, ParseError, UsageError
from semiring_dp.expr import ExprStore, Universe, all_functions_expr, evaluate, materialize
from semiring_dp.measures import (MeasureMatrix, count_min_cost, cost_measure, counting_measure,
                                  decision_measure, delta_measure, format_matrix, list_measure,
                                  min_cost_count_measure, parse_matrix, product_measure,
                                  sat_weight_families)
from semiring_dp.oracle import argmin_scan, measure_directly


def cds(text):
    e = solve_semiring_cds(parse_kexpr(text))
    return e, e.store.universe


def unit_costs(u):
    return cost_measure(u, lambda s, t: t)


def test_decision_measure():
    st_ = ExprStore(Universe(["a"], [1]))
    assert evaluate(st_.empty(), decision_measure(st_.universe)).payload is False
    assert evaluate(st_.leaf("a", 1), decision_measure(st_.universe)).payload is True
    e, u = cds(K3)
    assert evaluate(e, decision_measure(u)).payload is True


def test_counting_measure():
    e = all_functions_expr(3)
    assert evaluate(e, counting_measure(e.store.universe)).payload == 27
    e, u = cds(K3)
    assert evaluate(e, counting_measure(u)).payload == 7
    assert evaluate(e.store.unit(), counting_measure(u)).payload == 1


def test_list_measure():
    e, u = cds(P3)
    assert evaluate(e, list_measure(u, {})).payload is False
    full = {s: set(u.T) for s in u.S}
    assert evaluate(e, list_measure(u, full)) == evaluate(e, decision_measure(u))
    with pytest.raises(UsageError):
        list_measure(u, {"zz": {1}})


def test_cost_measure():
    e, u = cds(P3)
    assert evaluate(e, unit_costs(u)).payload == 1
    assert evaluate(e, cost_measure(u, lambda s, t: 0)).payload == 0
    assert evaluate(e, cost_measure(u, lambda s, t: INF if s == "b" else 0)).payload == INF
    with pytest.raises(UsageError):
        cost_measure(u, {("a", 0): 1})


def test_delta_measure():
    u = Universe(["a"], [0, 1])
    w = cost_measure(u, {("a", 0): 1, ("a", 1): INF})
    m = delta_measure(w, counting_measure(u))
    assert m.entries[0] == ((1, 1), (INF, 0))
    e, u = cds(P3)
    assert evaluate(e, delta_measure(unit_costs(u), counting_measure(u))).payload == (1, 1)
    with pytest.raises(UsageError):
        delta_measure(counting_measure(u), counting_measure(u))


def test_product_measure():
    e, u = cds(P3)
    dm = delta_measure(unit_costs(u), counting_measure(u))
    pm = product_measure(dm, counting_measure(u))
    assert pm.semiring == prod(DELTANAT, NAT)
    assert pm.entries[0][1] == ((1, 1), 1)
    assert evaluate(e, pm).payload == ((1, 1), 4)
    assert pm.semiring.zero == ((INF, 0), 0)


def test_count_min_cost():
    e, u = cds(P3)
    assert count_min_cost(e, unit_costs(u)) == (1, 1)
    e, u = cds(K3)
    assert count_min_cost(e, unit_costs(u)) == (1, 3)
    assert count_min_cost(e.store.empty(), unit_costs(u)) == (INF, 0)
    # every solution infinitely expensive: all of them are minimal
    assert count_min_cost(e, cost_measure(u, lambda s, t: INF)) == (INF, 7)


def test_sat_weight_families():
    t = sat_weight_families("min_card", ["x", "y", "z"])
    assert all(t[x, True] == 1 and t[x, False] == 0 for x in "xyz")
    t = sat_weight_families("min_lex", ["x1", "x2", "x3"], order=["x1", "x2", "x3"])
    assert t["x1", True] == 4 and t["x2", True] == 2 and t["x3", True] == 1
    t = sat_weight_families("min_weight", ["x", "y"], weights={"x": 0, "y": 0})
    u = Universe(["x", "y"], [False, True])
    st_ = ExprStore(u)
    e = st_.join_all([st_.uplus(st_.leaf(v, False), st_.leaf(v, True)) for v in "xy"])
    assert count_min_cost(e, cost_measure(u, t)) == (0, 4)
    with pytest.raises(CostOverflowError):
        sat_weight_families("min_lex", range(63), order=range(63))
    with pytest.raises(UsageError):
        sat_weight_families("min_weight", ["x"], weights={"x": -1})
    with pytest.raises(UsageError):
        sat_weight_families("max_sat", ["x"])


def test_min_lex_picks_lexicographically_smallest():
    xs = ["x1", "x2", "x3"]
    u = Universe(xs, [False, True])
    st_ = ExprStore(u)
    # solutions: at least one of x1, x2 true
    sols = [(a, b, c) for a in (False, True) for b in (False, True) for c in (False, True) if a or b]
    e = st_.uplus_all([st_.join_all([st_.leaf(x, v) for x, v in zip(xs, s)]) for s in sols])
    costs = cost_measure(u, sat_weight_families("min_lex", xs, order=xs))
    assert count_min_cost(e, costs) == (2, 1)


def test_matrix_immutable_and_validated():
    u = Universe(["a"], [0])
    m = counting_measure(u)
    with pytest.raises(AttributeError):
        m.semiring = BOOL
    with pytest.raises(UsageError):
        MeasureMatrix(u, NAT, [[-1]])
    with pytest.raises(UsageError):
        MeasureMatrix(u, NAT, [[1, 2]])


def test_matrix_file_round_trip():
    u = Universe(["a", "b"], [0, 1])
    m = delta_measure(cost_measure(u, lambda s, t: t * 3), counting_measure(u))
    text = format_matrix(m)
    assert parse_matrix(text, u) == m
    bare = parse_matrix(text)          # no universe: elements are kept as strings
    assert bare.universe.S == ("a", "b") and bare.universe.T == ("0", "1")
    assert bare.entries == m.entries and bare.semiring == m.semiring
    with pytest.raises(ParseError) as exc:
        parse_matrix("semiring: nat\na 0 1\na 0 2\n")
    assert "line 3" in str(exc.value)
    with pytest.raises(ParseError):
        parse_matrix("semiring: nat\na 0 1\n", Universe(["a"], [0, 1]))
    with pytest.raises(ParseError):
        parse_matrix("a 0 1\n")
    with pytest.raises(ParseError):
        parse_matrix("semiring: nat\na 0 x\n")
    filled = parse_matrix("a 1 5\n", Universe(["a"], [0, 1]), default_semiring=TROP, fill_missing=True)
    assert filled.entries == ((0, 5),)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32))
def test_count_min_cost_matches_scan(seed):
    rng = random.Random(seed)
    u = Universe(["a", "b", "c"], [0, 1, 2])
    fs = random_function_set(u.S, u.T, rng, 15)
    st_ = ExprStore(u)
    e = st_.uplus_all([st_.join_all([st_.leaf(s, t) for s, t in zip(fs.domain, f)])
                       for f in sorted(fs.members)])
    w = random_measures(u, seed)["cost"]
    best, winners = argmin_scan(fs, w)
    expected = (best, len(winners) if best != INF else len(fs))
    assert count_min_cost(e, w) == expected
    assert materialize(e).members == fs.members


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_measure_axioms_every_constructor(seed):
    rng = random.Random(seed)
    u = Universe(["a", "b"], [0, 1, 2])
    ms = random_measures(u, seed)
    ms["mincount"] = min_cost_count_measure(ms["cost"])
    fs = random_function_set(u.S, u.T, rng)
    members = sorted(fs.members)
    cut = rng.randint(0, len(members))
    parts = [type(fs)(fs.domain, frozenset(p)) for p in (members[:cut], members[cut:])]
    for m in ms.values():
        assert measure_directly(fs, m) == measure_directly(parts[0], m) + measure_directly(parts[1], m)
