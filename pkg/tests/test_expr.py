import random

import pytest
from hypothesis import given, settings, strategies as st

from semiring_dp.algebra import NAT
from semiring_dp.errors import BudgetError, LegalityError, ParseError, UsageError
from semiring_dp.expr import (FAIL, EvalStats, ExprStore, Universe, all_functions_expr, dumps,
                              evaluate, loads, make_empty, make_join, make_leaf, make_uplus,
                              make_unit, materialize)
from semiring_dp.measures import MeasureMatrix, counting_measure, decision_measure
from semiring_dp.oracle import measure_directly


@pytest.fixture
def store():
    return ExprStore(Universe(["a", "b", "c"], [1, 2]))


def test_constructors(store):
    assert make_leaf(store, "a", 1).domain == {"a"}
    assert not make_unit(store).is_empty
    assert make_empty(store).tree_size == 1
    assert make_empty(store).is_empty


def test_uplus_rules(store):
    a1, a2, b1 = store.leaf("a", 1), store.leaf("a", 2), store.leaf("b", 1)
    assert not make_uplus(a1, a2).is_empty
    with pytest.raises(LegalityError):
        make_uplus(a1, b1)
    assert make_uplus(make_empty(store), b1).domain == {"b"}
    assert make_uplus(b1, make_empty(store)).domain == {"b"}


def test_join_rules(store):
    a1, a2, b2 = store.leaf("a", 1), store.leaf("a", 2), store.leaf("b", 2)
    assert make_join(a1, b2).domain == {"a", "b"}
    with pytest.raises(LegalityError):
        make_join(a1, a2)
    e = make_join(a1, b2)
    assert materialize(make_join(e, store.unit())) == materialize(e)
    assert make_join(a1, store.empty()).is_empty


def test_hash_consing(store):
    x = store.join(store.leaf("a", 1), store.leaf("b", 2))
    y = store.join(store.leaf("a", 1), store.leaf("b", 2))
    assert x is y
    n = len(store)
    store.uplus(x, x)
    store.uplus(x, x)
    assert len(store) == n + 1


def test_materialize_examples(store):
    a1 = store.leaf("a", 1)
    assert materialize(store.uplus(a1, a1)) is FAIL
    fs = materialize(store.join(a1, store.leaf("b", 2)))
    assert fs.as_dicts() == [{"a": 1, "b": 2}]
    assert len(materialize(all_functions_expr(2))) == 4
    # FAIL propagates upward
    assert materialize(store.join(store.uplus(a1, a1), store.leaf("c", 1))) is FAIL


def test_materialize_budget():
    with pytest.raises(BudgetError):
        materialize(all_functions_expr(4), member_budget=100)
    with pytest.raises(BudgetError):
        materialize(all_functions_expr(4), node_budget=5)


def test_evaluate_examples(store):
    u = Universe(range(1, 4), range(1, 4))
    e = all_functions_expr(3)
    assert evaluate(e, counting_measure(u)).payload == 27
    m = counting_measure(store.universe)
    assert evaluate(store.empty(), m).payload == 0
    assert evaluate(store.unit(), m).payload == 1
    assert evaluate(store.empty(), decision_measure(store.universe)).payload is False


def test_evaluate_universe_mismatch(store):
    with pytest.raises(UsageError):
        evaluate(store.unit(), counting_measure(Universe(["z"], [1])))


def test_all_functions_shape():
    e1 = all_functions_expr(1)
    assert e1.tree_size == 1 and e1.kind == "leaf"
    assert all_functions_expr(3).tree_size == 9
    with pytest.raises(UsageError):
        all_functions_expr(0)


def test_operation_counter_is_internal_nodes():
    e = all_functions_expr(5)
    stats = EvalStats()
    evaluate(e, counting_measure(e.store.universe), stats)
    internal = sum(1 for i in e.store.reachable(e) if e.store._kind[i] >= 3)
    assert stats.operations == internal <= stats.nodes - 1 <= e.tree_size * 2


def test_shared_dag_tree_size_is_exact():
    # each level reuses the previous one twice: the unfolded tree doubles, the DAG grows by 5
    st_ = ExprStore(Universe([f"s{i}" for i in range(70)], [0, 1]))
    x = st_.uplus(st_.leaf("s0", 0), st_.leaf("s0", 1))
    size = 2
    for i in range(1, 70):
        x = st_.uplus(st_.join(x, st_.leaf(f"s{i}", 0)), st_.join(x, st_.leaf(f"s{i}", 1)))
        size = 2 * size + 2
    assert x.tree_size == size > 2**70
    assert len(st_.reachable(x)) < 400
    assert evaluate(x, counting_measure(st_.universe)).payload == 2**70


def test_dumps_loads_round_trip(store):
    a1, a2 = store.leaf("a", 1), store.leaf("a", 2)
    shared = store.uplus(a1, a2)
    e = store.uplus(store.join(shared, store.leaf("b", 1)), store.join(shared, store.leaf("b", 2)))
    text = dumps(e)
    assert "(share 0" in text and "(ref 0)" in text
    assert loads(text, store) is e
    other = ExprStore(store.universe)
    e2 = loads(text, other)
    assert dumps(e2) == text
    assert loads("empty", store) is store.empty()


def test_loads_errors(store):
    with pytest.raises(ParseError) as exc:
        loads("(leaf a 1", store)
    assert "line 1" in str(exc.value)
    with pytest.raises(ParseError):
        loads("(leaf zz 1)", store)
    with pytest.raises(ParseError):
        loads("(ref 3)", store)
    with pytest.raises(ParseError):
        loads("(frob a 1)", store)


def test_deep_chain_dumps_without_recursion():
    n = 3000
    st_ = ExprStore(Universe(range(n), [0]))
    acc = st_.unit()
    for i in range(n):
        acc = st_.join(acc, st_.leaf(i, 0))
    assert dumps(acc).count("leaf") == n


def _random_legal_expr(store, rng, dom, depth):
    """Random legal expression over exactly the domain ``dom``."""
    if not dom:
        return store.unit() if rng.random() < 0.8 else store.empty()
    if len(dom) == 1 and (depth == 0 or rng.random() < 0.4):
        s = dom[0]
        return store.leaf(s, rng.choice(store.universe.T))
    if rng.random() < 0.5 and len(dom) > 1:
        cut = rng.randint(1, len(dom) - 1)
        return store.join(_random_legal_expr(store, rng, dom[:cut], depth - 1),
                          _random_legal_expr(store, rng, dom[cut:], depth - 1))
    # uplus of two expressions that differ on the first domain element keeps disjointness
    s = dom[0]
    t1, t2 = rng.sample(list(store.universe.T), 2)
    rest = dom[1:]
    left = store.join(store.leaf(s, t1), _random_legal_expr(store, rng, rest, depth - 1))
    right = store.join(store.leaf(s, t2), _random_legal_expr(store, rng, rest, depth - 1))
    return store.uplus(left, right)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_cache_exactness_and_evaluation(seed):
    rng = random.Random(seed)
    u = Universe(["a", "b", "c", "d"], [0, 1, 2])
    store = ExprStore(u)
    dom = rng.sample(u.S, rng.randint(0, 4))
    e = _random_legal_expr(store, rng, dom, 4)
    fs = materialize(e)
    assert fs is not FAIL
    assert e.is_empty == (len(fs) == 0)
    if len(fs):
        assert set(fs.domain) == e.domain
    entries = [[rng.randint(0, 3) for _ in u.T] for _ in u.S]
    m = MeasureMatrix(u, NAT, entries)
    assert evaluate(e, m) == measure_directly(fs, m)
