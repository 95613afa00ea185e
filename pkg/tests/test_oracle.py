import pytest

from semiring_dp import oracle
from semiring_dp.algebra import INF, NAT, TROP, Value
from semiring_dp.cds import LabeledGraph, parse_kexpr
from semiring_dp.csp import CspInstance, SumProductInstance
from semiring_dp.errors import BudgetError, UsageError
from semiring_dp.expr import FunctionSet, Universe
from semiring_dp.measures import cost_measure, counting_measure

from corpus import K3, P3


def graph(names, edges, labels=None):
    return LabeledGraph(list(names), {frozenset(e) for e in edges}, labels or {v: 1 for v in names})


def sets(fs):
    return {frozenset(v for v, b in zip(fs.domain, f) if b) for f in fs.members}


def test_enumerate_k3_and_p3():
    k3 = graph("abc", ["ab", "bc", "ac"])
    assert len(oracle.enumerate_cds(k3)) == 7
    assert len(oracle.enumerate_ds(k3)) == 7
    p3 = graph("abc", ["ab", "bc"])
    assert sets(oracle.enumerate_cds(p3)) == {frozenset(s) for s in ("b", "ab", "bc", "abc")}
    assert len(oracle.enumerate_ds(p3)) == 5


def test_edgeless_pair():
    g = graph("ab", [])
    assert len(oracle.enumerate_cds(g)) == 0
    assert sets(oracle.enumerate_ds(g)) == {frozenset("ab")}


def test_empty_graph_rejected():
    with pytest.raises(UsageError):
        oracle.enumerate_cds(graph("", []))


def test_kexpr_oracle_on_strings():
    assert len(oracle.kexpr_oracle(parse_kexpr(K3))) == 7
    assert len(oracle.kexpr_oracle(parse_kexpr(P3), connected=False)) == 5


def test_enumerate_csp():
    none = CspInstance("x", [0, 1], [(("x",), [])])
    assert len(oracle.enumerate_csp(none)) == 0
    free = CspInstance("xy", [0, 1], [])
    assert len(oracle.enumerate_csp(free)) == 4
    neq = CspInstance("xy", [0, 1], [(("x", "y"), [(0, 1), (1, 0)])])
    assert oracle.enumerate_csp(neq).as_dicts() == [{"x": 0, "y": 1}, {"x": 1, "y": 0}]


def test_measure_directly():
    u = Universe("xy", (0, 1))
    empty = FunctionSet(("x", "y"), frozenset())
    assert oracle.measure_directly(empty, counting_measure(u)) == Value(NAT, 0)
    full = FunctionSet(("x", "y"), frozenset([(0, 0), (1, 1)]))
    assert oracle.measure_directly(full, counting_measure(u)).payload == 2
    w = cost_measure(u, lambda s, t: {"x": 2, "y": 3}[s] * t)
    assert oracle.measure_directly(full, w) == Value(TROP, 0)


def test_argmin_scan():
    u = Universe("xy", (0, 1))
    w = cost_measure(u, lambda s, t: int((s, t) in {("x", 0), ("y", 1)}))
    fs = FunctionSet(("x", "y"), frozenset([(0, 0), (1, 1), (1, 0), (0, 1)]))
    best, win = oracle.argmin_scan(fs, w)
    assert best == 0 and win.members == {(1, 0)}
    best, win = oracle.argmin_scan(FunctionSet(("x", "y"), frozenset()), w)
    assert best == INF and len(win) == 0
    with pytest.raises(UsageError):
        oracle.argmin_scan(fs, counting_measure(u))


def test_brute_sum_product():
    sp = SumProductInstance("xy", [0, 1], NAT, [(("x", "y"), {(a, b): a + b for a in (0, 1) for b in (0, 1)})])
    assert oracle.brute_sum_product(sp) == Value(NAT, 4)
    empty = SumProductInstance("xy", [0, 1, 2], TROP, [])
    assert oracle.brute_sum_product(empty) == Value(TROP, 0)


def test_budgets(monkeypatch):
    g = graph("abcdef", ["ab"])
    with pytest.raises(BudgetError):
        oracle.enumerate_ds(g, oracle.EnumerationBudget(max_candidates=10))
    with pytest.raises(BudgetError):
        oracle.enumerate_csp(CspInstance("xyz", [0, 1], []), oracle.EnumerationBudget(max_solutions=3))
    monkeypatch.setenv("SEMIRING_DP_MAX_CANDIDATES", "5")
    assert oracle.EnumerationBudget.from_env().max_candidates == 5
    with pytest.raises(UsageError):
        oracle.EnumerationBudget(max_candidates=0)


def test_brute_trace_p3():
    g = graph("abc", ["ab", "bc"], {"a": 1, "b": 2, "c": 1})
    sig, D = oracle.brute_trace(g, {"a", "c"}, 2)
    # two separate components with label set {1}
    assert sig[0b01] == 2 and D == 0b11
    assert oracle.brute_trace(g, {"a"}, 2, connected=False) == (0b01, 0b10)
