import itertools

import pytest
from hypothesis import given, settings, strategies as st

from corpus import K3, P3
from semiring_dp import oracle
from semiring_dp.cds import (CdsStats, EdgeCreate, Oplus, Relabel, Vertex, bit, check_kexpr,
                             dom_edge, dom_relabel, eval_kexpr, format_edge_list, format_kexpr,
                             incremental_trace, labels_to_mask, make_signature, parse_kexpr,
                             sig_add, sig_edge, sig_relabel, signature_norm, solve_semiring_cds,
                             solve_semiring_ds, trace_tables, tribool_add, zero_signature)
from semiring_dp.errors import ParseError, UsageError
from semiring_dp.expr import ExprStore, FAIL, Universe, evaluate, materialize
from semiring_dp.generate import random_kexpr
from semiring_dp.measures import counting_measure


def count(expr):
    return evaluate(expr, counting_measure(expr.store.universe)).payload


def test_tribool_add_table():
    assert tribool_add(1, 1) == 2
    assert tribool_add(0, 2) == 2
    assert tribool_add(0, 0) == 0
    assert tribool_add(2, 2) == 2
    assert tribool_add(1, 0) == 1


def test_eval_kexpr_examples():
    g = eval_kexpr(Vertex(1, "a"))
    assert g.vertices == ["a"] and g.labels == {"a": 1} and not g.edges
    g = eval_kexpr(EdgeCreate(1, 2, Oplus(Vertex(1, "a"), Vertex(2, "b"))))
    assert g.edges == {frozenset("ab")}
    g = eval_kexpr(parse_kexpr(K3))
    assert g.edge_list() == [("a", "b"), ("a", "c"), ("b", "c")]
    with pytest.raises(ParseError):
        eval_kexpr(Oplus(Vertex(1, "a"), Vertex(2, "a")))


def test_sig_add():
    k = 2
    s1 = make_signature(k, {frozenset({1}): 1})
    assert sig_add(s1, s1)[labels_to_mask({1})] == 2
    assert sig_add(s1, zero_signature(k)) == s1
    s2 = make_signature(k, {frozenset({1}): 2})
    assert sig_add(s2, s1)[labels_to_mask({1})] == 2


def test_relabel_transfers():
    sig = make_signature(2, {frozenset({1}): 1, frozenset({2}): 1})
    out = sig_relabel(sig, 1, 2)
    assert out[labels_to_mask({2})] == 2 and out[labels_to_mask({1})] == 0
    assert dom_relabel(labels_to_mask({2}), 1, 2) == labels_to_mask({1})
    assert dom_relabel(labels_to_mask({1, 2}), 1, 2) == labels_to_mask({1, 2})


def test_relabel_example_matches_concrete_graph():
    e = Relabel(1, 2, Oplus(Vertex(1, "a"), Vertex(2, "b")))
    assert incremental_trace(e, {"a", "b"}, 2)[0] == oracle.brute_trace(eval_kexpr(e), {"a", "b"}, 2)[0]
    assert incremental_trace(e, {"a", "b"}, 2)[0][labels_to_mask({2})] == 2
    # dom_relabel({2},1,2) on a concrete graph: S = {b} in a(1)+b(2)+c(2) with edge b-c
    g_expr = Relabel(1, 2, EdgeCreate(2, 1, Oplus(Vertex(2, "b"), Vertex(1, "a"))))
    assert incremental_trace(g_expr, {"b"}, 2) == oracle.brute_trace(eval_kexpr(g_expr), {"b"}, 2)


def test_edge_transfers():
    sig = make_signature(2, {frozenset({1}): 1, frozenset({2}): 1})
    out = sig_edge(sig, 1, 2)
    assert out == make_signature(2, {frozenset({1, 2}): 1})
    assert dom_edge(sig, 0, 1, 2) == labels_to_mask({1, 2})
    z = zero_signature(2)
    assert sig_edge(z, 1, 2) == z and dom_edge(z, 1, 1, 2) == 1
    # only one side present: components unchanged, the other label becomes dominated
    one_side = make_signature(2, {frozenset({1}): 1})
    assert sig_edge(one_side, 1, 2) == one_side
    assert dom_edge(one_side, 0, 1, 2) == bit(2)


def test_edge_concrete_example():
    e = EdgeCreate(1, 2, Oplus(Vertex(1, "a"), Vertex(2, "b")))
    sig, D = incremental_trace(e, {"a", "b"}, 2)
    assert sig == make_signature(2, {frozenset({1, 2}): 1}) and D == 3


def test_solve_cds_examples():
    assert count(solve_semiring_cds(parse_kexpr(K3))) == 7
    assert count(solve_semiring_cds(parse_kexpr(P3))) == 4
    assert count(solve_semiring_cds(Vertex(1, "u"))) == 1
    fs = materialize(solve_semiring_cds(parse_kexpr(P3)))
    chosen = {frozenset(v for v in f if f[v]) for f in fs.as_dicts()}
    assert chosen == {frozenset("b"), frozenset("ab"), frozenset("bc"), frozenset("abc")}


def test_solve_ds_examples():
    assert count(solve_semiring_ds(parse_kexpr(K3))) == 7
    assert count(solve_semiring_ds(parse_kexpr(P3))) == 5
    assert count(solve_semiring_ds(Vertex(1, "u"))) == 1


def test_edgeless_two_vertices():
    e = Oplus(Vertex(1, "a"), Vertex(1, "b"))
    assert count(solve_semiring_cds(e)) == 0
    assert solve_semiring_cds(e).is_empty
    assert count(solve_semiring_ds(e)) == 1


def test_k_limit():
    e = EdgeCreate(4, 5, Oplus(Vertex(4, "a"), Vertex(5, "b")))
    with pytest.raises(UsageError):
        solve_semiring_cds(e)
    assert count(solve_semiring_cds(e, max_k=5)) == 3


def test_explicit_k_larger_than_used():
    e = parse_kexpr(P3)
    assert count(solve_semiring_cds(e, k=3)) == 4
    with pytest.raises(UsageError):
        check_kexpr(e, 1)


def test_output_is_deterministic():
    from semiring_dp.expr import dumps
    e = random_kexpr(3, 7, 11)
    assert dumps(solve_semiring_cds(e)) == dumps(solve_semiring_cds(e))


def test_norm_one_iff_connected_nonempty():
    for seed in range(20):
        e = random_kexpr(2 + seed % 2, 6, seed)
        g = eval_kexpr(e)
        adj = oracle._adjacency(g)
        for r in range(len(g.vertices) + 1):
            for S in itertools.combinations(g.vertices, r):
                sig, _ = oracle.brute_trace(g, S, 3)
                assert (signature_norm(sig) == 1) == oracle.is_connected(S, adj)


@pytest.mark.parametrize("connected", [True, False])
@pytest.mark.parametrize("seed", range(12))
def test_buckets_partition_candidates(seed, connected):
    e = random_kexpr(1 + seed % 3, 1 + seed % 6, seed)
    k = max(1, check_kexpr(e))
    store = ExprStore(Universe([v for v in eval_kexpr(e).vertices], (0, 1)))
    seen = []

    def hook(node, table):
        g = eval_kexpr(node)
        total = set()
        for key, expr in table.items():
            fs = materialize(expr)
            assert fs is not FAIL
            assert set(fs.domain) == set(g.vertices)
            for f in fs.members:
                S = {v for v, bit_ in zip(fs.domain, f) if bit_}
                assert oracle.brute_trace(g, S, k, connected=connected) == key
                assert f not in total
                total.add(f)
        assert len(total) == 2 ** len(g.vertices)
        seen.append(node)

    trace_tables(e, store, k, connected=connected, on_node=hook)
    assert len(seen) > 0


def test_pair_counter_recorded():
    stats = CdsStats()
    solve_semiring_cds(parse_kexpr(K3), stats=stats)
    assert stats.k == 2 and len(stats.oplus_pairs) == 2
    assert all(0 < p <= stats.pair_bound for p in stats.oplus_pairs)


def test_kexpr_text_round_trip_and_errors():
    e = random_kexpr(3, 8, 5)
    assert parse_kexpr(format_kexpr(e)) == e
    with pytest.raises(ParseError) as exc:
        parse_kexpr("(oplus (vertex 1 a)\n (vertex 2 b)")
    assert "line 1" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_kexpr("(oplus (vertex 1 a)\n  (vertex x b))")
    assert "line 2, column 11" in str(exc.value)
    with pytest.raises(ParseError):
        parse_kexpr("(relabel 1 1 (vertex 1 a))")
    with pytest.raises(ParseError):
        parse_kexpr("(vertex 1 a) (vertex 1 b)")
    with pytest.raises(UsageError):
        parse_kexpr("(vertex 0 a)")


def test_edge_list_export():
    g = eval_kexpr(parse_kexpr(P3))
    assert format_edge_list(g) == "3 2\n1 2\n1 3\n"


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 7), st.integers(0, 10**6))
def test_random_kexpr_against_oracle(k, n, seed):
    e = random_kexpr(k, n, seed)
    g = eval_kexpr(e)
    assert count(solve_semiring_cds(e)) == len(oracle.enumerate_cds(g))
    assert count(solve_semiring_ds(e)) == len(oracle.enumerate_ds(g))
