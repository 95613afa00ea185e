"""Clique-width dynamic programming for (connected) dominating sets.

Labels ``1..k`` are encoded as bits ``0..k-1`` of an int, so a label set is a
bitmask. A signature is a tuple of length ``2**k`` of tribools ``0, 1, 2``
(2 reads "at least two"), indexed by label-set bitmask: entry ``C`` counts
the connected components of ``G[S]`` whose label set is exactly ``C``.
A trace is ``(signature, domination mask)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .errors import ParseError, UsageError
from .expr import Expr, ExprStore, Universe
from .sexpr import SNode, parse_sexpr

MAX_K = 4


# -- k-expressions ---------------------------------------------------------


@dataclass(frozen=True)
class Vertex:
    label: int
    name: str


@dataclass(frozen=True)
class Oplus:
    left: KExpr
    right: KExpr


@dataclass(frozen=True)
class Relabel:
    i: int
    j: int
    child: KExpr


@dataclass(frozen=True)
class EdgeCreate:
    i: int
    j: int
    child: KExpr


KExpr = Union[Vertex, Oplus, Relabel, EdgeCreate]


def _nodes_postorder(e: KExpr):
    out = []
    stack = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done or isinstance(node, Vertex):
            out.append(node)
            continue
        stack.append((node, True))
        if isinstance(node, Oplus):
            stack.append((node.right, False))
            stack.append((node.left, False))
        else:
            stack.append((node.child, False))
    return out


def kexpr_width(e: KExpr) -> int:
    """Largest label mentioned anywhere in ``e``."""
    k = 0
    for n in _nodes_postorder(e):
        if isinstance(n, Vertex):
            k = max(k, n.label)
        elif not isinstance(n, Oplus):
            k = max(k, n.i, n.j)
    return k


def vertex_names(e: KExpr) -> list[str]:
    return [n.name for n in _nodes_postorder(e) if isinstance(n, Vertex)]


def check_kexpr(e: KExpr, k: int | None = None) -> int:
    """Validate labels, ``i != j`` and distinct vertex names; return ``k``."""
    width = kexpr_width(e)
    k = width if k is None else k
    if width > k:
        raise UsageError(f"label {width} exceeds k={k}")
    names = set()
    for n in _nodes_postorder(e):
        if isinstance(n, Vertex):
            if n.label < 1:
                raise UsageError(f"label {n.label} must be >= 1")
            if n.name in names:
                raise ParseError(f"duplicate vertex name {n.name!r}")
            names.add(n.name)
        elif not isinstance(n, Oplus):
            if n.i == n.j or min(n.i, n.j) < 1:
                raise UsageError(f"bad label pair ({n.i}, {n.j})")
    return k


@dataclass
class LabeledGraph:
    vertices: list = field(default_factory=list)
    edges: set = field(default_factory=set)
    labels: dict = field(default_factory=dict)

    def neighbors(self, v):
        return {w for e in self.edges if v in e for w in e if w != v}

    def edge_list(self) -> list[tuple]:
        pos = {v: i for i, v in enumerate(self.vertices)}
        return sorted((tuple(sorted(e, key=pos.__getitem__)) for e in self.edges),
                      key=lambda p: (pos[p[0]], pos[p[1]]))


def eval_kexpr(e: KExpr) -> LabeledGraph:
    """The labeled graph built by ``e``."""
    check_kexpr(e)
    graphs = {}
    for n in _nodes_postorder(e):
        if isinstance(n, Vertex):
            g = LabeledGraph([n.name], set(), {n.name: n.label})
        elif isinstance(n, Oplus):
            a, b = graphs.pop(id(n.left)), graphs.pop(id(n.right))
            g = LabeledGraph(a.vertices + b.vertices, a.edges | b.edges, {**a.labels, **b.labels})
        elif isinstance(n, Relabel):
            g = graphs.pop(id(n.child))
            g.labels = {v: (n.j if l == n.i else l) for v, l in g.labels.items()}
        else:
            g = graphs.pop(id(n.child))
            I = [v for v in g.vertices if g.labels[v] == n.i]
            J = [v for v in g.vertices if g.labels[v] == n.j]
            g.edges |= {frozenset((u, v)) for u in I for v in J}
        graphs[id(n)] = g
    return graphs[id(e)]


def format_edge_list(g: LabeledGraph) -> str:
    """``n m`` header then ``u v`` lines, vertices numbered 1..n in order."""
    pos = {v: i + 1 for i, v in enumerate(g.vertices)}
    edges = g.edge_list()
    lines = [f"{len(g.vertices)} {len(edges)}"]
    lines += [f"{pos[u]} {pos[v]}" for u, v in edges]
    return "\n".join(lines) + "\n"


def parse_kexpr(text: str) -> KExpr:
    """``(vertex i name) | (oplus E E) | (relabel i j E) | (edge i j E)``."""

    def build(node: SNode) -> KExpr:
        if isinstance(node.value, str) or not node.value:
            node.fail("expected a parenthesized k-expression")
        op = node.value[0].atom()
        args = node.value[1:]
        if op == "vertex":
            node.expect_len(3)
            return Vertex(args[0].int(), args[1].atom())
        if op == "oplus":
            node.expect_len(3)
            return Oplus(build(args[0]), build(args[1]))
        if op in ("relabel", "edge"):
            node.expect_len(4)
            i, j = args[0].int(), args[1].int()
            if i == j:
                node.fail(f"{op} needs two distinct labels")
            cls = Relabel if op == "relabel" else EdgeCreate
            return cls(i, j, build(args[2]))
        node.value[0].fail(f"unknown k-expression operator {op!r}")

    e = build(parse_sexpr(text))
    check_kexpr(e)
    return e


def format_kexpr(e: KExpr) -> str:
    parts = {}
    for n in _nodes_postorder(e):
        if isinstance(n, Vertex):
            s = f"(vertex {n.label} {n.name})"
        elif isinstance(n, Oplus):
            s = f"(oplus {parts.pop(id(n.left))} {parts.pop(id(n.right))})"
        elif isinstance(n, Relabel):
            s = f"(relabel {n.i} {n.j} {parts.pop(id(n.child))})"
        else:
            s = f"(edge {n.i} {n.j} {parts.pop(id(n.child))})"
        parts[id(n)] = s
    return parts[id(e)]


# -- 3-bar arithmetic and transfer functions ---------------------------------


def tribool_add(a: int, b: int) -> int:
    """Addition in {0, 1, 2-bar}: saturates at 2."""
    s = a + b
    return s if s < 2 else 2


def bit(label: int) -> int:
    return 1 << (label - 1)


def labels_to_mask(labels) -> int:
    m = 0
    for l in labels:
        m |= bit(l)
    return m


def mask_to_labels(mask: int) -> frozenset:
    return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def zero_signature(k: int) -> tuple:
    return (0,) * (1 << k)


def make_signature(k: int, entries: dict) -> tuple:
    """Signature from ``{label set: tribool}``; unspecified sets map to 0."""
    sig = [0] * (1 << k)
    for labels, v in entries.items():
        sig[labels_to_mask(labels)] = v
    return tuple(sig)


def signature_norm(sig) -> int:
    """Number of components, in 3-bar."""
    n = 0
    for v in sig:
        n = tribool_add(n, v)
    return n


def sig_add(s1, s2) -> tuple:
    return tuple(tribool_add(a, b) for a, b in zip(s1, s2))


def relabel_set(C: int, i: int, j: int) -> int:
    bi = bit(i)
    return (C & ~bi) | bit(j) if C & bi else C


def sig_relabel(sig, i: int, j: int) -> tuple:
    out = [0] * len(sig)
    for C, v in enumerate(sig):
        if v:
            C2 = relabel_set(C, i, j)
            out[C2] = tribool_add(out[C2], v)
    return tuple(out)


def dom_relabel(D: int, i: int, j: int) -> int:
    pair = bit(i) | bit(j)
    if D & pair == pair:
        return D
    return (D | bit(i)) & ~bit(j)


def merged_component(sig, i: int, j: int) -> int:
    """Union of the label sets of the components meeting label i or j."""
    pair = bit(i) | bit(j)
    c0 = 0
    for C, v in enumerate(sig):
        if v and C & pair:
            c0 |= C
    return c0


def sig_edge(sig, i: int, j: int) -> tuple:
    pair = bit(i) | bit(j)
    c0 = merged_component(sig, i, j)
    if c0 & pair != pair:
        return tuple(sig)
    out = [v if not C & pair else 0 for C, v in enumerate(sig)]
    out[c0] = 1
    return tuple(out)


def dom_edge(sig, D: int, i: int, j: int) -> int:
    hit = merged_component(sig, i, j)
    if hit & bit(j):
        D |= bit(i)
    if hit & bit(i):
        D |= bit(j)
    return D


# -- Algorithm: trace tables -------------------------------------------------


@dataclass
class CdsStats:
    k: int = 0
    oplus_pairs: list = field(default_factory=list)
    table_sizes: list = field(default_factory=list)

    @property
    def pair_bound(self) -> int:
        return (3 ** (2 ** self.k) * 2 ** self.k) ** 2


def _universe_for(e: KExpr) -> Universe:
    return Universe(vertex_names(e), (0, 1))


def _merge(store, table, key, e):
    prev = table.get(key)
    table[key] = e if prev is None else store.uplus(prev, e)


def trace_tables(e: KExpr, store: ExprStore, k: int, *, connected: bool = True,
                 stats: CdsStats | None = None,
                 on_node: Callable | None = None) -> dict:
    """Map every reachable trace of the whole graph to an expression of the
    indicator functions of the vertex subsets having that trace.

    With ``connected=False`` the trace is ``(label set of S, domination)``
    instead, which is all the plain dominating-set problem needs.
    ``on_node(node, table)`` is called after each k-expression node.
    """
    full = (1 << k) - 1
    zero_sig = zero_signature(k)
    tables = {}
    for n in _nodes_postorder(e):
        if isinstance(n, Vertex):
            bi = bit(n.label)
            if connected:
                picked = tuple(1 if C == bi else 0 for C in range(1 << k))
                skipped = zero_sig
            else:
                picked, skipped = bi, 0
            # picked before skipped keeps the sorted-by-trace convention stable
            t = {(picked, full): store.leaf(n.name, 1),
                 (skipped, full & ~bi): store.leaf(n.name, 0)}
        elif isinstance(n, Oplus):
            t1, t2 = tables.pop(id(n.left)), tables.pop(id(n.right))
            t = {}
            pairs = 0
            for (s1, d1) in sorted(t1):
                e1 = t1[s1, d1]
                for (s2, d2) in sorted(t2):
                    pairs += 1
                    key = (sig_add(s1, s2) if connected else s1 | s2, d1 & d2)
                    _merge(store, t, key, store.join(e1, t2[s2, d2]))
            if stats is not None:
                stats.oplus_pairs.append(pairs)
        elif isinstance(n, Relabel):
            child = tables.pop(id(n.child))
            t = {}
            for (s, d) in sorted(child):
                s2 = sig_relabel(s, n.i, n.j) if connected else relabel_set(s, n.i, n.j)
                _merge(store, t, (s2, dom_relabel(d, n.i, n.j)), child[s, d])
        else:
            child = tables.pop(id(n.child))
            t = {}
            for (s, d) in sorted(child):
                if connected:
                    key = (sig_edge(s, n.i, n.j), dom_edge(s, d, n.i, n.j))
                else:
                    d2 = d
                    if s & bit(n.i):
                        d2 |= bit(n.j)
                    if s & bit(n.j):
                        d2 |= bit(n.i)
                    key = (s, d2)
                _merge(store, t, key, child[s, d])
        if stats is not None:
            stats.table_sizes.append(len(t))
        if on_node is not None:
            on_node(n, t)
        tables[id(n)] = t
    return tables[id(e)]


def _prepare(e, k, max_k, store):
    k = check_kexpr(e, k)
    if k > max_k:
        raise UsageError(f"k={k} exceeds the configured limit {max_k}")
    if store is None:
        store = ExprStore(_universe_for(e))
    return k, store


def solve_semiring_cds(e: KExpr, k: int | None = None, *, store: ExprStore | None = None,
                       max_k: int = MAX_K, stats: CdsStats | None = None,
                       on_node: Callable | None = None) -> Expr:
    """Join/union expression of the indicator functions of all connected
    dominating sets of the graph built by ``e`` (codomain ``(0, 1)``)."""
    k, store = _prepare(e, k, max_k, store)
    if stats is not None:
        stats.k = k
    table = trace_tables(e, store, k, stats=stats, on_node=on_node)
    full = (1 << k) - 1
    return store.uplus_all([table[key] for key in sorted(table)
                            if key[1] == full and signature_norm(key[0]) == 1])


def solve_semiring_ds(e: KExpr, k: int | None = None, *, store: ExprStore | None = None,
                      max_k: int = MAX_K, stats: CdsStats | None = None,
                      on_node: Callable | None = None) -> Expr:
    """Join/union expression of the indicator functions of all dominating sets."""
    k, store = _prepare(e, k, max_k, store)
    if stats is not None:
        stats.k = k
    table = trace_tables(e, store, k, connected=False, stats=stats, on_node=on_node)
    full = (1 << k) - 1
    return store.uplus_all([table[key] for key in sorted(table) if key[1] == full])


def incremental_trace(e: KExpr, S, k: int, *, connected: bool = True, all_nodes: bool = False):
    """Trace of ``S`` via the transfer functions, restricted to each subexpression.

    Returns the root's trace, or with ``all_nodes`` a dict ``id(node) -> trace``.
    """
    S = set(S)
    full = (1 << k) - 1
    traces = {}
    for n in _nodes_postorder(e):
        if isinstance(n, Vertex):
            bi = bit(n.label)
            if n.name in S:
                s = tuple(1 if C == bi else 0 for C in range(1 << k)) if connected else bi
                tr = (s, full)
            else:
                tr = (zero_signature(k) if connected else 0, full & ~bi)
        elif isinstance(n, Oplus):
            (s1, d1), (s2, d2) = traces[id(n.left)], traces[id(n.right)]
            tr = (sig_add(s1, s2) if connected else s1 | s2, d1 & d2)
        elif isinstance(n, Relabel):
            s, d = traces[id(n.child)]
            s2 = sig_relabel(s, n.i, n.j) if connected else relabel_set(s, n.i, n.j)
            tr = (s2, dom_relabel(d, n.i, n.j))
        else:
            s, d = traces[id(n.child)]
            if connected:
                tr = (sig_edge(s, n.i, n.j), dom_edge(s, d, n.i, n.j))
            else:
                if s & bit(n.i):
                    d |= bit(n.j)
                if s & bit(n.j):
                    d |= bit(n.i)
                tr = (s, d)
        traces[id(n)] = tr
    return traces if all_nodes else traces[id(e)]
