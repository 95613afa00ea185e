"""Finite-domain CSPs over tree decompositions.

Assignments to a bag are tuples aligned with the bag's variables taken in
instance order, so ``f[i]`` is the value of ``bag_order(n)[i]``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .algebra import Semiring, Value, parse_semiring
from .cds import LabeledGraph
from .errors import LegalityError, ParseError, UsageError
from .expr import Expr, ExprStore, Universe

MAX_ARITY = 4


# -- instances -------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    scope: tuple
    relation: frozenset


@dataclass(frozen=True)
class ValuedConstraint:
    scope: tuple
    table: dict  # args tuple -> payload


def _check_scopes(variables, domain, scopes, max_arity):
    if len(set(variables)) != len(variables):
        raise UsageError("variables must be distinct")
    if not domain or len(set(domain)) != len(domain):
        raise UsageError("domain must be non-empty with distinct values")
    vs = set(variables)
    for scope in scopes:
        if not scope:
            raise UsageError("constraint scope must have arity >= 1")
        if len(scope) > max_arity:
            raise UsageError(f"arity {len(scope)} exceeds the limit {max_arity}")
        for x in scope:
            if x not in vs:
                raise UsageError(f"scope variable {x!r} is not a variable")


class CspInstance:
    def __init__(self, variables: Sequence, domain: Sequence, constraints=(),
                 max_arity: int = MAX_ARITY):
        self.variables = tuple(variables)
        self.domain = tuple(domain)
        cs = []
        for c in constraints:
            if not isinstance(c, Constraint):
                scope, rel = c
                c = Constraint(tuple(scope), frozenset(tuple(t) for t in rel))
            cs.append(c)
        self.constraints = tuple(cs)
        _check_scopes(self.variables, self.domain, [c.scope for c in cs], max_arity)
        dset = set(self.domain)
        for c in cs:
            for t in c.relation:
                if len(t) != len(c.scope):
                    raise UsageError(f"tuple {t!r} does not match scope {c.scope!r}")
                if not set(t) <= dset:
                    raise UsageError(f"tuple {t!r} uses values outside the domain")

    def satisfied_by(self, assignment: dict) -> bool:
        return all(tuple(assignment[x] for x in c.scope) in c.relation for c in self.constraints)

    def indicator_instance(self, semiring: Semiring | None = None) -> SumProductInstance:
        """The same constraints as 0/1 valuations, Boolean unless ``semiring`` is given."""
        from .algebra import BOOL
        A = semiring or BOOL
        cs = [ValuedConstraint(c.scope, {args: A.one if args in c.relation else A.zero
                                         for args in itertools.product(self.domain, repeat=len(c.scope))})
              for c in self.constraints]
        return SumProductInstance(self.variables, self.domain, A, cs)


class SumProductInstance:
    def __init__(self, variables: Sequence, domain: Sequence, semiring: Semiring, constraints=(),
                 max_arity: int = MAX_ARITY):
        self.variables = tuple(variables)
        self.domain = tuple(domain)
        self.semiring = semiring
        cs = []
        for c in constraints:
            if not isinstance(c, ValuedConstraint):
                scope, table = c
                c = ValuedConstraint(tuple(scope), dict(table))
            cs.append(c)
        self.constraints = tuple(cs)
        _check_scopes(self.variables, self.domain, [c.scope for c in cs], max_arity)
        for c in cs:
            for args in itertools.product(self.domain, repeat=len(c.scope)):
                if args not in c.table:
                    raise UsageError(f"valuation on {c.scope!r} has no value for {args!r}")
                if not semiring.contains(c.table[args]):
                    raise UsageError(f"{c.table[args]!r} is not an element of {semiring}")


def coloring_instance(graph: LabeledGraph, colors: Sequence) -> CspInstance:
    """Proper coloring: one binary ``!=`` constraint per edge."""
    neq = [(a, b) for a in colors for b in colors if a != b]
    return CspInstance(graph.vertices, colors, [(e, neq) for e in graph.edge_list()])


def h_coloring_instance(graph: LabeledGraph, h: LabeledGraph) -> CspInstance:
    """Homomorphisms from ``graph`` to ``h`` (edges of ``h`` used in both directions)."""
    rel = [p for e in h.edge_list() for p in (e, e[::-1])]
    rel += [(v, v) for v in h.vertices if frozenset((v,)) in h.edges]
    return CspInstance(graph.vertices, h.vertices, [(e, rel) for e in graph.edge_list()])


def gaifman(instance) -> LabeledGraph:
    g = LabeledGraph(list(instance.variables), set(), {})
    for c in instance.constraints:
        for x, y in itertools.combinations(c.scope, 2):
            if x != y:
                g.edges.add(frozenset((x, y)))
    return g


# -- tree decompositions ---------------------------------------------------


class TreeDecomposition:
    """Bags keyed by node id plus undirected tree edges; rooted at ``root``."""

    def __init__(self, bags: dict, edges=(), root=None):
        self.bags = {n: frozenset(b) for n, b in bags.items()}
        self.edges = [tuple(e) for e in edges]
        if not self.bags:
            raise UsageError("a tree decomposition needs at least one bag")
        self.root = min(self.bags, key=_id_key) if root is None else root

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def adjacency(self) -> dict:
        adj = {n: [] for n in self.bags}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for n in adj:
            adj[n].sort(key=_id_key)
        return adj

    def children(self) -> dict:
        """Child lists from the root; only meaningful for a valid tree."""
        adj = self.adjacency()
        kids = {n: [] for n in self.bags}
        seen = {self.root}
        stack = [self.root]
        while stack:
            n = stack.pop()
            for m in adj[n]:
                if m not in seen:
                    seen.add(m)
                    kids[n].append(m)
                    stack.append(m)
        return kids


def _id_key(x):
    return (0, x, "") if isinstance(x, int) else (1, 0, str(x))


@dataclass
class TdReport:
    ok: bool
    property: str | None = None
    witness: object = None
    width: int | None = None

    def __bool__(self):
        return self.ok


def validate_td(graph: LabeledGraph, td: TreeDecomposition) -> TdReport:
    """Check the tree shape then properties 1 (vertex coverage), 2 (edge
    coverage) and 3 (occurrences connected); report the first failure."""
    vs = set(graph.vertices)
    for a, b in td.edges:
        if a not in td.bags or b not in td.bags:
            return TdReport(False, "tree", (a, b))
    if td.root not in td.bags:
        return TdReport(False, "tree", td.root)
    if len(td.edges) != len(td.bags) - 1:
        return TdReport(False, "tree", f"{len(td.edges)} edges for {len(td.bags)} bags")
    adj = td.adjacency()
    seen = {td.root}
    stack = [td.root]
    while stack:
        for m in adj[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    if len(seen) != len(td.bags):
        return TdReport(False, "tree", sorted(set(td.bags) - seen, key=_id_key)[0])
    for n in sorted(td.bags, key=_id_key):
        extra = td.bags[n] - vs
        if extra:
            return TdReport(False, "vertices", (n, next(iter(extra))))
    covered = set().union(*td.bags.values())
    for v in graph.vertices:
        if v not in covered:
            return TdReport(False, "1", v)
    for a, b in graph.edge_list():
        if not any(a in bag and b in bag for bag in td.bags.values()):
            return TdReport(False, "2", (a, b))
    for v in graph.vertices:
        holders = [n for n in td.bags if v in td.bags[n]]
        start = holders[0]
        reach = {start}
        stack = [start]
        while stack:
            for m in adj[stack.pop()]:
                if m not in reach and v in td.bags[m]:
                    reach.add(m)
                    stack.append(m)
        if len(reach) != len(holders):
            return TdReport(False, "3", v)
    return TdReport(True, width=td.width)


class Width(int):
    """An int carrying a ``degenerate`` flag (set when every bag is empty)."""

    degenerate: bool

    def __new__(cls, value, degenerate=False):
        obj = super().__new__(cls, value)
        obj.degenerate = degenerate
        return obj


LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass
class NiceTreeDecomposition:
    """Nodes are numbered in creation order, which is a post-order; the root is last."""

    variables: tuple
    kind: list = field(default_factory=list)
    vertex: list = field(default_factory=list)
    children: list = field(default_factory=list)
    bag: list = field(default_factory=list)
    var_lambda: dict = field(default_factory=dict)
    constraint_lambda: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.kind)

    @property
    def root(self) -> int:
        return len(self.kind) - 1

    def _add(self, kind, vertex, children, bag):
        self.kind.append(kind)
        self.vertex.append(vertex)
        self.children.append(tuple(children))
        self.bag.append(frozenset(bag))
        return len(self.kind) - 1

    def bag_order(self, n: int) -> tuple:
        return tuple(v for v in self.variables if v in self.bag[n])

    def parent(self) -> list:
        par = [None] * len(self)
        for n, ch in enumerate(self.children):
            for c in ch:
                par[c] = n
        return par

    def subtree(self, n: int) -> list:
        out, stack = [], [n]
        while stack:
            m = stack.pop()
            out.append(m)
            stack.extend(self.children[m])
        return sorted(out)

    def descbag(self, n: int) -> frozenset:
        return frozenset().union(*(self.bag[m] for m in self.subtree(n)))

    def dom(self, n: int) -> frozenset:
        """Variables whose chosen Introduce node lies in the subtree of ``n``."""
        sub = set(self.subtree(n))
        return frozenset(v for v, m in self.var_lambda.items() if m in sub)

    def as_td(self) -> TreeDecomposition:
        edges = [(n, c) for n, ch in enumerate(self.children) for c in ch]
        return TreeDecomposition(dict(enumerate(self.bag)), edges, root=self.root)


def primal_width(ntd) -> Width:
    bags = ntd.bag if isinstance(ntd, NiceTreeDecomposition) else list(ntd.bags.values())
    w = max((len(b) for b in bags), default=0) - 1
    if w < 0:
        return Width(0, degenerate=True)
    return Width(w)


def check_nice(ntd: NiceTreeDecomposition) -> list[str]:
    """Problems with the nice-form invariants; empty when all hold."""
    probs = []
    if not len(ntd):
        return ["no nodes"]
    if ntd.bag[ntd.root]:
        probs.append("root bag is not empty")
    for n in range(len(ntd)):
        k, ch, b = ntd.kind[n], ntd.children[n], ntd.bag[n]
        if any(c >= n for c in ch):
            probs.append(f"node {n}: child numbered after parent")
        if k == LEAF:
            if ch or b:
                probs.append(f"node {n}: leaf must be childless with an empty bag")
        elif k in (INTRODUCE, FORGET):
            if len(ch) != 1:
                probs.append(f"node {n}: {k} needs one child")
                continue
            cb = ntd.bag[ch[0]]
            v = ntd.vertex[n]
            if k == INTRODUCE and not (v not in cb and b == cb | {v}):
                probs.append(f"node {n}: bad introduce of {v!r}")
            if k == FORGET and not (v in cb and b == cb - {v}):
                probs.append(f"node {n}: bad forget of {v!r}")
        elif k == JOIN:
            if len(ch) != 2 or any(ntd.bag[c] != b for c in ch):
                probs.append(f"node {n}: join needs two children with equal bags")
        else:
            probs.append(f"node {n}: unknown kind {k!r}")
    for v, m in ntd.var_lambda.items():
        if ntd.kind[m] != INTRODUCE or ntd.vertex[m] != v:
            probs.append(f"var_lambda({v!r}) is not an Introduce({v!r}) node")
    if set(ntd.var_lambda) != set(ntd.variables):
        probs.append("var_lambda is not total")
    return probs


def make_nice(graph: LabeledGraph, td: TreeDecomposition, constraints=None) -> NiceTreeDecomposition:
    """Nice form with empty leaves and root, binary joins, same width.

    ``constraints`` (anything with a ``scope``) gets ``constraint_lambda``.
    """
    report = validate_td(graph, td)
    if not report:
        raise LegalityError(f"invalid tree decomposition: property {report.property} "
                            f"fails at {report.witness!r}")
    order = {v: i for i, v in enumerate(graph.vertices)}
    ntd = NiceTreeDecomposition(tuple(graph.vertices))
    kids = td.children()

    def morph(node, have, want):
        for v in sorted(have - want, key=order.__getitem__, reverse=True):
            have = have - {v}
            node = ntd._add(FORGET, v, [node], have)
        for v in sorted(want - have, key=order.__getitem__):
            have = have | {v}
            node = ntd._add(INTRODUCE, v, [node], have)
        return node

    built = {}
    stack = [(td.root, False)]
    while stack:
        t, done = stack.pop()
        if not done:
            stack.append((t, True))
            stack.extend((c, False) for c in reversed(kids[t]))
            continue
        bag = td.bags[t]
        parts = []
        for c in kids[t]:
            parts.append(morph(built.pop(c), td.bags[c], bag))
        if not parts:
            parts.append(morph(ntd._add(LEAF, None, [], ()), frozenset(), bag))
        node = parts[0]
        for other in parts[1:]:
            node = ntd._add(JOIN, None, [node, other], bag)
        built[t] = node
    morph(built.pop(td.root), td.bags[td.root], frozenset())

    for n in range(len(ntd)):
        if ntd.kind[n] == INTRODUCE:
            ntd.var_lambda.setdefault(ntd.vertex[n], n)
    if constraints is not None:
        for ci, c in enumerate(constraints):
            scope = set(c.scope)
            for n in range(len(ntd)):
                if ntd.kind[n] == INTRODUCE and scope <= ntd.bag[n]:
                    ntd.constraint_lambda[ci] = n
                    break
            else:
                raise LegalityError(f"no bag covers the scope of constraint {ci}")
    return ntd


def elimination_td(graph: LabeledGraph, order: Sequence | None = None) -> TreeDecomposition:
    """Tree decomposition from an elimination ordering (min-degree when omitted).

    A plain constructive tool for fixtures, not a width optimizer.
    """
    adj = {v: set() for v in graph.vertices}
    for e in graph.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    pos = {v: i for i, v in enumerate(graph.vertices)}
    if order is None:
        order = []
        work = {v: set(n) for v, n in adj.items()}
        while work:
            v = min(work, key=lambda x: (len(work[x]), pos[x]))
            order.append(v)
            nb = work.pop(v)
            for a in nb:
                work[a] |= nb - {a}
                work[a].discard(v)
    order = list(order)
    if sorted(order, key=pos.__getitem__) != list(graph.vertices):
        raise UsageError("elimination order must list every vertex once")
    rank = {v: i for i, v in enumerate(order)}
    bags, edges = {}, []
    for i, v in enumerate(order):
        nb = adj[v]
        bags[i + 1] = {v} | nb
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        if nb:
            edges.append((i + 1, min(rank[a] for a in nb) + 1))
    if not bags:
        return TreeDecomposition({1: ()}, [])
    # tie separate components together through their last bags
    has_parent = {a for a, _ in edges}
    roots = [n for n in bags if n not in has_parent]
    edges += [(r, roots[-1]) for r in roots[:-1]]
    return TreeDecomposition(bags, edges, root=roots[-1])


# -- Algorithms --------------------------------------------------------------


@dataclass
class CspStats:
    width: int = 0
    domain_size: int = 0
    assignments: list = field(default_factory=list)

    @property
    def bound(self) -> int:
        return self.domain_size ** (self.width + 1)


def _check_ntd(instance, ntd):
    if tuple(ntd.variables) != instance.variables:
        raise UsageError("decomposition was built for different variables")
    if not ntd.var_lambda or set(ntd.var_lambda) != set(instance.variables):
        raise UsageError("decomposition has no Introduce node for some variable")


def _run_tables(instance, ntd, unit, introduce, join, forget, stats, on_node):
    D = instance.domain
    if stats is not None:
        stats.width = int(primal_width(ntd))
        stats.domain_size = len(D)
    tables = {}
    for n in range(len(ntd)):
        kind = ntd.kind[n]
        bag = ntd.bag_order(n)
        t = {}
        count = 0
        if kind == LEAF:
            t[()] = unit
            count = 1
        elif kind == INTRODUCE:
            child_t = tables.pop(ntd.children[n][0])
            p = bag.index(ntd.vertex[n])
            for f in itertools.product(D, repeat=len(bag)):
                count += 1
                t[f] = introduce(n, bag, f, child_t[f[:p] + f[p + 1:]])
        elif kind == FORGET:
            child_t = tables.pop(ntd.children[n][0])
            p = ntd.bag_order(ntd.children[n][0]).index(ntd.vertex[n])
            for f in itertools.product(D, repeat=len(bag)):
                count += 1
                t[f] = forget([child_t[f[:p] + (d,) + f[p:]] for d in D])
        else:
            t1, t2 = (tables.pop(c) for c in ntd.children[n])
            for f in itertools.product(D, repeat=len(bag)):
                count += 1
                t[f] = join(t1[f], t2[f])
        if stats is not None:
            stats.assignments.append(count)
        if on_node is not None:
            on_node(n, t)
        tables[n] = t
    return tables[ntd.root][()]


def _checks_at(instance, ntd, n):
    v = ntd.vertex[n]
    bag = ntd.bag[n]
    pos = {x: i for i, x in enumerate(ntd.bag_order(n))}
    return [(tuple(pos[x] for x in c.scope), c.relation)
            for c in instance.constraints if v in c.scope and set(c.scope) <= bag]


def solve_semiring_csp(instance: CspInstance, ntd: NiceTreeDecomposition, *,
                       store: ExprStore | None = None, stats: CspStats | None = None,
                       on_node: Callable | None = None) -> Expr:
    """Join/union expression of all solutions (total assignments ``V -> D``).

    ``on_node(n, table)`` sees each node's table ``f -> Expr``.
    """
    _check_ntd(instance, ntd)
    if store is None:
        store = ExprStore(Universe(instance.variables, instance.domain))
    empty = store.empty()
    checks = {n: _checks_at(instance, ntd, n) for n in range(len(ntd)) if ntd.kind[n] == INTRODUCE}

    def introduce(n, bag, f, e):
        for idx, rel in checks[n]:
            if tuple(f[i] for i in idx) not in rel:
                return empty
        if e.is_empty:
            return empty
        v = ntd.vertex[n]
        if ntd.var_lambda[v] == n:
            return store.join(e, store.leaf(v, f[bag.index(v)]))
        return e

    def forget(es):
        # empty parts contribute nothing; skipping them keeps the DAG small
        return store.uplus_all([e for e in es if not e.is_empty])

    def join(a, b):
        if a.is_empty or b.is_empty:
            return empty
        return store.join(a, b)

    return _run_tables(instance, ntd, store.unit(), introduce, join, forget, stats, on_node)


def solve_sum_product(instance: SumProductInstance, ntd: NiceTreeDecomposition, *,
                      stats: CspStats | None = None, on_node: Callable | None = None) -> Value:
    """``sum over F: V -> D of prod over c of c(F on scope)``.

    ``ntd`` needs ``constraint_lambda`` for every constraint of ``instance``.
    """
    _check_ntd(instance, ntd)
    A = instance.semiring
    if set(ntd.constraint_lambda) != set(range(len(instance.constraints))):
        raise UsageError("constraint_lambda must cover every constraint")
    here = {}
    for ci, n in ntd.constraint_lambda.items():
        here.setdefault(n, []).append(instance.constraints[ci])
    scope_idx = {n: [(tuple(ntd.bag_order(n).index(x) for x in c.scope), c.table) for c in cs]
                 for n, cs in here.items()}

    def introduce(n, bag, f, x):
        for idx, table in scope_idx.get(n, ()):
            x = A.mul(x, table[tuple(f[i] for i in idx)])
        return x

    def forget(xs):
        return A.sum(xs)

    val = _run_tables(instance, ntd, A.one, introduce, A.mul, forget, stats, on_node)
    return Value(A, val)


# -- file formats --------------------------------------------------------------


def _hashable(x):
    if isinstance(x, list):
        raise UsageError(f"values must be scalars, got {x!r}")
    return x


def parse_instance(text: str, semiring: Semiring | str | None = None):
    """JSON instance. Constraints with ``tuples`` give a :class:`CspInstance`;
    constraints with ``table`` give a :class:`SumProductInstance`, whose
    descriptor comes from ``semiring`` or else the document's ``semiring`` field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object")
    for key in ("variables", "domain"):
        if not isinstance(doc.get(key), list):
            raise ParseError(f"instance needs a '{key}' list")
    variables = [_hashable(v) for v in doc["variables"]]
    domain = [_hashable(d) for d in doc["domain"]]
    cons = doc.get("constraints", [])
    if not isinstance(cons, list) or not all(isinstance(c, dict) and "scope" in c for c in cons):
        raise ParseError("'constraints' must be a list of objects with a 'scope'")
    valued = any("table" in c for c in cons)
    if not valued:
        return CspInstance(variables, domain,
                           [(c["scope"], [tuple(t) for t in c.get("tuples", [])]) for c in cons])
    desc = semiring if semiring is not None else doc.get("semiring")
    if desc is None:
        raise ParseError("a valued instance needs a semiring descriptor")
    if isinstance(desc, str):
        desc = parse_semiring(desc)
    vcs = []
    for c in cons:
        if "table" not in c:
            raise ParseError("mixing 'tuples' and 'table' constraints is not supported")
        table = {}
        for row in c["table"]:
            args = tuple(row["args"])
            if args in table:
                raise ParseError(f"duplicate valuation row for {list(args)}")
            table[args] = desc.parse(str(row["value"]))
        vcs.append(ValuedConstraint(tuple(c["scope"]), table))
    return SumProductInstance(variables, domain, desc, vcs)


def format_instance(instance) -> str:
    doc = {"variables": list(instance.variables), "domain": list(instance.domain)}
    if isinstance(instance, SumProductInstance):
        doc["semiring"] = str(instance.semiring)
        doc["constraints"] = [
            {"scope": list(c.scope),
             "table": [{"args": list(a), "value": instance.semiring.format(c.table[a])}
                       for a in itertools.product(instance.domain, repeat=len(c.scope))]}
            for c in instance.constraints]
    else:
        order = {d: i for i, d in enumerate(instance.domain)}
        doc["constraints"] = [
            {"scope": list(c.scope),
             "tuples": [list(t) for t in sorted(c.relation, key=lambda t: [order[x] for x in t])]}
            for c in instance.constraints]
    return json.dumps(doc, indent=1) + "\n"


def parse_td(text: str, variables: Sequence) -> TreeDecomposition:
    """PACE ``.td`` text; vertex numbers are 1-based indices into ``variables``."""
    variables = list(variables)
    header = None
    bags, edges = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks or toks[0] == "c":
            continue

        def ints(items, col_of=raw):
            out = []
            for tok in items:
                try:
                    out.append(int(tok))
                except ValueError:
                    raise ParseError(f"expected an integer, got {tok!r}", lineno,
                                     col_of.find(tok) + 1) from None
            return out

        if toks[0] == "s":
            if header is not None or len(toks) != 5 or toks[1] != "td":
                raise ParseError("expected 's td <bags> <width+1> <vertices>'", lineno, 1)
            header = ints(toks[2:])
            if header[2] != len(variables):
                raise ParseError(f"header declares {header[2]} vertices, instance has "
                                 f"{len(variables)}", lineno, 1)
        elif header is None:
            raise ParseError("missing 's td' header", lineno, 1)
        elif toks[0] == "b":
            nums = ints(toks[1:])
            if not nums:
                raise ParseError("bag line needs an id", lineno, 1)
            bid, verts = nums[0], nums[1:]
            if bid in bags:
                raise ParseError(f"duplicate bag {bid}", lineno, 1)
            if not 1 <= bid <= header[0]:
                raise ParseError(f"bag id {bid} out of range", lineno, 1)
            for v in verts:
                if not 1 <= v <= len(variables):
                    raise ParseError(f"vertex {v} out of range", lineno, 1)
            bags[bid] = {variables[v - 1] for v in verts}
        else:
            nums = ints(toks)
            if len(nums) != 2:
                raise ParseError("edge line needs two bag ids", lineno, 1)
            edges.append(tuple(nums))
    if header is None:
        raise ParseError("missing 's td' header", 1, 1)
    if len(bags) != header[0]:
        raise ParseError(f"header declares {header[0]} bags, found {len(bags)}")
    biggest = max((len(b) for b in bags.values()), default=0)
    if biggest != header[1]:
        raise ParseError(f"header declares max bag size {header[1]}, found {biggest}")
    for a, b in edges:
        if a not in bags or b not in bags:
            raise ParseError(f"edge {a} {b} references an unknown bag")
    return TreeDecomposition(bags, edges)


def format_td(td: TreeDecomposition, variables: Sequence) -> str:
    """PACE text; bags are renumbered 1..m in ``sorted`` id order."""
    idx = {v: i + 1 for i, v in enumerate(variables)}
    ids = sorted(td.bags, key=_id_key)
    num = {n: i + 1 for i, n in enumerate(ids)}
    lines = [f"s td {len(ids)} {td.width + 1} {len(idx)}"]
    for n in ids:
        vs = sorted(idx[v] for v in td.bags[n])
        lines.append(" ".join(["b", str(num[n])] + [str(v) for v in vs]))
    lines += [f"{num[a]} {num[b]}" for a, b in td.edges]
    return "\n".join(lines) + "\n"
