"""Hash-consed join/union expression DAGs.

An :class:`ExprStore` owns a :class:`Universe` (domain ``S``, codomain ``T``)
and interns nodes ``Empty | Unit | Leaf(s, t) | Uplus(a, b) | Join(a, b)``.
Structurally equal constructions return the very same :class:`Expr` object.
Children are always created before their parents, so node ids are a
topological order; :func:`evaluate` and :func:`materialize` rely on that.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Hashable, Sequence

from .algebra import Semiring, Value
from .errors import BudgetError, LegalityError, UsageError

EMPTY, UNIT, LEAF, UPLUS, JOIN = range(5)
_KIND_NAMES = ("empty", "unit", "leaf", "uplus", "join")


class Universe:
    """Ordered domain ``S`` and codomain ``T``; elements are opaque hashables."""

    def __init__(self, S: Sequence[Hashable], T: Sequence[Hashable]):
        self.S = tuple(S)
        self.T = tuple(T)
        self.s_index = {s: i for i, s in enumerate(self.S)}
        self.t_index = {t: i for i, t in enumerate(self.T)}
        if len(self.s_index) != len(self.S) or len(self.t_index) != len(self.T):
            raise UsageError("universe elements must be distinct")
        if not self.T:
            raise UsageError("codomain must be non-empty")

    @property
    def degenerate(self) -> bool:
        return not self.S

    def __eq__(self, other):
        return isinstance(other, Universe) and self.S == other.S and self.T == other.T

    def __hash__(self):
        return hash((self.S, self.T))

    def __repr__(self):
        return f"Universe(S={list(self.S)}, T={list(self.T)})"

    def s_idx(self, s):
        try:
            return self.s_index[s]
        except KeyError:
            raise UsageError(f"{s!r} is not a domain element") from None

    def t_idx(self, t):
        try:
            return self.t_index[t]
        except KeyError:
            raise UsageError(f"{t!r} is not a codomain element") from None

    def domain_of(self, mask: int) -> tuple:
        return tuple(s for i, s in enumerate(self.S) if mask >> i & 1)


class Expr:
    """Handle to an interned node. Compare by identity."""

    __slots__ = ("store", "id")

    def __init__(self, store: ExprStore, id: int):
        self.store = store
        self.id = id

    @property
    def kind(self) -> str:
        return _KIND_NAMES[self.store._kind[self.id]]

    @property
    def children(self) -> tuple[Expr, ...]:
        st = self.store
        if st._kind[self.id] in (UPLUS, JOIN):
            return (st._handles[st._a[self.id]], st._handles[st._b[self.id]])
        return ()

    @property
    def leaf(self) -> tuple:
        st = self.store
        if st._kind[self.id] != LEAF:
            raise UsageError("not a leaf")
        u = st.universe
        return (u.S[st._a[self.id]], u.T[st._b[self.id]])

    @property
    def domain_mask(self) -> int:
        return self.store._dom[self.id]

    @property
    def domain(self) -> frozenset:
        return frozenset(self.store.universe.domain_of(self.domain_mask))

    @property
    def is_empty(self) -> bool:
        return self.store._isempty[self.id]

    @property
    def tree_size(self) -> int:
        return self.store._size[self.id]

    def __repr__(self):
        return f"<Expr #{self.id} {self.kind}>"


class ExprStore:
    """Append-only interning store. Insertions are serialized by a lock."""

    def __init__(self, universe: Universe):
        self.universe = universe
        self._kind: list[int] = []
        self._a: list[int] = []
        self._b: list[int] = []
        self._dom: list[int] = []
        self._isempty: list[bool] = []
        self._size: list[int] = []
        self._handles: list[Expr] = []
        self._intern: dict[tuple, int] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._kind)

    def _node(self, key, dom, isempty, size) -> Expr:
        with self._lock:
            i = self._intern.get(key)
            if i is None:
                i = len(self._kind)
                self._kind.append(key[0])
                self._a.append(key[1])
                self._b.append(key[2])
                self._dom.append(dom)
                self._isempty.append(isempty)
                self._size.append(size)
                self._handles.append(Expr(self, i))
                self._intern[key] = i
            return self._handles[i]

    def _own(self, e: Expr) -> int:
        if e.store is not self:
            raise UsageError("expression belongs to a different store")
        return e.id

    def empty(self) -> Expr:
        return self._node((EMPTY, -1, -1), 0, True, 1)

    def unit(self) -> Expr:
        return self._node((UNIT, -1, -1), 0, False, 1)

    def leaf(self, s, t) -> Expr:
        si = self.universe.s_idx(s)
        ti = self.universe.t_idx(t)
        return self._node((LEAF, si, ti), 1 << si, False, 1)

    def uplus(self, e1: Expr, e2: Expr) -> Expr:
        a, b = self._own(e1), self._own(e2)
        ea, eb = self._isempty[a], self._isempty[b]
        da, db = self._dom[a], self._dom[b]
        if eb:
            dom = da
        elif ea:
            dom = db
        elif da != db:
            u = self.universe
            raise LegalityError(
                f"uplus of expressions over different domains "
                f"{sorted(map(str, u.domain_of(da)))} and {sorted(map(str, u.domain_of(db)))}")
        else:
            dom = da
        return self._node((UPLUS, a, b), dom, ea and eb, self._size[a] + self._size[b])

    def join(self, e1: Expr, e2: Expr) -> Expr:
        a, b = self._own(e1), self._own(e2)
        da, db = self._dom[a], self._dom[b]
        if da & db:
            shared = self.universe.domain_of(da & db)
            raise LegalityError(f"join of expressions sharing domain elements {list(shared)}")
        return self._node((JOIN, a, b), da | db,
                          self._isempty[a] or self._isempty[b], self._size[a] + self._size[b])

    def uplus_all(self, exprs: Sequence[Expr]) -> Expr:
        """Left fold of uplus; Empty for an empty sequence."""
        it = iter(exprs)
        acc = next(it, None)
        if acc is None:
            return self.empty()
        for e in it:
            acc = self.uplus(acc, e)
        return acc

    def join_all(self, exprs: Sequence[Expr]) -> Expr:
        it = iter(exprs)
        acc = next(it, None)
        if acc is None:
            return self.unit()
        for e in it:
            acc = self.join(acc, e)
        return acc

    def reachable(self, e: Expr) -> list[int]:
        """Ids of nodes reachable from ``e``, in increasing (topological) order."""
        seen = {self._own(e)}
        stack = [e.id]
        kind, A, B = self._kind, self._a, self._b
        while stack:
            i = stack.pop()
            if kind[i] >= UPLUS:
                for c in (A[i], B[i]):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return sorted(seen)


def make_empty(store: ExprStore) -> Expr:
    return store.empty()


def make_unit(store: ExprStore) -> Expr:
    return store.unit()


def make_leaf(store: ExprStore, s, t) -> Expr:
    return store.leaf(s, t)


def make_uplus(e1: Expr, e2: Expr) -> Expr:
    return e1.store.uplus(e1, e2)


def make_join(e1: Expr, e2: Expr) -> Expr:
    return e1.store.join(e1, e2)


def all_functions_expr(n: int, store: ExprStore | None = None) -> Expr:
    """Join over i of (Uplus over j of (i -> j)): all of [n]^[n] with n^2 leaves."""
    if n < 1:
        raise UsageError("n must be at least 1")
    if store is None:
        store = ExprStore(Universe(range(1, n + 1), range(1, n + 1)))
    rows = [store.uplus_all([store.leaf(i, j) for j in range(1, n + 1)])
            for i in range(1, n + 1)]
    return store.join_all(rows)


# -- evaluation ------------------------------------------------------------


@dataclass
class EvalStats:
    nodes: int = 0
    operations: int = 0


def evaluate(e: Expr, matrix, stats: EvalStats | None = None) -> Value:
    """Measure of ``[e]`` given the measure's matrix, one operation per internal node."""
    store = e.store
    if matrix.universe != store.universe:
        raise UsageError("matrix and expression are over different universes")
    desc: Semiring = matrix.semiring
    entries = matrix.entries
    kind, A, B = store._kind, store._a, store._b
    val = {}
    ops = 0
    order = store.reachable(e)
    for i in order:
        k = kind[i]
        if k == EMPTY:
            v = desc.zero
        elif k == UNIT:
            v = desc.one
        elif k == LEAF:
            v = entries[A[i]][B[i]]
        elif k == UPLUS:
            v = desc.add(val[A[i]], val[B[i]])
            ops += 1
        else:
            v = desc.mul(val[A[i]], val[B[i]])
            ops += 1
        val[i] = v
    if stats is not None:
        stats.nodes += len(order)
        stats.operations += ops
    return Value(desc, val[e.id])


# -- exact semantics (oracle) ---------------------------------------------


class _Fail:
    def __repr__(self):
        return "FAIL"

    def __bool__(self):
        return False


FAIL = _Fail()


@dataclass(frozen=True)
class FunctionSet:
    """A set of functions sharing one domain; each member is the tuple of
    images of ``domain`` in order."""

    domain: tuple
    members: frozenset

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def as_dicts(self) -> list[dict]:
        return [dict(zip(self.domain, f)) for f in sorted(self.members, key=repr)]

    def restrict(self, subdomain) -> FunctionSet:
        keep = [i for i, s in enumerate(self.domain) if s in set(subdomain)]
        dom = tuple(self.domain[i] for i in keep)
        return FunctionSet(dom, frozenset(tuple(f[i] for i in keep) for f in self.members))


def materialize(e: Expr, node_budget: int = 10**6, member_budget: int = 10**6):
    """Exact semantics of ``e`` as a :class:`FunctionSet`, or :data:`FAIL`.

    Follows the inductive definition literally, with the syntactic domain
    (every ``s`` appearing in a leaf) used for the legality checks.
    """
    store = e.store
    u = store.universe
    order = store.reachable(e)
    if len(order) > node_budget:
        raise BudgetError(f"expression has {len(order)} reachable nodes > {node_budget}")
    kind, A, B = store._kind, store._a, store._b
    syn = {}    # syntactic leaf domain, as bitmask
    sem = {}    # node id -> (mask, frozenset of tuples of (s_idx, t_idx)) or FAIL
    for i in order:
        k = kind[i]
        if k == EMPTY:
            syn[i] = 0
            sem[i] = (0, frozenset())
        elif k == UNIT:
            syn[i] = 0
            sem[i] = (0, frozenset([()]))
        elif k == LEAF:
            syn[i] = 1 << A[i]
            sem[i] = (1 << A[i], frozenset([((A[i], B[i]),)]))
        else:
            a, b = A[i], B[i]
            syn[i] = syn[a] | syn[b]
            ra, rb = sem[a], sem[b]
            if ra is FAIL or rb is FAIL:
                sem[i] = FAIL
            elif k == UPLUS:
                if not rb[1]:
                    sem[i] = ra
                elif not ra[1]:
                    sem[i] = rb
                elif syn[a] != syn[b] or ra[1] & rb[1]:
                    sem[i] = FAIL
                else:
                    sem[i] = (ra[0], ra[1] | rb[1])
            else:
                if syn[a] & syn[b]:
                    sem[i] = FAIL
                else:
                    if len(ra[1]) * len(rb[1]) > member_budget:
                        raise BudgetError(f"join would produce more than {member_budget} functions")
                    sem[i] = (ra[0] | rb[0],
                              frozenset(tuple(sorted(f + g)) for f in ra[1] for g in rb[1]))
            if sem[i] is not FAIL and len(sem[i][1]) > member_budget:
                raise BudgetError(f"set size exceeds member budget {member_budget}")
    res = sem[e.id]
    if res is FAIL:
        return FAIL
    mask, funcs = res
    domain = u.domain_of(mask)
    return FunctionSet(domain, frozenset(tuple(u.T[t] for _, t in f) for f in funcs))


# -- text serialization -----------------------------------------------------


def dumps(e: Expr) -> str:
    """S-expression text; nodes used more than once are written as
    ``(share id E)`` on first use and ``(ref id)`` afterwards."""
    store = e.store
    u = store.universe
    kind, A, B = store._kind, store._a, store._b
    order = store.reachable(e)
    uses = dict.fromkeys(order, 0)
    for i in order:
        if kind[i] >= UPLUS:
            uses[A[i]] += 1
            uses[B[i]] += 1
    share_ids: dict[int, int] = {}
    out: list[str] = []

    # explicit stack so deep chains don't hit the recursion limit
    stack: list = [e.id]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        i = item
        k = kind[i]
        if k == EMPTY or k == UNIT:
            out.append(_KIND_NAMES[k])
            continue
        if k == LEAF:
            out.append(f"(leaf {_atom(u.S[A[i]])} {_atom(u.T[B[i]])})")
            continue
        if i in share_ids:
            out.append(f"(ref {share_ids[i]})")
            continue
        close = ")"
        if uses[i] > 1:
            share_ids[i] = len(share_ids)
            out.append(f"(share {share_ids[i]} ")
            close = "))"
        out.append(f"({_KIND_NAMES[k]} ")
        stack.extend([close, B[i], " ", A[i]])
    return "".join(out)


def _atom(x) -> str:
    s = str(x)
    if not s or any(c in s for c in "() \t\n\"") :
        raise UsageError(f"element {x!r} cannot be written as an s-expression atom")
    return s


def loads(text: str, store: ExprStore) -> Expr:
    """Parse :func:`dumps` output. Atoms are matched to universe elements by ``str``."""
    from .sexpr import parse_sexpr

    u = store.universe
    s_by_name = {str(s): s for s in u.S}
    t_by_name = {str(t): t for t in u.T}
    shared: dict[str, Expr] = {}

    def build(node):
        if isinstance(node.value, str):
            if node.value == "empty":
                return store.empty()
            if node.value == "unit":
                return store.unit()
            node.fail(f"unexpected atom {node.value!r}")
        items = node.value
        if not items or not isinstance(items[0].value, str):
            node.fail("expected an operator")
        op = items[0].value
        args = items[1:]
        if op == "leaf":
            node.expect_len(3)
            s, t = args[0].atom(), args[1].atom()
            if s not in s_by_name:
                args[0].fail(f"unknown domain element {s!r}")
            if t not in t_by_name:
                args[1].fail(f"unknown codomain element {t!r}")
            return store.leaf(s_by_name[s], t_by_name[t])
        if op in ("uplus", "join"):
            node.expect_len(3)
            a, b = build(args[0]), build(args[1])
            return store.uplus(a, b) if op == "uplus" else store.join(a, b)
        if op == "share":
            node.expect_len(3)
            key = args[0].atom()
            shared[key] = build(args[1])
            return shared[key]
        if op == "ref":
            node.expect_len(2)
            key = args[0].atom()
            if key not in shared:
                args[0].fail(f"reference to undefined share {key!r}")
            return shared[key]
        items[0].fail(f"unknown operator {op!r}")

    return build(parse_sexpr(text))
