"""Brute-force ground truth. Deliberately naive: no pruning, no sharing."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .algebra import Value
from .cds import LabeledGraph, bit, eval_kexpr, labels_to_mask
from .errors import BudgetError, UsageError
from .expr import FunctionSet
from .measures import MeasureMatrix


def _env_int(name, default):
    raw = os.environ.get(name)
    return int(raw) if raw else default


@dataclass(frozen=True)
class EnumerationBudget:
    max_candidates: int = 2**20
    max_solutions: int = 2**20

    def __post_init__(self):
        if self.max_candidates < 1 or self.max_solutions < 1:
            raise UsageError("budgets must be positive")

    @classmethod
    def from_env(cls):
        """Defaults overridden by SEMIRING_DP_MAX_CANDIDATES / SEMIRING_DP_MAX_SOLUTIONS."""
        return cls(_env_int("SEMIRING_DP_MAX_CANDIDATES", 2**20),
                   _env_int("SEMIRING_DP_MAX_SOLUTIONS", 2**20))

    def check(self, candidates):
        if candidates > self.max_candidates:
            raise BudgetError(f"{candidates} candidates exceed the budget {self.max_candidates}")


def _adjacency(g: LabeledGraph):
    adj = {v: set() for v in g.vertices}
    for e in g.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    return adj


def is_dominating(g, S, adj=None) -> bool:
    adj = adj or _adjacency(g)
    closed = set(S)
    for v in S:
        closed |= adj[v]
    return closed >= set(g.vertices)


def is_connected(S, adj) -> bool:
    """Induced subgraph on a non-empty ``S`` is connected."""
    S = set(S)
    if not S:
        return False
    start = next(iter(S))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w in S and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == S


def _subsets(g, budget):
    if not g.vertices:
        raise UsageError("the empty graph is degenerate input")
    n = len(g.vertices)
    (budget or EnumerationBudget()).check(2**n)
    for mask in range(2**n):
        yield mask, {v for i, v in enumerate(g.vertices) if mask >> i & 1}


def _indicators(g, sets, budget):
    members = [tuple(int(v in S) for v in g.vertices) for S in sets]
    if len(members) > (budget or EnumerationBudget()).max_solutions:
        raise BudgetError(f"{len(members)} solutions exceed the budget")
    return FunctionSet(tuple(g.vertices), frozenset(members))


def enumerate_cds(g: LabeledGraph, budget: EnumerationBudget | None = None) -> FunctionSet:
    adj = _adjacency(g)
    found = [S for _, S in _subsets(g, budget)
             if S and is_dominating(g, S, adj) and is_connected(S, adj)]
    return _indicators(g, found, budget)


def enumerate_ds(g: LabeledGraph, budget: EnumerationBudget | None = None) -> FunctionSet:
    adj = _adjacency(g)
    found = [S for _, S in _subsets(g, budget) if is_dominating(g, S, adj)]
    return _indicators(g, found, budget)


def enumerate_csp(instance, budget: EnumerationBudget | None = None) -> FunctionSet:
    budget = budget or EnumerationBudget()
    V, D = instance.variables, instance.domain
    budget.check(len(D) ** len(V))
    sols = []
    for f in itertools.product(D, repeat=len(V)):
        a = dict(zip(V, f))
        if instance.satisfied_by(a):
            sols.append(f)
            if len(sols) > budget.max_solutions:
                raise BudgetError(f"more than {budget.max_solutions} solutions")
    return FunctionSet(tuple(V), frozenset(sols))


def measure_directly(fs: FunctionSet, m: MeasureMatrix) -> Value:
    """Sum over members of the product of matrix entries along the function."""
    desc = m.semiring
    u = m.universe
    for s in fs.domain:
        u.s_idx(s)
    total = desc.zero
    for f in fs.members:
        term = desc.one
        for s, t in zip(fs.domain, f):
            term = desc.mul(term, m.entries[u.s_idx(s)][u.t_idx(t)])
        total = desc.add(total, term)
    return Value(desc, total)


def argmin_scan(fs: FunctionSet, w: MeasureMatrix):
    """(minimal cost, the members reaching it); ``(zero, empty set)`` when ``fs`` is empty."""
    desc = w.semiring
    if not desc.is_dioid:
        raise UsageError(f"argmin needs costs in a dioid, got {desc}")
    best = desc.zero
    winners = []
    for f in fs.members:
        c = measure_directly(FunctionSet(fs.domain, frozenset([f])), w).payload
        cmp = desc.compare(c, best)
        if cmp < 0 or not winners:
            best, winners = c, [f]
        elif cmp == 0:
            winners.append(f)
    return best, FunctionSet(fs.domain, frozenset(winners))


def brute_sum_product(instance, budget: EnumerationBudget | None = None) -> Value:
    budget = budget or EnumerationBudget()
    V, D, A = instance.variables, instance.domain, instance.semiring
    budget.check(len(D) ** len(V))
    total = A.zero
    for f in itertools.product(D, repeat=len(V)):
        a = dict(zip(V, f))
        term = A.one
        for c in instance.constraints:
            term = A.mul(term, c.table[tuple(a[x] for x in c.scope)])
        total = A.add(total, term)
    return Value(A, total)


def brute_trace(g: LabeledGraph, S, k: int, *, connected: bool = True):
    """Trace of ``S`` computed from the definitions on the labeled graph."""
    S = set(S)
    adj = _adjacency(g)
    closed = set(S)
    for v in S:
        closed |= adj[v]
    D = 0
    for d in range(1, k + 1):
        if all(v in closed for v in g.vertices if g.labels[v] == d):
            D |= bit(d)
    if not connected:
        return labels_to_mask(g.labels[v] for v in S), D
    sig = [0] * (1 << k)
    left = set(S)
    while left:
        start = left.pop()
        comp = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w in left:
                    left.discard(w)
                    comp.add(w)
                    stack.append(w)
        C = labels_to_mask(g.labels[v] for v in comp)
        sig[C] = min(sig[C] + 1, 2)
    return tuple(sig), D


def kexpr_oracle(e, *, connected: bool = True, budget: EnumerationBudget | None = None):
    g = eval_kexpr(e)
    return enumerate_cds(g, budget) if connected else enumerate_ds(g, budget)
