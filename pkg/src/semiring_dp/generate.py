"""Seeded random k-expressions and CSP instances.

All randomness comes from :class:`random.Random` (Mersenne Twister, MT19937)
seeded explicitly, so output depends only on the arguments.
"""

from __future__ import annotations

import itertools
import random

from .algebra import INF, Semiring
from .cds import MAX_K, EdgeCreate, KExpr, Oplus, Relabel, Vertex
from .csp import CspInstance, SumProductInstance, TreeDecomposition, elimination_td, gaifman
from .errors import UsageError

MAX_VARS = 12
MAX_VERTICES = 64


def random_kexpr(k: int, n: int, seed: int, *, max_k: int = MAX_K) -> KExpr:
    """A k-expression on ``n`` vertices named ``v1..vn``."""
    if not 1 <= k <= max_k:
        raise UsageError(f"k must be in 1..{max_k}")
    if not 1 <= n <= MAX_VERTICES:
        raise UsageError(f"n must be in 1..{MAX_VERTICES}")
    rng = random.Random(seed)
    pieces: list[tuple[KExpr, set]] = []
    for i in range(1, n + 1):
        label = rng.randint(1, k)
        pieces.append((Vertex(label, f"v{i}"), {label}))

    def decorate(e, labels):
        # edges and relabels between labels that actually occur, so they bite
        for _ in range(rng.randint(0, 2)):
            if len(labels) >= 2 and rng.random() < 0.75:
                i, j = rng.sample(sorted(labels), 2)
                e = EdgeCreate(i, j, e)
            elif k > 1 and rng.random() < 0.5:
                i = rng.choice(sorted(labels))
                j = rng.choice([x for x in range(1, k + 1) if x != i])
                e = Relabel(i, j, e)
                labels = (labels - {i}) | {j}
        return e, labels

    while len(pieces) > 1:
        a, la = pieces.pop(rng.randrange(len(pieces)))
        b, lb = pieces.pop(rng.randrange(len(pieces)))
        pieces.append(decorate(Oplus(a, b), la | lb))
    return pieces[0][0]


def random_csp(n_vars: int, domain_size: int, seed: int, *, max_arity: int = 3,
               n_constraints: int | None = None, density: float = 0.6):
    """A random instance and a tree decomposition of its Gaifman graph."""
    if not 1 <= n_vars <= MAX_VARS:
        raise UsageError(f"vars must be in 1..{MAX_VARS}")
    if domain_size < 1:
        raise UsageError("domain size must be positive")
    rng = random.Random(seed)
    variables = [f"x{i}" for i in range(1, n_vars + 1)]
    domain = list(range(domain_size))
    m = rng.randint(0, n_vars + 1) if n_constraints is None else n_constraints
    cons = []
    for _ in range(m):
        arity = rng.randint(1, min(max_arity, n_vars))
        scope = rng.sample(variables, arity)
        rel = [t for t in itertools.product(domain, repeat=arity) if rng.random() < density]
        cons.append((scope, rel))
    inst = CspInstance(variables, domain, cons)
    return inst, elimination_td(gaifman(inst))


def random_valuation(semiring: Semiring, rng: random.Random):
    k = semiring.kind
    if k == "bool":
        return rng.random() < 0.7
    if k == "nat":
        return rng.randint(0, 3)
    if k == "trop":
        return INF if rng.random() < 0.1 else rng.randint(0, 5)
    raise UsageError(f"no random valuation for {semiring}")


def random_sum_product(n_vars: int, domain_size: int, seed: int, semiring: Semiring, *,
                       max_arity: int = 3) -> tuple[SumProductInstance, TreeDecomposition]:
    base, td = random_csp(n_vars, domain_size, seed, max_arity=max_arity)
    rng = random.Random(seed ^ 0x5EED)
    cons = [(c.scope, {a: random_valuation(semiring, rng)
                       for a in itertools.product(base.domain, repeat=len(c.scope))})
            for c in base.constraints]
    return SumProductInstance(base.variables, base.domain, semiring, cons), td
