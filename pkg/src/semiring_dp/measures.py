"""Measure matrices and the standard measure constructors.

A measure over ``(S, T)`` is fully determined by its matrix
``M[s, t] = mu({s -> t})``; the measure of a set ``F`` is
``sum over f in F of prod over s of M[s, f(s)]``.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .algebra import (BOOL, DELTANAT, INF, INT64_MAX, NAT, TROP, Semiring, Value, delta,
                      parse_semiring, prod)
from .errors import CostOverflowError, ParseError, UsageError
from .expr import Expr, Universe, evaluate


class MeasureMatrix:
    """An ``|S| x |T|`` table of payloads of one semiring. Immutable."""

    __slots__ = ("universe", "semiring", "entries")

    def __init__(self, universe: Universe, semiring: Semiring, entries=None):
        u = universe
        if entries is None:
            entries = {}
        if isinstance(entries, Mapping):
            table = [[entries.get((s, t), semiring.one) for t in u.T] for s in u.S]
        else:
            table = [list(row) for row in entries]
            if len(table) != len(u.S) or any(len(r) != len(u.T) for r in table):
                raise UsageError("matrix shape does not match the universe")
        for row in table:
            for x in row:
                if not semiring.contains(x):
                    raise UsageError(f"matrix entry {x!r} is not an element of {semiring}")
        object.__setattr__(self, "universe", u)
        object.__setattr__(self, "semiring", semiring)
        object.__setattr__(self, "entries", tuple(tuple(r) for r in table))

    def __setattr__(self, name, value):
        raise AttributeError("MeasureMatrix is immutable")

    @classmethod
    def from_function(cls, universe: Universe, semiring: Semiring, fn: Callable):
        return cls(universe, semiring,
                   [[fn(s, t) for t in universe.T] for s in universe.S])

    def __getitem__(self, st) -> Value:
        s, t = st
        u = self.universe
        return Value(self.semiring, self.entries[u.s_idx(s)][u.t_idx(t)])

    def __eq__(self, other):
        return (isinstance(other, MeasureMatrix) and self.universe == other.universe
                and self.semiring == other.semiring and self.entries == other.entries)

    def __repr__(self):
        return f"MeasureMatrix({self.semiring}, |S|={len(self.universe.S)}, |T|={len(self.universe.T)})"


def decision_measure(u: Universe) -> MeasureMatrix:
    return MeasureMatrix.from_function(u, BOOL, lambda s, t: True)


def counting_measure(u: Universe) -> MeasureMatrix:
    return MeasureMatrix.from_function(u, NAT, lambda s, t: 1)


def list_measure(u: Universe, allowed: Mapping) -> MeasureMatrix:
    """``T`` exactly where sending ``s`` to ``t`` is allowed; missing ``s`` allows nothing."""
    for s, ts in allowed.items():
        u.s_idx(s)
        for t in ts:
            u.t_idx(t)
    return MeasureMatrix.from_function(u, BOOL, lambda s, t: t in allowed.get(s, ()))


def cost_measure(u: Universe, costs: Mapping | Callable) -> MeasureMatrix:
    fn = costs if callable(costs) else (lambda s, t: costs[s, t])
    try:
        return MeasureMatrix.from_function(u, TROP, fn)
    except KeyError as exc:
        raise UsageError(f"cost table has no entry for {exc.args[0]!r}") from None


def delta_measure(w: MeasureMatrix, mu: MeasureMatrix) -> MeasureMatrix:
    if w.universe != mu.universe:
        raise UsageError("delta_measure needs matrices over the same universe")
    if not w.semiring.is_dioid:
        raise UsageError(f"weight matrix must be over a dioid, got {w.semiring}")
    desc = delta(w.semiring, mu.semiring)
    return MeasureMatrix(w.universe, desc, [
        [desc.pack(d, a) for d, a in zip(rw, rm)] for rw, rm in zip(w.entries, mu.entries)])


def product_measure(m1: MeasureMatrix, m2: MeasureMatrix) -> MeasureMatrix:
    if m1.universe != m2.universe:
        raise UsageError("product_measure needs matrices over the same universe")
    return MeasureMatrix(m1.universe, prod(m1.semiring, m2.semiring), [
        list(zip(r1, r2)) for r1, r2 in zip(m1.entries, m2.entries)])


def min_cost_count_measure(costs: MeasureMatrix) -> MeasureMatrix:
    """``(costs Delta #) x #`` over ``prod(delta(trop,nat),nat)``."""
    count = counting_measure(costs.universe)
    return product_measure(delta_measure(costs, count), count)


def count_min_cost(e: Expr, costs: MeasureMatrix):
    """Minimal cost over ``[e]`` and the number of solutions reaching it.

    When every solution costs ``inf`` they are all minimal, so the plain
    count is reported; both numbers come from a single evaluation pass.
    """
    if costs.semiring != TROP:
        raise UsageError(f"costs must be tropical, got {costs.semiring}")
    (best, tally), total = evaluate(e, min_cost_count_measure(costs)).payload
    if best == INF:
        return INF, total
    return best, tally


def sat_weight_families(kind: str, variables: Iterable, weights: Mapping | None = None,
                        order: Iterable | None = None) -> dict:
    """Cost table over the Boolean codomain ``(False, True)``.

    ``min_card``: every true variable costs 1. ``min_weight``: true ``x`` costs
    ``weights[x]``. ``min_lex``: the i-th of ``order`` (1-based, length l)
    costs ``2**(l - i)``, other variables cost 0. False always costs 0.
    """
    variables = list(variables)
    if kind == "min_card":
        w = dict.fromkeys(variables, 1)
    elif kind == "min_weight":
        if weights is None:
            raise UsageError("min_weight needs a weight per variable")
        w = {x: weights[x] for x in variables}
        if any(type(v) is not int or v < 0 for v in w.values()):
            raise UsageError("weights must be non-negative integers")
    elif kind == "min_lex":
        order = list(order or ())
        if len(order) > 62:
            raise CostOverflowError(f"min_lex over {len(order)} variables exceeds 64-bit costs")
        w = dict.fromkeys(variables, 0)
        for i, x in enumerate(order, 1):
            if x not in w:
                raise UsageError(f"{x!r} is not a variable")
            w[x] = 2 ** (len(order) - i)
    else:
        raise UsageError(f"unknown weight family {kind!r}")
    if sum(w.values()) > INT64_MAX:
        raise CostOverflowError("total weight exceeds 64-bit costs")
    table = {}
    for x in variables:
        table[x, True] = w[x]
        table[x, False] = 0
    return table


# -- matrix files ----------------------------------------------------------


def parse_matrix(text: str, universe: Universe | None = None, *,
                 default_semiring: Semiring | None = None,
                 fill_missing: bool = False) -> MeasureMatrix:
    """Read ``semiring: <descriptor>`` then one ``s t value`` row per pair.

    With a universe, atoms are matched to its elements by ``str`` and every
    pair must be present (or defaults to ``one`` with ``fill_missing``).
    Without one, ``S`` and ``T`` are taken in order of first appearance.
    The header may be omitted when ``default_semiring`` is given.
    """
    desc = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if desc is None:
            key, sep, rest = line.partition(":")
            if sep and key.strip() == "semiring":
                desc = parse_semiring(rest.strip())
                continue
            if default_semiring is None:
                raise ParseError("expected 'semiring: <descriptor>' header", lineno, 1)
            desc = default_semiring
        parts = line.split(None, 2)
        if len(parts) != 3:
            raise ParseError("expected 's t value'", lineno, 1)
        try:
            val = desc.parse(parts[2])
        except ParseError as exc:
            raise ParseError(str(exc), lineno, raw.find(parts[2]) + 1) from None
        rows.append((parts[0], parts[1], val, lineno))
    if desc is None:
        if default_semiring is None:
            raise ParseError("missing 'semiring:' header", 1, 1)
        desc = default_semiring
    if universe is None:
        S = list(dict.fromkeys(r[0] for r in rows))
        T = list(dict.fromkeys(r[1] for r in rows))
        universe = Universe(S, T)
    s_by = {str(s): s for s in universe.S}
    t_by = {str(t): t for t in universe.T}
    table = {}
    for s, t, val, lineno in rows:
        if s not in s_by:
            raise ParseError(f"unknown domain element {s!r}", lineno, 1)
        if t not in t_by:
            raise ParseError(f"unknown codomain element {t!r}", lineno, 1)
        key = (s_by[s], t_by[t])
        if key in table:
            raise ParseError(f"duplicate entry for ({s}, {t})", lineno, 1)
        table[key] = val
    missing = [(s, t) for s in universe.S for t in universe.T if (s, t) not in table]
    if missing and not fill_missing:
        s, t = missing[0]
        raise ParseError(f"matrix has no entry for ({s}, {t}) ({len(missing)} missing)")
    return MeasureMatrix(universe, desc, table)


def format_matrix(m: MeasureMatrix) -> str:
    lines = [f"semiring: {m.semiring}"]
    for s, row in zip(m.universe.S, m.entries):
        for t, x in zip(m.universe.T, row):
            lines.append(f"{s} {t} {m.semiring.format(x)}")
    return "\n".join(lines) + "\n"


__all__ = [
    "MeasureMatrix", "decision_measure", "counting_measure", "list_measure", "cost_measure",
    "delta_measure", "product_measure", "min_cost_count_measure", "count_min_cost",
    "sat_weight_families", "parse_matrix", "format_matrix", "DELTANAT",
]
