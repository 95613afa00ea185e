"""Runtime-selectable commutative semirings and the Delta-product.

A :class:`Semiring` is a descriptor tree; its methods operate on raw payloads
(``bool`` for the Boolean semiring, ``int`` for the naturals, ``int`` or
:data:`INF` for tropical costs, 2-tuples for Delta and Cartesian products).
:class:`Value` pairs a payload with its descriptor for checked arithmetic.

Dioids are the Boolean semiring (``T`` is the better cost, ``min`` is ``or``,
the dioid product is ``and``), the tropical semiring, and Delta-products whose
both arguments are dioids.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

from .errors import CostOverflowError, ParseError, UsageError

INF = math.inf
INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

_KINDS = ("bool", "nat", "trop", "delta", "prod")


def checked_cost_add(x, y):
    if x == INF or y == INF:
        return INF
    s = x + y
    if s < INT64_MIN or s > INT64_MAX:
        raise CostOverflowError(f"tropical cost overflow: {x} + {y}")
    return s


@dataclass(frozen=True)
class Semiring:
    kind: str
    left: Semiring | None = None
    right: Semiring | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise UsageError(f"unknown semiring kind {self.kind!r}")
        binary = self.kind in ("delta", "prod")
        if binary != (self.left is not None and self.right is not None):
            raise UsageError(f"{self.kind} takes {'two' if binary else 'no'} arguments")
        if self.kind == "delta" and not self.left.is_dioid:
            raise UsageError(f"first argument of delta must be a dioid, got {self.left}")

    def __str__(self):
        if self.left is None:
            return self.kind
        return f"{self.kind}({self.left},{self.right})"

    @cached_property
    def is_dioid(self) -> bool:
        """Totally ordered idempotent dioid (usable as a Delta cost component)."""
        if self.kind in ("bool", "trop"):
            return True
        if self.kind == "delta":
            return self.right.is_dioid
        return False

    @cached_property
    def zero(self):
        k = self.kind
        if k == "bool":
            return False
        if k == "nat":
            return 0
        if k == "trop":
            return INF
        return (self.left.zero, self.right.zero)

    @cached_property
    def one(self):
        k = self.kind
        if k == "bool":
            return True
        if k == "nat":
            return 1
        if k == "trop":
            return 0
        return (self.left.one, self.right.one)

    def add(self, x, y):
        k = self.kind
        if k == "bool":
            return x or y
        if k == "nat":
            return x + y
        if k == "trop":
            return x if x <= y else y
        if k == "prod":
            return (self.left.add(x[0], y[0]), self.right.add(x[1], y[1]))
        c = self.left.compare(x[0], y[0])
        if c < 0:
            return x
        if c > 0:
            return y
        return self.pack(x[0], self.right.add(x[1], y[1]))

    def mul(self, x, y):
        k = self.kind
        if k == "bool":
            return x and y
        if k == "nat":
            return x * y
        if k == "trop":
            return checked_cost_add(x, y)
        if k == "prod":
            return (self.left.mul(x[0], y[0]), self.right.mul(x[1], y[1]))
        return self.pack(self.left.mul(x[0], y[0]), self.right.mul(x[1], y[1]))

    def sum(self, xs):
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def product(self, xs):
        acc = self.one
        for x in xs:
            acc = self.mul(acc, x)
        return acc

    # -- dioid structure -------------------------------------------------

    def _require_dioid(self):
        if not self.is_dioid:
            raise UsageError(f"{self} is not a totally ordered idempotent dioid")

    def is_regular(self, d) -> bool:
        self._require_dioid()
        k = self.kind
        if k == "bool":
            return d is True
        if k == "trop":
            return d != INF
        # a pair is regular iff both components are
        return self.left.is_regular(d[0]) and self.right.is_regular(d[1])

    def compare(self, d1, d2) -> int:
        """-1, 0 or 1 according to the dioid order (smaller is cheaper)."""
        k = self.kind
        if k == "trop":
            return (d1 > d2) - (d1 < d2)
        if k == "bool":
            # T <= F
            return (d2 > d1) - (d2 < d1) if d1 != d2 else 0
        if k == "delta" and self.is_dioid:
            c = self.left.compare(d1[0], d2[0])
            return c if c else self.right.compare(d1[1], d2[1])
        raise UsageError(f"{self} is not a totally ordered idempotent dioid")

    def pack(self, d, a):
        """The ``d Delta a`` element: ``a`` survives only next to a regular cost."""
        if self.kind != "delta":
            raise UsageError(f"delta_pack needs a delta descriptor, got {self}")
        if self.left.is_regular(d):
            return (d, a)
        return (d, self.right.zero)

    # -- membership and literals -----------------------------------------

    def contains(self, x) -> bool:
        k = self.kind
        if k == "bool":
            return isinstance(x, bool)
        if k == "nat":
            return type(x) is int and x >= 0
        if k == "trop":
            return x == INF if isinstance(x, float) else (
                type(x) is int and INT64_MIN <= x <= INT64_MAX)
        if not (isinstance(x, tuple) and len(x) == 2):
            return False
        if not (self.left.contains(x[0]) and self.right.contains(x[1])):
            return False
        if k == "delta":
            return self.left.is_regular(x[0]) or x[1] == self.right.zero
        return True

    def format(self, x) -> str:
        k = self.kind
        if k == "bool":
            return "T" if x else "F"
        if k in ("nat", "trop"):
            return "inf" if x == INF else str(x)
        return f"({self.left.format(x[0])},{self.right.format(x[1])})"

    def parse(self, text: str):
        toks = _tokenize_literal(text)
        pos, x = self._parse_tokens(toks, 0)
        if pos != len(toks):
            raise ParseError(f"trailing input in value literal {text!r}")
        if not self.contains(x):
            raise ParseError(f"{text!r} is not an element of {self}")
        return x

    def _parse_tokens(self, toks, pos):
        if pos >= len(toks):
            raise ParseError("unexpected end of value literal")
        k = self.kind
        tok = toks[pos]
        if k in ("delta", "prod"):
            if tok != "(":
                raise ParseError(f"expected '(' for a {self} value, got {tok!r}")
            pos, a = self.left._parse_tokens(toks, pos + 1)
            if pos >= len(toks) or toks[pos] != ",":
                raise ParseError("expected ',' in pair literal")
            pos, b = self.right._parse_tokens(toks, pos + 1)
            if pos >= len(toks) or toks[pos] != ")":
                raise ParseError("expected ')' closing pair literal")
            return pos + 1, (a, b)
        if k == "bool":
            if tok not in ("T", "F"):
                raise ParseError(f"expected T or F, got {tok!r}")
            return pos + 1, tok == "T"
        if tok == "inf" and k == "trop":
            return pos + 1, INF
        try:
            return pos + 1, int(tok)
        except ValueError:
            raise ParseError(f"expected an integer for {self}, got {tok!r}") from None


_LITERAL_TOKEN = re.compile(r"\s*(?:([(),])|([^\s(),]+))")


def _tokenize_literal(text):
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _LITERAL_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot tokenize {text!r}")
        toks.append(m.group(1) or m.group(2))
        pos = m.end()
    return toks


BOOL = Semiring("bool")
NAT = Semiring("nat")
TROP = Semiring("trop")


def delta(dioid: Semiring, inner: Semiring) -> Semiring:
    return Semiring("delta", dioid, inner)


def prod(a: Semiring, b: Semiring) -> Semiring:
    return Semiring("prod", a, b)


DELTANAT = delta(TROP, NAT)


def parse_semiring(text: str) -> Semiring:
    """Parse ``bool | nat | trop | delta(D,A) | prod(A,B)``."""
    toks = _tokenize_literal(text)

    def rec(pos):
        if pos >= len(toks):
            raise ParseError(f"unexpected end of descriptor {text!r}")
        name = toks[pos]
        if name in ("bool", "nat", "trop"):
            return pos + 1, Semiring(name)
        if name not in ("delta", "prod"):
            raise ParseError(f"unknown semiring {name!r} in {text!r}")
        if pos + 1 >= len(toks) or toks[pos + 1] != "(":
            raise ParseError(f"expected '(' after {name}")
        pos, a = rec(pos + 2)
        if pos >= len(toks) or toks[pos] != ",":
            raise ParseError(f"expected ',' in {text!r}")
        pos, b = rec(pos + 1)
        if pos >= len(toks) or toks[pos] != ")":
            raise ParseError(f"expected ')' in {text!r}")
        return pos + 1, Semiring(name, a, b)

    pos, desc = rec(0)
    if pos != len(toks):
        raise ParseError(f"trailing input in descriptor {text!r}")
    return desc


# -- checked value-level API ---------------------------------------------


@dataclass(frozen=True)
class Value:
    semiring: Semiring
    payload: object

    def __post_init__(self):
        if not self.semiring.contains(self.payload):
            raise UsageError(f"{self.payload!r} is not an element of {self.semiring}")

    def _same(self, other):
        if not isinstance(other, Value) or other.semiring != self.semiring:
            raise UsageError(f"semiring mismatch: {self.semiring} vs "
                             f"{getattr(other, 'semiring', type(other).__name__)}")

    def __add__(self, other):
        self._same(other)
        return Value(self.semiring, self.semiring.add(self.payload, other.payload))

    def __mul__(self, other):
        self._same(other)
        return Value(self.semiring, self.semiring.mul(self.payload, other.payload))

    def __str__(self):
        return self.semiring.format(self.payload)

    def __repr__(self):
        return f"Value({self.semiring}, {self})"


def add(a: Value, b: Value) -> Value:
    return a + b


def mul(a: Value, b: Value) -> Value:
    return a * b


def zero(desc: Semiring) -> Value:
    return Value(desc, desc.zero)


def one(desc: Semiring) -> Value:
    return Value(desc, desc.one)


def is_regular(d: Value) -> bool:
    return d.semiring.is_regular(d.payload)


def delta_pack(d: Value, a: Value) -> Value:
    if not d.semiring.is_dioid:
        raise UsageError(f"{d.semiring} is not a dioid")
    desc = delta(d.semiring, a.semiring)
    return Value(desc, desc.pack(d.payload, a.payload))


def dioid_compare(d1: Value, d2: Value) -> str:
    d1._same(d2)
    return ("lt", "eq", "gt")[d1.semiring.compare(d1.payload, d2.payload) + 1]


def value(desc: Semiring | str, literal: str) -> Value:
    """Build a value from its literal, e.g. ``value("delta(trop,nat)", "(3,2)")``."""
    if isinstance(desc, str):
        desc = parse_semiring(desc)
    return Value(desc, desc.parse(literal))
