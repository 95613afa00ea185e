"""Minimal s-expression reader with line/column positions for error messages."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


@dataclass
class SNode:
    value: str | list[SNode]
    line: int
    column: int

    def fail(self, message):
        raise ParseError(message, self.line, self.column)

    def atom(self) -> str:
        if not isinstance(self.value, str):
            self.fail("expected an atom")
        return self.value

    def int(self) -> int:
        try:
            return int(self.atom())
        except ValueError:
            self.fail(f"expected an integer, got {self.value!r}")

    def expect_len(self, n):
        if len(self.value) != n:
            self.fail(f"expected {n - 1} argument(s), got {len(self.value) - 1}")


def _tokens(text):
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col = line + 1, 1
            i += 1
        elif c.isspace():
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, line, col
            i += 1
            col += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], line, col
            col += j - i
            i = j


def parse_sexpr(text: str) -> SNode:
    """Parse exactly one s-expression (``;`` starts a comment)."""
    stack: list[SNode] = []
    result = None
    for tok, line, col in _tokens(text):
        if result is not None:
            raise ParseError("trailing input after expression", line, col)
        if tok == "(":
            stack.append(SNode([], line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            node = stack.pop()
            if stack:
                stack[-1].value.append(node)
            else:
                result = node
        else:
            node = SNode(tok, line, col)
            if stack:
                stack[-1].value.append(node)
            else:
                result = node
    if stack:
        raise ParseError("unclosed '('", stack[-1].line, stack[-1].column)
    if result is None:
        raise ParseError("empty input", 1, 1)
    return result
