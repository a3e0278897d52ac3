"""A small s-expression reader that keeps source spans."""

from __future__ import annotations

from dataclasses import dataclass

Span = tuple  # (line, col, end_line, end_col), 1-based, end exclusive


class SyntaxErr(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.span = span


class Sym(str):
    span: Span = (1, 1, 1, 1)


@dataclass
class SList:
    items: list
    span: Span

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def head(self) -> str | None:
        return self.items[0] if self.items and isinstance(self.items[0], Sym) else None


DELIMS = set("() \t\r\n;")


def read_all(text: str) -> list:
    """Parse every top-level form; raises SyntaxErr with a span on failure."""
    pos, line, col = 0, 1, 1
    stack: list[tuple[list, tuple]] = []
    top: list = []
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            pos, line, col = pos + 1, line + 1, 1
            continue
        if ch in " \t\r":
            pos, col = pos + 1, col + 1
            continue
        if ch == ";":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        if ch == "(":
            stack.append(([], (line, col)))
            pos, col = pos + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise SyntaxErr("unexpected ')'", (line, col, line, col + 1))
            items, (l0, c0) = stack.pop()
            node = SList(items, (l0, c0, line, col + 1))
            (stack[-1][0] if stack else top).append(node)
            pos, col = pos + 1, col + 1
            continue
        start = pos
        while pos < n and text[pos] not in DELIMS:
            pos += 1
        tok = Sym(text[start:pos])
        tok.span = (line, col, line, col + pos - start)
        col += pos - start
        (stack[-1][0] if stack else top).append(tok)
    if stack:
        _, (l0, c0) = stack[-1]
        raise SyntaxErr("unbalanced '(': missing ')'", (l0, c0, l0, c0 + 1))
    return top


def span_of(x) -> Span:
    return getattr(x, "span", (1, 1, 1, 1))
