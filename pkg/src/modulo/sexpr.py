"""Minimal s-expression reader and writer.

Atoms are plain strings. Lists are Python lists. Curly braces read as a
list whose first element is the marker ``"{"`` so that indexed symbols
such as ``{K iota o}`` survive a round trip. Comments run from ``;`` to
end of line.
"""

from __future__ import annotations

from typing import Union

SExpr = Union[str, list]

BRACE = "{"

_DELIMS = "(){}"


class ParseError(Exception):
    pass


def tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in _DELIMS:
            tokens.append(ch)
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in _DELIMS and text[j] != ";":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _read(tokens: list[str], pos: int) -> tuple[SExpr, int]:
    if pos >= len(tokens):
        raise ParseError("unexpected end of input")
    tok = tokens[pos]
    if tok in "({":
        close = ")" if tok == "(" else "}"
        items: list = [BRACE] if tok == "{" else []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise ParseError(f"unclosed {tok!r}")
            if tokens[pos] == close:
                return items, pos + 1
            if tokens[pos] in ")}":
                raise ParseError(f"mismatched {tokens[pos]!r}")
            item, pos = _read(tokens, pos)
            items.append(item)
    if tok in ")}":
        raise ParseError(f"unbalanced {tok!r}")
    return tok, pos + 1


def read_all(text: str) -> list[SExpr]:
    tokens = tokenize(text)
    out = []
    pos = 0
    while pos < len(tokens):
        item, pos = _read(tokens, pos)
        out.append(item)
    return out


def read(text: str) -> SExpr:
    items = read_all(text)
    if len(items) != 1:
        raise ParseError(f"expected exactly one expression, found {len(items)}")
    return items[0]


def is_brace(x: SExpr) -> bool:
    return isinstance(x, list) and bool(x) and x[0] == BRACE


def dumps(x: SExpr) -> str:
    if isinstance(x, str):
        return x
    if is_brace(x):
        return "{" + " ".join(dumps(y) for y in x[1:]) + "}"
    return "(" + " ".join(dumps(y) for y in x) + ")"


def pretty(x: SExpr, width: int = 78, indent: int = 0) -> str:
    """Break long lists over several lines, one child per line."""
    flat = dumps(x)
    if len(flat) + indent <= width or isinstance(x, str) or is_brace(x):
        return flat
    head, rest = x[0], x[1:]
    pad = " " * (indent + 2)
    lines = ["(" + dumps(head)]
    i = 0
    while i < len(rest):
        child = rest[i]
        if isinstance(child, str) and child.startswith(":") and i + 1 < len(rest):
            # keep a keyword on the same line as its value
            value = pretty(rest[i + 1], width, indent + 3 + len(child))
            lines.append(pad + child + " " + value)
            i += 2
        else:
            lines.append(pad + pretty(child, width, indent + 2))
            i += 1
    return "\n".join(lines) + ")"


def split_keywords(items: list) -> tuple[dict[str, SExpr], list]:
    """Separate ``:key value`` pairs from positional items."""
    kw: dict[str, SExpr] = {}
    pos: list = []
    i = 0
    while i < len(items):
        it = items[i]
        if isinstance(it, str) and it.startswith(":") and len(it) > 1:
            if i + 1 >= len(items):
                raise ParseError(f"keyword {it} without a value")
            kw[it[1:]] = items[i + 1]
            i += 2
        else:
            pos.append(it)
            i += 1
    return kw, pos
