"""Minimal s-expression reader and writer.

Atoms are bare tokens (symbols or integers); lists are parenthesized.
Comments run from ';' to end of line.  The reader tracks line and column so
parse failures point at the offending token.
"""

from __future__ import annotations

from .errors import ParseError

Node = str | int | list


def tokenize(text: str):
    """Yield (token, line, col) triples; token is '(', ')' or an atom string."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            yield text[start:i], line, start_col


def _atom(token: str) -> Node:
    if token.lstrip("-").isdigit():
        return int(token)
    return token


def parse_all(text: str) -> list[Node]:
    """Parse every form in the text."""
    out: list[Node] = []
    stack: list[list[Node]] = []
    last = (1, 1)
    for token, line, col in tokenize(text):
        last = (line, col)
        if token == "(":
            stack.append([])
        elif token == ")":
            if not stack:
                raise ParseError("unmatched ')'", line, col)
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(_atom(token))
    if stack:
        raise ParseError("unclosed '('", *last)
    return out


def parse_one(text: str) -> Node:
    forms = parse_all(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def write(node: Node) -> str:
    if isinstance(node, list):
        return "(" + " ".join(write(x) for x in node) + ")"
    return str(node)


def write_pretty(node: Node, width: int = 100) -> str:
    """One flat line when it fits, otherwise head-on-first-line layout."""
    flat = write(node)
    if not isinstance(node, list) or len(flat) <= width:
        return flat
    head = node[0] if node and not isinstance(node[0], list) else None
    lines: list[str] = []
    rest = node[1:] if head is not None else node
    opener = f"({head}" if head is not None else "("
    lines.append(opener)
    for child in rest:
        for sub in write_pretty(child, width - 2).splitlines():
            lines.append("  " + sub)
    lines[-1] += ")"
    return "\n".join(lines)
