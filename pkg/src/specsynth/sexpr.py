"""s-expression reader and printer.

problem files, function definitions, grammars and candidate properties all
share this surface syntax.  parsed forms are plain python data: ints,
symbols (str) and lists.  comments run from ';' to end of line.
"""

from __future__ import annotations

import re

__all__ = ["SexprError", "parse", "parse_located", "parse_one", "to_text",
           "is_sym"]

_INT_RE = re.compile(r"^-?[0-9]+$")


class SexprError(Exception):
    """syntax error with 1-based line/column."""

    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} (line {line}, col {col})")
        self.line = line
        self.col = col


def _tokens(text: str):
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
        elif c in " \t\r":
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
            while j < n and text[j] not in "(); \t\r\n":
                j += 1
            yield text[i:j], line, col
            col += j - i
            i = j


def parse(text: str) -> list:
    """parse all top-level forms in text."""
    forms = []
    stack = []
    last_line, last_col = 1, 1
    for tok, line, col in _tokens(text):
        last_line, last_col = line, col
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise SexprError("unbalanced ')'", line, col)
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                forms.append(done)
        else:
            atom = int(tok) if _INT_RE.match(tok) else tok
            if stack:
                stack[-1].append(atom)
            else:
                forms.append(atom)
    if stack:
        raise SexprError("unclosed '('", last_line, last_col)
    return forms


def parse_located(text: str) -> list:
    """like parse, but pairs each top-level form with its starting line."""
    out = []
    stack = []
    starts = []
    last_line, last_col = 1, 1
    for tok, line, col in _tokens(text):
        last_line, last_col = line, col
        if tok == "(":
            if not stack:
                starts.append(line)
            stack.append([])
        elif tok == ")":
            if not stack:
                raise SexprError("unbalanced ')'", line, col)
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                out.append((done, starts.pop()))
        else:
            atom = int(tok) if _INT_RE.match(tok) else tok
            if stack:
                stack[-1].append(atom)
            else:
                out.append((atom, line))
    if stack:
        raise SexprError("unclosed '('", last_line, last_col)
    return out


def parse_one(text: str):
    forms = parse(text)
    if len(forms) != 1:
        raise SexprError(f"expected one form, got {len(forms)}", 1, 1)
    return forms[0]


def to_text(form) -> str:
    if isinstance(form, (list, tuple)):
        return "(" + " ".join(to_text(f) for f in form) + ")"
    return str(form)


def is_sym(form, name: str | None = None) -> bool:
    if not isinstance(form, str):
        return False
    return name is None or form == name
