"""De Bruijn lambda terms, their sizes, and the ``0 / s(.) / l(.) / a(.,.)`` text format.

Sizes are tracked in *units* internally: ``s`` and ``l`` weigh one unit, ``a``
weighs two and the leaf ``0`` weighs nothing.  The natural size of a term is its
unit size plus one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

__all__ = [
    "Index", "Abs", "App", "Term", "ParseError",
    "unit_size", "natural_size", "is_closed", "is_normal_form",
    "parse_term", "print_term", "encode_prefix", "decode_prefix",
]


@dataclass(frozen=True, slots=True)
class Index:
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"de Bruijn index must be nonnegative, got {self.k}")

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Abs:
    body: "Term"

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self):
        return print_term(self)


Term = Union[Index, Abs, App]


class ParseError(ValueError):
    """Malformed term text.

    ``offset`` counts characters from 1, so an error at the end of ``"a(0"``
    is reported at offset 4.
    """

    def __init__(self, message: str, index: int):
        self.offset = index + 1
        super().__init__(f"{message} at offset {self.offset}")


def unit_size(t: Term) -> int:
    total = 0
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is Index:
            total += node.k
        elif type(node) is Abs:
            total += 1
            stack.append(node.body)
        else:
            total += 2
            stack.append(node.arg)
            stack.append(node.fun)
    return total


def natural_size(t: Term) -> int:
    return unit_size(t) + 1


def is_closed(t: Term) -> bool:
    stack = [(t, 0)]
    while stack:
        node, depth = stack.pop()
        if type(node) is Index:
            if node.k >= depth:
                return False
        elif type(node) is Abs:
            stack.append((node.body, depth + 1))
        else:
            stack.append((node.arg, depth))
            stack.append((node.fun, depth))
    return True


def is_normal_form(t: Term) -> bool:
    """True iff no application has an abstraction in function position."""
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is Abs:
            stack.append(node.body)
        elif type(node) is App:
            if type(node.fun) is Abs:
                return False
            stack.append(node.arg)
            stack.append(node.fun)
    return True


def print_term(t: Term) -> str:
    out: list[str] = []
    stack: list = [t]
    while stack:
        node = stack.pop()
        if type(node) is str:
            out.append(node)
        elif type(node) is Index:
            out.append("s(" * node.k + "0" + ")" * node.k)
        elif type(node) is Abs:
            out.append("l(")
            stack.append(")")
            stack.append(node.body)
        else:
            out.append("a(")
            stack.append(")")
            stack.append(node.arg)
            stack.append(",")
            stack.append(node.fun)
    return "".join(out)


def parse_term(text: str) -> Term:
    """Parse the canonical syntax; whitespace between tokens is ignored.

    ``s(...)`` must wrap an index, since successors only build de Bruijn indices.
    """
    n = len(text)
    pos = 0

    def skip(p):
        while p < n and text[p].isspace():
            p += 1
        return p

    def expect(p, ch):
        p = skip(p)
        if p >= n:
            raise ParseError(f"expected {ch!r} but input ended", p)
        if text[p] != ch:
            raise ParseError(f"expected {ch!r}, found {text[p]!r}", p)
        return p + 1

    # frames: ["s", start_offset] | ["l"] | ["a", left_or_None]
    stack: list[list] = []
    while True:
        pos = skip(pos)
        if pos >= n:
            raise ParseError("expected a term but input ended", pos)
        ch = text[pos]
        if ch == "0":
            pos += 1
            value: Term = Index(0)
        elif ch in "sla":
            start = pos
            pos = expect(pos + 1, "(")
            stack.append([ch, start] if ch == "s" else [ch, None])
            continue
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)

        # reduce completed subterms
        while stack:
            frame = stack[-1]
            kind = frame[0]
            if kind == "s":
                if type(value) is not Index:
                    raise ParseError("s(...) must wrap a de Bruijn index", frame[1])
                pos = expect(pos, ")")
                stack.pop()
                value = Index(value.k + 1)
            elif kind == "l":
                pos = expect(pos, ")")
                stack.pop()
                value = Abs(value)
            elif frame[1] is None:
                frame[1] = value
                pos = expect(pos, ",")
                break
            else:
                pos = expect(pos, ")")
                stack.pop()
                value = App(frame[1], value)
        else:
            pos = skip(pos)
            if pos != n:
                raise ParseError(f"trailing input {text[pos]!r}", pos)
            return value


# Flat prefix code shared with the sampling kernels:
# k >= 0 is Index(k), -1 is Abs, -2 is App.
ABS_CODE = -1
APP_CODE = -2


def encode_prefix(t: Term) -> list[int]:
    code = []
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is Index:
            code.append(node.k)
        elif type(node) is Abs:
            code.append(ABS_CODE)
            stack.append(node.body)
        else:
            code.append(APP_CODE)
            stack.append(node.arg)
            stack.append(node.fun)
    return code


def decode_prefix(code) -> Term:
    # frames: [op, children-so-far]
    stack: list[list] = []
    i = 0
    n = len(code)
    while i < n:
        c = code[i]
        i += 1
        if c == ABS_CODE:
            stack.append([ABS_CODE, None])
            continue
        if c == APP_CODE:
            stack.append([APP_CODE, None])
            continue
        value: Term = Index(c)
        while stack:
            frame = stack[-1]
            if frame[0] == ABS_CODE:
                stack.pop()
                value = Abs(value)
            elif frame[1] is None:
                frame[1] = value
                break
            else:
                stack.pop()
                value = App(frame[1], value)
        else:
            if i != n:
                raise ValueError("prefix code has trailing entries")
            return value
    raise ValueError("truncated prefix code")
