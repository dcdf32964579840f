"""Exhaustive generation and exact counting of the seven term classes.

Enumeration reproduces Prolog's depth-first clause order: for every pending
subterm the alternatives are tried as index (``0`` before longer successor
chains), then lambda, then application.  Both children of an application are
generated with a free size budget and only the whole term must use up the
budget exactly, so a function child is explored in its own clause order
before the argument is chosen.  Typable classes unify types while each node
is chosen, so untypable prefixes are cut at once.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from functools import lru_cache
from typing import Iterator, Optional

from . import _backend
from .simple_types import Arrow, SimpleType, TypeStore, display_type, infer_type
from .terms import ABS_CODE, APP_CODE, Term, decode_prefix, is_closed, is_normal_form

__all__ = [
    "TermClass", "enumerate_terms", "enumerate_typed", "count", "count_dp",
    "count_by_search", "count_sequence", "filter_oracle", "DensityRow", "density_table",
    "format_ratio", "NA",
]

NA = "NA"


class TermClass(enum.Enum):
    PLAIN = "plain"
    CLOSED = "closed"
    PLAIN_TYPABLE = "plain-typable"
    CLOSED_TYPABLE = "closed-typable"
    PLAIN_NF = "plain-nf"
    PLAIN_TYPABLE_NF = "plain-typable-nf"
    CLOSED_TYPABLE_NF = "closed-typable-nf"

    @property
    def typed(self) -> bool:
        return "typable" in self.value

    @property
    def closed(self) -> bool:
        return self.value.startswith("closed")

    @property
    def nf(self) -> bool:
        return self.value.endswith("nf")

    @classmethod
    def parse(cls, name: str) -> "TermClass":
        try:
            return cls(name)
        except ValueError:
            names = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown term class {name!r}; choose from {names}") from None


def _search(cls: TermClass, units: int) -> Iterator[tuple[list, Optional[SimpleType]]]:
    """Yield ``(prefix code, type)`` for every term of exactly ``units``.

    The code list is shared and mutated during the search; callers copy or
    decode it before resuming the generator.
    """
    if units < 0:
        return
    typed, closed, nf = cls.typed, cls.closed, cls.nf
    store = TypeStore()
    root = store.fresh_var()
    ambient: list = []
    code: list[int] = []
    # goal: (type, env linked tuple (var, parent) or None, depth, fun-position-in-nf)
    goals = [(root, None, 0, False)]

    def lookup(env, depth, k):
        if k < depth:
            for _ in range(k):
                env = env[1]
            return env[0]
        # free index in an open context: one shared variable per level
        j = k - depth
        while len(ambient) <= j:
            ambient.append(store.fresh_var())
        return ambient[j]

    def solve(remaining):
        if not goals:
            if remaining == 0:
                yield code, (store.substitute(root) if typed else None)
            return
        goal = goals.pop()
        ty, env, depth, nf_left = goal

        hi = remaining
        if closed and depth - 1 < hi:
            hi = depth - 1
        lo = remaining if not goals else 0
        for k in range(lo, hi + 1):
            code.append(k)
            if typed:
                mark = store.snapshot()
                if store.unify(ty, lookup(env, depth, k)):
                    yield from solve(remaining - k)
                store.rollback(mark)
            else:
                yield from solve(remaining - k)
            code.pop()

        if not nf_left and remaining >= 1:
            code.append(ABS_CODE)
            mark = store.snapshot()
            x = xs = None
            if typed:
                x, xs = store.decompose_arrow(ty)
            goals.append((xs, (x, env), depth + 1, False))
            yield from solve(remaining - 1)
            goals.pop()
            store.rollback(mark)
            code.pop()

        if remaining >= 2:
            code.append(APP_CODE)
            x = f = None
            if typed:
                x = store.fresh_var()
                f = Arrow(x, ty)
            goals.append((x, env, depth, False))
            goals.append((f, env, depth, nf))
            yield from solve(remaining - 2)
            goals.pop()
            goals.pop()
            code.pop()

        goals.append(goal)

    yield from solve(units)


def enumerate_terms(cls: TermClass, units: int) -> Iterator[Term]:
    """All terms of ``cls`` with unit size ``units``, in clause order."""
    for code, _ in _search(cls, units):
        yield decode_prefix(code)


def enumerate_typed(cls: TermClass, units: int) -> Iterator[tuple[Term, SimpleType]]:
    """Like ``enumerate_terms`` for typable classes, paired with the principal type."""
    if not cls.typed:
        raise ValueError(f"{cls.value} carries no types")
    for code, ty in _search(cls, units):
        yield decode_prefix(code), ty


# ---------------------------------------------------------------- counting

def count_by_search(cls: TermClass, n: int) -> int:
    """Count terms of natural size ``n`` by exhaustive backtracking search."""
    if n <= 0:
        return 0
    return int(_backend.kernels().count_search(cls.typed, cls.closed, cls.nf, n - 1))


@lru_cache(maxsize=None)
def _plain_units(u: int) -> int:
    # index of length u, a lambda over u-1 units, or an application
    if u == 0:
        return 1
    return 1 + _plain_units(u - 1) + sum(_plain_units(a) * _plain_units(u - 2 - a) for a in range(u - 1))


@lru_cache(maxsize=None)
def _closed_units(u: int, d: int) -> int:
    # terms of u units whose free indices are all below d
    if d > u + 1:
        d = u + 1
    total = 1 if u < d else 0
    if u >= 1:
        total += _closed_units(u - 1, d + 1)
    for a in range(u - 1):
        total += _closed_units(a, d) * _closed_units(u - 2 - a, d)
    return total


@lru_cache(maxsize=None)
def _nf_units(u: int) -> tuple[int, int]:
    """``(normal forms, neutral forms)`` of ``u`` units."""
    neutral = 1 + sum(_nf_units(a)[1] * _nf_units(u - 2 - a)[0] for a in range(u - 1))
    normal = neutral + (_nf_units(u - 1)[0] if u >= 1 else 0)
    return normal, neutral


def count_dp(cls: TermClass, n: int) -> int:
    """Count untyped classes by recurrence, without generating terms."""
    if cls.typed or cls not in (TermClass.PLAIN, TermClass.CLOSED, TermClass.PLAIN_NF):
        raise ValueError(f"no size recurrence for {cls.value}; use count()")
    if n <= 0:
        return 0
    u = n - 1
    # fill caches bottom-up to keep recursion shallow
    if cls is TermClass.PLAIN:
        for i in range(u + 1):
            _plain_units(i)
        return _plain_units(u)
    if cls is TermClass.CLOSED:
        for i in range(u + 1):
            for d in range(u + 1, -1, -1):
                _closed_units(i, d)
        return _closed_units(u, 0)
    for i in range(u + 1):
        _nf_units(i)
    return _nf_units(u)[0]


def count(cls: TermClass, n: int) -> int:
    """Number of terms of ``cls`` with natural size ``n``.

    Typable classes have no size recurrence and are counted by exhaustive
    typed search; the others use ``count_dp``.
    """
    if n <= 0:
        return 0
    if cls.typed:
        return count_by_search(cls, n)
    return count_dp(cls, n)


def count_sequence(cls: TermClass, upto: int) -> list[int]:
    return [count(cls, n) for n in range(upto + 1)]


def filter_oracle(cls: TermClass, units: int) -> Iterator[tuple[Term, Optional[str]]]:
    """Generate-then-test reference: plain terms filtered by the class predicates.

    Slow; used to cross-check the interleaved generators at small sizes.
    """
    for t in enumerate_terms(TermClass.PLAIN, units):
        if cls.closed and not is_closed(t):
            continue
        if cls.nf and not is_normal_form(t):
            continue
        if cls.typed:
            ty = infer_type(t, open_term=not cls.closed)
            if ty is None:
                continue
            yield t, display_type(ty)
        else:
            yield t, None


# ---------------------------------------------------------------- density table

@dataclass(frozen=True)
class DensityRow:
    size: int
    A: int
    B: Optional[float]
    C: int
    D: Optional[float]
    E: Optional[float]

    def formatted(self) -> list[str]:
        return [str(self.size), str(self.A), format_ratio(self.B), str(self.C),
                format_ratio(self.D), format_ratio(self.E)]


def format_ratio(r: Optional[float]) -> str:
    """Three decimals, truncated toward zero; ``NA`` when undefined."""
    if r is None:
        return NA
    return str(Decimal(repr(r)).quantize(Decimal("0.001"), rounding=ROUND_DOWN))


def _ratio(a, b):
    return None if not b or a is None or b is None else a / b


def density_table(upto: int, start: int = 1) -> list[DensityRow]:
    """Rows ``start..upto``: typable counts and plain-to-typable ratios.

    ``A`` closed typable terms, ``B`` plain terms per ``A``, ``C`` closed
    typable normal forms, ``D`` plain normal forms per ``C``, ``E = B / D``.
    """
    if upto < 1:
        raise ValueError("upto must be at least 1")
    rows = []
    for n in range(max(start, 1), upto + 1):
        a = count(TermClass.CLOSED_TYPABLE, n)
        c = count(TermClass.CLOSED_TYPABLE_NF, n)
        b = _ratio(count(TermClass.PLAIN, n), a)
        d = _ratio(count(TermClass.PLAIN_NF, n), c)
        rows.append(DensityRow(n, a, b, c, d, _ratio(b, d)))
    return rows

