"""Simple types, occurs-check unification over a trailed store, and type inference."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .terms import Abs, App, Index, Term

__all__ = [
    "TVar", "Arrow", "SimpleType", "TypeStore",
    "infer_type", "display_type", "variable_name",
]


@dataclass(frozen=True, slots=True)
class TVar:
    id: int


@dataclass(frozen=True, slots=True)
class Arrow:
    lhs: "SimpleType"
    rhs: "SimpleType"


SimpleType = Union[TVar, Arrow]


class TypeStore:
    """Binding environment for type variables with snapshot/rollback.

    Bindings are one-way links ``var id -> type``; every binding is pushed on a
    trail so ``rollback`` can undo exactly the bindings made since a snapshot.
    No path compression is performed, which keeps rollback trivially correct.
    """

    def __init__(self):
        self._bindings: dict[int, SimpleType] = {}
        self._trail: list[int] = []
        self._next = 0

    def fresh_var(self) -> TVar:
        v = TVar(self._next)
        self._next += 1
        return v

    @property
    def live_bindings(self) -> int:
        return len(self._bindings)

    def snapshot(self) -> int:
        return len(self._trail)

    def rollback(self, mark: int) -> None:
        trail = self._trail
        bindings = self._bindings
        while len(trail) > mark:
            del bindings[trail.pop()]

    def resolve(self, t: SimpleType) -> SimpleType:
        """Follow variable bindings until an unbound variable or an arrow."""
        bindings = self._bindings
        while type(t) is TVar:
            nxt = bindings.get(t.id)
            if nxt is None:
                return t
            t = nxt
        return t

    def bind(self, v: TVar, t: SimpleType) -> None:
        if v.id in self._bindings:
            raise ValueError(f"variable {v.id} is already bound")
        self._bindings[v.id] = t
        self._trail.append(v.id)

    def occurs(self, v: TVar, t: SimpleType) -> bool:
        stack = [t]
        while stack:
            u = self.resolve(stack.pop())
            if type(u) is TVar:
                if u.id == v.id:
                    return True
            else:
                stack.append(u.rhs)
                stack.append(u.lhs)
        return False

    def unify(self, a: SimpleType, b: SimpleType) -> bool:
        """Most general unifier with occurs check.

        On failure the store is restored to its state before the call.
        """
        mark = self.snapshot()
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x = self.resolve(x)
            y = self.resolve(y)
            if x is y:
                continue
            if type(x) is TVar:
                if type(y) is TVar and y.id == x.id:
                    continue
                if self.occurs(x, y):
                    self.rollback(mark)
                    return False
                self.bind(x, y)
            elif type(y) is TVar:
                if self.occurs(y, x):
                    self.rollback(mark)
                    return False
                self.bind(y, x)
            else:
                stack.append((x.rhs, y.rhs))
                stack.append((x.lhs, y.lhs))
        return True

    def decompose_arrow(self, t: SimpleType) -> tuple[SimpleType, SimpleType]:
        """Split ``t`` as ``X -> Xs``, binding it to a fresh arrow if unbound.

        Plain unification is enough here since both halves are fresh.
        """
        r = self.resolve(t)
        if type(r) is Arrow:
            return r.lhs, r.rhs
        x, xs = self.fresh_var(), self.fresh_var()
        self.bind(r, Arrow(x, xs))
        return x, xs

    def substitute(self, t: SimpleType) -> SimpleType:
        """Return ``t`` with every bound variable replaced by its binding."""
        # post-order rebuild with an explicit stack; types can be deep
        out: list[SimpleType] = []
        stack: list = [(t, False)]
        while stack:
            u, built = stack.pop()
            if built:
                rhs = out.pop()
                lhs = out.pop()
                out.append(Arrow(lhs, rhs))
                continue
            u = self.resolve(u)
            if type(u) is TVar:
                out.append(u)
            else:
                stack.append((u, True))
                stack.append((u.rhs, False))
                stack.append((u.lhs, False))
        return out[0]


def infer_type(t: Term, *, open_term: bool = False) -> Optional[SimpleType]:
    """Principal type of ``t``, or ``None`` when ``t`` has no simple type.

    Free indices make a closed inference fail.  With ``open_term=True`` each
    free index level gets its own shared fresh variable, which is how the
    plain-typable families assign types to free variables.
    """
    store = TypeStore()
    root = store.fresh_var()
    ambient: list[TVar] = []
    stack = [(t, root, ())]
    while stack:
        node, ty, env = stack.pop()
        if type(node) is Index:
            k = node.k
            if k < len(env):
                target = env[k]
            elif open_term:
                while len(ambient) <= k - len(env):
                    ambient.append(store.fresh_var())
                target = ambient[k - len(env)]
            else:
                return None
            if not store.unify(ty, target):
                return None
        elif type(node) is Abs:
            x, xs = store.decompose_arrow(ty)
            stack.append((node.body, xs, (x,) + env))
        else:
            x = store.fresh_var()
            # function side first, matching left-to-right inference order
            stack.append((node.arg, x, env))
            stack.append((node.fun, Arrow(x, ty), env))
    return store.substitute(root)


def variable_name(i: int) -> str:
    """A, B, ..., Z, then A1, B1, ..., Z1, A2, ..."""
    letter = chr(ord("A") + i % 26)
    return letter if i < 26 else f"{letter}{i // 26}"


def display_type(t: SimpleType, store: Optional[TypeStore] = None) -> str:
    """Render with variables lettered in first-occurrence order.

    Arrows associate to the right; a top-level arrow is wrapped in
    parentheses, e.g. ``(A->B->A)``.
    """
    if store is not None:
        t = store.substitute(t)
    names: dict[int, str] = {}
    out: list[str] = []
    # items: a type to render, or a literal string
    stack: list = [t]
    while stack:
        item = stack.pop()
        if type(item) is str:
            out.append(item)
        elif type(item) is TVar:
            name = names.get(item.id)
            if name is None:
                name = names[item.id] = variable_name(len(names))
            out.append(name)
        else:
            stack.append(item.rhs)
            stack.append("->")
            if type(item.lhs) is Arrow:
                stack.append(")")
                stack.append(item.lhs)
                stack.append("(")
            else:
                stack.append(item.lhs)
    body = "".join(out)
    return f"({body})" if type(t) is Arrow else body
