"""Pure-Python kernels: exhaustive counting search and Boltzmann sampling attempts.

This module defines the reference behaviour; ``_kernels.pyx`` is a line-by-line
port and must stay draw-for-draw identical.

Types live on a small heap ``cells``: ``None`` is an unbound variable, an
``int`` is a variable bound to that cell, a ``(lhs, rhs)`` tuple is an arrow.
"""

from ._rng import SplitMix64

NAME = "python"

MODE_TYPED = 0
MODE_NF = 1
MODE_NF_FLAT = 2

# sampler states
_ST_TYPED = 0
_ST_N = 1
_ST_M = 2
_ST_FLAT = 3

_ABS = -1
_APP = -2


class CancelToken:
    __slots__ = ("_flag",)

    def __init__(self):
        self._flag = False

    def set(self):
        self._flag = True

    def is_set(self):
        return self._flag


def _deref(cells, c):
    v = cells[c]
    while type(v) is int:
        c = v
        v = cells[c]
    return c


def _occurs(cells, var, t):
    stack = [t]
    while stack:
        c = _deref(cells, stack.pop())
        if c == var:
            return True
        v = cells[c]
        if v is not None:
            stack.append(v[1])
            stack.append(v[0])
    return False


def _unify(cells, a, b, trail):
    """Occurs-check unification; bound variables are appended to ``trail``."""
    stack = [a, b]
    while stack:
        y = _deref(cells, stack.pop())
        x = _deref(cells, stack.pop())
        if x == y:
            continue
        cx = cells[x]
        cy = cells[y]
        if cx is None:
            if _occurs(cells, x, y):
                return False
            cells[x] = y
            trail.append(x)
        elif cy is None:
            if _occurs(cells, y, x):
                return False
            cells[y] = x
            trail.append(y)
        else:
            stack.append(cx[1])
            stack.append(cy[1])
            stack.append(cx[0])
            stack.append(cy[0])
    return True


def type_code(cells, root):
    """Prefix serialisation of a resolved type: -1 for an arrow, else a var cell."""
    out = []
    stack = [root]
    while stack:
        c = _deref(cells, stack.pop())
        v = cells[c]
        if v is None:
            out.append(c)
        else:
            out.append(-1)
            stack.append(v[1])
            stack.append(v[0])
    return out


def count_search(typed, closed, nf, units):
    """Count terms of exactly ``units`` by exhaustive backtracking search.

    Pending subterm goals sit on a stack and are solved left to right; type
    constraints are applied as each node is chosen, so untypable prefixes are
    cut off immediately.
    """
    if units < 0:
        return 0
    cells = [None]
    trail = []
    ambient = []
    # goal: (type cell, env, depth, fun-position-in-nf)
    # env is a linked tuple (var cell, parent) or None
    goals = [(0, None, 0, False)]

    def lookup(env, depth, k):
        if k < depth:
            for _ in range(k):
                env = env[1]
            return env[0]
        j = k - depth
        while len(ambient) <= j:
            cells.append(None)
            ambient.append(len(cells) - 1)
        return ambient[j]

    def undo(hm, tm, am):
        while len(trail) > tm:
            cells[trail.pop()] = None
        del cells[hm:]
        del ambient[am:]

    def solve(remaining):
        if not goals:
            return 1 if remaining == 0 else 0
        goal = goals.pop()
        ty, env, depth, nf_left = goal
        total = 0

        hi = remaining
        if closed and depth - 1 < hi:
            hi = depth - 1
        lo = remaining if not goals else 0
        for k in range(lo, hi + 1):
            if typed:
                hm, tm, am = len(cells), len(trail), len(ambient)
                if _unify(cells, ty, lookup(env, depth, k), trail):
                    total += solve(remaining - k)
                undo(hm, tm, am)
            else:
                total += solve(remaining - k)

        if not nf_left and remaining >= 1:
            hm, tm, am = len(cells), len(trail), len(ambient)
            x = xs = None
            if typed:
                r = _deref(cells, ty)
                v = cells[r]
                if v is None:
                    x, xs = len(cells), len(cells) + 1
                    cells.extend((None, None, (x, xs)))
                    cells[r] = xs + 1
                    trail.append(r)
                else:
                    x, xs = v
            goals.append((xs, (x, env), depth + 1, False))
            total += solve(remaining - 1)
            goals.pop()
            if typed:
                undo(hm, tm, am)

        if remaining >= 2:
            hm, tm, am = len(cells), len(trail), len(ambient)
            x = f = None
            if typed:
                cells.append(None)
                x = len(cells) - 1
                cells.append((x, ty))
                f = x + 1
            goals.append((x, env, depth, False))
            goals.append((f, env, depth, nf))
            total += solve(remaining - 2)
            goals.pop()
            goals.pop()
            if typed:
                undo(hm, tm, am)

        goals.append(goal)
        return total

    return solve(units)


def _code_is_nf(code):
    # an Abs right after an App opcode is that App's function child
    return not any(a == _APP and b == _ABS for a, b in zip(code, code[1:]))


def attempt(mode, t0, t1, t2, min_units, max_units, rng):
    """One sampling attempt.  Returns ``(term_code, type_code, units)`` or None.

    Threshold meaning by mode:
      typed:    t0 index, t1 index+lambda (cumulative), t2 leaf
      nf/flattened: t0 lambda, t1 index, t2 leaf
    Draw order follows the reference samplers: one draw at the root, one per
    unit consumed, one before walking a de Bruijn index, and for the
    two-state NF sampler one more draw on entering the neutral state.
    """
    draw = rng.random
    cells = [None]
    env_var = []
    env_parent = []
    code = []
    units = 0
    trail = []
    if mode == MODE_TYPED:
        start = _ST_TYPED
    elif mode == MODE_NF:
        start = _ST_N
    else:
        start = _ST_FLAT
    # goal: (state, type cell, env node, consumes a unit first)
    goals = [(start, 0, -1, False)]
    while goals:
        state, ty, env, with_next = goals.pop()
        if with_next:
            if units >= max_units:
                return None
            units += 1
        r = draw()

        if state == _ST_N:
            if r < t0:
                state = -1  # abstraction
            else:
                r = draw()
                state = _ST_M
        if state == _ST_TYPED:
            choice = 0 if r < t0 else (1 if r < t1 else 2)
        elif state == _ST_M:
            choice = 0 if r < t1 else 2
        elif state == _ST_FLAT:
            choice = 1 if r < t0 else (0 if r < t1 else 2)
        else:
            choice = 1

        if choice == 0:
            r = draw()
            k = 0
            e = env
            while True:
                if e < 0:
                    return None
                if r < t2:
                    if not _unify(cells, ty, env_var[e], trail):
                        return None
                    break
                if units >= max_units:
                    return None
                units += 1
                r = draw()
                e = env_parent[e]
                k += 1
            code.append(k)
        elif choice == 1:
            code.append(_ABS)
            c = _deref(cells, ty)
            v = cells[c]
            if v is None:
                x, xs = len(cells), len(cells) + 1
                cells.extend((None, None, (x, xs)))
                cells[c] = xs + 1
            else:
                x, xs = v
            env_var.append(x)
            env_parent.append(env)
            body = _ST_TYPED if state == _ST_TYPED else (_ST_FLAT if state == _ST_FLAT else _ST_N)
            goals.append((body, xs, len(env_var) - 1, True))
        else:
            code.append(_APP)
            cells.append(None)
            x = len(cells) - 1
            cells.append((x, ty))
            if state == _ST_M:
                fun_state, arg_state = _ST_M, _ST_N
            else:
                fun_state = arg_state = state
            goals.append((arg_state, x, env, True))
            goals.append((fun_state, x + 1, env, True))

    if units < min_units:
        return None
    if mode == MODE_NF_FLAT and not _code_is_nf(code):
        return None
    return code, type_code(cells, 0), units


def run_sampler(mode, t0, t1, t2, min_units, max_units, max_attempts, rng_state, cancel=None):
    """Repeat attempts until success, cancellation or ``max_attempts``.

    Returns ``(attempts, rng_state, result)`` where ``result`` is the
    ``attempt`` triple or None.
    """
    rng = SplitMix64(rng_state)
    attempts = 0
    while attempts < max_attempts:
        if cancel is not None and cancel.is_set():
            break
        attempts += 1
        res = attempt(mode, t0, t1, t2, min_units, max_units, rng)
        if res is not None:
            return attempts, rng.state, res
    return attempts, rng.state, None
