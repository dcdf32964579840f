# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled counting and sampling kernels.

Port of ``_kernels_py``; any change there must be mirrored here so both
backends agree draw for draw.  Sampling runs without the GIL, so several
threads can race in ``run_sampler`` at once.
"""
from libc.stdlib cimport malloc, realloc, free
from libc.stdint cimport uint64_t

cdef extern from *:
    """
    #include <stdint.h>
    static inline double lg_draw(uint64_t *s) {
        uint64_t z = (*s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return (double)(z >> 11) * (1.0 / 9007199254740992.0);
    }
    static inline int lg_flag_load(int *p) { return __atomic_load_n(p, __ATOMIC_ACQUIRE); }
    static inline void lg_flag_store(int *p, int v) { __atomic_store_n(p, v, __ATOMIC_RELEASE); }
    """
    double lg_draw(uint64_t *s) nogil
    int lg_flag_load(int *p) nogil
    void lg_flag_store(int *p, int v) nogil

NAME = "compiled"

MODE_TYPED = M_TYPED
MODE_NF = M_NF
MODE_NF_FLAT = M_NF_FLAT

cdef enum:
    M_TYPED = 0
    M_NF = 1
    M_NF_FLAT = 2
    ST_TYPED = 0
    ST_N = 1
    ST_M = 2
    ST_FLAT = 3
    UNBOUND = -1
    ARROW = -2
    ABS_CODE = -1
    APP_CODE = -2


cdef class CancelToken:
    cdef int flag

    def set(self):
        lg_flag_store(&self.flag, 1)

    def is_set(self):
        return lg_flag_load(&self.flag) != 0


# ---------------------------------------------------------------- type heap

cdef struct Heap:
    int *ref      # UNBOUND, ARROW, or the cell a bound variable points to
    int *lhs
    int *rhs
    int top
    int *trail
    int ttop
    int *stk      # scratch for unify/occurs, grown on demand
    int scap
    int err


cdef int heap_init(Heap *h, int cap) noexcept nogil:
    h.ref = <int *>malloc(cap * sizeof(int))
    h.lhs = <int *>malloc(cap * sizeof(int))
    h.rhs = <int *>malloc(cap * sizeof(int))
    h.trail = <int *>malloc(cap * sizeof(int))
    h.scap = 4 * cap + 64
    h.stk = <int *>malloc(h.scap * sizeof(int))
    h.top = 0
    h.ttop = 0
    h.err = 0
    if h.ref == NULL or h.lhs == NULL or h.rhs == NULL or h.trail == NULL or h.stk == NULL:
        return -1
    return 0


cdef void heap_free(Heap *h) noexcept nogil:
    free(h.ref)
    free(h.lhs)
    free(h.rhs)
    free(h.trail)
    free(h.stk)


cdef inline int new_var(Heap *h) noexcept nogil:
    cdef int c = h.top
    h.ref[c] = UNBOUND
    h.top += 1
    return c


cdef inline int new_arrow(Heap *h, int a, int b) noexcept nogil:
    cdef int c = h.top
    h.ref[c] = ARROW
    h.lhs[c] = a
    h.rhs[c] = b
    h.top += 1
    return c


cdef inline int deref(Heap *h, int c) noexcept nogil:
    while h.ref[c] >= 0:
        c = h.ref[c]
    return c


cdef inline int push(Heap *h, int sp, int v) noexcept nogil:
    cdef int *grown
    if sp >= h.scap:
        grown = <int *>realloc(h.stk, 2 * h.scap * sizeof(int))
        if grown == NULL:
            h.err = 1
            return sp
        h.stk = grown
        h.scap *= 2
    h.stk[sp] = v
    return sp + 1


cdef int occurs(Heap *h, int var, int t, int base) noexcept nogil:
    cdef int sp = push(h, base, t)
    cdef int c
    while sp > base:
        sp -= 1
        c = deref(h, h.stk[sp])
        if c == var:
            return 1
        if h.ref[c] == ARROW:
            sp = push(h, sp, h.rhs[c])
            sp = push(h, sp, h.lhs[c])
    return 0


cdef int unify(Heap *h, int a, int b) noexcept nogil:
    cdef int sp = 0
    cdef int x, y
    sp = push(h, sp, a)
    sp = push(h, sp, b)
    while sp > 0:
        sp -= 1
        y = deref(h, h.stk[sp])
        sp -= 1
        x = deref(h, h.stk[sp])
        if x == y:
            continue
        if h.ref[x] == UNBOUND:
            if occurs(h, x, y, sp):
                return 0
            h.ref[x] = y
            h.trail[h.ttop] = x
            h.ttop += 1
        elif h.ref[y] == UNBOUND:
            if occurs(h, y, x, sp):
                return 0
            h.ref[y] = x
            h.trail[h.ttop] = y
            h.ttop += 1
        else:
            sp = push(h, sp, h.rhs[x])
            sp = push(h, sp, h.rhs[y])
            sp = push(h, sp, h.lhs[x])
            sp = push(h, sp, h.lhs[y])
    return 1


cdef list heap_type_code(Heap *h, int root):
    out = []
    cdef int sp = push(h, 0, root)
    cdef int c
    while sp > 0:
        sp -= 1
        c = deref(h, h.stk[sp])
        if h.ref[c] == ARROW:
            out.append(-1)
            sp = push(h, sp, h.rhs[c])
            sp = push(h, sp, h.lhs[c])
        else:
            out.append(c)
    return out


# ---------------------------------------------------------------- counting

cdef struct Search:
    Heap h
    int typed
    int closed
    int nf
    int *g_ty
    int *g_env
    int *g_depth
    int *g_nf
    int gsp
    int *env_var
    int *env_parent
    int etop
    int *amb
    int alen


cdef int lookup(Search *s, int env, int depth, int k) noexcept nogil:
    cdef int i, j
    if k < depth:
        for i in range(k):
            env = s.env_parent[env]
        return s.env_var[env]
    j = k - depth
    while s.alen <= j:
        s.amb[s.alen] = new_var(&s.h)
        s.alen += 1
    return s.amb[j]


cdef inline void undo(Search *s, int hm, int tm, int am) noexcept nogil:
    while s.h.ttop > tm:
        s.h.ttop -= 1
        s.h.ref[s.h.trail[s.h.ttop]] = UNBOUND
    s.h.top = hm
    s.alen = am


cdef unsigned long long solve(Search *s, int remaining) noexcept nogil:
    if s.gsp == 0:
        return 1 if remaining == 0 else 0
    s.gsp -= 1
    cdef int g = s.gsp
    cdef int ty = s.g_ty[g]
    cdef int env = s.g_env[g]
    cdef int depth = s.g_depth[g]
    cdef int nf_left = s.g_nf[g]
    cdef unsigned long long total = 0
    cdef int k, hi, lo, hm, tm, am, r, x, xs, f, e

    hi = remaining
    if s.closed and depth - 1 < hi:
        hi = depth - 1
    lo = remaining if s.gsp == 0 else 0
    for k in range(lo, hi + 1):
        if s.typed:
            hm = s.h.top
            tm = s.h.ttop
            am = s.alen
            if unify(&s.h, ty, lookup(s, env, depth, k)):
                total += solve(s, remaining - k)
            undo(s, hm, tm, am)
        else:
            total += solve(s, remaining - k)

    if not nf_left and remaining >= 1:
        hm = s.h.top
        tm = s.h.ttop
        am = s.alen
        x = -1
        xs = -1
        if s.typed:
            r = deref(&s.h, ty)
            if s.h.ref[r] == UNBOUND:
                x = new_var(&s.h)
                xs = new_var(&s.h)
                s.h.ref[r] = new_arrow(&s.h, x, xs)
                s.h.trail[s.h.ttop] = r
                s.h.ttop += 1
            else:
                x = s.h.lhs[r]
                xs = s.h.rhs[r]
        e = s.etop
        s.env_var[e] = x
        s.env_parent[e] = env
        s.etop += 1
        s.g_ty[g] = xs
        s.g_env[g] = e
        s.g_depth[g] = depth + 1
        s.g_nf[g] = 0
        s.gsp += 1
        total += solve(s, remaining - 1)
        s.gsp -= 1
        s.etop -= 1
        if s.typed:
            undo(s, hm, tm, am)

    if remaining >= 2:
        hm = s.h.top
        tm = s.h.ttop
        am = s.alen
        x = -1
        f = -1
        if s.typed:
            x = new_var(&s.h)
            f = new_arrow(&s.h, x, ty)
        s.g_ty[g] = x
        s.g_env[g] = env
        s.g_depth[g] = depth
        s.g_nf[g] = 0
        s.g_ty[g + 1] = f
        s.g_env[g + 1] = env
        s.g_depth[g + 1] = depth
        s.g_nf[g + 1] = s.nf
        s.gsp += 2
        total += solve(s, remaining - 2)
        s.gsp -= 2
        if s.typed:
            undo(s, hm, tm, am)

    s.g_ty[g] = ty
    s.g_env[g] = env
    s.g_depth[g] = depth
    s.g_nf[g] = nf_left
    s.gsp += 1
    return total


def count_search(bint typed, bint closed, bint nf, int units):
    """Count terms of exactly ``units`` by exhaustive search (see _kernels_py)."""
    if units < 0:
        return 0
    cdef Search s
    cdef int cap = 4 * units + 16
    cdef unsigned long long total
    s.typed = typed
    s.closed = closed
    s.nf = nf
    s.g_ty = <int *>malloc(cap * sizeof(int))
    s.g_env = <int *>malloc(cap * sizeof(int))
    s.g_depth = <int *>malloc(cap * sizeof(int))
    s.g_nf = <int *>malloc(cap * sizeof(int))
    s.env_var = <int *>malloc(cap * sizeof(int))
    s.env_parent = <int *>malloc(cap * sizeof(int))
    s.amb = <int *>malloc(cap * sizeof(int))
    cdef int ok = heap_init(&s.h, cap)
    try:
        if (ok != 0 or s.g_ty == NULL or s.g_env == NULL or s.g_depth == NULL
                or s.g_nf == NULL or s.env_var == NULL or s.env_parent == NULL or s.amb == NULL):
            raise MemoryError()
        s.etop = 0
        s.alen = 0
        s.g_ty[0] = new_var(&s.h)
        s.g_env[0] = -1
        s.g_depth[0] = 0
        s.g_nf[0] = 0
        s.gsp = 1
        with nogil:
            total = solve(&s, units)
        if s.h.err:
            raise MemoryError()
        return total
    finally:
        heap_free(&s.h)
        free(s.g_ty)
        free(s.g_env)
        free(s.g_depth)
        free(s.g_nf)
        free(s.env_var)
        free(s.env_parent)
        free(s.amb)


# ---------------------------------------------------------------- sampling

cdef struct Sampler:
    Heap h
    int mode
    double t0
    double t1
    double t2
    int min_units
    int max_units
    int *env_var
    int *env_parent
    int etop
    int *g_state
    int *g_ty
    int *g_env
    int *g_next
    int gsp
    int *code
    int clen
    int units


cdef inline void push_goal(Sampler *sm, int state, int ty, int env, int with_next) noexcept nogil:
    cdef int g = sm.gsp
    sm.g_state[g] = state
    sm.g_ty[g] = ty
    sm.g_env[g] = env
    sm.g_next[g] = with_next
    sm.gsp += 1


cdef int attempt(Sampler *sm, uint64_t *rng) noexcept nogil:
    cdef Heap *h = &sm.h
    cdef int state, ty, env, with_next, choice, k, e, c, x, xs, i
    cdef double r
    h.top = 0
    h.ttop = 0
    sm.etop = 0
    sm.gsp = 0
    sm.clen = 0
    sm.units = 0
    new_var(h)
    if sm.mode == M_TYPED:
        push_goal(sm, ST_TYPED, 0, -1, 0)
    elif sm.mode == M_NF:
        push_goal(sm, ST_N, 0, -1, 0)
    else:
        push_goal(sm, ST_FLAT, 0, -1, 0)

    while sm.gsp > 0:
        sm.gsp -= 1
        state = sm.g_state[sm.gsp]
        ty = sm.g_ty[sm.gsp]
        env = sm.g_env[sm.gsp]
        with_next = sm.g_next[sm.gsp]
        if with_next:
            if sm.units >= sm.max_units:
                return 0
            sm.units += 1
        r = lg_draw(rng)

        if state == ST_N:
            if r < sm.t0:
                state = -1
            else:
                r = lg_draw(rng)
                state = ST_M
        if state == ST_TYPED:
            choice = 0 if r < sm.t0 else (1 if r < sm.t1 else 2)
        elif state == ST_M:
            choice = 0 if r < sm.t1 else 2
        elif state == ST_FLAT:
            choice = 1 if r < sm.t0 else (0 if r < sm.t1 else 2)
        else:
            choice = 1

        if choice == 0:
            r = lg_draw(rng)
            k = 0
            e = env
            while True:
                if e < 0:
                    return 0
                if r < sm.t2:
                    if not unify(h, ty, sm.env_var[e]):
                        return 0
                    break
                if sm.units >= sm.max_units:
                    return 0
                sm.units += 1
                r = lg_draw(rng)
                e = sm.env_parent[e]
                k += 1
            sm.code[sm.clen] = k
            sm.clen += 1
        elif choice == 1:
            sm.code[sm.clen] = ABS_CODE
            sm.clen += 1
            c = deref(h, ty)
            if h.ref[c] == UNBOUND:
                x = new_var(h)
                xs = new_var(h)
                h.ref[c] = new_arrow(h, x, xs)
            else:
                x = h.lhs[c]
                xs = h.rhs[c]
            sm.env_var[sm.etop] = x
            sm.env_parent[sm.etop] = env
            sm.etop += 1
            if state == ST_TYPED or state == ST_FLAT:
                push_goal(sm, state, xs, sm.etop - 1, 1)
            else:
                push_goal(sm, ST_N, xs, sm.etop - 1, 1)
        else:
            sm.code[sm.clen] = APP_CODE
            sm.clen += 1
            x = new_var(h)
            new_arrow(h, x, ty)
            if state == ST_M:
                push_goal(sm, ST_N, x, env, 1)
                push_goal(sm, ST_M, x + 1, env, 1)
            else:
                push_goal(sm, state, x, env, 1)
                push_goal(sm, state, x + 1, env, 1)

    if sm.units < sm.min_units:
        return 0
    if sm.mode == M_NF_FLAT:
        for i in range(1, sm.clen):
            if sm.code[i] == ABS_CODE and sm.code[i - 1] == APP_CODE:
                return 0
    return 1


def run_sampler(int mode, double t0, double t1, double t2, int min_units, int max_units,
                long long max_attempts, rng_state, CancelToken cancel=None):
    """Repeat attempts until success, cancellation or ``max_attempts``.

    Returns ``(attempts, rng_state, result)``; ``result`` is
    ``(term_code, type_code, units)`` or None.
    """
    cdef Sampler sm
    cdef int cap = 3 * max_units + 16
    cdef uint64_t st = <uint64_t>(rng_state & 0xFFFFFFFFFFFFFFFF)
    cdef long long attempts = 0
    cdef int found = 0
    cdef int *flag = NULL
    if cancel is not None:
        flag = &cancel.flag
    sm.mode = mode
    sm.t0 = t0
    sm.t1 = t1
    sm.t2 = t2
    sm.min_units = min_units
    sm.max_units = max_units
    sm.env_var = <int *>malloc(cap * sizeof(int))
    sm.env_parent = <int *>malloc(cap * sizeof(int))
    sm.g_state = <int *>malloc(cap * sizeof(int))
    sm.g_ty = <int *>malloc(cap * sizeof(int))
    sm.g_env = <int *>malloc(cap * sizeof(int))
    sm.g_next = <int *>malloc(cap * sizeof(int))
    sm.code = <int *>malloc(cap * sizeof(int))
    cdef int ok = heap_init(&sm.h, cap)
    try:
        if (ok != 0 or sm.env_var == NULL or sm.env_parent == NULL or sm.g_state == NULL
                or sm.g_ty == NULL or sm.g_env == NULL or sm.g_next == NULL or sm.code == NULL):
            raise MemoryError()
        with nogil:
            while attempts < max_attempts:
                if flag != NULL and lg_flag_load(flag):
                    break
                attempts += 1
                if attempt(&sm, &st):
                    found = 1
                    break
        if sm.h.err:
            raise MemoryError()
        if not found:
            return attempts, st, None
        code = [sm.code[i] for i in range(sm.clen)]
        return attempts, st, (code, heap_type_code(&sm.h, 0), sm.units)
    finally:
        heap_free(&sm.h)
        free(sm.env_var)
        free(sm.env_parent)
        free(sm.g_state)
        free(sm.g_ty)
        free(sm.g_env)
        free(sm.g_next)
        free(sm.code)
