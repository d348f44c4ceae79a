"""Program automata, alignment products, reachability and adequacy checks."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .assertions import (
    Ext, PairExt, StateRelSpec, holds, holds_rel, rel_matrix, formula_vars,
    rel_fv, store_fv,
)
from .gcl_syntax import FALSE, Or, Skip, cmd_vars, fsuc, lab, labs, okf, sub
from .semantics import (
    COUNTEREXAMPLE, INCONCLUSIVE, MAX_CEX, Config, Verdict, freeze, step, valid,
)


class BudgetExceeded(Exception):
    def __init__(self, partial):
        super().__init__("reachability budget exceeded")
        self.partial = partial


class PreconditionError(ValueError):
    pass


@dataclass
class Automaton:
    """Control points, init/fin and a step function over (control, frozen store).

    For products the control is a pair and the store is a pair of frozen stores.
    """
    ctrl: frozenset
    init: object
    fin: object
    step_fn: object
    vars: tuple = ()
    kind: str = "program"
    parts: tuple = ()
    specs: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False)

    def step(self, n, s):
        key = (n, s)
        out = self._cache.get(key)
        if out is None:
            out = frozenset() if n == self.fin else frozenset(self.step_fn(n, s))
            self._cache[key] = out
        return out


def build_aut(c, f, vars=()):
    """aut(c, f): control labs(c) + {f}, stepping sub(n, c) on its own."""
    if not okf(c, f):
        raise PreconditionError(f"okf fails for final label {f}")
    ls = labs(c)
    subs = {n: sub(n, c) for n in ls}
    succ = {n: fsuc(n, c, f) for n in ls}

    def step_fn(n, s):
        d = subs[n]
        if isinstance(d, Skip):
            return {(succ[n], s)}
        out = set()
        for cfg in step(Config(d, s)):
            m = lab(cfg.command)
            out.add((m if m > 0 else succ[n], cfg.store))
        return out

    vs = tuple(sorted(set(cmd_vars(c)) | set(vars)))
    return Automaton(frozenset(ls | {f}), lab(c), f, step_fn, vs)


def build_product(A, A2, L, R, J):
    """The alignment automaton: LO, RO and JO steps licensed by L, R and J."""
    at_cache = {}

    def member(spec, idx, n, n2, s, s2):
        key = (idx, n, n2)
        f = at_cache.get(key)
        if f is None:
            f = at_cache[key] = spec.at(n, n2)
        if f == FALSE:
            return False
        return holds_rel(f, dict(s), dict(s2))

    def step_fn(n, s):
        (a, b), (s1, s2) = n, s
        out = set()
        left = right = None
        if member(L, 0, a, b, s1, s2):
            left = A.step(a, s1)
            out |= {((m, b), (t, s2)) for m, t in left}
        if member(R, 1, a, b, s1, s2):
            right = A2.step(b, s2)
            out |= {((a, m), (s1, t)) for m, t in right}
        if member(J, 2, a, b, s1, s2):
            left = A.step(a, s1) if left is None else left
            right = A2.step(b, s2) if right is None else right
            out |= {((m, m2), (t, t2)) for m, t in left for m2, t2 in right}
        return out

    ctrl = frozenset((n, n2) for n in A.ctrl for n2 in A2.ctrl)
    return Automaton(ctrl, (A.init, A2.init), (A.fin, A2.fin), step_fn,
                     vars=(A.vars, A2.vars), kind="product", parts=(A, A2), specs=(L, R, J))


def restrict_live(A, A2, L, R, J):
    """Drop the states where a stepping side is final (program automata are live elsewhere).

    J steps both sides, so it is dropped wherever either side is final.
    """
    if A.kind != "program" or A2.kind != "program":
        raise PreconditionError("restrict_live is defined here for program automata only")
    return (L.minus((A.fin, None)), R.minus((None, A2.fin)),
            J.minus((A.fin, None)).minus((None, A2.fin)))


def _freeze_on(s, vars):
    return freeze({v: s[v] for v in vars})


def reachable(A, init_stores, bound):
    """All states reachable from (init, s); BudgetExceeded after step_budget expansions."""
    start = [(A.init, s if isinstance(s, tuple) else _freeze_on(s, A.vars)) for s in init_stores]
    return _bfs(A, start, bound.step_budget)


def _bfs(A, start, budget, visit=None):
    seen = set()
    queue = deque()
    for st in start:
        if st not in seen:
            seen.add(st)
            queue.append(st)
    expansions = 0
    while queue:
        n, s = queue.popleft()
        if visit is not None and visit(n, s):
            return seen
        expansions += 1
        if expansions > budget:
            raise BudgetExceeded(seen)
        for nxt in sorted(A.step(n, s)):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def _init_pairs(A, Q, bound):
    lv, rv = A.vars
    left = list(bound.stores(lv))
    right = list(bound.stores(rv))
    need_l, need_r = rel_fv(Q)
    if not need_l <= set(lv) or not need_r <= set(rv):
        raise PreconditionError("relation mentions variables outside the product stores")
    m = rel_matrix(Q, left, right)
    return [(freeze(left[i]), freeze(right[j])) for i, j in zip(*m.nonzero())]


def check_manifest_adequacy(product, L, R, J, Q, bound):
    """L or R or J or [fin|fin'] holds at every state reachable from Q-related stores."""
    fin = product.fin
    bad = []

    def visit(n, s):
        if n == fin:
            return False
        sd, sd2 = dict(s[0]), dict(s[1])
        if L.holds(*n, sd, sd2) or R.holds(*n, sd, sd2) or J.holds(*n, sd, sd2):
            return False
        bad.append({"ctrl": n, "left": sd, "right": sd2})
        return True

    start = [(product.init, pair) for pair in _init_pairs(product, Q, bound)]
    try:
        _bfs(product, start, bound.step_budget, visit)
    except BudgetExceeded:
        return Verdict(INCONCLUSIVE, detail="reachability budget exceeded")
    if bad:
        return Verdict(COUNTEREXAMPLE, bad, detail=f"invariant fails at control {bad[0]['ctrl']}")
    return valid()


def _outcomes(A, start, bound):
    states = _bfs(A, [start], bound.step_budget)
    return {s for n, s in states if n == A.fin}


def check_adequacy(A, A2, product, Q, bound):
    """Every pair of unary outcomes from Q-related stores is a product outcome."""
    cache_l, cache_r = {}, {}
    cex = []
    try:
        for s, s2 in _init_pairs(product, Q, bound):
            if s not in cache_l:
                cache_l[s] = _outcomes(A, (A.init, s), bound)
            if s2 not in cache_r:
                cache_r[s2] = _outcomes(A2, (A2.init, s2), bound)
            prod = _outcomes(product, (product.init, (s, s2)), bound)
            for t in sorted(cache_l[s]):
                for t2 in sorted(cache_r[s2]):
                    if (t, t2) not in prod:
                        cex.append({"pre": (dict(s), dict(s2)), "post": (dict(t), dict(t2))})
                        if len(cex) >= MAX_CEX:
                            return Verdict(COUNTEREXAMPLE, cex)
    except BudgetExceeded:
        return Verdict(INCONCLUSIVE, detail="reachability budget exceeded")
    if cex:
        return Verdict(COUNTEREXAMPLE, cex)
    return valid()


def strongest_annotation(A, P, bound, post=None):
    """Annotation mapping each control point to the stores reachable there from P.

    Stores are listed extensionally.  At init the annotation is P itself, widened
    by any stores outside P that reach init again.  `post`, when given, is used
    at fin instead of the reachable set.
    """
    from .assertions import Annotation

    if A.kind == "product":
        lv, rv = A.vars
        start = [(A.init, pair) for pair in _init_pairs(A, P, bound)]
    else:
        if not store_fv(P) <= set(A.vars):
            raise PreconditionError("precondition mentions variables outside the automaton stores")
        start = [(A.init, freeze(s)) for s in bound.stores(A.vars) if holds(P, s)]
    states = _bfs(A, start, bound.step_budget)
    by_ctrl = {}
    for n, s in states:
        by_ctrl.setdefault(n, set()).add(s)
    initial = {s for _, s in start}

    def ext(rows):
        if A.kind == "product":
            return PairExt(lv, rv, frozenset((tuple(v for _, v in a), tuple(v for _, v in b))
                                             for a, b in rows))
        return Ext(A.vars, frozenset(tuple(v for _, v in s) for s in rows))

    entries = {}
    for n, rows in by_ctrl.items():
        if n == A.init:
            extra = rows - initial
            entries[n] = P if not extra else Or((P, ext(extra)))
        else:
            entries[n] = ext(rows)
    if post is not None:
        entries[A.fin] = post
    return Annotation(entries, relational=A.kind == "product")


__all__ = [
    "Automaton", "BudgetExceeded", "PreconditionError", "build_aut", "build_product",
    "restrict_live", "reachable", "check_manifest_adequacy", "check_adequacy",
    "strongest_annotation", "StateRelSpec", "formula_vars",
]
