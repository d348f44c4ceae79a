"""Evaluation, small-step transitions, bounded execution and semantic checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from .gcl_syntax import (
    And, Assign, BinOp, BoolLit, Cmp, Do, If, Lit, Not, Or, Seq, Skip, Var,
    cmd_vars,
)

VALID = "VALID"
COUNTEREXAMPLE = "COUNTEREXAMPLE"
INCONCLUSIVE = "INCONCLUSIVE"
MAX_CEX = 5


@dataclass(frozen=True)
class DomainBound:
    """Finite oracle domain: per-variable integer ranges plus a step budget.

    `ranges` overrides [lo..hi] for individual variables, as ((name, lo, hi), ...).
    The pc variable ranges over `pc_domain` when that is set.
    """
    vars: tuple = ()
    lo: int = -4
    hi: int = 8
    step_budget: int = 100_000
    pc: str = "pc"
    pc_domain: tuple | None = None
    ranges: tuple = ()

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("lo must not exceed hi")
        if self.step_budget <= 0:
            raise ValueError("step_budget must be positive")
        for name, lo, hi in self.ranges:
            if lo > hi:
                raise ValueError(f"empty range for {name}")

    @classmethod
    def make(cls, vars=(), lo=-4, hi=8, ranges=None, **kw):
        rs = tuple(sorted((k, a, b) for k, (a, b) in (ranges or {}).items()))
        if kw.get("pc_domain") is not None:
            kw["pc_domain"] = tuple(sorted(set(kw["pc_domain"])))
        return cls(vars=tuple(vars), lo=lo, hi=hi, ranges=rs, **kw)

    def values(self, v):
        if v == self.pc and self.pc_domain is not None:
            return tuple(self.pc_domain)
        for name, lo, hi in self.ranges:
            if name == v:
                return tuple(range(lo, hi + 1))
        return tuple(range(self.lo, self.hi + 1))

    def with_vars(self, vars):
        return replace(self, vars=tuple(vars))

    def with_ranges(self, **ranges):
        merged = {k: (a, b) for k, a, b in self.ranges}
        merged.update(ranges)
        return replace(self, ranges=tuple(sorted((k, a, b) for k, (a, b) in merged.items())))

    def with_pc_domain(self, labels):
        return replace(self, pc_domain=tuple(sorted(set(labels))))

    def stores(self, vars=None):
        """Iterate over every store on `vars` (default: self.vars) as dicts."""
        vs = list(self.vars if vars is None else vars)
        for combo in itertools.product(*(self.values(v) for v in vs)):
            yield dict(zip(vs, combo))


@dataclass
class Verdict:
    status: str
    counterexamples: list = field(default_factory=list)
    detail: str = ""
    bounded: bool = True

    @property
    def valid(self):
        return self.status == VALID

    def __bool__(self):
        return self.valid

    def __str__(self):
        s = self.status
        if self.detail:
            s += f" ({self.detail})"
        for cex in self.counterexamples:
            s += f"\n  counterexample: {cex}"
        return s


def valid(detail=""):
    return Verdict(VALID, [], detail)


# ----------------------------------------------------------------- evaluation

class UnboundVariable(KeyError):
    pass


def mod(a, b):
    """Remainder with the sign of the dividend; mod 0 is 0."""
    if b == 0:
        return 0
    r = abs(a) % abs(b)
    return r if a >= 0 else -r


_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_int(e, s):
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        try:
            return s[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, BinOp):
        a, b = eval_int(e.left, s), eval_int(e.right, s)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return mod(a, b)
    raise TypeError(f"not an integer expression: {e!r}")


def eval_bool(e, s):
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Cmp):
        return _CMP[e.op](eval_int(e.left, s), eval_int(e.right, s))
    if isinstance(e, Not):
        return not eval_bool(e.arg, s)
    if isinstance(e, And):
        return all(eval_bool(a, s) for a in e.args)
    if isinstance(e, Or):
        return any(eval_bool(a, s) for a in e.args)
    raise TypeError(f"not a boolean expression: {e!r}")


# --------------------------------------------------------------------- stores

def freeze(s):
    return tuple(sorted(s.items()))


def thaw(fs):
    return dict(fs)


def update(fs, x, v):
    d = dict(fs)
    d[x] = v
    return freeze(d)


def show_store(s):
    items = s.items() if isinstance(s, dict) else s
    return " ".join(f"{k}={v}" for k, v in sorted(items))


# ------------------------------------------------------------ small-step rules

@dataclass(frozen=True)
class Config:
    command: object
    store: tuple  # frozen store

    @property
    def terminal(self):
        return isinstance(self.command, Skip)


def step(cfg):
    """All successors of a configuration under the transition rules."""
    c, fs = cfg.command, cfg.store
    if isinstance(c, Skip):
        return set()
    if isinstance(c, Assign):
        return {Config(Skip(-c.label), update(fs, c.var, eval_int(c.rhs, dict(fs))))}
    if isinstance(c, Seq):
        if isinstance(c.first, Skip):
            return {Config(c.second, fs)}
        return {Config(Seq(d.command, c.second), d.store) for d in step(Config(c.first, fs))}
    s = dict(fs)
    enabled = [gc for gc in c.gcs if eval_bool(gc.guard, s)]
    if isinstance(c, If):
        return {Config(gc.body, fs) for gc in enabled}
    if not enabled:
        return {Config(Skip(-c.label), fs)}
    return {Config(Seq(gc.body, c), fs) for gc in enabled}


COMPLETE = "Complete"
BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class RunResult:
    outcomes: frozenset  # of frozen stores
    status: str

    @property
    def complete(self):
        return self.status == COMPLETE

    def stores(self):
        return [dict(t) for t in sorted(self.outcomes)]


def run(c, s, bound):
    """Breadth-first exploration of all executions, up to step_budget steps per path."""
    frontier = {Config(c, freeze(s))}
    outcomes = set()
    for _ in range(bound.step_budget + 1):
        nxt = set()
        for cfg in frontier:
            if cfg.terminal:
                outcomes.add(cfg.store)
            else:
                nxt |= step(cfg)
        frontier = nxt
        if not frontier:
            return RunResult(frozenset(outcomes), COMPLETE)
    return RunResult(frozenset(outcomes), BUDGET_EXCEEDED)


def denote_bigstep(c, s, bound):
    """Recursive big-step evaluator; each loop may iterate at most step_budget times."""
    out, exceeded = _den(c, {freeze(s)}, bound.step_budget)
    return RunResult(frozenset(out), BUDGET_EXCEEDED if exceeded else COMPLETE)


def _den(c, stores, budget):
    if isinstance(c, Skip):
        return set(stores), False
    if isinstance(c, Assign):
        return {update(fs, c.var, eval_int(c.rhs, dict(fs))) for fs in stores}, False
    if isinstance(c, Seq):
        mid, e1 = _den(c.first, stores, budget)
        out, e2 = _den(c.second, mid, budget)
        return out, e1 or e2
    if isinstance(c, If):
        out, exc = set(), False
        for fs in stores:
            s = dict(fs)
            for gc in c.gcs:
                if eval_bool(gc.guard, s):
                    o, e = _den(gc.body, {fs}, budget)
                    out |= o
                    exc = exc or e
        return out, exc
    out, exc = set(), False
    cur = set(stores)
    for _ in range(budget):
        if not cur:
            break
        nxt = set()
        for fs in cur:
            s = dict(fs)
            enabled = [gc for gc in c.gcs if eval_bool(gc.guard, s)]
            if not enabled:
                out.add(fs)
            for gc in enabled:
                o, e = _den(gc.body, {fs}, budget)
                nxt |= o
                exc = exc or e
        cur = nxt
    else:
        if cur:
            exc = True
    return out, exc


# ----------------------------------------------------------- semantic checks

def _universe(bound, *cmds, formulas=()):
    from .assertions import formula_vars
    vs = set(bound.vars)
    for c in cmds:
        vs |= cmd_vars(c)
    for f in formulas:
        vs |= formula_vars(f)
    return sorted(vs)


def check_unary(c, P, Q, bound):
    """Partial correctness of c for pre P and post Q over all stores in the bound."""
    from .assertions import holds
    vs = _universe(bound, c, formulas=(P, Q))
    cex, inconclusive = [], False
    for s in bound.stores(vs):
        if not holds(P, s):
            continue
        res = run(c, s, bound)
        if not res.complete:
            inconclusive = True
        for t in res.stores():
            if not holds(Q, t):
                cex.append({"pre": s, "post": t})
                if len(cex) >= MAX_CEX:
                    return Verdict(COUNTEREXAMPLE, cex)
    if cex:
        return Verdict(COUNTEREXAMPLE, cex)
    if inconclusive:
        return Verdict(INCONCLUSIVE, detail="step budget exceeded")
    return valid()


def check_rel(c, c2, R, S, bound):
    """forall-forall relational correctness of (c, c2) for pre R and post S."""
    from .assertions import holds_rel, rel_matrix
    vs = _universe(bound, c, c2, formulas=(R, S))
    left = list(bound.stores(vs))
    right = left
    related = rel_matrix(R, left, right)
    cache_l, cache_r = {}, {}
    cex, inconclusive = [], False
    for i, j in zip(*related.nonzero()):
        if i not in cache_l:
            cache_l[i] = run(c, left[i], bound)
        if j not in cache_r:
            cache_r[j] = run(c2, right[j], bound)
        r1, r2 = cache_l[i], cache_r[j]
        if not (r1.complete and r2.complete):
            inconclusive = True
        for t in r1.stores():
            for t2 in r2.stores():
                if not holds_rel(S, t, t2):
                    cex.append({"pre": (left[i], right[j]), "post": (t, t2)})
                    if len(cex) >= MAX_CEX:
                        return Verdict(COUNTEREXAMPLE, cex)
    if cex:
        return Verdict(COUNTEREXAMPLE, cex)
    if inconclusive:
        return Verdict(INCONCLUSIVE, detail="step budget exceeded")
    return valid()

