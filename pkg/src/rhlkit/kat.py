"""KAT terms for commands, a finite relational model, and the normal-form axioms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .assertions import SSubst, entails, ev_int, ev_store
from .gcl_syntax import (
    FALSE, Assign, BoolLit, If, Not, Or, Seq, Skip, expr_vars, show_bool, show_int,
)
from .semantics import COUNTEREXAMPLE, MAX_CEX, Verdict, valid


@dataclass(frozen=True)
class KZero:
    pass


@dataclass(frozen=True)
class KOne:
    pass


@dataclass(frozen=True)
class KTest:
    """A boolean expression used as a test."""
    cond: object


@dataclass(frozen=True)
class KNot:
    arg: object


@dataclass(frozen=True)
class KAct:
    var: str
    rhs: object


@dataclass(frozen=True)
class KSeq:
    first: object
    second: object


@dataclass(frozen=True)
class KPlus:
    left: object
    right: object


@dataclass(frozen=True)
class KStar:
    arg: object


ZERO, ONE = KZero(), KOne()
TESTS = (KZero, KOne, KTest, KNot)


def ksum(terms):
    terms = list(terms)
    if not terms:
        return ZERO
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = KPlus(t, out)
    return out


def kseq(*terms):
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = KSeq(t, out)
    return out


def test_of(b):
    """Boolean expressions map homomorphically onto tests."""
    if isinstance(b, BoolLit):
        return ONE if b.value else ZERO
    if isinstance(b, Not):
        return KNot(test_of(b.arg))
    return KTest(b)


def mkt(c):
    if isinstance(c, Skip):
        return ONE
    if isinstance(c, Assign):
        return KAct(c.var, c.rhs)
    if isinstance(c, Seq):
        return KSeq(mkt(c.first), mkt(c.second))
    branches = ksum(KSeq(test_of(gc.guard), mkt(gc.body)) for gc in c.gcs)
    if isinstance(c, If):
        return branches
    enab = Or(tuple(gc.guard for gc in c.gcs)) if len(c.gcs) > 1 else c.gcs[0].guard
    return KSeq(KStar(branches), KNot(test_of(enab)))


def kat_vars(t):
    if isinstance(t, (KZero, KOne)):
        return frozenset()
    if isinstance(t, KTest):
        return expr_vars(t.cond)
    if isinstance(t, (KNot, KStar)):
        return kat_vars(t.arg)
    if isinstance(t, KAct):
        return frozenset([t.var]) | expr_vars(t.rhs)
    if isinstance(t, KSeq):
        return kat_vars(t.first) | kat_vars(t.second)
    return kat_vars(t.left) | kat_vars(t.right)


def show_kat(t):
    """Flat rendering with tokens 0 1 + ; * ! and [b] for primitive tests."""
    if isinstance(t, KZero):
        return "0"
    if isinstance(t, KOne):
        return "1"
    if isinstance(t, KTest):
        return f"[{show_bool(t.cond)}]"
    if isinstance(t, KNot):
        return f"!{show_kat(t.arg)}"
    if isinstance(t, KAct):
        return f"{t.var} := {show_int(t.rhs)}"
    if isinstance(t, KSeq):
        return f"({show_kat(t.first)} ; {show_kat(t.second)})"
    if isinstance(t, KPlus):
        return f"({show_kat(t.left)} + {show_kat(t.right)})"
    return f"({show_kat(t.arg)})*"


# ------------------------------------------------------------ relational model

class StateSpace:
    """Every store over `vars` within the bound, indexed in mixed radix.

    Actions whose result leaves the box have no transition: the model is the
    relational one restricted to executions that stay inside the bound.
    """

    def __init__(self, vars, bound):
        self.vars = tuple(sorted(vars))
        self.values = [np.array(bound.values(v), dtype=np.int64) for v in self.vars]
        self.sizes = [len(v) for v in self.values]
        self.n = int(np.prod(self.sizes)) if self.sizes else 1
        idx = np.arange(self.n)
        self.env = {}
        self.digits = []
        rest = idx
        for v, vals, size in reversed(list(zip(self.vars, self.values, self.sizes))):
            d = rest % size
            rest = rest // size
            self.digits.insert(0, d)
            self.env[v] = vals[d]
        self.strides = [int(np.prod(self.sizes[i + 1:])) for i in range(len(self.sizes))]

    def store(self, i):
        return {v: int(self.env[v][i]) for v in self.vars}

    def eye(self):
        return sp.identity(self.n, dtype=bool, format="csr")

    def test_mask(self, cond):
        return np.broadcast_to(np.asarray(ev_store(cond, self.env), dtype=bool), (self.n,))

    def action(self, var, rhs):
        k = self.vars.index(var)
        new = np.broadcast_to(np.asarray(ev_int(rhs, self.env), dtype=np.int64), (self.n,))
        vals = self.values[k]
        pos = np.searchsorted(vals, new)
        pos_c = np.minimum(pos, len(vals) - 1)
        ok = vals[pos_c] == new
        src = np.nonzero(ok)[0]
        dst = src + (pos_c[src] - self.digits[k][src]) * self.strides[k]
        return sp.csr_matrix((np.ones(len(src), dtype=bool), (src, dst)), shape=(self.n, self.n))


def _diag(mask):
    return sp.diags(mask.astype(bool), format="csr", dtype=bool)


def _test_mask(t, space):
    if isinstance(t, KZero):
        return np.zeros(space.n, dtype=bool)
    if isinstance(t, KOne):
        return np.ones(space.n, dtype=bool)
    if isinstance(t, KNot):
        return ~_test_mask(t.arg, space)
    return space.test_mask(t.cond)


def interp(t, space, _memo=None):
    """Boolean relation matrix of t over the state space."""
    memo = {} if _memo is None else _memo
    key = t
    if key in memo:
        return memo[key]
    if isinstance(t, TESTS):
        out = _diag(_test_mask(t, space))
    elif isinstance(t, KAct):
        out = space.action(t.var, t.rhs)
    elif isinstance(t, KSeq):
        out = interp(t.first, space, memo) @ interp(t.second, space, memo)
    elif isinstance(t, KPlus):
        out = interp(t.left, space, memo) + interp(t.right, space, memo)
    else:
        out = star(interp(t.arg, space, memo))
    out = sp.csr_matrix(out, dtype=bool)
    out.eliminate_zeros()
    memo[key] = out
    return out


def star(a):
    """Reflexive-transitive closure by semi-naive iteration."""
    n = a.shape[0]
    acc = sp.identity(n, dtype=bool, format="csr")
    delta = acc
    while True:
        step = delta @ a
        new = step - step.multiply(acc)
        new = sp.csr_matrix(new, dtype=bool)
        new.eliminate_zeros()
        if new.nnz == 0:
            return acc
        acc = acc + new
        delta = new


def equiv_semantic(t1, t2, bound, vars=None):
    """Equality of the two relations over the bounded box (bounded, never a proof)."""
    vs = set(vars or ()) | kat_vars(t1) | kat_vars(t2)
    space = StateSpace(vs, bound)
    memo = {}
    a, b = interp(t1, space, memo), interp(t2, space, memo)
    diff = sp.csr_matrix(a != b)
    if diff.nnz == 0:
        return valid(f"bounded over {space.n} states")
    rows, cols = diff.nonzero()
    cex = []
    for i, j in list(zip(rows, cols))[:MAX_CEX]:
        cex.append({"from": space.store(i), "to": space.store(j), "in_left": bool(a[i, j])})
    return Verdict(COUNTEREXAMPLE, cex, detail=f"relations differ on {diff.nnz} pairs")


def equiv_commands(c, d, bound, vars=None):
    return equiv_semantic(mkt(c), mkt(d), bound, vars)


# ------------------------------------------------------------------ axioms

@dataclass(frozen=True)
class KatEquation:
    lhs: object
    rhs: object
    name: str


def _pc_is(pc, n):
    from .assertions import pc_test
    return KTest(pc_test(pc, n))


def _set(pc, n):
    from .gcl_syntax import Lit
    return KAct(pc, Lit(n))


def diff_test(pc, n, m):
    """?n ; ?m = 0 for distinct n and m."""
    return KatEquation(KSeq(_pc_is(pc, n), _pc_is(pc, m)), ZERO, f"diffTest({n},{m})")


def set_test(pc, n):
    """!n = !n ; ?n."""
    return KatEquation(_set(pc, n), KSeq(_set(pc, n), _pc_is(pc, n)), f"setTest({n})")


def tot_if(guards):
    """The sum of the guards is 1 when they cover every store."""
    return KatEquation(ksum(test_of(g) for g in guards), ONE, "totIf")


def test_commute_asgn(test, x, e):
    """A test not reading x commutes with x := e."""
    if x in expr_vars(test):
        raise ValueError("test reads the assigned variable")
    return KatEquation(KSeq(KTest(test), KAct(x, e)), KSeq(KAct(x, e), KTest(test)),
                       f"testCommuteAsgn({x})")


def hyp_false(e, bound):
    """e = 0, admitted when e is unsatisfiable over the bound."""
    if not entails(e, FALSE, bound).valid:
        return None
    return KatEquation(test_of(e), ZERO, "hypFalse")


def hyp_assign(e0, x, e, e1, bound):
    """e0 ; x := e ; not e1 = 0, admitted when e0 implies e1[x := e]."""
    if not entails(e0, SSubst(e1, x, e), bound).valid:
        return None
    return KatEquation(kseq(test_of(e0), KAct(x, e), KNot(test_of(e1))), ZERO, "hypAssign")


def check_equation(eq, bound, vars=None):
    return equiv_semantic(eq.lhs, eq.rhs, bound, vars)


__all__ = [
    "KZero", "KOne", "KTest", "KNot", "KAct", "KSeq", "KPlus", "KStar", "ZERO", "ONE",
    "mkt", "show_kat", "StateSpace", "interp", "star", "equiv_semantic", "equiv_commands",
    "KatEquation", "diff_test", "set_test", "tot_if", "test_commute_asgn", "hyp_false",
    "hyp_assign", "check_equation", "ksum", "kseq", "test_of",
]
