"""Store predicates, store relations, substitution, pc-encoding and bounded entailment.

Store formulas reuse the boolean expression nodes of gcl_syntax and add explicit
substitution (SSubst) and extensional sets of stores (Ext).  Relational
formulas add the left/right embeddings, cross-equality, two-sided substitution
and extensional sets of store pairs (PairExt).  Substitutions are never pushed
through syntax; they are interpreted when a formula is evaluated.
"""
from __future__ import annotations

import itertools
import operator
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .gcl_syntax import (
    FALSE, TRUE, And, BinOp, BoolLit, Cmp, GclSyntaxError, Lit, Not, Or, Parser,
    Var, conj, disj, expr_vars, show_bool, show_int,
)
from .semantics import COUNTEREXAMPLE, MAX_CEX, VALID, Verdict, mod

GRID_LIMIT = 4_000_000


# --------------------------------------------------------------------- nodes

@dataclass(frozen=True)
class SSubst:
    """body[var := expr] over a single store."""
    body: object
    var: str
    expr: object


@dataclass(frozen=True, eq=True)
class Ext:
    """The finite set of stores whose values on `vars` form one of `rows`."""
    vars: tuple
    rows: frozenset

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.vars, self.rows))

    @cached_property
    def _encoded(self):
        return _encode_rows(sorted(self.rows), len(self.vars))


@dataclass(frozen=True)
class Lhs:
    arg: object


@dataclass(frozen=True)
class Rhs:
    arg: object


@dataclass(frozen=True)
class CrossEq:
    """Value of `left` in the left store equals value of `right` in the right store.

    Both sides are integer expressions, or both are boolean expressions.  For
    integers `op` may be any comparison, giving cross-store orderings like z > z'.
    """
    left: object
    right: object
    op: str = "="


@dataclass(frozen=True)
class RSubst:
    """body[x|x' := e|e']; either side may be None."""
    body: object
    left: tuple | None
    right: tuple | None


@dataclass(frozen=True, eq=True)
class PairExt:
    """The finite set of store pairs given by rows of (left values, right values)."""
    lvars: tuple
    rvars: tuple
    rows: frozenset

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.lvars, self.rvars, self.rows))

    @cached_property
    def _encoded(self):
        flat = sorted(tuple(a) + tuple(b) for a, b in self.rows)
        return _encode_rows(flat, len(self.lvars) + len(self.rvars))


STORE_ONLY = (SSubst, Ext, Cmp)
REL_ONLY = (Lhs, Rhs, CrossEq, RSubst, PairExt)


def implies(a, b):
    return Or((Not(a), b))


def pc_test(pc, n):
    return Cmp("=", Var(pc), Lit(n))


def both(p, q=None):
    """Left p and right q (q defaults to p)."""
    return conj(Lhs(p), Rhs(p if q is None else q))


def is_relational(f):
    if isinstance(f, REL_ONLY):
        return True
    if isinstance(f, (And, Or)):
        return any(is_relational(a) for a in f.args)
    if isinstance(f, Not):
        return is_relational(f.arg)
    return False


def check_kind(f, relational):
    """Raise if f mixes store-level atoms into a relation or vice versa."""
    if isinstance(f, BoolLit):
        return
    if isinstance(f, (And, Or)):
        for a in f.args:
            check_kind(a, relational)
        return
    if isinstance(f, Not):
        check_kind(f.arg, relational)
        return
    if relational:
        if isinstance(f, (Lhs, Rhs)):
            check_kind(f.arg, False)
        elif isinstance(f, RSubst):
            check_kind(f.body, True)
        elif not isinstance(f, (CrossEq, PairExt)):
            raise TypeError(f"store-level formula used as a relation: {show_formula(f)}")
    else:
        if isinstance(f, SSubst):
            check_kind(f.body, False)
        elif not isinstance(f, (Cmp, Ext)):
            raise TypeError(f"relational formula used as a store predicate: {show_formula(f)}")


# -------------------------------------------------------------- free variables

def store_fv(f):
    if isinstance(f, BoolLit):
        return frozenset()
    if isinstance(f, Cmp):
        return expr_vars(f)
    if isinstance(f, Not):
        return store_fv(f.arg)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for a in f.args:
            out |= store_fv(a)
        return out
    if isinstance(f, SSubst):
        return (store_fv(f.body) - {f.var}) | expr_vars(f.expr)
    if isinstance(f, Ext):
        return frozenset(f.vars)
    raise TypeError(f"not a store formula: {f!r}")


def rel_fv(f):
    """(left variables, right variables) of a relational formula."""
    if isinstance(f, BoolLit):
        return frozenset(), frozenset()
    if isinstance(f, Lhs):
        return store_fv(f.arg), frozenset()
    if isinstance(f, Rhs):
        return frozenset(), store_fv(f.arg)
    if isinstance(f, CrossEq):
        return expr_vars(f.left), expr_vars(f.right)
    if isinstance(f, Not):
        return rel_fv(f.arg)
    if isinstance(f, (And, Or)):
        lv, rv = frozenset(), frozenset()
        for a in f.args:
            a_l, a_r = rel_fv(a)
            lv |= a_l
            rv |= a_r
        return lv, rv
    if isinstance(f, RSubst):
        lv, rv = rel_fv(f.body)
        if f.left is not None:
            lv = (lv - {f.left[0]}) | expr_vars(f.left[1])
        if f.right is not None:
            rv = (rv - {f.right[0]}) | expr_vars(f.right[1])
        return lv, rv
    if isinstance(f, PairExt):
        return frozenset(f.lvars), frozenset(f.rvars)
    raise TypeError(f"not a relational formula: {f!r}")


def formula_vars(f):
    if is_relational(f):
        lv, rv = rel_fv(f)
        return lv | rv
    return store_fv(f)


# ------------------------------------------------------------------ evaluation

def _imod(a, b):
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        return mod(int(a), int(b))
    b = np.asarray(b)
    safe = np.where(b == 0, 1, b)
    return np.where(b == 0, 0, np.fmod(a, safe))


_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul, "mod": _imod}
_CMPF = {"=": operator.eq, "!=": operator.ne, "<": operator.lt,
         "<=": operator.le, ">": operator.gt, ">=": operator.ge}


def ev_int(e, env):
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    return _ARITH[e.op](ev_int(e.left, env), ev_int(e.right, env))


def _land(xs):
    out = True
    for x in xs:
        out = np.logical_and(out, x)
    return out


def _lor(xs):
    out = False
    for x in xs:
        out = np.logical_or(out, x)
    return out


def _encode_rows(rows, width):
    if not rows:
        return None
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), width)
    mins = arr.min(axis=0)
    spans = arr.max(axis=0) - mins + 1
    keys = np.zeros(len(rows), dtype=np.int64)
    for i in range(width):
        keys = keys * spans[i] + (arr[:, i] - mins[i])
    return mins, spans, np.unique(keys)


def _member(encoded, rows, values):
    if encoded is None:
        return False
    if all(np.ndim(v) == 0 for v in values):
        return tuple(int(v) for v in values) in rows
    mins, spans, keys = encoded
    inside = True
    key = 0
    for i, v in enumerate(values):
        v = np.asarray(v, dtype=np.int64)
        inside = np.logical_and(inside, (v >= mins[i]) & (v < mins[i] + spans[i]))
        key = key * spans[i] + (v - mins[i])
    key = np.where(inside, key, -1)
    return np.logical_and(inside, np.isin(key, keys))


def ev_store(f, env):
    if isinstance(f, BoolLit):
        return f.value
    if isinstance(f, Cmp):
        return _CMPF[f.op](ev_int(f.left, env), ev_int(f.right, env))
    if isinstance(f, Not):
        return np.logical_not(ev_store(f.arg, env))
    if isinstance(f, And):
        return _land(ev_store(a, env) for a in f.args)
    if isinstance(f, Or):
        return _lor(ev_store(a, env) for a in f.args)
    if isinstance(f, SSubst):
        inner = dict(env)
        inner[f.var] = ev_int(f.expr, env)
        return ev_store(f.body, inner)
    if isinstance(f, Ext):
        return _member(f._encoded, f.rows, [env[v] for v in f.vars])
    raise TypeError(f"not a store formula: {f!r}")


def _ev_side(e, env):
    if isinstance(e, (Lit, Var, BinOp)):
        return ev_int(e, env)
    return ev_store(e, env)


def ev_rel(f, lenv, renv):
    if isinstance(f, BoolLit):
        return f.value
    if isinstance(f, Lhs):
        return ev_store(f.arg, lenv)
    if isinstance(f, Rhs):
        return ev_store(f.arg, renv)
    if isinstance(f, CrossEq):
        return _CMPF[f.op](_ev_side(f.left, lenv), _ev_side(f.right, renv))
    if isinstance(f, Not):
        return np.logical_not(ev_rel(f.arg, lenv, renv))
    if isinstance(f, And):
        return _land(ev_rel(a, lenv, renv) for a in f.args)
    if isinstance(f, Or):
        return _lor(ev_rel(a, lenv, renv) for a in f.args)
    if isinstance(f, RSubst):
        l2, r2 = lenv, renv
        if f.left is not None:
            l2 = dict(lenv)
            l2[f.left[0]] = ev_int(f.left[1], lenv)
        if f.right is not None:
            r2 = dict(renv)
            r2[f.right[0]] = ev_int(f.right[1], renv)
        return ev_rel(f.body, l2, r2)
    if isinstance(f, PairExt):
        vals = [lenv[v] for v in f.lvars] + [renv[v] for v in f.rvars]
        if all(np.ndim(v) == 0 for v in vals):
            n = len(f.lvars)
            return (tuple(int(v) for v in vals[:n]), tuple(int(v) for v in vals[n:])) in f.rows
        return _member(f._encoded, None, vals)
    raise TypeError(f"not a relational formula: {f!r}")


def holds(f, s):
    return bool(ev_store(f, s))


def holds_rel(f, s, t):
    return bool(ev_rel(f, s, t))


def rel_matrix(f, left, right):
    """Boolean matrix of f over lists of left and right stores."""
    lv, rv = rel_fv(f)
    lenv = {v: np.array([s[v] for s in left], dtype=np.int64)[:, None] for v in lv}
    renv = {v: np.array([s[v] for s in right], dtype=np.int64)[None, :] for v in rv}
    out = ev_rel(f, lenv, renv)
    return np.broadcast_to(np.asarray(out, dtype=bool), (len(left), len(right)))


# ----------------------------------------------------------- partial evaluation

def peval_int(e, consts):
    if isinstance(e, Var):
        return Lit(consts[e.name]) if e.name in consts else e
    if isinstance(e, BinOp):
        a, b = peval_int(e.left, consts), peval_int(e.right, consts)
        if isinstance(a, Lit) and isinstance(b, Lit):
            return Lit(int(_ARITH[e.op](a.value, b.value)))
        return BinOp(e.op, a, b)
    return e


def _mk_and(args):
    out = []
    for a in args:
        if a == FALSE:
            return FALSE
        if a != TRUE:
            out.append(a)
    return conj(*out)


def _mk_or(args):
    out = []
    for a in args:
        if a == TRUE:
            return TRUE
        if a != FALSE:
            out.append(a)
    return disj(*out)


def _mk_not(a):
    if isinstance(a, BoolLit):
        return BoolLit(not a.value)
    return Not(a)


def _restrict_rows(vars, rows, consts):
    keep = [i for i, v in enumerate(vars) if v not in consts]
    fixed = [(i, consts[v]) for i, v in enumerate(vars) if v in consts]
    sel = frozenset(tuple(r[i] for i in keep) for r in rows if all(r[i] == c for i, c in fixed))
    return tuple(vars[i] for i in keep), sel


def peval_store(f, consts):
    """Simplify f given constant values for some variables."""
    if isinstance(f, BoolLit):
        return f
    if isinstance(f, Cmp):
        a, b = peval_int(f.left, consts), peval_int(f.right, consts)
        if isinstance(a, Lit) and isinstance(b, Lit):
            return BoolLit(bool(_CMPF[f.op](a.value, b.value)))
        return Cmp(f.op, a, b)
    if isinstance(f, Not):
        return _mk_not(peval_store(f.arg, consts))
    if isinstance(f, And):
        return _mk_and(peval_store(a, consts) for a in f.args)
    if isinstance(f, Or):
        return _mk_or(peval_store(a, consts) for a in f.args)
    if isinstance(f, SSubst):
        e = peval_int(f.expr, consts)
        if isinstance(e, Lit):
            return peval_store(f.body, {**consts, f.var: e.value})
        inner = {k: v for k, v in consts.items() if k != f.var}
        body = peval_store(f.body, inner)
        if f.var not in store_fv(body):
            return body
        return SSubst(body, f.var, e)
    if isinstance(f, Ext):
        if not any(v in consts for v in f.vars):
            return f
        vars, rows = _restrict_rows(f.vars, f.rows, consts)
        if not rows:
            return FALSE
        if not vars:
            return TRUE
        return Ext(vars, rows)
    raise TypeError(f"not a store formula: {f!r}")


def _peval_side(e, consts):
    if isinstance(e, (Lit, Var, BinOp)):
        return peval_int(e, consts)
    return peval_store(e, consts)


def peval_rel(f, lc, rc):
    if isinstance(f, BoolLit):
        return f
    if isinstance(f, Lhs):
        a = peval_store(f.arg, lc)
        return a if isinstance(a, BoolLit) else Lhs(a)
    if isinstance(f, Rhs):
        a = peval_store(f.arg, rc)
        return a if isinstance(a, BoolLit) else Rhs(a)
    if isinstance(f, CrossEq):
        a, b = _peval_side(f.left, lc), _peval_side(f.right, rc)
        if isinstance(a, (Lit, BoolLit)) and isinstance(b, (Lit, BoolLit)):
            return BoolLit(bool(_CMPF[f.op](a.value, b.value)))
        if f.op != "=":
            if isinstance(a, Lit):
                return Rhs(Cmp(f.op, a, b))
            if isinstance(b, Lit):
                return Lhs(Cmp(f.op, a, b))
            return CrossEq(a, b, f.op)
        if isinstance(a, (Lit, BoolLit)) and not isinstance(b, (Lit, BoolLit)):
            return Rhs(_const_eq(b, a))
        if isinstance(b, (Lit, BoolLit)):
            return Lhs(_const_eq(a, b))
        return CrossEq(a, b)
    if isinstance(f, Not):
        return _mk_not(peval_rel(f.arg, lc, rc))
    if isinstance(f, And):
        return _mk_and(peval_rel(a, lc, rc) for a in f.args)
    if isinstance(f, Or):
        return _mk_or(peval_rel(a, lc, rc) for a in f.args)
    if isinstance(f, RSubst):
        lc2, rc2 = dict(lc), dict(rc)
        left = right = None
        if f.left is not None:
            x, e = f.left[0], peval_int(f.left[1], lc)
            lc2.pop(x, None)
            if isinstance(e, Lit):
                lc2[x] = e.value
            else:
                left = (x, e)
        if f.right is not None:
            x, e = f.right[0], peval_int(f.right[1], rc)
            rc2.pop(x, None)
            if isinstance(e, Lit):
                rc2[x] = e.value
            else:
                right = (x, e)
        body = peval_rel(f.body, lc2, rc2)
        if isinstance(body, BoolLit):
            return body
        lv, rv = rel_fv(body)
        if left is not None and left[0] not in lv:
            left = None
        if right is not None and right[0] not in rv:
            right = None
        if left is None and right is None:
            return body
        return RSubst(body, left, right)
    if isinstance(f, PairExt):
        if not any(v in lc for v in f.lvars) and not any(v in rc for v in f.rvars):
            return f
        n = len(f.lvars)
        names = [("L", v) for v in f.lvars] + [("R", v) for v in f.rvars]
        consts = {("L", v): lc[v] for v in f.lvars if v in lc}
        consts.update({("R", v): rc[v] for v in f.rvars if v in rc})
        flat = {tuple(a) + tuple(b) for a, b in f.rows}
        kept, rows = _restrict_rows(names, flat, consts)
        if not rows:
            return FALSE
        if not kept:
            return TRUE
        nl = sum(1 for side, _ in kept if side == "L")
        del n
        return PairExt(tuple(v for s, v in kept if s == "L"), tuple(v for s, v in kept if s == "R"),
                       frozenset((r[:nl], r[nl:]) for r in rows))
    raise TypeError(f"not a relational formula: {f!r}")


def _const_eq(e, lit):
    if isinstance(lit, BoolLit):
        return e if lit.value else _mk_not(e)
    return Cmp("=", e, lit)


# ------------------------------------------------------------------- entailment

def _conjuncts(f, side=None):
    """Top-level conjuncts, descending through And and through Lhs/Rhs of And."""
    if isinstance(f, And):
        for a in f.args:
            yield from _conjuncts(a, side)
    elif isinstance(f, (Lhs, Rhs)) and isinstance(f.arg, And):
        wrap = type(f)
        for a in f.arg.args:
            yield from _conjuncts(wrap(a), side)
    else:
        yield f


def _pin_of(f, relational):
    """(side, var, value) if f forces a variable to a literal."""
    side = "L"
    if relational:
        if isinstance(f, (Lhs, Rhs)):
            side = "L" if isinstance(f, Lhs) else "R"
            f = f.arg
        else:
            return None
    if isinstance(f, Cmp) and f.op == "=":
        if isinstance(f.left, Var) and isinstance(f.right, Lit):
            return side, f.left.name, f.right.value
        if isinstance(f.right, Var) and isinstance(f.left, Lit):
            return side, f.right.name, f.left.value
    return None


class _Vacuous(Exception):
    pass


def _collect_pins(F, relational, bound):
    pins, aliases = {}, {}
    for c in _conjuncts(F):
        p = _pin_of(c, relational)
        if p is not None:
            key = (p[0], p[1])
            if key in pins and pins[key] != p[2]:
                raise _Vacuous()
            if p[2] not in bound.values(p[1]):
                raise _Vacuous()
            pins[key] = p[2]
        elif relational and isinstance(c, CrossEq) and c.op == "=" and isinstance(c.left, Var) and isinstance(c.right, Var):
            a, b = c.left.name, c.right.name
            if bound.values(a) == bound.values(b) and ("R", b) not in aliases:
                aliases[("R", b)] = ("L", a)
    # propagate pins across aliases
    for rb, la in aliases.items():
        if la in pins and rb in pins and pins[la] != pins[rb]:
            raise _Vacuous()
        if la in pins:
            pins[rb] = pins[la]
        elif rb in pins:
            pins[la] = pins[rb]
    aliases = {rb: la for rb, la in aliases.items() if rb not in pins}
    return pins, aliases


def _split(consts, relational):
    lc = {v: x for (s, v), x in consts.items() if s == "L"}
    rc = {v: x for (s, v), x in consts.items() if s == "R"}
    return lc, rc


def _fv(f, relational):
    if relational:
        lv, rv = rel_fv(f)
        return {("L", v) for v in lv} | {("R", v) for v in rv}
    return {("L", v) for v in store_fv(f)}


def _peval(f, consts, relational):
    lc, rc = _split(consts, relational)
    return peval_rel(f, lc, rc) if relational else peval_store(f, lc)


def _evaluate(f, env, relational):
    lenv = {v: a for (s, v), a in env.items() if s == "L"}
    renv = {v: a for (s, v), a in env.items() if s == "R"}
    return ev_rel(f, lenv, renv) if relational else ev_store(f, lenv)


def _report(consts, relational):
    lc, rc = _split(consts, relational)
    lc = dict(sorted(lc.items()))
    rc = dict(sorted(rc.items()))
    return (lc, rc) if relational else lc


def entails(F, G, bound):
    """Valid implication F => G over every store (pair) in the bound.

    Variables pinned to literals by top-level conjuncts of F are fixed, the pc
    variable is split by cases over its domain, and the remaining free
    variables are enumerated as a broadcast numpy grid.
    """
    relational = is_relational(F) or is_relational(G)
    try:
        pins, aliases = _collect_pins(F, relational, bound)
    except _Vacuous:
        return Verdict(VALID, detail="vacuous: contradictory pins")
    cex = []
    _entail_rec(F, G, pins, aliases, bound, relational, cex)
    if cex:
        return Verdict(COUNTEREXAMPLE, cex[:MAX_CEX])
    return Verdict(VALID)


def _entail_rec(F, G, consts, aliases, bound, relational, cex):
    F1 = _peval(F, consts, relational)
    if F1 == FALSE:
        return
    G1 = _peval(G, consts, relational)
    if G1 == TRUE:
        return
    free = (_fv(F1, relational) | _fv(G1, relational)) - set(consts)
    pcs = sorted(k for k in free if k[1] == bound.pc and bound.pc_domain is not None)
    if pcs:
        key = pcs[0]
        for v in bound.values(bound.pc):
            _entail_rec(F1, G1, {**consts, key: v}, aliases, bound, relational, cex)
            if len(cex) >= MAX_CEX:
                return
        return
    # axes: every free key not aliased; aliased right vars follow their left partner
    axes = sorted(k for k in free if k not in aliases)
    for rb in sorted(k for k in free if k in aliases):
        if aliases[rb] not in axes and aliases[rb] not in consts:
            axes.append(aliases[rb])
    axes = sorted(set(axes))
    sizes = [len(bound.values(k[1])) for k in axes]
    total = int(np.prod(sizes)) if sizes else 1
    if total > GRID_LIMIT:
        big = max(range(len(axes)), key=lambda i: sizes[i])
        key = axes[big]
        for v in bound.values(key[1]):
            extra = {key: v}
            for rb, la in aliases.items():
                if la == key:
                    extra[rb] = v
            _entail_rec(F1, G1, {**consts, **extra}, aliases, bound, relational, cex)
            if len(cex) >= MAX_CEX:
                return
        return
    env = {}
    shape = [1] * len(axes)
    for i, k in enumerate(axes):
        vals = np.array(bound.values(k[1]), dtype=np.int64)
        sh = list(shape)
        sh[i] = len(vals)
        env[k] = vals.reshape(sh)
    for rb, la in aliases.items():
        if rb in free:
            env[rb] = consts[la] if la in consts else env[la]
    for k, v in consts.items():
        env.setdefault(k, v)
    fval = _evaluate(F1, env, relational)
    gval = _evaluate(G1, env, relational)
    bad = np.logical_and(fval, np.logical_not(gval))
    bad = np.broadcast_to(np.asarray(bad, dtype=bool), tuple(sizes) if sizes else ())
    if not bad.any():
        return
    for idx in np.argwhere(bad)[: MAX_CEX - len(cex)] if sizes else [()]:
        point = dict(consts)
        for i, k in enumerate(axes):
            point[k] = bound.values(k[1])[idx[i]]
        for rb, la in aliases.items():
            if rb in free and la in point:
                point[rb] = point[la]
        cex.append(_report(point, relational))


def satisfiable(F, bound):
    return not entails(F, FALSE, bound).valid


def equivalent(F, G, bound):
    return entails(F, G, bound).valid and entails(G, F, bound).valid


# ----------------------------------------------------------------- substitution

def subst_store(P, x, e):
    return SSubst(P, x, e)


def subst_rel(R, x=None, e=None, x2=None, e2=None):
    left = (x, e) if x is not None else None
    right = (x2, e2) if x2 is not None else None
    if left is None and right is None:
        return R
    return RSubst(R, left, right)


# ----------------------------------------------------------------- independence

def independent(x, P, bound):
    """P equals its existential closure over x, checked over the bound."""
    if x not in store_fv(P):
        return True
    return _independent(P, [("L", x)], bound, relational=False)


def independent_rel(x, x2, R, bound):
    lv, rv = rel_fv(R)
    keys = []
    if x is not None and x in lv:
        keys.append(("L", x))
    if x2 is not None and x2 in rv:
        keys.append(("R", x2))
    if not keys:
        return True
    return _independent(R, keys, bound, relational=True)


def _independent(f, qkeys, bound, relational):
    axes = sorted(_fv(f, relational) | set(qkeys))
    sizes = [len(bound.values(k[1])) for k in axes]
    env = {}
    for i, k in enumerate(axes):
        sh = [1] * len(axes)
        sh[i] = sizes[i]
        env[k] = np.array(bound.values(k[1]), dtype=np.int64).reshape(sh)
    val = np.broadcast_to(np.asarray(_evaluate(f, env, relational), dtype=bool), tuple(sizes))
    qaxes = tuple(axes.index(k) for k in qkeys)
    closed = val.any(axis=qaxes, keepdims=True)
    return bool(np.array_equal(np.broadcast_to(closed, val.shape), val))


# ------------------------------------------------------------ state relations

WILD = None


@dataclass(frozen=True)
class Clause:
    left: int | None
    right: int | None
    formula: object = TRUE


@dataclass(frozen=True)
class StateRelSpec:
    """Union over clauses of [n|n'] /\\ formula, minus the excluded control patterns."""
    clauses: tuple = ()
    excluded: tuple = ()

    @staticmethod
    def _match(pat, n, n2):
        return (pat[0] is None or pat[0] == n) and (pat[1] is None or pat[1] == n2)

    def at(self, n, n2):
        """The store relation this spec denotes at control (n, n')."""
        if any(self._match(p, n, n2) for p in self.excluded):
            return FALSE
        fs = [c.formula for c in self.clauses if self._match((c.left, c.right), n, n2)]
        if any(f == TRUE for f in fs):
            return TRUE
        return disj(*fs)

    def holds(self, n, n2, s, s2):
        f = self.at(n, n2)
        return f != FALSE and holds_rel(f, s, s2)

    def minus(self, pattern):
        return StateRelSpec(self.clauses, self.excluded + (tuple(pattern),))

    def without(self, left, right):
        """Drop every clause whose pattern is exactly (left, right)."""
        return StateRelSpec(tuple(c for c in self.clauses if (c.left, c.right) != (left, right)),
                            self.excluded)

    @classmethod
    def of(cls, *clauses):
        out = []
        for cl in clauses:
            if isinstance(cl, Clause):
                out.append(cl)
            elif len(cl) == 2:
                out.append(Clause(cl[0], cl[1], TRUE))
            else:
                out.append(Clause(*cl))
        return cls(tuple(out))


FALSE_SPEC = StateRelSpec()
TRUE_SPEC = StateRelSpec((Clause(None, None, TRUE),))


def not_at(left, right):
    """The spec not[left|right]."""
    return TRUE_SPEC.minus((left, right))


def _encode_pattern(pc, left, right):
    parts = []
    if left is not None:
        parts.append(Lhs(pc_test(pc, left)))
    if right is not None:
        parts.append(Rhs(pc_test(pc, right)))
    return parts


def encode_pc(spec, pc="pc"):
    """The pc-encoded store relation of a state relation spec."""
    terms = []
    for c in spec.clauses:
        parts = _encode_pattern(pc, c.left, c.right)
        if c.formula != TRUE:
            parts.append(c.formula)
        terms.append(conj(*parts))
    body = TRUE if any(t == TRUE for t in terms) else disj(*terms)
    if spec.excluded:
        ex = disj(*(conj(*_encode_pattern(pc, l, r)) for l, r in spec.excluded))
        return conj(body, Not(ex)) if body != TRUE else Not(ex)
    return body


# ---------------------------------------------------------------- annotations

@dataclass
class Annotation:
    """Control point (or control pair) -> formula; unmapped keys denote false."""
    entries: dict = field(default_factory=dict)
    relational: bool = False

    def __call__(self, key):
        return self.entries.get(key, FALSE)

    def keys(self):
        return sorted(self.entries)


# ------------------------------------------------------------ printing/parsing

_CROSS_NAMES = {"=": "eq", "!=": "ne", "<": "lt", "<=": "le", ">": "gt", ">=": "ge"}


def _show_atom(f, go):
    if isinstance(f, Lhs):
        return f"lhs({go(f.arg)})"
    if isinstance(f, Rhs):
        return f"rhs({go(f.arg)})"
    if isinstance(f, CrossEq):
        if isinstance(f.left, (Lit, Var, BinOp)):
            return f"{_CROSS_NAMES[f.op]}({show_int(f.left)}, {show_int(f.right)})"
        return f"beq({go(f.left)}, {go(f.right)})"
    if isinstance(f, SSubst):
        return f"({go(f.body)})[{f.var} := {show_int(f.expr)}]"
    if isinstance(f, RSubst):
        lx, le = (f.left[0], show_int(f.left[1])) if f.left else ("", "")
        rx, re_ = (f.right[0], show_int(f.right[1])) if f.right else ("", "")
        return f"({go(f.body)})[{lx} | {rx} := {le} | {re_}]"
    if isinstance(f, Ext):
        rows = ", ".join("(" + ", ".join(map(str, r)) + ")" for r in sorted(f.rows))
        return f"ext({', '.join(f.vars)}){{{rows}}}"
    if isinstance(f, PairExt):
        rows = ", ".join("(" + ", ".join(map(str, a)) + " | " + ", ".join(map(str, b)) + ")"
                         for a, b in sorted(f.rows))
        return f"pext({', '.join(f.lvars)} | {', '.join(f.rvars)}){{{rows}}}"
    raise TypeError(f"not a formula: {f!r}")


def show_formula(f):
    return show_bool(f, atom=_show_atom)


class FormulaParser(Parser):
    def _call(self, name):
        return self.at(name) and self.at("(", 1)

    def atom_hook(self):
        for name, ctor in (("lhs", Lhs), ("rhs", Rhs)):
            if self._call(name):
                self.advance()
                self.expect("(")
                f = self.bool_expr()
                self.expect(")")
                return ctor(f)
        for op, name in _CROSS_NAMES.items():
            if self._call(name):
                self.advance()
                self.expect("(")
                a = self.int_expr()
                self.expect(",")
                b = self.int_expr()
                self.expect(")")
                return CrossEq(a, b, op)
        if self._call("beq"):
            self.advance()
            self.expect("(")
            a = self.bool_expr()
            self.expect(",")
            b = self.bool_expr()
            self.expect(")")
            return CrossEq(a, b)
        if self._call("ext"):
            self.advance()
            self.expect("(")
            vars = self._names(")")
            self.expect(")")
            rows = self._rows(lambda: tuple(self._ints(")")))
            return Ext(tuple(vars), frozenset(rows))
        if self._call("pext"):
            self.advance()
            self.expect("(")
            lv = self._names("|")
            self.expect("|")
            rv = self._names(")")
            self.expect(")")

            def row():
                a = tuple(self._ints("|"))
                self.expect("|")
                return a, tuple(self._ints(")"))
            return PairExt(tuple(lv), tuple(rv), frozenset(self._rows(row)))
        return None

    def _names(self, stop):
        out = []
        while not self.at(stop):
            out.append(self.ident())
            if self.at(","):
                self.advance()
        return out

    def _int_lit(self):
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        n = self.number()
        return -n if neg else n

    def _ints(self, stop):
        out = []
        while not self.at(stop):
            out.append(self._int_lit())
            if self.at(","):
                self.advance()
        return out

    def _rows(self, row):
        self.expect("{")
        rows = []
        while not self.at("}"):
            self.expect("(")
            rows.append(row())
            self.expect(")")
            if self.at(","):
                self.advance()
        self.expect("}")
        return rows

    def postfix(self, f):
        while self.at("["):
            self.advance()
            a = self.ident() if self.peek().kind == "id" else None
            if self.at("|"):
                self.advance()
                b = self.ident() if self.peek().kind == "id" else None
                self.expect(":=")
                ea = self.int_expr() if a is not None else None
                self.expect("|")
                eb = self.int_expr() if b is not None else None
                self.expect("]")
                f = RSubst(f, (a, ea) if a else None, (b, eb) if b else None)
            else:
                if a is None:
                    t = self.peek()
                    raise GclSyntaxError("bad substitution", t.pos, "variable")
                self.expect(":=")
                e = self.int_expr()
                self.expect("]")
                f = SSubst(f, a, e)
        return f


def parse_formula(text, relational=None):
    """Parse a store or relational formula; `relational` enforces the kind when given."""
    p = FormulaParser(text)
    f = p.bool_expr()
    p.done()
    if relational is not None:
        check_kind(f, relational)
    return f


def parse_pattern(text):
    """Parse a control pattern such as '(4,5)' or '(*,4)'."""
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise GclSyntaxError(f"bad control pattern {text!r}")
    parts = [p.strip() for p in t[1:-1].split(",")]
    if len(parts) != 2:
        raise GclSyntaxError(f"bad control pattern {text!r}")
    return tuple(None if p == "*" else int(p) for p in parts)


def all_pairs(xs, ys):
    return list(itertools.product(sorted(xs), sorted(ys)))
