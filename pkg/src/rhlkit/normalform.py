"""Program-counter instrumentation and the single-loop normal form."""
from __future__ import annotations

from dataclasses import dataclass

from .assertions import pc_test
from .gcl_syntax import (
    GC, TRUE, And, Assign, Cmp, Do, If, Lit, Not, Seq, Skip, Var, cmd_vars, enab, fsuc,
    lab, labs, okf, sub,
)
from .kat import equiv_semantic, mkt
from .vcgen import PcNotFresh


class NotNormalFormGuard(ValueError):
    pass


def set_pc(pc, n):
    """The assignment !n."""
    return Assign(0, pc, Lit(n))


def is_pc(pc, n):
    """The test ?n."""
    return pc_test(pc, n)


def _fresh(pc, c):
    if pc in cmd_vars(c):
        raise PcNotFresh(f"{pc} occurs in the program")


def add_pc(c, pc="pc"):
    """Prefix every labelled subcommand with !n and close each loop body with !n."""
    _fresh(pc, c)
    return _add(c, pc)


def _add(c, pc):
    if isinstance(c, Seq):
        return Seq(_add(c.first, pc), _add(c.second, pc))
    if isinstance(c, (Skip, Assign)):
        return Seq(set_pc(pc, c.label), c)
    if isinstance(c, If):
        return Seq(set_pc(pc, c.label), If(c.label, tuple(GC(g.guard, _add(g.body, pc)) for g in c.gcs)))
    body = tuple(GC(g.guard, Seq(_add(g.body, pc), set_pc(pc, c.label))) for g in c.gcs)
    return Seq(set_pc(pc, c.label), Do(c.label, body))


def remove_pc(c, pc="pc"):
    """Inverse of add_pc on its image; None when c is not of that shape."""
    def strip_prefix(d):
        if isinstance(d, Seq) and d.first == Assign(0, pc, Lit(lab(d.second))) and not isinstance(d.second, Seq):
            return d.second
        return None

    def go(d):
        if isinstance(d, Seq) and isinstance(d.first, Assign) and d.first.var == pc:
            inner = strip_prefix(d)
            if inner is None:
                return None
            if isinstance(inner, (Skip, Assign)):
                return inner
            if isinstance(inner, If):
                gcs = []
                for g in inner.gcs:
                    b = go(g.body)
                    if b is None:
                        return None
                    gcs.append(GC(g.guard, b))
                return If(inner.label, tuple(gcs))
            gcs = []
            for g in inner.gcs:
                if not (isinstance(g.body, Seq) and g.body.second == set_pc(pc, inner.label)):
                    return None
                b = go(g.body.first)
                if b is None:
                    return None
                gcs.append(GC(g.guard, b))
            return Do(inner.label, tuple(gcs))
        if isinstance(d, Seq):
            a, b = go(d.first), go(d.second)
            return None if a is None or b is None else Seq(a, b)
        return None

    return go(c)


def norm(c, f, pc="pc"):
    """The guarded commands of the normal-form loop body for c continuing to f."""
    if isinstance(c, Seq):
        return norm(c.first, lab(c.second), pc) + norm(c.second, f, pc)
    n = c.label
    if isinstance(c, Skip):
        return [GC(is_pc(pc, n), set_pc(pc, f))]
    if isinstance(c, Assign):
        return [GC(is_pc(pc, n), Seq(Assign(0, c.var, c.rhs), set_pc(pc, f)))]
    dispatch = [GC(And((is_pc(pc, n), g.guard)), set_pc(pc, lab(g.body))) for g in c.gcs]
    if isinstance(c, If):
        bodies = [gc for g in c.gcs for gc in norm(g.body, f, pc)]
        return dispatch + bodies
    exit_ = GC(And((is_pc(pc, n), Not(enab(c.gcs)))), set_pc(pc, f))
    # loop bodies continue to the loop head
    bodies = [gc for g in c.gcs for gc in norm(g.body, n, pc)]
    return dispatch + [exit_] + bodies


@dataclass(frozen=True)
class NormalForm:
    pc: str
    init: int
    fin: int
    body: tuple

    @property
    def loop(self):
        return Do(0, self.body)

    @property
    def command(self):
        """!init ; do body od."""
        return Seq(set_pc(self.pc, self.init), self.loop)


def normalize(c, f, pc="pc"):
    if not okf(c, f):
        raise ValueError(f"okf fails for final label {f}")
    _fresh(pc, c)
    return NormalForm(pc, lab(c), f, tuple(norm(c, f, pc)))


def instrumented(c, f, pc="pc"):
    """add_pc(c) ; !f."""
    return Seq(add_pc(c, pc), set_pc(pc, f))


def verify_norm_equiv(c, f, bound, pc="pc"):
    """Bounded check that !n ; do norm od and add_pc(c) ; !f denote the same relation."""
    nf = normalize(c, f, pc)
    b = bound.with_pc_domain(labs(c) | {f}) if bound.pc_domain is None else bound
    return equiv_semantic(mkt(nf.command), mkt(instrumented(c, f, pc)), b)


@dataclass(frozen=True)
class GuardClass:
    form: str           # "set" (x := e ; !m) or "test" (!m alone)
    source: int
    target: int
    kind: str           # skip | asgn | if | do-enter | do-exit
    cond: object = TRUE
    assign: tuple | None = None


def _split_guard(g, pc):
    if isinstance(g, Cmp) and g.op == "=" and g.left == Var(pc) and isinstance(g.right, Lit):
        return g.right.value, TRUE
    if isinstance(g, And) and len(g.args) == 2:
        k, _ = _split_guard(g.args[0], pc) if isinstance(g.args[0], Cmp) else (None, None)
        if k is not None:
            return k, g.args[1]
    raise NotNormalFormGuard(f"guard does not start with a pc test: {g!r:.80}")


def classify_guard(gc, c, f, pc="pc"):
    """Which edge of aut(c, f) a normal-form guarded command implements."""
    k, cond = _split_guard(gc.guard, pc)
    body = gc.body
    if isinstance(body, Assign) and body.var == pc and isinstance(body.rhs, Lit):
        form, m, assign = "test", body.rhs.value, None
    elif (isinstance(body, Seq) and isinstance(body.first, Assign) and body.first.var != pc
          and isinstance(body.second, Assign) and body.second.var == pc and isinstance(body.second.rhs, Lit)):
        form, m, assign = "set", body.second.rhs.value, (body.first.var, body.first.rhs)
    else:
        raise NotNormalFormGuard(f"body is not !m or x := e ; !m: {body!r:.80}")
    if k not in labs(c):
        raise NotNormalFormGuard(f"unknown source label {k}")
    d, succ = sub(k, c), fsuc(k, c, f)
    if form == "set":
        if isinstance(d, Assign) and cond == TRUE and (d.var, d.rhs) == assign and m == succ:
            return GuardClass("set", k, m, "asgn", TRUE, assign)
    elif isinstance(d, Skip) and cond == TRUE and m == succ:
        return GuardClass("test", k, m, "skip")
    elif isinstance(d, If):
        if any(g.guard == cond and lab(g.body) == m for g in d.gcs):
            return GuardClass("test", k, m, "if", cond)
    elif isinstance(d, Do):
        if any(g.guard == cond and lab(g.body) == m for g in d.gcs):
            return GuardClass("test", k, m, "do-enter", cond)
        if cond == Not(enab(d.gcs)) and m == succ:
            return GuardClass("test", k, m, "do-exit", cond)
    raise NotNormalFormGuard(f"guarded command does not match label {k}")


def is_norm(c, f, gcs, pc="pc"):
    """Relational reading of the normal-form equations: does gcs arise from (c, f)?

    Sequences are split at every position, so this does not rely on `norm`.
    """
    gcs = list(gcs)
    if isinstance(c, Seq):
        return any(is_norm(c.first, lab(c.second), gcs[:i], pc) and is_norm(c.second, f, gcs[i:], pc)
                   for i in range(len(gcs) + 1))
    n = c.label
    if isinstance(c, Skip):
        return gcs == [GC(is_pc(pc, n), set_pc(pc, f))]
    if isinstance(c, Assign):
        return gcs == [GC(is_pc(pc, n), Seq(Assign(0, c.var, c.rhs), set_pc(pc, f)))]
    k = len(c.gcs)
    head = [GC(And((is_pc(pc, n), g.guard)), set_pc(pc, lab(g.body))) for g in c.gcs]
    if isinstance(c, Do):
        head.append(GC(And((is_pc(pc, n), Not(enab(c.gcs)))), set_pc(pc, f)))
        k += 1
    if gcs[:k] != head:
        return False
    cont = f if isinstance(c, If) else n
    return _split_all([g.body for g in c.gcs], cont, gcs[k:], pc)


def _split_all(bodies, f, gcs, pc):
    if not bodies:
        return not gcs
    return any(is_norm(bodies[0], f, gcs[:i], pc) and _split_all(bodies[1:], f, gcs[i:], pc)
               for i in range(len(gcs) + 1))


__all__ = [
    "PcNotFresh", "NotNormalFormGuard", "set_pc", "is_pc", "add_pc", "remove_pc", "norm",
    "NormalForm", "normalize", "instrumented", "verify_norm_equiv", "GuardClass",
    "classify_guard", "is_norm",
]
