"""Proof trees for the unary and relational logics: checking, expansion, synthesis, JSON.

A node's obligations are recomputed from its rule schema and must match what
the node records exactly; each obligation is then discharged by the bounded
oracles.  Equivalence obligations are bounded unless `strict` is set, in which
case only the command shapes used by the completeness constructions are
accepted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .assertions import (
    CrossEq, Lhs, Rhs, RSubst, SSubst, encode_pc, entails, implies, independent,
    independent_rel, parse_formula, pc_test, rel_fv, show_formula, store_fv,
)
from .gcl_syntax import (
    FALSE, GC, TRUE, And, Assign, BoolLit, Cmp, Do, If, Lit, Not, Or, Seq, Skip, Var, conj, disj,
    enab, erase, ghost, labs, lab, parse_program, show_command, subcommands,
)
from .kat import equiv_commands
from .normalform import classify_guard, instrumented, normalize, remove_pc, set_pc
from .semantics import COUNTEREXAMPLE, INCONCLUSIVE, MAX_CEX, VALID, Verdict
from .vcgen import check_condition_c, check_pc_fresh, discharge, encoded_rel_vcs, unary_vcs

MALFORMED = "MALFORMED"
SKIP0 = Skip(0)


# ------------------------------------------------------------------ judgments

@dataclass(frozen=True)
class Triple:
    cmd: object
    pre: object
    post: object


@dataclass(frozen=True)
class RTriple:
    left: object
    right: object
    pre: object
    post: object


# ---------------------------------------------------------------- obligations

@dataclass(frozen=True)
class Entailment:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class SideCondition:
    name: str
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Equivalence:
    left: object
    right: object


@dataclass(frozen=True)
class GhostCheck:
    var: str
    cmd: object


@dataclass(frozen=True)
class IndepCheck:
    var: str
    formula: object
    var2: str | None = None
    relational: bool = False


@dataclass
class ProofNode:
    rule: str
    conclusion: object
    premises: tuple = ()
    obligations: tuple = ()
    params: dict = field(default_factory=dict)

    def size(self):
        return 1 + sum(p.size() for p in self.premises)

    def walk(self, path="root"):
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.walk(f"{path}/{i}")


class Malformed(Exception):
    pass


UNARY_RULES = {"Skip", "Asgn", "Seq", "If", "Do", "Conseq", "False", "Rewrite", "Ghost"}
REL_RULES = {"dSkip", "dAsgn", "AsgnSkip", "SkipAsgn", "dSeq", "dIf", "dDo", "rConseq",
             "rDisj", "rFalse", "rRewrite", "rGhost"}
DERIVED_RULES = {"rDisjN", "SeqSkip", "IfSkip", "DoSkip", "AlgnIf"}


# -------------------------------------------------------------------- schemas

def _need(cond, msg):
    if not cond:
        raise Malformed(msg)


def _arity(node, n):
    _need(len(node.premises) == n, f"{node.rule} expects {n} premises, got {len(node.premises)}")


def _kind(node, cls):
    _need(isinstance(node.conclusion, cls), f"{node.rule} needs a {cls.__name__} conclusion")
    for p in node.premises:
        _need(isinstance(p.conclusion, cls), f"{node.rule} premise has the wrong judgment kind")


def _expect_premises(node, expected):
    got = [p.conclusion for p in node.premises]
    _need(len(got) == len(expected), f"{node.rule} expects {len(expected)} premises, got {len(got)}")
    for i, (g, e) in enumerate(zip(got, expected)):
        _need(g == e, f"{node.rule} premise {i} does not match the rule")


def _schema_unary(node):
    j = node.conclusion
    r = node.rule
    c = j.cmd
    if r == "Skip":
        _need(isinstance(c, Skip) and j.pre == j.post, "Skip: needs skip and equal pre/post")
        _arity(node, 0)
        return []
    if r == "Asgn":
        _need(isinstance(c, Assign), "Asgn: needs an assignment")
        _need(j.pre == SSubst(j.post, c.var, c.rhs), "Asgn: pre must be post[x := e]")
        _arity(node, 0)
        return []
    if r == "Seq":
        _need(isinstance(c, Seq), "Seq: needs a sequence")
        _arity(node, 2)
        a, b = node.premises[0].conclusion, node.premises[1].conclusion
        _need(a.cmd == c.first and b.cmd == c.second, "Seq: premise commands")
        _need(a.pre == j.pre and a.post == b.pre and b.post == j.post, "Seq: premise assertions")
        return []
    if r == "If":
        _need(isinstance(c, If), "If: needs an if")
        _expect_premises(node, [Triple(g.body, conj(g.guard, j.pre), j.post) for g in c.gcs])
        return []
    if r == "Do":
        _need(isinstance(c, Do), "Do: needs a loop")
        _need(j.post == conj(j.pre, Not(enab(c.gcs))), "Do: post must be P and not enab")
        _expect_premises(node, [Triple(g.body, conj(g.guard, j.pre), j.pre) for g in c.gcs])
        return []
    if r == "Conseq":
        _arity(node, 1)
        p = node.premises[0].conclusion
        _need(p.cmd == c, "Conseq: same command")
        return [Entailment(j.pre, p.pre), Entailment(p.post, j.post)]
    if r == "False":
        _arity(node, 0)
        _need(j.pre == FALSE, "False: pre must be false")
        return []
    if r == "Rewrite":
        _arity(node, 1)
        p = node.premises[0].conclusion
        _need(p.pre == j.pre and p.post == j.post, "Rewrite: same assertions")
        return [Equivalence(p.cmd, c)]
    if r == "Ghost":
        _arity(node, 1)
        x = node.params.get("var")
        _need(isinstance(x, str), "Ghost: needs a var parameter")
        p = node.premises[0].conclusion
        _need(c == erase(x, p.cmd), "Ghost: conclusion must erase the ghost")
        _need(p.pre == j.pre and p.post == j.post, "Ghost: same assertions")
        return [GhostCheck(x, p.cmd), IndepCheck(x, j.pre), IndepCheck(x, j.post)]
    raise Malformed(f"unknown unary rule {r}")


def _do_premises(j, L, R):
    c, d, Q = j.left, j.right, j.pre
    out = [RTriple(g.body, SKIP0, conj(Q, Lhs(g.guard), L), Q) for g in c.gcs]
    out += [RTriple(SKIP0, g.body, conj(Q, Rhs(g.guard), R), Q) for g in d.gcs]
    out += [RTriple(g.body, h.body, conj(Q, Lhs(g.guard), Rhs(h.guard), Not(L), Not(R)), Q)
            for g in c.gcs for h in d.gcs]
    return out


def do_side_condition(c, d, L, R):
    e, e2 = enab(c.gcs), enab(d.gcs)
    return disj(CrossEq(e, e2), conj(L, Lhs(e)), conj(R, Rhs(e2)))


def _schema_rel(node):
    j = node.conclusion
    r = node.rule
    c, d = j.left, j.right
    if r == "dSkip":
        _need(isinstance(c, Skip) and isinstance(d, Skip) and j.pre == j.post, "dSkip: shape")
        _arity(node, 0)
        return []
    if r in ("dAsgn", "AsgnSkip", "SkipAsgn"):
        want_l = Assign if r in ("dAsgn", "AsgnSkip") else Skip
        want_r = Assign if r in ("dAsgn", "SkipAsgn") else Skip
        _need(isinstance(c, want_l) and isinstance(d, want_r), f"{r}: command shapes")
        left = (c.var, c.rhs) if want_l is Assign else None
        right = (d.var, d.rhs) if want_r is Assign else None
        _need(j.pre == RSubst(j.post, left, right), f"{r}: pre must be the substituted post")
        _arity(node, 0)
        return []
    if r == "dSeq":
        _need(isinstance(c, Seq) and isinstance(d, Seq), "dSeq: needs sequences")
        _arity(node, 2)
        a, b = node.premises[0].conclusion, node.premises[1].conclusion
        _need((a.left, a.right, b.left, b.right) == (c.first, d.first, c.second, d.second),
              "dSeq: premise commands")
        _need(a.pre == j.pre and a.post == b.pre and b.post == j.post, "dSeq: premise assertions")
        return []
    if r == "dIf":
        _need(isinstance(c, If) and isinstance(d, If), "dIf: needs two ifs")
        _expect_premises(node, [RTriple(g.body, h.body, conj(j.pre, Lhs(g.guard), Rhs(h.guard)), j.post)
                                for g in c.gcs for h in d.gcs])
        return []
    if r == "dDo":
        _need(isinstance(c, Do) and isinstance(d, Do), "dDo: needs two loops")
        L, R = node.params.get("L"), node.params.get("R")
        _need(L is not None and R is not None, "dDo: needs L and R parameters")
        _need(j.post == conj(j.pre, Not(Lhs(enab(c.gcs))), Not(Rhs(enab(d.gcs)))), "dDo: post")
        _expect_premises(node, _do_premises(j, L, R))
        return [SideCondition("dDo", j.pre, do_side_condition(c, d, L, R))]
    if r == "rConseq":
        _arity(node, 1)
        p = node.premises[0].conclusion
        _need(p.left == c and p.right == d, "rConseq: same commands")
        return [Entailment(j.pre, p.pre), Entailment(p.post, j.post)]
    if r == "rDisj":
        _arity(node, 2)
        a, b = node.premises[0].conclusion, node.premises[1].conclusion
        _need(a.left == b.left == c and a.right == b.right == d, "rDisj: same commands")
        _need(a.post == b.post == j.post, "rDisj: same post")
        _need(j.pre == disj(a.pre, b.pre), "rDisj: pre must be the disjunction")
        return []
    if r == "rFalse":
        _arity(node, 0)
        _need(j.pre == FALSE, "rFalse: pre must be false")
        return []
    if r == "rRewrite":
        _arity(node, 1)
        p = node.premises[0].conclusion
        _need(p.pre == j.pre and p.post == j.post, "rRewrite: same assertions")
        return [Equivalence(p.left, c), Equivalence(p.right, d)]
    if r == "rGhost":
        _arity(node, 1)
        x, x2 = node.params.get("var"), node.params.get("var2")
        _need(isinstance(x, str) and isinstance(x2, str), "rGhost: needs var and var2")
        p = node.premises[0].conclusion
        _need(c == erase(x, p.left) and d == erase(x2, p.right), "rGhost: conclusion must erase")
        _need(p.pre == j.pre and p.post == j.post, "rGhost: same assertions")
        return [GhostCheck(x, p.left), GhostCheck(x2, p.right),
                IndepCheck(x, j.pre, x2, True), IndepCheck(x, j.post, x2, True)]
    return _schema_derived(node)


def _schema_derived(node):
    j = node.conclusion
    r = node.rule
    c, d = j.left, j.right
    if r == "rDisjN":
        for p in node.premises:
            q = p.conclusion
            _need(q.left == c and q.right == d and q.post == j.post, "rDisjN: premise shape")
        _need(j.pre == disj(*(p.conclusion.pre for p in node.premises)), "rDisjN: pre")
        return []
    if r == "SeqSkip":
        _need(isinstance(c, Seq) and isinstance(d, Skip), "SeqSkip: shape")
        _arity(node, 2)
        a, b = node.premises[0].conclusion, node.premises[1].conclusion
        _need((a.left, a.right, b.left, b.right) == (c.first, SKIP0, c.second, SKIP0), "SeqSkip: commands")
        _need(a.pre == j.pre and a.post == b.pre and b.post == j.post, "SeqSkip: assertions")
        return []
    if r == "IfSkip":
        _need(isinstance(c, If) and isinstance(d, Skip), "IfSkip: shape")
        _expect_premises(node, [RTriple(g.body, SKIP0, conj(j.pre, Lhs(g.guard)), j.post) for g in c.gcs])
        return []
    if r == "DoSkip":
        _need(isinstance(c, Do) and isinstance(d, Skip), "DoSkip: shape")
        _need(j.post == conj(j.pre, Not(Lhs(enab(c.gcs)))), "DoSkip: post")
        _expect_premises(node, [RTriple(g.body, SKIP0, conj(j.pre, Lhs(g.guard)), j.pre) for g in c.gcs])
        return []
    if r == "AlgnIf":
        _need(isinstance(c, If) and isinstance(d, If) and len(c.gcs) == 2 and len(d.gcs) == 2,
              "AlgnIf: needs two binary ifs")
        e, e2 = c.gcs[0].guard, d.gcs[0].guard
        _need(c.gcs[1].guard == Not(e) and d.gcs[1].guard == Not(e2), "AlgnIf: guards must be e, not e")
        _expect_premises(node, [RTriple(c.gcs[0].body, d.gcs[0].body, conj(j.pre, Lhs(e)), j.post),
                                RTriple(c.gcs[1].body, d.gcs[1].body, conj(j.pre, Lhs(Not(e))), j.post)])
        return [Entailment(j.pre, CrossEq(e, e2))]
    raise Malformed(f"unknown rule {r}")


def required_obligations(node):
    """Structural check of one node; returns the obligations its rule demands."""
    if node.rule in UNARY_RULES:
        _kind(node, Triple)
        return _schema_unary(node)
    if node.rule in REL_RULES or node.rule in DERIVED_RULES:
        _kind(node, RTriple)
        return _schema_rel(node)
    raise Malformed(f"unknown rule {node.rule}")


# ------------------------------------------------------------------- oracles

def _strict_equivalence(ob, pc):
    a, b = ob.left, ob.right
    if a == b:
        return True
    skip_laws = {
        (Seq(SKIP0, SKIP0), SKIP0),
        (If(0, (GC(TRUE, SKIP0),)), SKIP0),
        (Do(0, (GC(FALSE, SKIP0),)), SKIP0),
    }
    if (a, b) in skip_laws:
        return True
    if isinstance(a, Seq) and a.first == SKIP0 and a.second == b:
        return True
    # !n ; do norm od  ~  add_pc(c) ; !f
    if (isinstance(a, Seq) and isinstance(a.second, Do) and a.second.label == 0
            and isinstance(b, Seq) and isinstance(b.second, Assign) and b.second.var == pc):
        c = remove_pc(b.first, pc)
        if c is not None and isinstance(b.second.rhs, Lit):
            f = b.second.rhs.value
            try:
                nf = normalize(c, f, pc)
            except ValueError:
                return False
            return a == nf.command
    # erase(pc, add_pc(c) ; !f)  ~  c; erasing !f leaves skip whatever f is
    try:
        return erase(pc, instrumented(b, 0, pc)) == a
    except ValueError:
        return False


class _Oracle:
    def __init__(self, bound, strict):
        self.bound = bound
        self.strict = strict
        self.cache = {}

    def __call__(self, ob):
        v = self.cache.get(ob)
        if v is None:
            v = self.cache[ob] = self._run(ob)
        return v

    def _run(self, ob):
        b = self.bound
        if isinstance(ob, (Entailment, SideCondition)):
            return entails(ob.lhs, ob.rhs, b)
        if isinstance(ob, Equivalence):
            if ob.left == ob.right:
                return Verdict(VALID, detail="identical commands", bounded=False)
            if self.strict:
                ok = _strict_equivalence(ob, b.pc)
                return Verdict(VALID if ok else COUNTEREXAMPLE, detail="shape check", bounded=False)
            return equiv_commands(ob.left, ob.right, b)
        if isinstance(ob, GhostCheck):
            ok = ghost(ob.var, ob.cmd)
            return Verdict(VALID if ok else COUNTEREXAMPLE, detail="syntactic", bounded=False)
        if isinstance(ob, IndepCheck):
            if ob.relational:
                lv, rv = rel_fv(ob.formula)
                if ob.var not in lv and ob.var2 not in rv:
                    return Verdict(VALID, detail="syntactic", bounded=False)
                ok = independent_rel(ob.var, ob.var2, ob.formula, b)
            else:
                if ob.var not in store_fv(ob.formula):
                    return Verdict(VALID, detail="syntactic", bounded=False)
                ok = independent(ob.var, ob.formula, b)
            return Verdict(VALID if ok else COUNTEREXAMPLE)
        raise TypeError(f"unknown obligation {ob!r}")


def show_obligation(ob):
    if isinstance(ob, (Entailment, SideCondition)):
        return f"{show_formula(ob.lhs)}  ==>  {show_formula(ob.rhs)}"
    if isinstance(ob, Equivalence):
        return f"{show_command(ob.left)}  ~  {show_command(ob.right)}"
    if isinstance(ob, GhostCheck):
        return f"ghost({ob.var})"
    return f"indep({ob.var}, {show_formula(ob.formula)})"


def _clip(text, n=300):
    return text if len(text) <= n else text[:n] + " ..."


def check_proof(tree, bound, strict=False):
    """Check every node's schema and discharge every obligation over the bound."""
    oracle = _Oracle(bound, strict)
    failures = []
    nodes = obligations = 0
    for path, node in tree.walk():
        nodes += 1
        try:
            req = required_obligations(node)
        except Malformed as e:
            return Verdict(MALFORMED, [{"path": path, "rule": node.rule, "error": str(e)}],
                           detail=f"malformed node at {path}")
        if tuple(req) != tuple(node.obligations):
            return Verdict(MALFORMED, [{"path": path, "rule": node.rule,
                                        "error": "recorded obligations differ from the rule's"}],
                           detail=f"malformed node at {path}")
        for ob in req:
            obligations += 1
            v = oracle(ob)
            if not v.valid:
                failures.append({"path": path, "rule": node.rule, "obligation": _clip(show_obligation(ob)),
                                 "status": v.status, "counterexample": v.counterexamples[:1],
                                 "params": {k: v for k, v in node.params.items() if isinstance(v, str)}})
    detail = f"{nodes} nodes, {obligations} obligations"
    if failures:
        status = COUNTEREXAMPLE if any(f["status"] == COUNTEREXAMPLE for f in failures) else INCONCLUSIVE
        return Verdict(status, failures[:MAX_CEX], detail=f"{len(failures)} failing obligations; {detail}")
    return Verdict(VALID, detail=detail)


# ------------------------------------------------------------ node builders

def node(rule, conclusion, premises=(), **params):
    n = ProofNode(rule, conclusion, tuple(premises), (), params)
    n.obligations = tuple(required_obligations(n))
    return n


def conseq(conclusion, premise, **params):
    rule = "Conseq" if isinstance(conclusion, Triple) else "rConseq"
    return node(rule, conclusion, [premise], **params)


# -------------------------------------------------------------- expansion

def _rconseq(j, p):
    return node("rConseq", j, [p])


def _rfalse(left, right, post):
    return node("rFalse", RTriple(left, right, FALSE, post))


def _expand(n):
    j = n.conclusion
    ps = n.premises
    if n.rule == "rDisjN":
        if not ps:
            return _rfalse(j.left, j.right, j.post)
        if len(ps) == 1:
            return _rconseq(j, ps[0])
        acc = ps[-1]
        for p in reversed(ps[:-1]):
            q = p.conclusion
            acc = node("rDisj", RTriple(j.left, j.right, disj(q.pre, acc.conclusion.pre), j.post), [p, acc])
        return _rconseq(j, acc)
    if n.rule == "SeqSkip":
        s = node("dSeq", RTriple(j.left, Seq(SKIP0, SKIP0), j.pre, j.post), ps)
        return node("rRewrite", j, [s])
    if n.rule == "IfSkip":
        right = If(0, (GC(TRUE, SKIP0),))
        subs = [_rconseq(RTriple(g.body, SKIP0, conj(j.pre, Lhs(g.guard), Rhs(TRUE)), j.post), p)
                for g, p in zip(j.left.gcs, ps)]
        return node("rRewrite", j, [node("dIf", RTriple(j.left, right, j.pre, j.post), subs)])
    if n.rule == "DoSkip":
        right = Do(0, (GC(FALSE, SKIP0),))
        Q = j.pre
        big = RTriple(j.left, right, Q, conj(Q, Not(Lhs(enab(j.left.gcs))), Not(Rhs(FALSE))))
        subs = []
        for t in _do_premises(big, TRUE, TRUE):
            if t.right == SKIP0 and t.left != SKIP0 and len(subs) < len(ps):
                subs.append(_rconseq(t, ps[len(subs)]))
            else:
                subs.append(_rconseq(t, _rfalse(t.left, t.right, Q)))
        d = node("dDo", big, subs, L=TRUE, R=TRUE)
        return node("rRewrite", j, [_rconseq(RTriple(j.left, right, Q, j.post), d)])
    if n.rule == "AlgnIf":
        c, d = j.left, j.right
        subs = []
        for i, g in enumerate(c.gcs):
            for k, h in enumerate(d.gcs):
                t = RTriple(g.body, h.body, conj(j.pre, Lhs(g.guard), Rhs(h.guard)), j.post)
                subs.append(_rconseq(t, ps[i]) if i == k else _rconseq(t, _rfalse(g.body, h.body, j.post)))
        return node("dIf", j, subs)
    return n


def expand_derived(tree):
    """Replace derived-rule nodes by derivations in the primitive rules."""
    ps = tuple(expand_derived(p) for p in tree.premises)
    n = ProofNode(tree.rule, tree.conclusion, ps, tree.obligations, dict(tree.params))
    return _expand(n) if n.rule in DERIVED_RULES else n


# ------------------------------------------------------------- synthesis

class HypothesisFailure(Exception):
    def __init__(self, msg, verdict=None):
        super().__init__(msg)
        self.verdict = verdict


def _unary_invariant(ls, an, pc):
    return conj(disj(*(pc_test(pc, i) for i in ls)), *(implies(pc_test(pc, i), an(i)) for i in ls))


def synthesize_unary(c, f, an, bound, pc="pc", check_hypotheses=True):
    """A proof of c : {an(lab c)} {an(f)} through the normal form, given valid VCs."""
    check_pc_fresh(pc, c, *(an(k) for k in an.keys()))
    b = bound.with_pc_domain(labs(c) | {f})
    if check_hypotheses:
        rep = discharge(unary_vcs(c, f, an), b)
        if not rep.valid:
            raise HypothesisFailure("annotation VCs do not all hold", rep.verdict())
    ls = sorted(labs(c) | {f})
    I = _unary_invariant(ls, an, pc)
    nf = normalize(c, f, pc)

    def q(i):
        return pc_test(pc, i)

    def set_node(m):
        post = conj(an(m), q(m))
        a = node("Asgn", Triple(set_pc(pc, m), SSubst(post, pc, Lit(m)), post))
        return conseq(Triple(set_pc(pc, m), an(m), post), a)

    tops = []
    for gc in nf.body:
        g = classify_guard(gc, c, f, pc)
        n, m = g.source, g.target
        post_m = conj(an(m), q(m))
        vc = f"unary:{n}->{m}:{g.kind}"
        if g.form == "set":
            x, e = g.assign
            a = node("Asgn", Triple(Assign(0, x, e), SSubst(an(m), x, e), an(m)))
            a2 = conseq(Triple(Assign(0, x, e), an(n), an(m)), a, vc=vc)
            inner = node("Seq", Triple(gc.body, an(n), post_m), [a2, set_node(m)])
        else:
            pre = an(n) if g.cond == TRUE else conj(an(n), g.cond)
            inner = conseq(Triple(gc.body, pre, post_m), set_node(m), vc=vc)
        tops.append(conseq(Triple(gc.body, conj(gc.guard, I), I), inner))
    loop = nf.loop
    do = node("Do", Triple(loop, I, conj(I, Not(enab(loop.gcs)))), tops)
    n0 = lab(c)
    P, Q = an(n0), an(f)
    c1 = conseq(Triple(loop, conj(P, q(n0)), Q), do)
    s0 = conseq(Triple(set_pc(pc, n0), P, conj(P, q(n0))),
                node("Asgn", Triple(set_pc(pc, n0), SSubst(conj(P, q(n0)), pc, Lit(n0)), conj(P, q(n0)))))
    seqn = node("Seq", Triple(nf.command, P, Q), [s0, c1])
    inst = instrumented(c, f, pc)
    rw = node("Rewrite", Triple(inst, P, Q), [seqn])
    gh = node("Ghost", Triple(erase(pc, inst), P, Q), [rw], var=pc)
    return node("Rewrite", Triple(c, P, Q), [gh])


def synthesize_relational(c, c2, f, f2, L, R, J, an, bound, pc="pc", check_hypotheses=True):
    """A proof of c | c2 : {an(init pair)} {an(fin pair)} from an alignment and its VCs.

    With `check_hypotheses` the encoded VCs and the adequacy condition on the
    annotation are checked first and HypothesisFailure is raised if they fail.
    """
    check_pc_fresh(pc, c, c2, *(an(k) for k in an.keys()),
                   *(cl.formula for s in (L, R, J) for cl in s.clauses))
    b = bound.with_pc_domain(labs(c) | labs(c2) | {f, f2})
    if check_hypotheses:
        rep = discharge(encoded_rel_vcs(c, c2, f, f2, an, L, R, J, pc), b)
        if not rep.valid:
            raise HypothesisFailure("encoded VCs do not all hold", rep.verdict())
        v = check_condition_c(an, L, R, J, f, f2, b, pc)
        if not v.valid:
            raise HypothesisFailure("annotation does not imply L or R or J", v)
    ls, rs = sorted(labs(c) | {f}), sorted(labs(c2) | {f2})
    Lt, Rt = encode_pc(L, pc), encode_pc(R, pc)

    def ql(i):
        return Lhs(pc_test(pc, i))

    def qr(i):
        return Rhs(pc_test(pc, i))

    Q_an = conj(*(implies(conj(ql(i), qr(j)), an((i, j))) for i in ls for j in rs))
    Q_pc = conj(Lhs(disj(*(pc_test(pc, i) for i in ls))), Rhs(disj(*(pc_test(pc, j) for j in rs))))
    Q = conj(Q_an, Q_pc)
    nf, nf2 = normalize(c, f, pc), normalize(c2, f2, pc)

    def contradictory(F):
        return entails(F, FALSE, b).valid

    def false_node(left, right, pre):
        return _rconseq(RTriple(left, right, pre, Q), _rfalse(left, right, Q))

    def set_pair(m, m2, target):
        post = conj(an((m, m2)), ql(m), qr(m2))
        d = node("dAsgn", RTriple(set_pc(pc, m), set_pc(pc, m2), RSubst(post, (pc, Lit(m)), (pc, Lit(m2))), post))
        return _rconseq(RTriple(set_pc(pc, m), set_pc(pc, m2), an((m, m2)), target), d)

    def set_left(m, j):
        post = conj(an((m, j)), ql(m), qr(j))
        a = node("AsgnSkip", RTriple(set_pc(pc, m), SKIP0, RSubst(post, (pc, Lit(m)), None), post))
        return _rconseq(RTriple(set_pc(pc, m), SKIP0, conj(an((m, j)), qr(j)), Q), a)

    def set_right(i, m2):
        post = conj(an((i, m2)), ql(i), qr(m2))
        a = node("SkipAsgn", RTriple(SKIP0, set_pc(pc, m2), RSubst(post, None, (pc, Lit(m2))), post))
        return _rconseq(RTriple(SKIP0, set_pc(pc, m2), conj(an((i, m2)), ql(i)), Q), a)

    def one_sided(gc, g, left_side):
        others = rs if left_side else ls
        body = gc.body
        side = Lhs if left_side else Rhs
        spec = Lt if left_side else Rt
        subs, pres = [], []
        for j in others:
            D = conj(Q, side(gc.guard), spec, qr(j) if left_side else ql(j))
            pres.append(D)
            lft, rgt = (body, SKIP0) if left_side else (SKIP0, body)
            if contradictory(D):
                subs.append(false_node(lft, rgt, D))
                continue
            vc = (f"LO:{g.source},{j}->{g.target},{j}" if left_side
                  else f"RO:{j},{g.source}->{j},{g.target}")
            s = set_left(g.target, j) if left_side else set_right(j, g.target)
            if g.form == "test":
                subs.append(node("rConseq", RTriple(lft, rgt, D, Q), [s], vc=vc))
                continue
            x, e = g.assign
            mid = s.conclusion.pre
            if left_side:
                sub_pre = RSubst(mid, (x, e), None)
                a = node("AsgnSkip", RTriple(Assign(0, x, e), SKIP0, sub_pre, mid))
                inner = node("SeqSkip", RTriple(body, SKIP0, sub_pre, Q), [a, s])
            else:
                sub_pre = RSubst(mid, None, (x, e))
                a = node("SkipAsgn", RTriple(SKIP0, Assign(0, x, e), sub_pre, mid))
                ds = node("dSeq", RTriple(Seq(SKIP0, SKIP0), body, sub_pre, Q), [a, s])
                inner = node("rRewrite", RTriple(SKIP0, body, sub_pre, Q), [ds])
            subs.append(node("rConseq", RTriple(lft, rgt, D, Q), [inner], vc=vc))
        lft, rgt = (body, SKIP0) if left_side else (SKIP0, body)
        dn = node("rDisjN", RTriple(lft, rgt, disj(*pres), Q), subs)
        return _rconseq(RTriple(lft, rgt, conj(Q, side(gc.guard), spec), Q), dn)

    def joint(gc, g, gc2, g2):
        pre = conj(Q, Lhs(gc.guard), Rhs(gc2.guard), Not(Lt), Not(Rt))
        b1, b2 = gc.body, gc2.body
        if contradictory(pre):
            return false_node(b1, b2, pre)
        m, m2 = g.target, g2.target
        vc = f"JO:{g.source},{g2.source}->{m},{m2}"
        s = set_pair(m, m2, Q)
        target = an((m, m2))
        if g.form == "test" and g2.form == "test":
            return node("rConseq", RTriple(b1, b2, pre, Q), [s], vc=vc)
        la = g.assign if g.form == "set" else None
        ra = g2.assign if g2.form == "set" else None
        rule = "dAsgn" if la and ra else ("AsgnSkip" if la else "SkipAsgn")
        a_left = Assign(0, *la) if la else SKIP0
        a_right = Assign(0, *ra) if ra else SKIP0
        a = node(rule, RTriple(a_left, a_right, RSubst(target, la, ra), target))
        ac = node("rConseq", RTriple(a_left, a_right, pre, target), [a], vc=vc)
        seq_l = b1 if la else Seq(SKIP0, b1)
        seq_r = b2 if ra else Seq(SKIP0, b2)
        ds = node("dSeq", RTriple(seq_l, seq_r, pre, Q), [ac, s])
        if la and ra:
            return ds
        return node("rRewrite", RTriple(b1, b2, pre, Q), [ds])

    cls = [classify_guard(gc, c, f, pc) for gc in nf.body]
    cls2 = [classify_guard(gc, c2, f2, pc) for gc in nf2.body]
    prem = [one_sided(gc, g, True) for gc, g in zip(nf.body, cls)]
    prem += [one_sided(gc, g, False) for gc, g in zip(nf2.body, cls2)]
    prem += [joint(gc, g, gc2, g2) for gc, g in zip(nf.body, cls) for gc2, g2 in zip(nf2.body, cls2)]
    loop, loop2 = nf.loop, nf2.loop
    do_post = conj(Q, Not(Lhs(enab(loop.gcs))), Not(Rhs(enab(loop2.gcs))))
    do = node("dDo", RTriple(loop, loop2, Q, do_post), prem, L=Lt, R=Rt)
    n0, n2 = lab(c), lab(c2)
    S, T = an((n0, n2)), an((f, f2))
    c1 = _rconseq(RTriple(loop, loop2, conj(ql(n0), qr(n2), S), T), do)
    s0 = _init_set(pc, n0, n2, S)
    seqn = node("dSeq", RTriple(nf.command, nf2.command, S, T), [s0, c1])
    inst, inst2 = instrumented(c, f, pc), instrumented(c2, f2, pc)
    rw = node("rRewrite", RTriple(inst, inst2, S, T), [seqn])
    gh = node("rGhost", RTriple(erase(pc, inst), erase(pc, inst2), S, T), [rw], var=pc, var2=pc)
    return node("rRewrite", RTriple(c, c2, S, T), [gh])


def _init_set(pc, n0, n2, S):
    post = conj(Lhs(pc_test(pc, n0)), Rhs(pc_test(pc, n2)), S)
    d = node("dAsgn", RTriple(set_pc(pc, n0), set_pc(pc, n2), RSubst(post, (pc, Lit(n0)), (pc, Lit(n2))), post))
    return _rconseq(RTriple(set_pc(pc, n0), set_pc(pc, n2), S, post), d)


# ------------------------------------------------------------------ audit

@dataclass
class Provenance:
    """What a synthesized tree may build its assertions from."""
    atoms: set
    assigns: set
    pc: str = "pc"


def provenance(programs, an, pc="pc", specs=()):
    """Atoms and substitutions derived from an annotation, the programs and an alignment.

    `programs` is a sequence of (command, final label) pairs.
    """
    atoms = {an(k) for k in an.keys()}
    assigns = set()
    for c, f in programs:
        for n in sorted(labs(c) | {f}):
            assigns.add((pc, Lit(n)))
        for d in subcommands(c):
            if isinstance(d, Assign):
                assigns.add((d.var, d.rhs))
            elif isinstance(d, (If, Do)):
                atoms.update(gc.guard for gc in d.gcs)
    for sp in specs:
        atoms.add(encode_pc(sp, pc))
        atoms.update(cl.formula for cl in sp.clauses)
    return Provenance(atoms, assigns, pc)


def _derived(F, prov):
    if F in prov.atoms or isinstance(F, BoolLit):
        return True
    if isinstance(F, (And, Or)):
        return all(_derived(a, prov) for a in F.args)
    if isinstance(F, (Not, Lhs, Rhs)):
        return _derived(F.arg, prov)
    if isinstance(F, Cmp):
        return F.op == "=" and F.left == Var(prov.pc) and isinstance(F.right, Lit)
    if isinstance(F, SSubst):
        return (F.var, F.expr) in prov.assigns and _derived(F.body, prov)
    if isinstance(F, RSubst):
        return (all(s is None or tuple(s) in prov.assigns for s in (F.left, F.right))
                and _derived(F.body, prov))
    return False


def audit_provenance(tree, prov):
    """Paths and formulas of every assertion in `tree` not derived from `prov`."""
    bad = []
    for path, n in tree.walk():
        j = n.conclusion
        forms = [j.pre, j.post] + [v for k, v in n.params.items() if k in ("L", "R")]
        bad.extend((path, F) for F in forms if not _derived(F, prov))
    return bad


# ------------------------------------------------------------------ JSON

def _enc_formula(f):
    return show_formula(f)


def _enc_cmd(c):
    return show_command(c)


def _enc_judgment(j):
    if isinstance(j, Triple):
        return {"kind": "unary", "cmd": _enc_cmd(j.cmd), "pre": _enc_formula(j.pre), "post": _enc_formula(j.post)}
    return {"kind": "relational", "left": _enc_cmd(j.left), "right": _enc_cmd(j.right),
            "pre": _enc_formula(j.pre), "post": _enc_formula(j.post)}


def _enc_obligation(ob):
    if isinstance(ob, Entailment):
        return {"kind": "Entailment", "lhs": _enc_formula(ob.lhs), "rhs": _enc_formula(ob.rhs)}
    if isinstance(ob, SideCondition):
        return {"kind": "SideCondition", "name": ob.name, "lhs": _enc_formula(ob.lhs), "rhs": _enc_formula(ob.rhs)}
    if isinstance(ob, Equivalence):
        return {"kind": "Equivalence", "left": _enc_cmd(ob.left), "right": _enc_cmd(ob.right)}
    if isinstance(ob, GhostCheck):
        return {"kind": "GhostCheck", "var": ob.var, "cmd": _enc_cmd(ob.cmd)}
    return {"kind": "IndepCheck", "var": ob.var, "var2": ob.var2, "relational": ob.relational,
            "formula": _enc_formula(ob.formula)}


def to_json(tree):
    params = {k: ({"formula": _enc_formula(v)} if not isinstance(v, str) else v) for k, v in tree.params.items()}
    return {"rule": tree.rule, "conclusion": _enc_judgment(tree.conclusion),
            "obligations": [_enc_obligation(o) for o in tree.obligations],
            "params": params, "children": [to_json(p) for p in tree.premises]}


@lru_cache(maxsize=None)
def _dec_cmd(text):
    return parse_program(text, strict=False)


@lru_cache(maxsize=None)
def _dec_formula(text):
    return parse_formula(text)


def _dec_judgment(d):
    if d["kind"] == "unary":
        return Triple(_dec_cmd(d["cmd"]), _dec_formula(d["pre"]), _dec_formula(d["post"]))
    return RTriple(_dec_cmd(d["left"]), _dec_cmd(d["right"]), _dec_formula(d["pre"]), _dec_formula(d["post"]))


def _dec_obligation(d):
    k = d["kind"]
    if k == "Entailment":
        return Entailment(_dec_formula(d["lhs"]), _dec_formula(d["rhs"]))
    if k == "SideCondition":
        return SideCondition(d["name"], _dec_formula(d["lhs"]), _dec_formula(d["rhs"]))
    if k == "Equivalence":
        return Equivalence(_dec_cmd(d["left"]), _dec_cmd(d["right"]))
    if k == "GhostCheck":
        return GhostCheck(d["var"], _dec_cmd(d["cmd"]))
    if k == "IndepCheck":
        return IndepCheck(d["var"], _dec_formula(d["formula"]), d.get("var2"), d.get("relational", False))
    raise ValueError(f"unknown obligation kind {k}")


def from_json(d):
    params = {k: (_dec_formula(v["formula"]) if isinstance(v, dict) else v) for k, v in d.get("params", {}).items()}
    return ProofNode(d["rule"], _dec_judgment(d["conclusion"]), tuple(from_json(c) for c in d.get("children", [])),
                     tuple(_dec_obligation(o) for o in d.get("obligations", [])), params)


__all__ = [
    "Triple", "RTriple", "Entailment", "SideCondition", "Equivalence", "GhostCheck", "IndepCheck",
    "ProofNode", "Malformed", "MALFORMED", "check_proof", "required_obligations", "expand_derived",
    "synthesize_unary", "synthesize_relational", "HypothesisFailure", "to_json", "from_json", "node",
]
