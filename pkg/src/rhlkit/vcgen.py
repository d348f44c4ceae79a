"""Verification conditions for unary and relational (alignment) annotations."""
from __future__ import annotations

from dataclasses import dataclass, field

from .assertions import (
    Lhs, Rhs, RSubst, SSubst, encode_pc, entails, formula_vars, pc_test,
)
from .gcl_syntax import COMMAND_NODES, FALSE, Assign, If, Not, Skip, cmd_vars, conj, disj, enab, fsuc, lab, labs, sub
from .semantics import COUNTEREXAMPLE, INCONCLUSIVE, VALID, Verdict


class PcNotFresh(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    """A control-flow edge of aut(c, f) with its guard and assignment, if any."""
    kind: str          # skip | asgn | if | do-enter | do-exit
    src: int
    dst: int
    guard: object = None
    assign: tuple | None = None


def edges(c, f):
    out = []
    for n in sorted(labs(c)):
        d = sub(n, c)
        if isinstance(d, Skip):
            out.append(Edge("skip", n, fsuc(n, c, f)))
        elif isinstance(d, Assign):
            out.append(Edge("asgn", n, fsuc(n, c, f), assign=(d.var, d.rhs)))
        elif isinstance(d, If):
            out.extend(Edge("if", n, lab(gc.body), gc.guard) for gc in d.gcs)
        else:
            out.extend(Edge("do-enter", n, lab(gc.body), gc.guard) for gc in d.gcs)
            out.append(Edge("do-exit", n, fsuc(n, c, f), Not(enab(d.gcs))))
    return out


@dataclass(frozen=True)
class VC:
    id: str
    kind: str          # unary | LO | RO | JO
    src: object
    dst: object
    antecedent: object
    consequent: object
    tag: str = ""      # edge kinds, e.g. "asgn" or "do-enter/asgn"

    @property
    def formula(self):
        from .assertions import implies
        return implies(self.antecedent, self.consequent)


def _ssub(f, assign):
    return f if assign is None else SSubst(f, *assign)


def unary_vcs(c, f, an):
    """One VC per edge: an(n) and guard imply an(m), pre-substituted by the assignment."""
    out = []
    for e in edges(c, f):
        ant = an(e.src) if e.guard is None else conj(an(e.src), e.guard)
        out.append(VC(f"unary:{e.src}->{e.dst}:{e.kind}", "unary", e.src, e.dst, ant,
                      _ssub(an(e.dst), e.assign), e.kind))
    return out


def _rsub(f, left, right):
    return f if left is None and right is None else RSubst(f, left, right)


def _guards(e, wrap):
    return [] if e.guard is None else [wrap(e.guard)]


def _rel_cases(c, c2, f, f2, an, L, R, J):
    """(id, kind, src, dst, spec, annotation, guards, consequent, tag) per product transition.

    A pair is skipped when the licensing spec is false there; those
    transitions do not exist in the product.
    """
    ls, rs = sorted(labs(c) | {f}), sorted(labs(c2) | {f2})
    el, er = edges(c, f), edges(c2, f2)
    for n in ls:
        for n2 in rs:
            a = an((n, n2))
            lo, ro, jo = L.at(n, n2), R.at(n, n2), J.at(n, n2)
            if lo != FALSE:
                for e in el:
                    if e.src == n:
                        yield (f"LO:{n},{n2}->{e.dst},{n2}:{e.kind}", "LO", (n, n2), (e.dst, n2),
                               lo, a, _guards(e, Lhs), _rsub(an((e.dst, n2)), e.assign, None), e.kind)
            if ro != FALSE:
                for e in er:
                    if e.src == n2:
                        yield (f"RO:{n},{n2}->{n},{e.dst}:{e.kind}", "RO", (n, n2), (n, e.dst),
                               ro, a, _guards(e, Rhs), _rsub(an((n, e.dst)), None, e.assign), e.kind)
            if jo != FALSE:
                for e in el:
                    if e.src != n:
                        continue
                    for e2 in er:
                        if e2.src == n2:
                            yield (f"JO:{n},{n2}->{e.dst},{e2.dst}:{e.kind}/{e2.kind}", "JO", (n, n2),
                                   (e.dst, e2.dst), jo, a, _guards(e, Lhs) + _guards(e2, Rhs),
                                   _rsub(an((e.dst, e2.dst)), e.assign, e2.assign),
                                   f"{e.kind}/{e2.kind}")


def rel_vcs(c, c2, f, f2, an, L, R, J):
    """VCs for every LO, RO and JO transition licensed at a control pair."""
    return [VC(i, k, src, dst, conj(spec, a, *gs), cons, tag)
            for i, k, src, dst, spec, a, gs, cons, tag in _rel_cases(c, c2, f, f2, an, L, R, J)]


def check_pc_fresh(pc, *things):
    for t in things:
        vs = cmd_vars(t) if isinstance(t, COMMAND_NODES) else formula_vars(t)
        if pc in vs:
            raise PcNotFresh(f"{pc} occurs in {t!r:.60}")


def encoded_rel_vcs(c, c2, f, f2, an, L, R, J, pc="pc"):
    """The state-level VCs with control pairs folded into pc tests on both sides.

    The antecedent carries the pc-encoded spec instead of the spec at the pair;
    pc must be fresh for the programs, annotation and specs.
    """
    check_pc_fresh(pc, c, c2, *(an(k) for k in an.keys()),
                   *(cl.formula for s in (L, R, J) for cl in s.clauses))
    enc = {"LO": encode_pc(L, pc), "RO": encode_pc(R, pc), "JO": encode_pc(J, pc)}
    out = []
    for i, k, (n, n2), dst, _, a, gs, cons, tag in _rel_cases(c, c2, f, f2, an, L, R, J):
        ant = conj(enc[k], Lhs(pc_test(pc, n)), Rhs(pc_test(pc, n2)), a, *gs)
        out.append(VC("enc-" + i, k, (n, n2), dst, ant, cons, tag))
    return out


@dataclass
class DischargeReport:
    results: list = field(default_factory=list)  # (VC, Verdict)

    @property
    def valid(self):
        return all(v.valid for _, v in self.results)

    @property
    def failures(self):
        return [(vc, v) for vc, v in self.results if not v.valid]

    def verdict(self):
        if self.valid:
            return Verdict(VALID, detail=f"{len(self.results)} VCs")
        bad = self.failures
        status = COUNTEREXAMPLE if any(v.status == COUNTEREXAMPLE for _, v in bad) else INCONCLUSIVE
        cex = [{"vc": vc.id, "counterexample": v.counterexamples[:1]} for vc, v in bad]
        return Verdict(status, cex, detail=f"{len(bad)} of {len(self.results)} VCs fail")


def discharge(vcs, bound):
    return DischargeReport([(vc, entails(vc.antecedent, vc.consequent, bound)) for vc in vcs])


def check_condition_c(an, L, R, J, f, f2, bound, pc="pc"):
    """At every annotated pair the annotation implies L or R or J or [f|f'] (pc-encoded)."""
    target = disj(encode_pc(L, pc), encode_pc(R, pc), encode_pc(J, pc),
                  conj(Lhs(pc_test(pc, f)), Rhs(pc_test(pc, f2))))
    cex = []
    for n, n2 in an.keys():
        v = entails(conj(an((n, n2)), Lhs(pc_test(pc, n)), Rhs(pc_test(pc, n2))), target, bound)
        if not v.valid:
            cex.append({"ctrl": (n, n2), "counterexample": v.counterexamples[:1]})
    if cex:
        return Verdict(COUNTEREXAMPLE, cex, detail="annotation does not imply L or R or J")
    return Verdict(VALID)
