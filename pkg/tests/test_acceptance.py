"""Acceptance criteria 1-11, one line each in the terminal summary.

Criterion 7(c) is run on the original c4/c5 alignment, which does not yield
a valid proof (two do-exit obligations at control (4,4) fail); it is marked as
a strict xfail and the corrected alignment is checked alongside it.
"""
import itertools
import random
import time
from contextlib import contextmanager

import pytest

from conftest import ACCEPTANCE, program, spec
from rhlkit.assertions import (
    Annotation, FALSE_SPEC, Lhs, Rhs, SSubst, entails, equivalent, holds, implies, not_at,
    parse_formula, pc_test,
)
from rhlkit.automata import (
    _init_pairs, build_aut, build_product, check_adequacy, check_manifest_adequacy, reachable,
    restrict_live, strongest_annotation,
)
from rhlkit.gcl_syntax import (
    GC, TRUE, And, Assign, Lit, Not, Seq, Var, conj, fsuc, parse_bool, parse_int,
)
from rhlkit.mutate import mutate
from rhlkit.normalform import normalize, set_pc, verify_norm_equiv
from rhlkit.proof import audit_provenance, check_proof, provenance, synthesize_relational, synthesize_unary
from rhlkit.randprog import random_programs
from rhlkit.semantics import DomainBound, check_rel, check_unary, denote_bigstep, freeze, run
from rhlkit.vcgen import check_condition_c, discharge, rel_vcs, unary_vcs

FIG15_IDS = [
    "JO:1,1->2,2:asgn/asgn", "JO:2,2->3,3:asgn/asgn", "JO:3,3->4,4:asgn/asgn",
    "JO:4,4->5,5:do-enter/do-enter", "JO:4,4->0,0:do-exit/do-exit", "JO:5,5->6,6:if/if",
    "JO:6,6->7,7:asgn/asgn", "JO:7,7->9,9:asgn/asgn", "JO:9,9->4,4:asgn/asgn",
    "LO:4,4->5,4:do-enter", "LO:5,4->8,4:if", "LO:8,4->9,4:skip", "LO:9,4->4,4:asgn",
    "RO:4,4->4,5:do-enter", "RO:4,5->4,8:if", "RO:4,8->4,9:skip", "RO:4,9->4,4:asgn",
]


@contextmanager
def criterion(key, title, limit):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as e:
        took = time.perf_counter() - t0
        ACCEPTANCE.setdefault(key, []).append(f"criterion {key}: FAIL  {title} ({took:.2f}s) {type(e).__name__}")
        raise
    took = time.perf_counter() - t0
    ok = took < limit
    ACCEPTANCE.setdefault(key, []).append(
        f"criterion {key}: {'PASS' if ok else 'FAIL'}  {title} ({took:.2f}s, limit {limit}s)")
    assert ok, f"took {took:.2f}s, limit {limit}s"


def test_1_fsuc(c0):
    with criterion("1", "fsuc(2,c0,6)=6 and fsuc(4,c0,6)=2", 1):
        assert fsuc(2, c0, 6) == 6
        assert fsuc(4, c0, 6) == 2


def _eq6_rows(an):
    x, y = Var("x"), Var("y")
    g, even = parse_bool("x > 0"), parse_bool("x mod 2 = 0")
    return [
        implies(an(1), SSubst(an(2), "x", y)),
        implies(conj(g, an(2)), an(3)),
        implies(conj(Not(g), an(2)), an(6)),
        implies(conj(even, an(3)), an(4)),
        implies(conj(Not(even), an(3)), an(5)),
        implies(an(4), SSubst(an(2), "x", parse_int("x - 1"))),
        implies(an(5), SSubst(an(2), "x", parse_int("x - 2"))),
    ]


def test_2_unary_vc_golden(c0):
    b = DomainBound.make(lo=-4, hi=6)
    generic = Annotation({1: parse_formula("y >= 0"), 2: parse_formula("x <= y"), 3: parse_formula("x > 0 && x <= y"),
                          4: parse_formula("x mod 2 = 0"), 5: parse_formula("x > 1 || x = 1"),
                          6: parse_formula("x <= 0")})
    with criterion("2", "unary_vcs(c0,6,an) = the 7 rows, row-by-row over x,y in [-4..6]", 5):
        for an in (generic, spec("c0").annotation):
            vcs = unary_vcs(c0, 6, an)
            assert len(vcs) == 7
            for vc, row in zip(vcs, _eq6_rows(an)):
                assert equivalent(vc.formula, row, b), vc.id


def _q(n):
    return pc_test("pc", n)


def _golden_d(k, zinit, zmul):
    """d4 (k=2) or d5 (k=3) with loop guard y != 4, matching the programs."""
    def t(n, cond, m):
        return (n, cond, m, None)

    def s(n, x, e, m):
        return (n, None, m, (x, e))

    return [s(1, "x" if False else "y", "x", 2), s(2, "z", str(zinit), 3), s(3, "w", "0", 4),
            t(4, "y != 4", 5), t(4, "y = 4", 0), t(5, f"w mod {k} = 0", 6), t(5, f"w mod {k} != 0", 8),
            s(6, "z", f"z * {zmul}", 7), s(7, "y", "y - 1", 9), t(8, None, 9), s(9, "w", "w + 1", 4)]


def _matches(gc, row, b):
    n, cond, m, asg = row
    if asg is not None:
        return gc == GC(_q(n), Seq(Assign(0, asg[0], parse_int(asg[1])), set_pc("pc", m)))
    if gc.body != set_pc("pc", m):
        return False
    if cond is None:
        return gc.guard == _q(n)
    return (isinstance(gc.guard, And) and gc.guard.args[0] == _q(n)
            and equivalent(gc.guard.args[1], parse_bool(cond), b))


def test_3_normal_form_golden(c0, c4, c5):
    b = DomainBound.make(lo=-4, hi=8)
    d0 = [GC(_q(1), Seq(Assign(0, "x", Var("y")), set_pc("pc", 2))),
          GC(And((_q(2), parse_bool("x > 0"))), set_pc("pc", 3)),
          GC(And((_q(2), Not(parse_bool("x > 0")))), set_pc("pc", 6)),
          GC(And((_q(3), parse_bool("x mod 2 = 0"))), set_pc("pc", 4)),
          GC(And((_q(3), parse_bool("x mod 2 != 0"))), set_pc("pc", 5)),
          GC(_q(4), Seq(Assign(0, "x", parse_int("x - 1")), set_pc("pc", 2))),
          GC(_q(5), Seq(Assign(0, "x", parse_int("x - 2")), set_pc("pc", 2)))]
    with criterion("3", "normal forms of c0, c4, c5 match the d0/d4/d5 listings in order", 1):
        assert list(normalize(c0, 6).body) == d0
        for c, golden in ((c4, _golden_d(2, 24, "y")), (c5, _golden_d(3, 16, "2"))):
            body = normalize(c, 0).body
            assert len(body) == 11
            for i, (gc, row) in enumerate(zip(body, golden)):
                assert _matches(gc, row, b), i


def test_4_normal_form_theorem():
    b = DomainBound.make(lo=-4, hi=8, step_budget=100_000)
    with criterion("4", "verify_norm_equiv on c0, c1, c4, c5 and 100 random programs", 120):
        for name, f in (("c0", 6), ("c1", 7), ("c4", 0), ("c5", 0)):
            assert verify_norm_equiv(program(name), f, b).valid, name
        for c, f in random_programs(100, seed=4, depth=3):
            assert verify_norm_equiv(c, f, b).valid


def test_5_semantics_consistency():
    b = DomainBound.make(lo=-2, hi=2, step_budget=100_000)
    with criterion("5", "run = denote_bigstep = automaton outcomes on 200 random programs", 60):
        for c, f in random_programs(200, seed=5):
            A = build_aut(c, f, vars=("x", "y", "z"))
            for vals in itertools.product(range(-2, 3), repeat=3):
                s = dict(zip("xyz", vals))
                small, big = run(c, s, b), denote_bigstep(c, s, b)
                assert small.complete and big.complete
                aut = {t for n, t in reachable(A, [freeze(s)], b) if n == f}
                assert small.outcomes == big.outcomes == aut


@pytest.fixture(scope="module")
def lockstep_setup():
    sp = spec("lockstep")
    b = DomainBound.make(ranges={"x": (-2, 6), "y": (-2, 6)})
    return program("c0"), sp, b


def test_6a_lockstep_adequacy(lockstep_setup):
    c0, sp, b = lockstep_setup
    with criterion("6a", "lockstep product manifestly (y=y')-adequate", 60):
        A = build_aut(c0, 6)
        P = build_product(A, A, sp.L, sp.R, sp.J)
        assert check_manifest_adequacy(P, sp.L, sp.R, sp.J, parse_formula("eq(y, y)"), b).valid


def test_6b_lockstep_vcs(lockstep_setup):
    c0, sp, b = lockstep_setup
    with criterion("6b", "lockstep relational VCs discharge; 7 with satisfiable antecedents", 60):
        vcs = rel_vcs(c0, c0, 6, 6, sp.annotation, sp.L, sp.R, sp.J)
        assert discharge(vcs, b).valid
        live = [vc for vc in vcs if not entails(vc.antecedent, parse_formula("false"), b).valid]
        assert len(live) == 7


def test_6cde_lockstep_proof(lockstep_setup):
    c0, sp, b = lockstep_setup
    bp = b.with_pc_domain(range(1, 7))
    with criterion("6c", "synthesize_relational builds the lockstep tree", 60):
        tree = synthesize_relational(c0, c0, 6, 6, sp.L, sp.R, sp.J, sp.annotation, bp)
        assert tree.size() > 1
    with criterion("6d", "lockstep tree checks VALID", 60):
        assert check_proof(tree, bp).valid
    with criterion("6e", "check_rel confirms c0|c0 : {y=y'} {x=x'}", 60):
        assert tree.conclusion.pre == parse_formula("eq(y, y)") and tree.conclusion.post == parse_formula("eq(x, x)")
        assert check_rel(c0, c0, tree.conclusion.pre, tree.conclusion.post, b).valid


@pytest.fixture(scope="module")
def c4c5_setup():
    sp = spec("c4c5")
    return program("c4"), program("c5"), sp


def test_7a_condition_c(c4c5_setup):
    c4, c5, sp = c4c5_setup
    b = DomainBound.make(ranges=sp.ranges, pc_domain=range(0, 10))
    with criterion("7a", "annotation implies L or R or J or [0|0]", 120):
        assert check_condition_c(sp.annotation, sp.L, sp.R, sp.J, 0, 0, b).valid


def test_7b_fig15_vcs(c4c5_setup):
    c4, c5, sp = c4c5_setup
    b = DomainBound.make(ranges={"x": (4, 7), "y": (3, 8), "z": (1, 64), "w": (0, 12)})
    with criterion("7b", "the 17 listed c4/c5 VCs discharge over the stated box", 120):
        vcs = {vc.id: vc for vc in rel_vcs(c4, c5, 0, 0, sp.annotation, sp.L, sp.R, sp.J)}
        rep = discharge([vcs[i] for i in FIG15_IDS], b)
        assert rep.valid, rep.verdict()


@pytest.mark.xfail(strict=True, reason="original alignment: the (4,4) do-exit obligations of L and R fail at y=y'=4")
def test_7c_original_alignment_proof(c4c5_setup):
    c4, c5, sp = c4c5_setup
    b = DomainBound.make(ranges=sp.ranges, pc_domain=range(0, 10))
    with criterion("7c", "RHL+ proof from the original c4/c5 alignment checks VALID", 120):
        tree = synthesize_relational(c4, c5, 0, 0, sp.L, sp.R, sp.J, sp.annotation, b, check_hypotheses=False)
        v = check_proof(tree, b)
        assert v.valid, v.detail


def test_7c_corrected_alignment_proof(c4c5_setup):
    c4, c5, _ = c4c5_setup
    sp = spec("c4c5_fixed")
    b = DomainBound.make(ranges=sp.ranges, pc_domain=range(0, 10))
    with criterion("7c'", "RHL+ proof from the corrected c4/c5 alignment checks VALID", 120):
        tree = synthesize_relational(c4, c5, 0, 0, sp.L, sp.R, sp.J, sp.annotation, b)
        assert check_proof(tree, b).valid
        assert tree.conclusion.pre == sp.pre and tree.conclusion.post == sp.post


def test_7d_check_rel(c4c5_setup):
    c4, c5, sp = c4c5_setup
    b = DomainBound.make(lo=0, hi=0, ranges={"x": (4, 6)})
    with criterion("7d", "check_rel confirms c4|c5 : {x=x' and x>3} {z>z'} for x in [4..6]", 120):
        assert check_rel(c4, c5, parse_formula("eq(x, x) && lhs(x > 3)"), parse_formula("gt(z, z)"), b).valid


def test_8_floyd_completeness(c0):
    b = DomainBound.make(lo=-4, hi=6, ranges={"y": (0, 4)})
    with criterion("8", "strongest annotation of aut(c0,6) gives a checked unary proof of x<=0", 30):
        an = strongest_annotation(build_aut(c0, 6), TRUE, b)
        assert discharge(unary_vcs(c0, 6, an), b).valid
        tree = synthesize_unary(c0, 6, an, b)
        bp = b.with_pc_domain(range(1, 7))
        assert check_proof(tree, bp).valid
        assert audit_provenance(tree, provenance([(c0, 6)], an)) == []
        j = tree.conclusion
        assert j.cmd == c0 and j.pre == TRUE
        assert entails(j.post, parse_formula("x <= 0"), b).valid
        assert check_unary(c0, j.pre, j.post, b).valid
        assert check_unary(c0, j.pre, parse_formula("x <= 0"), b).valid


def test_9_cook_completeness(c0):
    b = DomainBound.make(lo=-2, hi=4)
    with criterion("9", "c0|c0 with L=R=J=not[fin|fin'] and the strongest product annotation", 60):
        A = build_aut(c0, 6)
        S = not_at(6, 6)
        L, R, J = restrict_live(A, A, S, S, S)
        P = build_product(A, A, L, R, J)
        pre = parse_formula("eq(y, y)")
        an = strongest_annotation(P, pre, b)
        bp = b.with_pc_domain(range(1, 7))
        tree = synthesize_relational(c0, c0, 6, 6, L, R, J, an, bp)
        assert check_proof(tree, bp).valid
        assert audit_provenance(tree, provenance([(c0, 6), (c0, 6)], an, specs=(L, R, J))) == []
        assert check_rel(c0, c0, pre, tree.conclusion.post, b).valid
        assert entails(tree.conclusion.post, parse_formula("eq(x, x)"), b).valid


def test_10_adequacy_counterexample():
    sp = spec("swap")
    A, A2 = build_aut(program("swap_left"), sp.fin), build_aut(program("swap_right"), sp.fin2)
    b = DomainBound.make(ranges=sp.ranges)
    with criterion("10", "dropping [2|3] from L breaks manifest adequacy at (2,3)", 5):
        L = sp.L.without(2, 3)
        v = check_manifest_adequacy(build_product(A, A2, L, sp.R, sp.J), L, sp.R, sp.J, sp.pre, b)
        assert not v.valid and v.counterexamples[0]["ctrl"] == (2, 3)
        full = build_product(A, A2, sp.L, sp.R, sp.J)
        assert check_manifest_adequacy(full, sp.L, sp.R, sp.J, sp.pre, b).valid


def test_11_checker_soundness(c0):
    ls = spec("lockstep")
    bl = DomainBound.make(ranges=ls.ranges, pc_domain=range(1, 7))
    bu = DomainBound.make(lo=-4, hi=6, ranges={"y": (0, 4)}, pc_domain=range(1, 7))
    with criterion("11", "50 single-point proof mutations all rejected", 60):
        trees = [(synthesize_relational(c0, c0, 6, 6, ls.L, ls.R, ls.J, ls.annotation, bl), bl),
                 (synthesize_unary(c0, 6, spec("c0").annotation, bu), bu)]
        for t, b in trees:
            assert check_proof(t, b).valid
        rng = random.Random(11)
        accepted = []
        for i in range(50):
            t, b = trees[i % 2]
            m, kind, path = mutate(t, rng)
            if check_proof(m, b).valid:
                accepted.append((kind, path))
        assert accepted == []
