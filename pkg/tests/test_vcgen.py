import pytest

from conftest import program, spec
from rhlkit.assertions import Annotation, Lhs, Rhs, SSubst, RSubst, entails, equivalent, parse_formula, pc_test
from rhlkit.gcl_syntax import FALSE, TRUE, Lit, Not, Var, conj, parse_bool, parse_int, parse_program
from rhlkit.semantics import DomainBound
from rhlkit.vcgen import (
    PcNotFresh, check_condition_c, discharge, edges, encoded_rel_vcs, rel_vcs, unary_vcs,
)

FIG15_IDS = [
    "JO:1,1->2,2:asgn/asgn", "JO:2,2->3,3:asgn/asgn", "JO:3,3->4,4:asgn/asgn",
    "JO:4,4->5,5:do-enter/do-enter", "JO:4,4->0,0:do-exit/do-exit", "JO:5,5->6,6:if/if",
    "JO:6,6->7,7:asgn/asgn", "JO:7,7->9,9:asgn/asgn", "JO:9,9->4,4:asgn/asgn",
    "LO:4,4->5,4:do-enter", "LO:5,4->8,4:if", "LO:8,4->9,4:skip", "LO:9,4->4,4:asgn",
    "RO:4,4->4,5:do-enter", "RO:4,5->4,8:if", "RO:4,8->4,9:skip", "RO:4,9->4,4:asgn",
]
FIG15_BOUND = DomainBound.make(ranges={"x": (4, 7), "y": (3, 8), "z": (1, 64), "w": (0, 12)})


def test_edges(c0):
    got = [(e.src, e.dst, e.kind) for e in edges(c0, 6)]
    assert got == [(1, 2, "asgn"), (2, 3, "do-enter"), (2, 6, "do-exit"), (3, 4, "if"), (3, 5, "if"),
                   (4, 2, "asgn"), (5, 2, "asgn")]


def test_c0_unary_vcs_shape(c0):
    an = Annotation({i: parse_formula(f"x > {i}") for i in range(1, 7)})
    vcs = unary_vcs(c0, 6, an)
    assert len(vcs) == 7
    assert vcs[0].consequent == SSubst(an(2), "x", Var("y"))
    assert not any(vc.src == 1 and vc.dst == 3 for vc in vcs)


def test_c0_validity_annotation(c0):
    an = spec("c0").annotation
    assert discharge(unary_vcs(c0, 6, an), DomainBound.make(lo=-4, hi=6)).valid


def test_skip_only():
    an = Annotation({1: parse_formula("x > 0"), 2: parse_formula("x > 1")})
    (vc,) = unary_vcs(parse_program("skip@1"), 2, an)
    assert (vc.antecedent, vc.consequent) == (an(1), an(2))
    assert not discharge([vc], DomainBound.make()).valid


def test_false_antecedent_is_valid():
    an = Annotation({2: TRUE})
    assert discharge(unary_vcs(parse_program("skip@1"), 2, an), DomainBound.make()).valid


def _lockstep_vcs(c0):
    sp = spec("lockstep")
    return sp, rel_vcs(c0, c0, 6, 6, sp.annotation, sp.L, sp.R, sp.J)


def test_lockstep_vcs(c0):
    sp, vcs = _lockstep_vcs(c0)
    b = DomainBound.make(ranges=sp.ranges)
    assert discharge(vcs, b).valid
    live = [vc.id for vc in vcs if not entails(vc.antecedent, FALSE, b).valid]
    assert live == ["JO:1,1->2,2:asgn/asgn", "JO:2,2->3,3:do-enter/do-enter", "JO:2,2->6,6:do-exit/do-exit",
                    "JO:3,3->4,4:if/if", "JO:3,3->5,5:if/if", "JO:4,4->2,2:asgn/asgn",
                    "JO:5,5->2,2:asgn/asgn"]
    first = vcs[0]
    assert first.consequent == RSubst(sp.annotation((2, 2)), ("x", Var("y")), ("x", Var("y")))


def test_c4c5_fig15_rows(c4, c5):
    sp = spec("c4c5")
    vcs = {vc.id: vc for vc in rel_vcs(c4, c5, 0, 0, sp.annotation, sp.L, sp.R, sp.J)}
    assert set(FIG15_IDS) <= set(vcs)
    rep = discharge([vcs[i] for i in FIG15_IDS], FIG15_BOUND)
    assert rep.valid
    # a vacuous joint row: the branch guards contradict an(5,5)
    assert "JO:5,5->8,8:if/if" in vcs
    assert entails(vcs["JO:5,5->8,8:if/if"].antecedent, FALSE, FIG15_BOUND).valid


def test_c4c5_original_alignment_fails_two_exit_rows(c4, c5):
    sp = spec("c4c5")
    vcs = rel_vcs(c4, c5, 0, 0, sp.annotation, sp.L, sp.R, sp.J)
    rep = discharge(vcs, DomainBound.make(ranges=sp.ranges))
    assert sorted(vc.id for vc, _ in rep.failures) == ["LO:4,4->0,4:do-exit", "RO:4,4->4,0:do-exit"]
    vc, v = rep.failures[0]
    left, right = v.counterexamples[0]
    # both loops are about to exit but L licenses a left-only exit
    assert left["y"] == right["y"] == 4 and left["w"] % 2 == 1


def test_c4c5_corrected_alignment_discharges(c4, c5):
    sp = spec("c4c5_fixed")
    vcs = rel_vcs(c4, c5, 0, 0, sp.annotation, sp.L, sp.R, sp.J)
    assert discharge(vcs, DomainBound.make(ranges=sp.ranges)).valid


def test_encoded_joint_row(c4, c5):
    sp = spec("c4c5")
    b = DomainBound.make(ranges=sp.ranges, pc_domain=range(0, 10))
    vcs = {vc.id: vc for vc in encoded_rel_vcs(c4, c5, 0, 0, sp.annotation, sp.L, sp.R, sp.J)}
    vc = vcs["enc-JO:6,6->7,7:asgn/asgn"]
    assert vc.consequent == RSubst(sp.annotation((7, 7)), ("z", parse_int("z * y")), ("z", parse_int("z * 2")))
    assert discharge([vc], b).valid


def test_encoded_lo_skip_row(c4, c5):
    sp = spec("c4c5")
    vcs = {vc.id: vc for vc in encoded_rel_vcs(c4, c5, 0, 0, sp.annotation, sp.L, sp.R, sp.J)}
    vc = vcs["enc-LO:8,4->9,4:skip"]
    assert vc.consequent == sp.annotation((9, 4))


def test_pc_freshness(c0):
    an = Annotation({(1, 1): parse_formula("lhs(pc = 1)")}, relational=True)
    sp = spec("lockstep")
    with pytest.raises(PcNotFresh):
        encoded_rel_vcs(c0, c0, 6, 6, an, sp.L, sp.R, sp.J)


def test_condition_c(c0, c4, c5):
    sp = spec("c4c5")
    b = DomainBound.make(ranges=sp.ranges, pc_domain=range(0, 10))
    assert check_condition_c(sp.annotation, sp.L, sp.R, sp.J, 0, 0, b).valid
    ls = spec("lockstep")
    b2 = DomainBound.make(ranges=ls.ranges, pc_domain=range(1, 7))
    assert check_condition_c(ls.annotation, ls.L, ls.R, ls.J, 6, 6, b2).valid
    from rhlkit.assertions import FALSE_SPEC
    an = Annotation({(1, 2): TRUE}, relational=True)
    assert not check_condition_c(an, FALSE_SPEC, FALSE_SPEC, FALSE_SPEC, 6, 6, b2).valid
