import pytest
from hypothesis import given, settings, strategies as st

from conftest import program
from rhlkit.assertions import entails, equivalent, pc_test
from rhlkit.gcl_syntax import (
    GC, And, Assign, Lit, Not, Seq, enab, erase, ghost, parse_bool, parse_int, parse_program,
    show_command,
)
from rhlkit.kat import equiv_commands
from rhlkit.normalform import (
    NotNormalFormGuard, PcNotFresh, add_pc, classify_guard, instrumented, is_norm, norm, normalize,
    remove_pc, set_pc, verify_norm_equiv,
)
from rhlkit.randprog import random_program
from rhlkit.semantics import DomainBound


def q(n):
    return pc_test("pc", n)


def gc_test(n, cond, m):
    return GC(q(n) if cond is None else And((q(n), parse_bool(cond))), set_pc("pc", m))


def gc_set(n, x, e, m):
    return GC(q(n), Seq(Assign(0, x, parse_int(e)), set_pc("pc", m)))


D0 = [gc_set(1, "x", "y", 2), gc_test(2, "x > 0", 3), GC(And((q(2), Not(parse_bool("x > 0")))), set_pc("pc", 6)),
      gc_test(3, "x mod 2 = 0", 4), gc_test(3, "x mod 2 != 0", 5), gc_set(4, "x", "x - 1", 2),
      gc_set(5, "x", "x - 2", 2)]


def test_d0_listing(c0):
    assert list(normalize(c0, 6).body) == D0


def test_single_assignment():
    c = parse_program("x@4 := x - 1")
    assert norm(c, 2) == [gc_set(4, "x", "x - 1", 2)]


def test_add_pc(c0):
    assert add_pc(parse_program("skip@1")) == Seq(set_pc("pc", 1), parse_program("skip@1"))
    text = ("pc := 1; x := y; pc := 2; do x > 0 -> pc := 3; if x mod 2 = 0 -> pc := 4; x := x - 1 "
            "[] x mod 2 != 0 -> pc := 5; x := x - 2 fi; pc := 2 od; pc := 6")
    flat = show_command(instrumented(c0, 6), labels=False).replace("(", "").replace(")", "")
    assert flat == text
    assert remove_pc(add_pc(c0)) == c0
    assert ghost("pc", add_pc(c0))
    b = DomainBound.make(lo=-4, hi=6)
    assert equiv_commands(erase("pc", add_pc(c0)), c0, b, ["x", "y"]).valid


def test_pc_must_be_fresh():
    with pytest.raises(PcNotFresh):
        normalize(parse_program("pc := 1"), 2)


def test_classify_d0(c0):
    kinds = [(g.form, g.source, g.target, g.kind) for g in (classify_guard(gc, c0, 6) for gc in D0)]
    assert kinds == [("set", 1, 2, "asgn"), ("test", 2, 3, "do-enter"), ("test", 2, 6, "do-exit"),
                     ("test", 3, 4, "if"), ("test", 3, 5, "if"), ("set", 4, 2, "asgn"), ("set", 5, 2, "asgn")]
    with pytest.raises(NotNormalFormGuard):
        classify_guard(gc_test(2, "x > 1", 3), c0, 6)


def test_d0_enab(c0):
    b = DomainBound.make(lo=-4, hi=6).with_pc_domain(range(0, 8))
    e = enab(normalize(c0, 6).body)
    assert equivalent(e, parse_bool("1 <= pc && pc < 6"), b)


def test_norm_equiv_small(c0):
    assert verify_norm_equiv(parse_program("skip@1"), 2, DomainBound.make(lo=0, hi=1)).valid
    b = DomainBound.make(lo=-6, hi=6)
    assert verify_norm_equiv(c0, 6, b).valid


def test_is_norm_rejects_mutations(c0):
    body = list(normalize(c0, 6).body)
    assert is_norm(c0, 6, body)
    assert not is_norm(c0, 6, body[:-1])
    assert not is_norm(c0, 6, body[1:] + body[:1])
    assert not is_norm(c0, 7, body)


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_norm_is_norm(seed):
    c, f = random_program(seed)
    body = normalize(c, f).body
    assert is_norm(c, f, body)
    for gc in body:
        classify_guard(gc, c, f)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_norm_equiv_random(seed):
    c, f = random_program(seed, depth=2)
    assert verify_norm_equiv(c, f, DomainBound.make(lo=-2, hi=3)).valid
