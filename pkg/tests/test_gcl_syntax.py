import pytest
from hypothesis import given, strategies as st

from conftest import program
from rhlkit.gcl_syntax import (
    GC, TRUE, Assign, BinOp, Cmp, Do, GclSyntaxError, If, LabelError, Lit, Or, Seq, Skip, Var,
    enab, erase, fsuc, ghost, lab, labs, ok, okf, parse_bool, parse_program, show_bool,
    show_command, sub, well_formed,
)
from rhlkit.normalform import add_pc
from rhlkit.randprog import random_program
from rhlkit.semantics import DomainBound


def test_c0_ast(c0):
    x, y = Var("x"), Var("y")
    loop = Do(2, (GC(Cmp(">", x, Lit(0)),
                     If(3, (GC(Cmp("=", BinOp("mod", x, Lit(2)), Lit(0)), Assign(4, "x", BinOp("-", x, Lit(1)))),
                            GC(Cmp("!=", BinOp("mod", x, Lit(2)), Lit(0)), Assign(5, "x", BinOp("-", x, Lit(2))))))),))
    assert c0 == Seq(Assign(1, "x", y), loop)


def test_auto_labels():
    assert parse_program("skip") == Skip(1)
    assert parse_program("x := 0 ; y := 0") == Seq(Assign(1, "x", Lit(0)), Assign(2, "y", Lit(0)))
    # explicit labels are kept and the rest fill the gaps
    assert labs(parse_program("x@2 := 0; y := 0; skip")) == {1, 2, 3}


def test_label_errors():
    with pytest.raises(LabelError):
        parse_program("x@1 := 1; y@1 := 2")
    with pytest.raises(LabelError):
        parse_program("x@0 := 1")
    with pytest.raises(GclSyntaxError):
        parse_program("x := ")
    with pytest.raises(GclSyntaxError):
        parse_program("if x > 0 -> skip")


def test_structure(c0):
    assert labs(c0) == {1, 2, 3, 4, 5}
    assert ok(c0) and okf(c0, 6) and not okf(c0, 3)
    assert lab(c0) == 1
    assert isinstance(sub(3, c0), If) and sub(3, c0).label == 3
    assert sub(4, c0) == Assign(4, "x", BinOp("-", Var("x"), Lit(1)))
    assert sub(2, c0) == c0.second
    assert not ok(Seq(Skip(1), Skip(1)))


def test_fsuc(c0):
    assert fsuc(2, c0, 6) == 6
    assert fsuc(4, c0, 6) == 2
    assert fsuc(5, c0, 6) == 2
    assert fsuc(1, c0, 6) == 2
    assert fsuc(3, c0, 6) == 2
    assert fsuc(7, Skip(7), 9) == 9


def test_enab():
    gcs = (GC(parse_bool("x > 0"), Assign(1, "y", Lit(1))), GC(parse_bool("z < 1"), Assign(2, "y", Lit(2))))
    assert enab(gcs) == Or((parse_bool("x > 0"), parse_bool("z < 1")))
    assert enab((GC(TRUE, Skip(1)),)) == TRUE


def test_erase_and_ghost(c0):
    assert erase("x", Assign(1, "x", Var("x"))) == Skip(1)
    assert erase("z", c0) == c0
    assert ghost("pc", add_pc(c0, "pc"))
    assert not ghost("x", c0)


def test_well_formed(c0):
    b = DomainBound.make(lo=-4, hi=8)
    rep = well_formed(c0, b)
    assert rep.ok and not rep.type_errors
    assert [c.status for c in rep.if_checks] == ["PASS-SYNTACTIC"]
    bad = well_formed(If(1, (GC(parse_bool("x >= 0"), Skip(2)),)), b)
    assert bad.if_checks[0].status == "FAIL"
    assert bad.if_checks[0].counterexample == {"x": -4}
    assert well_formed(If(1, (GC(TRUE, Skip(2)),)), b).if_checks[0].status == "PASS-SYNTACTIC"


def test_fixtures_parse():
    for name in ["c0", "c1", "c4", "c5", "swap_left", "swap_right"]:
        c = program(name)
        assert ok(c)
        assert parse_program(show_command(c)) == c


@given(st.integers(0, 10**6))
def test_print_parse_roundtrip(seed):
    c, f = random_program(seed)
    assert parse_program(show_command(c)) == c
    assert okf(c, f)


@given(st.integers(0, 10**6))
def test_bool_roundtrip(seed):
    c, _ = random_program(seed)
    for d in [c]:
        for g in _guards(d):
            assert parse_bool(show_bool(g)) == g


def _guards(c):
    if isinstance(c, Seq):
        return _guards(c.first) + _guards(c.second)
    if isinstance(c, (If, Do)):
        return [gc.guard for gc in c.gcs] + [g for gc in c.gcs for g in _guards(gc.body)]
    return []
