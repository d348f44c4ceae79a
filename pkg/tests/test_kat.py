import numpy as np
from hypothesis import given, settings, strategies as st

from rhlkit import kat
from rhlkit.gcl_syntax import TRUE, parse_bool, parse_int, parse_program
from rhlkit.kat import (
    ONE, KAct, KNot, KSeq, KStar, KTest, StateSpace, check_equation, diff_test, equiv_commands,
    equiv_semantic, hyp_assign, hyp_false, interp, mkt, set_test, show_kat, tot_if,
)
from rhlkit.randprog import random_program
from rhlkit.semantics import COUNTEREXAMPLE, DomainBound, run

B = DomainBound.make(lo=-3, hi=4)


def test_mkt_shapes():
    assert mkt(parse_program("skip")) == ONE
    e, body = parse_bool("x > 0"), parse_program("x := x - 1")
    assert mkt(parse_program("do x > 0 -> x := x - 1 od")) == KSeq(KStar(KSeq(KTest(e), mkt(body))), KNot(KTest(e)))
    assert mkt(parse_program("if true -> skip fi")) == KSeq(ONE, ONE)
    assert show_kat(mkt(parse_program("x := 1; skip"))) == "(x := 1 ; 1)"


def test_interp_of_test_is_diagonal():
    space = StateSpace(("x",), B)
    m = interp(KTest(parse_bool("x > 0")), space).toarray()
    assert np.array_equal(m, np.diag([v > 0 for v in B.values("x")]))
    assert np.array_equal(interp(ONE, space).toarray(), np.eye(space.n, dtype=bool))


def _run_relation(c, vars, bound):
    space = StateSpace(vars, bound)
    index = {tuple(space.store(i)[v] for v in space.vars): i for i in range(space.n)}
    m = np.zeros((space.n, space.n), dtype=bool)
    for i in range(space.n):
        for t in run(c, space.store(i), bound).stores():
            j = index.get(tuple(t[v] for v in space.vars))
            if j is not None:
                m[i, j] = True
    return space, m


def test_interp_matches_execution(c0):
    b = DomainBound.make(lo=-4, hi=6)
    space, expected = _run_relation(c0, ("x", "y"), b)
    assert np.array_equal(interp(mkt(c0), space).toarray(), expected)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_interp_matches_execution_random(seed):
    # values stay inside a wide box for depth-2 programs over [-2..2]
    c, _ = random_program(seed, depth=2)
    b = DomainBound.make(lo=-2, hi=2)
    space, expected = _run_relation(c, ("x", "y", "z"), b)
    got = interp(mkt(c), space).toarray()
    # the model drops runs that leave the box, so it is contained in the execution relation
    assert not (got & ~expected).any()


def test_equivalences():
    assert equiv_commands(parse_program("skip; skip"), parse_program("skip"), B).valid
    tiled = parse_program("do x > 0 -> x := x - 1; do x > 0 && x mod 2 = 0 -> x := x - 1 od od")
    assert equiv_commands(parse_program("do x > 0 -> x := x - 1 od"), tiled, B).valid
    v = equiv_commands(parse_program("x := 1"), parse_program("x := 2"), B)
    assert v.status == COUNTEREXAMPLE and v.counterexamples


def test_normal_form_axioms():
    b = B.with_pc_domain(range(1, 7))
    for eq in [diff_test("pc", 1, 2), set_test("pc", 2),
               kat.test_commute_asgn(parse_bool("pc = 2"), "x", parse_int("x - 1")),
               tot_if([parse_bool("x mod 2 = 0"), parse_bool("x mod 2 != 0")])]:
        assert check_equation(eq, b, ["x"]).valid, eq.name
    assert not check_equation(tot_if([parse_bool("x > 0")]), b, ["x"]).valid


def test_hypotheses():
    assert hyp_false(parse_bool("x > 0 && x < 0"), B) is not None
    assert hyp_false(parse_bool("x > 0"), B) is None
    h = hyp_assign(parse_bool("x > 0"), "x", parse_int("x - 1"), parse_bool("x >= 0"), B)
    assert h is not None and check_equation(h, B).valid
    assert hyp_assign(TRUE, "x", parse_int("x - 1"), parse_bool("x >= 0"), B) is None


def test_equiv_reports_pairs():
    v = equiv_semantic(KAct("x", parse_int("1")), ONE, DomainBound.make(lo=0, hi=1), ["x"])
    assert {"from", "to"} <= set(v.counterexamples[0])
