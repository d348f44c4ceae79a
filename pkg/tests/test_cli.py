import io
import json

import pytest

from conftest import FIXTURES
from rhlkit.cli import main


def cli(*args):
    out = io.StringIO()
    code = main([str(a) for a in args], out=out)
    return code, out.getvalue()


def fx(name):
    return FIXTURES / name


def test_parse_and_duplicate_labels(tmp_path):
    code, out = cli("parse", fx("c0.gcl"))
    assert code == 0 and out.startswith("x@1 := y; do@2")
    bad = tmp_path / "bad.gcl"
    bad.write_text("x@1 := 1; y@1 := 2\n")
    assert cli("parse", bad)[0] == 2
    assert cli("parse", tmp_path / "missing.gcl")[0] == 2
    assert cli("frobnicate")[0] == 2


def test_run_output_format():
    code, out = cli("run", fx("c0.gcl"), "--store", "x=3,y=0")
    assert code == 0 and out == "x=0 y=0\n"
    code, out = cli("run", fx("c0.gcl"), "--store", "y=3")
    assert out == "x=-1 y=3\n"


def test_run_budget(tmp_path):
    loop = tmp_path / "loop.gcl"
    loop.write_text("do true -> skip od\n")
    assert cli("run", loop, "--budget", "50")[0] == 3


def test_aut_edges():
    code, out = cli("aut", fx("c0.gcl"), "--fin", 6, "--dump-edges")
    assert code == 0
    assert out.splitlines() == ["(1 -> 2) : asgn", "(2 -> 3) : do-enter", "(2 -> 6) : do-exit",
                                "(3 -> 4) : if-branch", "(3 -> 5) : if-branch", "(4 -> 2) : asgn",
                                "(5 -> 2) : asgn"]
    assert cli("aut", fx("c0.gcl"), "--fin", 3)[0] == 2


def test_normalize_verify():
    code, out = cli("normalize", fx("c0.gcl"), "--fin", 6, "--verify", "--min", -3, "--max", 4)
    assert code == 0
    assert out.splitlines()[0].startswith("pc := 1; do pc = 1 -> x := y; pc := 2")
    assert out.splitlines()[-1].startswith("VALID")


def test_pc_clash(tmp_path):
    p = tmp_path / "pc.gcl"
    p.write_text("pc := 1\n")
    assert cli("normalize", p, "--fin", 2)[0] == 2


def test_check_equiv(tmp_path):
    a, b = tmp_path / "a.gcl", tmp_path / "b.gcl"
    a.write_text("skip; skip\n")
    b.write_text("skip\n")
    code, out = cli("check-equiv", a, b, "--vars", "x", "--kat-dump")
    assert code == 0 and out.splitlines()[:2] == ["(1 ; 1)", "1"]
    b.write_text("x := 1\n")
    assert cli("check-equiv", a, b)[0] == 1


def test_vcgen():
    code, out = cli("vcgen", fx("c0.gcl"), "--spec", fx("c0.spec"), "--discharge")
    assert code == 0 and out.splitlines()[-1] == "7 of 7 VCs VALID"


def test_rvcgen_original_and_corrected():
    code, out = cli("rvcgen", fx("c4.gcl"), fx("c5.gcl"), "--fin", 0, "--fin2", 0,
                    "--spec", fx("c4c5.spec"), "--discharge")
    # the original alignment leaves two exit rows unprovable
    assert code == 1 and out.splitlines()[-1] == "24 of 26 VCs VALID"
    code, out = cli("rvcgen", fx("c4.gcl"), fx("c5.gcl"), "--spec", fx("c4c5_fixed.spec"), "--discharge")
    assert code == 0 and out.splitlines()[-1] == "26 of 26 VCs VALID"


def test_prove_and_check(tmp_path):
    proof = tmp_path / "out.proof"
    code, _ = cli("prove-rel", fx("c0.gcl"), fx("c0.gcl"), "--fin", 6, "--fin2", 6,
                  "--spec", fx("lockstep.spec"), "-o", proof)
    assert code == 0
    doc = json.loads(proof.read_text())
    assert doc["proof"]["rule"] and {"rule", "conclusion", "obligations", "children"} <= set(doc["proof"])
    code, out = cli("check-proof", proof)
    assert code == 0 and out.splitlines()[-1].startswith("VALID")
    doc["proof"]["children"] = []
    proof.write_text(json.dumps(doc))
    code, out = cli("check-proof", proof)
    assert code == 1 and "MALFORMED" in out


def test_prove_unary(tmp_path):
    proof = tmp_path / "u.proof"
    assert cli("prove-unary", fx("c0.gcl"), "--spec", fx("c0.spec"), "-o", proof)[0] == 0
    assert cli("check-proof", proof, "--strict")[0] == 0


def test_prove_rel_refuses_original_c4c5(tmp_path):
    code, _ = cli("prove-rel", fx("c4.gcl"), fx("c5.gcl"), "--spec", fx("c4c5.spec"), "-o", tmp_path / "p")
    assert code == 1


def test_check_and_adequacy():
    assert cli("check", fx("c0.gcl"), "--spec", fx("c0.spec"))[0] == 0
    assert cli("check", fx("c0.gcl"), fx("c0.gcl"), "--spec", fx("lockstep.spec"))[0] == 0
    code, out = cli("adequacy", fx("swap_left.gcl"), fx("swap_right.gcl"), "--spec", fx("swap.spec"), "--full")
    assert code == 0 and out.splitlines() == ["manifest: VALID", "adequacy: VALID"]


def test_deterministic_output():
    a = cli("rvcgen", fx("c4.gcl"), fx("c5.gcl"), "--spec", fx("c4c5.spec"))
    b = cli("rvcgen", fx("c4.gcl"), fx("c5.gcl"), "--spec", fx("c4c5.spec"))
    assert a == b
