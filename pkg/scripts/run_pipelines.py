"""Run the three relational pipelines end to end and print a verdict line for each.

    python scripts/run_pipelines.py [--original]

lockstep: c0 against itself, aligned step for step.
c4c5:     the loop-unrolling pair, using the corrected alignment (or the
          original one with --original, which yields a counterexample).
cook:     c0 against itself with the strongest product annotation.
"""
import argparse
import time
from pathlib import Path

from rhlkit.assertions import not_at, parse_formula
from rhlkit.automata import build_aut, build_product, restrict_live, strongest_annotation
from rhlkit.gcl_syntax import parse_program
from rhlkit.proof import check_proof, synthesize_relational
from rhlkit.semantics import DomainBound, check_rel
from rhlkit.specfile import load_spec

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "rhlkit" / "fixtures"


def program(name):
    return parse_program((FIXTURES / f"{name}.gcl").read_text())


def report(name, tree, bound, t0):
    v = check_proof(tree, bound)
    print(f"{name:9s} {v.status:15s} nodes={tree.size():4d}  {time.perf_counter() - t0:.2f}s")
    for cex in v.counterexamples[:3]:
        if "error" in cex:
            print("          ", cex["error"])
        else:
            print(f"           {cex['status']} at {cex['rule']} node {cex['path']}: {cex['counterexample']}")


def lockstep():
    t0 = time.perf_counter()
    sp, c0 = load_spec(FIXTURES / "lockstep.spec"), program("c0")
    b = DomainBound.make(ranges=sp.ranges, pc_domain=range(1, 7))
    report("lockstep", synthesize_relational(c0, c0, 6, 6, sp.L, sp.R, sp.J, sp.annotation, b), b, t0)


def c4c5(original):
    t0 = time.perf_counter()
    sp = load_spec(FIXTURES / ("c4c5.spec" if original else "c4c5_fixed.spec"))
    c4, c5 = program("c4"), program("c5")
    b = DomainBound.make(ranges=sp.ranges, pc_domain=range(0, 10))
    tree = synthesize_relational(c4, c5, 0, 0, sp.L, sp.R, sp.J, sp.annotation, b,
                                 check_hypotheses=not original)
    report("c4c5", tree, b, t0)


def cook():
    t0 = time.perf_counter()
    c0 = program("c0")
    b = DomainBound.make(lo=-2, hi=4)
    A = build_aut(c0, 6)
    S = not_at(6, 6)
    L, R, J = restrict_live(A, A, S, S, S)
    pre = parse_formula("eq(y, y)")
    an = strongest_annotation(build_product(A, A, L, R, J), pre, b)
    bp = b.with_pc_domain(range(1, 7))
    tree = synthesize_relational(c0, c0, 6, 6, L, R, J, an, bp)
    report("cook", tree, bp, t0)
    print("          semantic check:", check_rel(c0, c0, pre, tree.conclusion.post, b).status)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--original", action="store_true", help="use the original c4/c5 alignment")
    args = ap.parse_args()
    lockstep()
    c4c5(args.original)
    cook()
