"""Normal-form and semantics agreement over a batch of random programs.

    python scripts/random_batch.py --count 200 --seed 0 --depth 3
"""
import argparse
import itertools
import time

from rhlkit.automata import build_aut, reachable
from rhlkit.normalform import verify_norm_equiv
from rhlkit.randprog import random_programs
from rhlkit.semantics import DomainBound, denote_bigstep, freeze, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--lo", type=int, default=-2)
    ap.add_argument("--hi", type=int, default=2)
    args = ap.parse_args()

    b = DomainBound.make(lo=args.lo, hi=args.hi, step_budget=100_000)
    t0 = time.perf_counter()
    norm_bad = sem_bad = 0
    for i, (c, f) in enumerate(random_programs(args.count, seed=args.seed, depth=args.depth)):
        if not verify_norm_equiv(c, f, b).valid:
            norm_bad += 1
            print(f"program {i}: normal form disagrees")
        A = build_aut(c, f, vars=("x", "y", "z"))
        for vals in itertools.product(range(args.lo, args.hi + 1), repeat=3):
            s = dict(zip("xyz", vals))
            aut = {t for n, t in reachable(A, [freeze(s)], b) if n == f}
            if not (run(c, s, b).outcomes == denote_bigstep(c, s, b).outcomes == aut):
                sem_bad += 1
                print(f"program {i}: semantics disagree at {s}")
                break
    took = time.perf_counter() - t0
    print(f"{args.count} programs, {norm_bad} normal-form mismatches, {sem_bad} semantic mismatches, {took:.1f}s")


if __name__ == "__main__":
    main()
