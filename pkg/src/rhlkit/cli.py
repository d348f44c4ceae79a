"""Command-line front end: batch pipelines over program and spec files.

Exit codes: 0 success or VALID, 1 counterexample or failure, 2 usage or
precondition error, 3 inconclusive (budget exhausted).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .assertions import TRUE, Annotation, show_formula
from .automata import (
    BudgetExceeded, PreconditionError, build_aut, build_product, check_adequacy,
    check_manifest_adequacy,
)
from .gcl_syntax import GclSyntaxError, LabelError, cmd_vars, labs, okf, parse_program, show_command
from .kat import equiv_commands, mkt, show_kat
from .normalform import PcNotFresh, normalize, verify_norm_equiv
from .proof import (
    MALFORMED, HypothesisFailure, check_proof, expand_derived, from_json, synthesize_relational,
    synthesize_unary, to_json,
)
from .semantics import COUNTEREXAMPLE, INCONCLUSIVE, VALID, DomainBound, check_rel, check_unary, run, show_store
from .specfile import SpecFileError, load_spec
from .vcgen import discharge, edges, encoded_rel_vcs, rel_vcs, unary_vcs

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    paths: list
    fins: list = field(default_factory=list)
    pc: str = "pc"
    lo: int = -4
    hi: int = 8
    ranges: dict = field(default_factory=dict)
    budget: int = 100_000

    def bound(self, labels=(), extra_ranges=None):
        ranges = dict(extra_ranges or {})
        ranges.update(self.ranges)
        return DomainBound.make(lo=self.lo, hi=self.hi, ranges=ranges, step_budget=self.budget,
                                pc=self.pc, pc_domain=set(labels) or None)


def exit_for(status):
    return {VALID: EXIT_OK, COUNTEREXAMPLE: EXIT_FAIL, MALFORMED: EXIT_FAIL,
            INCONCLUSIVE: EXIT_INCONCLUSIVE}.get(status, EXIT_FAIL)


def _load_program(path):
    with open(path) as fh:
        return parse_program(fh.read())


def _range_arg(text):
    try:
        name, span = text.split("=")
        lo, hi = (int(t) for t in span.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected name=lo:hi, got {text!r}") from None
    return name.strip(), (lo, hi)


def _store_arg(text):
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            k, v = part.split("=")
            out[k.strip()] = int(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad store entry {part!r}") from None
    return out


def _config(args):
    paths = [p for p in (getattr(args, "file", None), getattr(args, "file2", None)) if p]
    cfg = RunConfig(paths, [getattr(args, "fin", None), getattr(args, "fin2", None)], args.pc,
                    args.min, args.max, dict(args.range or ()), args.budget)
    if cfg.lo > cfg.hi:
        raise UsageError("--min must not exceed --max")
    if cfg.budget <= 0:
        raise UsageError("--budget must be positive")
    return cfg


def _programs(cfg):
    progs = [_load_program(p) for p in cfg.paths]
    for c in progs:
        if cfg.pc in cmd_vars(c):
            raise PcNotFresh(f"pc variable {cfg.pc!r} occurs in the program")
    return progs


def _fin(value, spec_value, name):
    f = value if value is not None else spec_value
    if f is None:
        raise UsageError(f"{name} is required (flag or spec file)")
    return f


def _check_okf(c, f):
    if not okf(c, f):
        raise PreconditionError(f"final label {f} clashes with a program label")


def _print_verdict(v, out):
    print(str(v), file=out)
    return exit_for(v.status)


# ---------------------------------------------------------------- commands

def cmd_parse(args, cfg, out):
    for c in _programs(cfg):
        print(show_command(c), file=out)
    return EXIT_OK


def cmd_run(args, cfg, out):
    (c,) = _programs(cfg)
    res = run(c, args.store or {}, cfg.bound())
    for s in res.stores():
        print(show_store(s), file=out)
    if not res.complete:
        print("step budget exceeded; outcomes may be incomplete", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_aut(args, cfg, out):
    (c,) = _programs(cfg)
    f = _fin(args.fin, None, "--fin")
    _check_okf(c, f)
    A = build_aut(c, f)
    if args.dump_edges:
        for e in edges(c, f):
            kind = "if-branch" if e.kind == "if" else e.kind
            print(f"({e.src} -> {e.dst}) : {kind}", file=out)
    else:
        print(f"control {sorted(A.ctrl)} init {A.init} fin {A.fin}", file=out)
    return EXIT_OK


def cmd_normalize(args, cfg, out):
    (c,) = _programs(cfg)
    f = _fin(args.fin, None, "--fin")
    _check_okf(c, f)
    nf = normalize(c, f, cfg.pc)
    print(show_command(nf.command, labels=False), file=out)
    if args.verify:
        v = verify_norm_equiv(c, f, cfg.bound(labs(c) | {f}), cfg.pc)
        return _print_verdict(v, out)
    return EXIT_OK


def cmd_check_equiv(args, cfg, out):
    c, d = _programs(cfg)
    if args.kat_dump:
        print(show_kat(mkt(c)), file=out)
        print(show_kat(mkt(d)), file=out)
    vars = [v for v in (args.vars or "").split(",") if v]
    v = equiv_commands(c, d, cfg.bound(), vars)
    return _print_verdict(v, out)


def _print_vcs(vcs, bound, do_discharge, out):
    rep = discharge(vcs, bound) if do_discharge else None
    verdicts = dict((vc.id, v) for vc, v in rep.results) if rep else {}
    for vc in vcs:
        print(vc.id, file=out)
        print(f"  {show_formula(vc.formula)}", file=out)
        if rep:
            print(f"  {verdicts[vc.id]}", file=out)
    if rep is None:
        return EXIT_OK
    v = rep.verdict()
    print(f"{len(vcs) - len(rep.failures)} of {len(vcs)} VCs VALID", file=out)
    return exit_for(v.status)


def cmd_vcgen(args, cfg, out):
    (c,) = _programs(cfg)
    spec = load_spec(args.spec, relational=False)
    f = _fin(args.fin, spec.fin, "--fin")
    _check_okf(c, f)
    an = spec.annotation or Annotation({lab_: TRUE for lab_ in labs(c) | {f}})
    return _print_vcs(unary_vcs(c, f, an), cfg.bound(extra_ranges=spec.ranges), args.discharge, out)


def _rel_setup(args, cfg):
    c, c2 = _programs(cfg)
    spec = load_spec(args.spec, relational=True)
    f, f2 = _fin(args.fin, spec.fin, "--fin"), _fin(args.fin2, spec.fin2, "--fin2")
    _check_okf(c, f)
    _check_okf(c2, f2)
    return c, c2, f, f2, spec


def cmd_rvcgen(args, cfg, out):
    c, c2, f, f2, spec = _rel_setup(args, cfg)
    if spec.annotation is None:
        raise UsageError("rvcgen needs an [annotation] section")
    if args.encoded:
        vcs = encoded_rel_vcs(c, c2, f, f2, spec.annotation, spec.L, spec.R, spec.J, cfg.pc)
        bound = cfg.bound(labs(c) | labs(c2) | {f, f2}, spec.ranges)
    else:
        vcs = rel_vcs(c, c2, f, f2, spec.annotation, spec.L, spec.R, spec.J)
        bound = cfg.bound(extra_ranges=spec.ranges)
    return _print_vcs(vcs, bound, args.discharge, out)


def cmd_check(args, cfg, out):
    progs = _programs(cfg)
    spec = load_spec(args.spec, relational=len(progs) == 2)
    bound = cfg.bound(extra_ranges=spec.ranges)
    if len(progs) == 1:
        v = check_unary(progs[0], spec.pre, spec.post, bound)
    else:
        v = check_rel(progs[0], progs[1], spec.pre, spec.post, bound)
    return _print_verdict(v, out)


def cmd_adequacy(args, cfg, out):
    c, c2, f, f2, spec = _rel_setup(args, cfg)
    bound = cfg.bound(extra_ranges=spec.ranges)
    A, A2 = build_aut(c, f), build_aut(c2, f2)
    P = build_product(A, A2, spec.L, spec.R, spec.J)
    v = check_manifest_adequacy(P, spec.L, spec.R, spec.J, spec.pre, bound)
    print(f"manifest: {v}", file=out)
    code = exit_for(v.status)
    if args.full:
        v2 = check_adequacy(A, A2, P, spec.pre, bound)
        print(f"adequacy: {v2}", file=out)
        code = max(code, exit_for(v2.status))
    return code


def _write_proof(tree, bound, path, out):
    doc = {"bound": {"min": bound.lo, "max": bound.hi, "budget": bound.step_budget, "pc": bound.pc,
                     "ranges": {k: [a, b] for k, a, b in bound.ranges},
                     "pc_domain": list(bound.pc_domain or ())},
           "proof": to_json(tree)}
    text = json.dumps(doc, indent=1, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {tree.size()} nodes to {path}", file=out)
    else:
        print(text, file=out)


def _hypothesis_failure(e):
    print(f"hypotheses fail: {e}", file=sys.stderr)
    if e.verdict is not None:
        print(str(e.verdict), file=sys.stderr)
    return EXIT_FAIL


def cmd_prove_unary(args, cfg, out):
    (c,) = _programs(cfg)
    spec = load_spec(args.spec, relational=False)
    f = _fin(args.fin, spec.fin, "--fin")
    _check_okf(c, f)
    if spec.annotation is None:
        raise UsageError("prove-unary needs an [annotation] section")
    bound = cfg.bound(labs(c) | {f}, spec.ranges)
    try:
        tree = synthesize_unary(c, f, spec.annotation, bound, cfg.pc)
    except HypothesisFailure as e:
        return _hypothesis_failure(e)
    _write_proof(tree, bound, args.output, out)
    return EXIT_OK


def cmd_prove_rel(args, cfg, out):
    c, c2, f, f2, spec = _rel_setup(args, cfg)
    if spec.annotation is None:
        raise UsageError("prove-rel needs an [annotation] section")
    bound = cfg.bound(labs(c) | labs(c2) | {f, f2}, spec.ranges)
    try:
        tree = synthesize_relational(c, c2, f, f2, spec.L, spec.R, spec.J, spec.annotation, bound, cfg.pc)
    except HypothesisFailure as e:
        return _hypothesis_failure(e)
    _write_proof(tree, bound, args.output, out)
    return EXIT_OK


def cmd_check_proof(args, cfg, out):
    with open(args.file) as fh:
        doc = json.load(fh)
    b = doc.get("bound", {})
    ranges = {k: tuple(v) for k, v in b.get("ranges", {}).items()}
    ranges.update(cfg.ranges)
    lo = args.min if args.min_given else b.get("min", cfg.lo)
    hi = args.max if args.max_given else b.get("max", cfg.hi)
    bound = DomainBound.make(lo=lo, hi=hi, ranges=ranges, step_budget=cfg.budget,
                             pc=b.get("pc", cfg.pc), pc_domain=b.get("pc_domain") or None)
    tree = from_json(doc["proof"] if "proof" in doc else doc)
    if args.expand:
        tree = expand_derived(tree)
    v = check_proof(tree, bound, strict=args.strict)
    print(f"{tree.size()} nodes", file=out)
    if v.status != VALID:
        for cex in v.counterexamples:
            what = cex.get("error") or f"{cex['status']} {cex['obligation']}"
            print(f"  {cex['path']} {cex['rule']}: {what}", file=out)
    return _print_verdict(v, out)


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--min", type=int, default=None)
    common.add_argument("--max", type=int, default=None)
    common.add_argument("--range", type=_range_arg, action="append", metavar="X=LO:HI",
                        help="per-variable range, overriding --min/--max and spec bounds")
    common.add_argument("--budget", type=int, default=100_000)
    common.add_argument("--pc", default="pc")

    p = argparse.ArgumentParser(prog="rhlkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, files=1, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.add_argument("file")
        if files == 2:
            sp.add_argument("file2")
        sp.set_defaults(fn=fn)
        return sp

    add("parse", cmd_parse, help="parse and pretty-print a program")
    sp = add("run", cmd_run, help="all outcomes from an initial store")
    sp.add_argument("--store", type=_store_arg, default={})
    sp = add("aut", cmd_aut, help="program automaton")
    sp.add_argument("--fin", type=int, required=True)
    sp.add_argument("--dump-edges", action="store_true")
    sp = add("normalize", cmd_normalize, help="single-loop normal form")
    sp.add_argument("--fin", type=int, required=True)
    sp.add_argument("--verify", action="store_true")
    sp = add("check-equiv", cmd_check_equiv, files=2, help="bounded equivalence of two programs")
    sp.add_argument("--vars", default="")
    sp.add_argument("--kat-dump", action="store_true")
    sp = add("vcgen", cmd_vcgen, help="unary verification conditions")
    sp.add_argument("--fin", type=int)
    sp.add_argument("--spec", required=True)
    sp.add_argument("--discharge", action="store_true")
    sp = add("rvcgen", cmd_rvcgen, files=2, help="relational verification conditions")
    sp.add_argument("--fin", type=int)
    sp.add_argument("--fin2", type=int)
    sp.add_argument("--spec", required=True)
    sp.add_argument("--discharge", action="store_true")
    sp.add_argument("--encoded", action="store_true", help="pc-encoded form used by the proof synthesis")
    sp = add("check", cmd_check, help="bounded check of a unary spec (one file) or relational spec (two)")
    sp.add_argument("file2", nargs="?")
    sp.add_argument("--spec", required=True)
    sp = add("adequacy", cmd_adequacy, files=2, help="alignment adequacy of L/R/J for the precondition")
    sp.add_argument("--fin", type=int)
    sp.add_argument("--fin2", type=int)
    sp.add_argument("--spec", required=True)
    sp.add_argument("--full", action="store_true", help="also compare product and unary outcomes")
    sp = add("prove-unary", cmd_prove_unary, help="synthesize a unary proof from an annotation")
    sp.add_argument("--fin", type=int)
    sp.add_argument("--spec", required=True)
    sp.add_argument("-o", "--output")
    sp = add("prove-rel", cmd_prove_rel, files=2, help="synthesize a relational proof from an alignment")
    sp.add_argument("--fin", type=int)
    sp.add_argument("--fin2", type=int)
    sp.add_argument("--spec", required=True)
    sp.add_argument("-o", "--output")
    sp = add("check-proof", cmd_check_proof, help="check a serialized proof tree")
    sp.add_argument("--strict", action="store_true", help="shape checks instead of semantic equivalence")
    sp.add_argument("--expand", action="store_true", help="expand derived rules first")
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    p = build_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    args.min_given, args.max_given = args.min is not None, args.max is not None
    args.min = -4 if args.min is None else args.min
    args.max = 8 if args.max is None else args.max
    try:
        cfg = _config(args)
        if args.fn is cmd_check_proof:
            cfg.paths = []
        return args.fn(args, cfg, out)
    except (UsageError, GclSyntaxError, LabelError, SpecFileError, PreconditionError, PcNotFresh,
            OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded:
        print("reachability budget exceeded", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
