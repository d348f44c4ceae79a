"""Seeded random programs for property tests and batch runs.

Conditionals are total (a guard plus its complement, or a guard and true) and
loops count a variable down, so every generated program terminates.
"""
from __future__ import annotations

import random

from .gcl_syntax import (
    GC, TRUE, Assign, BinOp, Cmp, Do, If, Lit, Not, Skip, Var, labs, parse_program, seq,
    show_command,
)

VARS = ("x", "y", "z")


def _int(rng, vars, depth=1):
    r = rng.random()
    if depth == 0 or r < 0.4:
        return Var(rng.choice(vars)) if rng.random() < 0.7 else Lit(rng.randint(-2, 2))
    op = rng.choice(["+", "-", "+", "-", "*", "mod"])
    if op == "mod":
        return BinOp("mod", _int(rng, vars, depth - 1), Lit(rng.choice([2, 3])))
    return BinOp(op, _int(rng, vars, depth - 1), _int(rng, vars, 0))


def _cond(rng, vars):
    return Cmp(rng.choice(["=", "!=", "<", "<=", ">", ">="]), _int(rng, vars), Lit(rng.randint(-2, 2)))


def _cmd(rng, vars, depth, frozen):
    writable = [v for v in vars if v not in frozen]
    r = rng.random()
    if depth == 0 or r < 0.35 or not writable:
        if rng.random() < 0.15 or not writable:
            return Skip(None)
        return Assign(None, rng.choice(writable), _int(rng, vars))
    if r < 0.6:
        n = rng.randint(2, 3)
        return seq(*(_cmd(rng, vars, depth - 1, frozen) for _ in range(n)))
    if r < 0.8:
        g = _cond(rng, vars)
        other = Not(g) if rng.random() < 0.7 else TRUE
        return If(None, (GC(g, _cmd(rng, vars, depth - 1, frozen)), GC(other, _cmd(rng, vars, depth - 1, frozen))))
    v = rng.choice(writable)
    body = _cmd(rng, vars, depth - 1, frozen | {v})
    step = Assign(None, v, BinOp("-", Var(v), Lit(1)))
    return Do(None, (GC(Cmp(">", Var(v), Lit(rng.randint(-2, 1))), seq(body, step)),))


def random_program(rng, depth=3, vars=VARS):
    """A labelled program of nesting depth at most `depth` and its fresh final label."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    raw = _cmd(rng, tuple(vars), depth, frozenset())
    c = parse_program(show_command(raw, labels=False))
    return c, max(labs(c)) + 1


def random_programs(count, seed=0, depth=3, vars=VARS):
    rng = random.Random(seed)
    return [random_program(rng, depth, vars) for _ in range(count)]
