"""Labeled guarded-command programs.

AST node types, a parser for the ASCII surface syntax, a printer, and the
structural functions over labels (lab, labs, ok, sub, fsuc, enab, erase, ghost).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

INT_OPS = ("+", "-", "*", "mod")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
KEYWORDS = {"skip", "if", "fi", "do", "od", "true", "false", "mod"}


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: object


TRUE = BoolLit(True)
FALSE = BoolLit(False)
INT_NODES = (Lit, Var, BinOp)
BOOL_NODES = (BoolLit, Cmp, And, Or, Not)


# ------------------------------------------------------------------- commands

@dataclass(frozen=True)
class Skip:
    label: int


@dataclass(frozen=True)
class Assign:
    label: int
    var: str
    rhs: object


@dataclass(frozen=True)
class Seq:
    first: object
    second: object


@dataclass(frozen=True)
class GC:
    guard: object
    body: object


@dataclass(frozen=True)
class If:
    label: int
    gcs: tuple


@dataclass(frozen=True)
class Do:
    label: int
    gcs: tuple


COMMAND_NODES = (Skip, Assign, Seq, If, Do)


def seq(*cmds):
    """Right-nested sequence of one or more commands."""
    if not cmds:
        raise ValueError("seq of nothing")
    out = cmds[-1]
    for c in reversed(cmds[:-1]):
        out = Seq(c, out)
    return out


def conj(*args):
    """Conjunction without flattening; a single argument is returned as is."""
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*args):
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


# --------------------------------------------------------------------- errors

class GclSyntaxError(ValueError):
    def __init__(self, msg, pos=None, expected=None):
        self.pos = pos
        self.expected = expected
        where = f" at offset {pos}" if pos is not None else ""
        exp = f" (expected {expected})" if expected else ""
        super().__init__(f"{msg}{where}{exp}")


class LabelError(ValueError):
    pass


# ------------------------------------------------------------------ tokenizer

_TOKEN_RE = re.compile(r"""
   (?P<ws>\s+|\#[^\n]*)
  |(?P<num>\d+)
  |(?P<id>[A-Za-z_][A-Za-z_0-9]*)
  |(?P<op>:=|->|\[\]|<=|>=|!=|&&|\|\||[@;()<>=!+\-*\[\],|{}?])
""", re.X)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text):
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise GclSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Token(kind, m.group(), i))
        i = m.end()
    toks.append(Token("eof", "", len(text)))
    return toks


# --------------------------------------------------------------------- parser

class Parser:
    """Recursive-descent parser for commands and boolean/integer expressions.

    Subclasses extend `atom_hook` and `postfix` to parse assertion formulas.
    """

    def __init__(self, text):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text, k=0):
        t = self.peek(k)
        return t.kind in ("op", "id") and t.text == text

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.peek()
        if not self.at(text):
            raise GclSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, repr(text))
        return self.advance()

    def ident(self):
        t = self.peek()
        if t.kind != "id" or t.text in KEYWORDS:
            raise GclSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, "identifier")
        return self.advance().text

    def number(self):
        t = self.peek()
        if t.kind != "num":
            raise GclSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, "number")
        return int(self.advance().text)

    def done(self):
        t = self.peek()
        if t.kind != "eof":
            raise GclSyntaxError(f"trailing input {t.text!r}", t.pos, "end of input")

    # commands; labels are None when omitted
    def label_suffix(self):
        if self.at("@"):
            self.advance()
            neg = False
            if self.at("-"):
                self.advance()
                neg = True
            n = self.number()
            return -n if neg else n
        return None

    def command(self):
        first = self.atom_command()
        if self.at(";"):
            self.advance()
            return Seq(first, self.command())
        return first

    def atom_command(self):
        t = self.peek()
        if self.at("skip"):
            self.advance()
            return Skip(self.label_suffix())
        if self.at("if") or self.at("do"):
            self.advance()
            lab = self.label_suffix()
            gcs = self.guarded_list()
            if t.text == "if":
                self.expect("fi")
                return If(lab, gcs)
            self.expect("od")
            return Do(lab, gcs)
        if self.at("("):
            self.advance()
            c = self.command()
            self.expect(")")
            return c
        if t.kind == "id" and t.text not in KEYWORDS:
            x = self.ident()
            lab = self.label_suffix()
            self.expect(":=")
            return Assign(lab, x, self.int_expr())
        raise GclSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, "command")

    def guarded_list(self):
        gcs = [self.guarded()]
        while self.at("[]"):
            self.advance()
            gcs.append(self.guarded())
        return tuple(gcs)

    def guarded(self):
        g = self.bool_expr()
        self.expect("->")
        return GC(g, self.command())

    # boolean expressions
    def bool_expr(self):
        args = [self.bool_and()]
        while self.at("||"):
            self.advance()
            args.append(self.bool_and())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def bool_and(self):
        args = [self.bool_not()]
        while self.at("&&"):
            self.advance()
            args.append(self.bool_not())
        return args[0] if len(args) == 1 else And(tuple(args))

    def bool_not(self):
        if self.at("!"):
            self.advance()
            return Not(self.bool_not())
        return self.postfix(self.bool_atom())

    def postfix(self, f):
        return f

    def atom_hook(self):
        return None

    def bool_atom(self):
        hooked = self.atom_hook()
        if hooked is not None:
            return hooked
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("false"):
            self.advance()
            return FALSE
        save = self.i
        try:
            return self.comparison()
        except GclSyntaxError as first_err:
            if not self.toks[save].text == "(":
                raise
            self.i = save
            try:
                self.expect("(")
                f = self.bool_expr()
                self.expect(")")
                return f
            except GclSyntaxError:
                self.i = save
                raise first_err

    def comparison(self):
        left = self.int_expr()
        t = self.peek()
        if t.kind == "op" and t.text in CMP_OPS:
            self.advance()
            return Cmp(t.text, left, self.int_expr())
        raise GclSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, "comparison operator")

    # integer expressions
    def int_expr(self):
        e = self.int_term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            e = BinOp(op, e, self.int_term())
        return e

    def int_term(self):
        e = self.int_unary()
        while self.at("*") or self.at("mod"):
            op = self.advance().text
            e = BinOp(op, e, self.int_unary())
        return e

    def int_unary(self):
        if self.at("-"):
            self.advance()
            if self.peek().kind == "num":
                return Lit(-self.number())
            return BinOp("-", Lit(0), self.int_unary())
        t = self.peek()
        if t.kind == "num":
            return Lit(self.number())
        if self.at("("):
            self.advance()
            e = self.int_expr()
            self.expect(")")
            return e
        return Var(self.ident())


# ------------------------------------------------------------------ labelling

def _explicit_labels(c, acc):
    if isinstance(c, Seq):
        _explicit_labels(c.first, acc)
        _explicit_labels(c.second, acc)
        return acc
    if c.label is not None:
        acc.append(c.label)
    if isinstance(c, (If, Do)):
        for gc in c.gcs:
            _explicit_labels(gc.body, acc)
    return acc


def _assign_labels(c, used, counter):
    def fresh():
        while counter[0] in used:
            counter[0] += 1
        n = counter[0]
        used.add(n)
        return n

    if isinstance(c, Seq):
        first = _assign_labels(c.first, used, counter)
        return Seq(first, _assign_labels(c.second, used, counter))
    lab = c.label if c.label is not None else fresh()
    if isinstance(c, Skip):
        return Skip(lab)
    if isinstance(c, Assign):
        return Assign(lab, c.var, c.rhs)
    gcs = tuple(GC(gc.guard, _assign_labels(gc.body, used, counter)) for gc in c.gcs)
    return type(c)(lab, gcs)


def parse_program(text, strict=True):
    """Parse surface syntax into a Command.

    Unlabeled nodes get the smallest unused positive label in preorder.  With
    strict=False, explicit labels may be zero or repeated (proof documents
    print normal-form commands that carry label 0).
    """
    p = Parser(text)
    raw = p.command()
    p.done()
    explicit = _explicit_labels(raw, [])
    if strict:
        for n in explicit:
            if n <= 0:
                raise LabelError(f"non-positive label {n}")
        dup = sorted({n for n in explicit if explicit.count(n) > 1})
        if dup:
            raise LabelError(f"duplicate label(s) {dup}")
    return _assign_labels(raw, set(explicit), [1])


def parse_bool(text):
    p = Parser(text)
    e = p.bool_expr()
    p.done()
    return e


def parse_int(text):
    p = Parser(text)
    e = p.int_expr()
    p.done()
    return e


# -------------------------------------------------------------------- printer

_PREC = {"+": 1, "-": 1, "*": 2, "mod": 2}


def show_int(e):
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = show_int(e.left)
        if isinstance(e.left, BinOp) and _PREC[e.left.op] < p:
            left = f"({left})"
        right = show_int(e.right)
        if isinstance(e.right, BinOp) and _PREC[e.right.op] <= p:
            right = f"({right})"
        elif isinstance(e.right, Lit) and e.right.value < 0 and e.op == "-":
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an integer expression: {e!r}")


def show_bool(e, atom=None):
    """Render a boolean expression; `atom` renders extra node kinds."""
    def go(f):
        if isinstance(f, BoolLit):
            return "true" if f.value else "false"
        if isinstance(f, Cmp):
            return f"{show_int(f.left)} {f.op} {show_int(f.right)}"
        if isinstance(f, Not):
            inner = go(f.arg)
            if isinstance(f.arg, (And, Or)):
                inner = f"({inner})"
            return f"!{inner}"
        if isinstance(f, And):
            return " && ".join(f"({go(a)})" if isinstance(a, (And, Or)) else go(a) for a in f.args)
        if isinstance(f, Or):
            return " || ".join(f"({go(a)})" if isinstance(a, Or) else go(a) for a in f.args)
        if atom is not None:
            return atom(f, go)
        raise TypeError(f"not a boolean expression: {f!r}")
    return go(e)


def show_command(c, labels=True, indent=None):
    """Render a command.  labels=False omits every label (for display only)."""
    def suffix(n):
        return f"@{n}" if labels and n is not None else ""

    def go(c):
        if isinstance(c, Skip):
            return f"skip{suffix(c.label)}"
        if isinstance(c, Assign):
            return f"{c.var}{suffix(c.label)} := {show_int(c.rhs)}"
        if isinstance(c, Seq):
            first = go(c.first)
            if isinstance(c.first, Seq):
                first = f"({first})"
            return f"{first}; {go(c.second)}"
        kw, end = ("if", "fi") if isinstance(c, If) else ("do", "od")
        arms = " [] ".join(f"{show_bool(gc.guard)} -> {go(gc.body)}" for gc in c.gcs)
        return f"{kw}{suffix(c.label)} {arms} {end}"
    return go(c)


# --------------------------------------------------------- structural functions

def lab(c):
    while isinstance(c, Seq):
        c = c.first
    return c.label


def label_list(c):
    """Labels of c in preorder, with repetitions."""
    out = []

    def go(c):
        if isinstance(c, Seq):
            go(c.first)
            go(c.second)
            return
        out.append(c.label)
        if isinstance(c, (If, Do)):
            for gc in c.gcs:
                go(gc.body)
    go(c)
    return out


def labs(c):
    return frozenset(label_list(c))


def ok(c):
    ls = label_list(c)
    return all(n > 0 for n in ls) and len(set(ls)) == len(ls)


def okf(c, f):
    return ok(c) and f not in labs(c)


def sub(n, c):
    if isinstance(c, Seq):
        if n in labs(c.first):
            return sub(n, c.first)
        return sub(n, c.second)
    if c.label == n:
        return c
    if isinstance(c, (If, Do)):
        for gc in c.gcs:
            if n in labs(gc.body):
                return sub(n, gc.body)
    raise LabelError(f"label {n} not found")


def fsuc(n, c, f):
    """Following successor of the subcommand at n, continuing to f."""
    if isinstance(c, Seq):
        if n in labs(c.first):
            return fsuc(n, c.first, lab(c.second))
        return fsuc(n, c.second, f)
    if c.label == n:
        return f
    if isinstance(c, (If, Do)):
        for gc in c.gcs:
            if n in labs(gc.body):
                return fsuc(n, gc.body, f if isinstance(c, If) else c.label)
    raise LabelError(f"label {n} not found")


def enab(gcs):
    return disj(*(gc.guard for gc in gcs))


def erase(x, c):
    if isinstance(c, Assign):
        return Skip(c.label) if c.var == x else c
    if isinstance(c, Seq):
        return Seq(erase(x, c.first), erase(x, c.second))
    if isinstance(c, (If, Do)):
        return type(c)(c.label, tuple(GC(gc.guard, erase(x, gc.body)) for gc in c.gcs))
    return c


def expr_vars(e):
    """Variables read by an integer or boolean expression."""
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, (Lit, BoolLit)):
        return frozenset()
    if isinstance(e, (BinOp, Cmp)):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, Not):
        return expr_vars(e.arg)
    if isinstance(e, (And, Or)):
        out = frozenset()
        for a in e.args:
            out |= expr_vars(a)
        return out
    raise TypeError(f"not an expression: {e!r}")


def cmd_vars(c):
    if isinstance(c, Skip):
        return frozenset()
    if isinstance(c, Assign):
        return frozenset([c.var]) | expr_vars(c.rhs)
    if isinstance(c, Seq):
        return cmd_vars(c.first) | cmd_vars(c.second)
    out = frozenset()
    for gc in c.gcs:
        out |= expr_vars(gc.guard) | cmd_vars(gc.body)
    return out


def ghost(x, c):
    """x is read only by assignments to x itself (so it cannot affect anything else)."""
    if isinstance(c, Skip):
        return True
    if isinstance(c, Assign):
        return c.var == x or x not in expr_vars(c.rhs)
    if isinstance(c, Seq):
        return ghost(x, c.first) and ghost(x, c.second)
    return all(x not in expr_vars(gc.guard) and ghost(x, gc.body) for gc in c.gcs)


def subcommands(c):
    """All non-Seq subcommands in preorder."""
    out = []

    def go(c):
        if isinstance(c, Seq):
            go(c.first)
            go(c.second)
            return
        out.append(c)
        if isinstance(c, (If, Do)):
            for gc in c.gcs:
                go(gc.body)
    go(c)
    return out


def relabel_zero(c):
    """Set every label to 0 (used for auxiliary commands built in proofs)."""
    if isinstance(c, Skip):
        return Skip(0)
    if isinstance(c, Assign):
        return Assign(0, c.var, c.rhs)
    if isinstance(c, Seq):
        return Seq(relabel_zero(c.first), relabel_zero(c.second))
    return type(c)(0, tuple(GC(gc.guard, relabel_zero(gc.body)) for gc in c.gcs))


# ----------------------------------------------------------- well-formedness

def complement(e):
    """Syntactic complement: strips or adds a negation; flips = and !=."""
    if isinstance(e, Not):
        return e.arg
    return Not(e)


def _is_complement(a, b):
    if complement(a) == b or complement(b) == a:
        return True
    flip = {"=": "!=", "!=": "="}
    return (isinstance(a, Cmp) and isinstance(b, Cmp) and a.op in flip
            and b.op == flip[a.op] and a.left == b.left and a.right == b.right)


def syntactically_total(gcs):
    guards = [gc.guard for gc in gcs]
    if any(g == TRUE for g in guards):
        return True
    return all(any(_is_complement(g, h) for h in guards) for g in guards)


@dataclass
class IfCheck:
    label: int
    status: str          # PASS-SYNTACTIC | PASS-BOUNDED | FAIL
    counterexample: dict | None = None


@dataclass
class WellFormednessReport:
    type_errors: list = field(default_factory=list)
    ok: bool = True
    if_checks: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.type_errors and self.ok and all(ch.status != "FAIL" for ch in self.if_checks)


def _type_errors(c):
    errs = []

    def int_ok(e, where):
        if isinstance(e, (Lit, Var)):
            return
        if isinstance(e, BinOp) and e.op in INT_OPS:
            int_ok(e.left, where)
            int_ok(e.right, where)
            return
        errs.append(f"{where}: not an integer expression: {e!r}")

    def bool_ok(e, where):
        if isinstance(e, BoolLit):
            return
        if isinstance(e, Cmp) and e.op in CMP_OPS:
            int_ok(e.left, where)
            int_ok(e.right, where)
            return
        if isinstance(e, Not):
            bool_ok(e.arg, where)
            return
        if isinstance(e, (And, Or)) and e.args:
            for a in e.args:
                bool_ok(a, where)
            return
        errs.append(f"{where}: not a boolean expression: {e!r}")

    for s in subcommands(c):
        if isinstance(s, Assign):
            int_ok(s.rhs, f"label {s.label}")
        elif isinstance(s, (If, Do)):
            if not s.gcs:
                errs.append(f"label {s.label}: empty guarded list")
            for gc in s.gcs:
                bool_ok(gc.guard, f"label {s.label}")
    return errs


def well_formed(c, bound):
    from .semantics import eval_bool  # semantics depends on this module

    rep = WellFormednessReport(type_errors=_type_errors(c), ok=ok(c))
    for s in subcommands(c):
        if not isinstance(s, If):
            continue
        if syntactically_total(s.gcs):
            rep.if_checks.append(IfCheck(s.label, "PASS-SYNTACTIC"))
            continue
        g = enab(s.gcs)
        cex = None
        for store in bound.stores(sorted(expr_vars(g))):
            if not eval_bool(g, store):
                cex = store
                break
        rep.if_checks.append(IfCheck(s.label, "FAIL" if cex is not None else "PASS-BOUNDED", cex))
    return rep
