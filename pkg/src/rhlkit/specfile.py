"""INI-style spec files: pre/post, variable ranges, annotations and alignment specs.

    [spec]
    pre = eq(y, y)
    post = eq(x, x)
    fin = 6            ; optional final labels (fin2 for the right program)
    [bounds]
    x = -2..6
    [annotation]
    1,1 = eq(y, y)     ; a single label for unary specs
    [align.J]
    (1,1) = true       ; patterns may use * as a wildcard
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .assertions import Annotation, Clause, StateRelSpec, FALSE_SPEC, parse_formula, parse_pattern
from .gcl_syntax import TRUE


class SpecFileError(ValueError):
    pass


@dataclass
class SpecFile:
    pre: object = TRUE
    post: object = TRUE
    relational: bool = False
    fin: int | None = None
    fin2: int | None = None
    ranges: dict = field(default_factory=dict)
    annotation: Annotation | None = None
    L: StateRelSpec = FALSE_SPEC
    R: StateRelSpec = FALSE_SPEC
    J: StateRelSpec = FALSE_SPEC

    @property
    def has_alignment(self):
        return any(s.clauses for s in (self.L, self.R, self.J))


def _range(text):
    try:
        lo, hi = (int(t) for t in text.split(".."))
    except ValueError:
        raise SpecFileError(f"bad range {text!r}; expected lo..hi") from None
    return lo, hi


def parse_spec(text, relational=None):
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=(";",), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise SpecFileError(str(e)) from None
    unknown = set(cp.sections()) - {"spec", "bounds", "annotation", "align.L", "align.R", "align.J"}
    if unknown:
        raise SpecFileError(f"unknown sections: {sorted(unknown)}")
    sp = cp["spec"] if cp.has_section("spec") else {}
    pre_text, post_text = sp.get("pre", "true"), sp.get("post", "true")
    if relational is None:
        relational = any(cp.has_section(s) for s in ("align.L", "align.R", "align.J"))
        if not relational:
            probe = parse_formula(pre_text), parse_formula(post_text)
            from .assertions import is_relational
            relational = any(is_relational(f) for f in probe)
    out = SpecFile(relational=relational)
    out.pre = parse_formula(pre_text, relational)
    out.post = parse_formula(post_text, relational)
    if "fin" in sp:
        out.fin = int(sp["fin"])
    if "fin2" in sp:
        out.fin2 = int(sp["fin2"])
    if cp.has_section("bounds"):
        out.ranges = {k: _range(v) for k, v in cp["bounds"].items()}
    if cp.has_section("annotation"):
        entries = {}
        for k, v in cp["annotation"].items():
            parts = [int(t) for t in k.replace(" ", "").split(",")]
            if len(parts) != (2 if relational else 1):
                raise SpecFileError(f"bad annotation key {k!r}")
            entries[tuple(parts) if relational else parts[0]] = parse_formula(v, relational)
        out.annotation = Annotation(entries, relational)
    for name in "LRJ":
        sec = f"align.{name}"
        if cp.has_section(sec):
            clauses = [Clause(*parse_pattern(k), parse_formula(v, True)) for k, v in cp[sec].items()]
            setattr(out, name, StateRelSpec(tuple(clauses)))
    return out


def load_spec(path, relational=None):
    with open(path) as fh:
        return parse_spec(fh.read(), relational)
