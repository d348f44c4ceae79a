"""Guarded-command programs, alignment automata and relational Hoare proofs."""
from .gcl_syntax import (
    GC, Assign, Do, If, Seq, Skip, fsuc, lab, labs, okf, parse_bool, parse_int, parse_program,
    show_command, sub,
)
from .semantics import VALID, COUNTEREXAMPLE, INCONCLUSIVE, DomainBound, Verdict, check_rel, check_unary, denote_bigstep, run
from .assertions import Annotation, Clause, StateRelSpec, entails, not_at, parse_formula, show_formula
from .automata import (
    build_aut, build_product, check_adequacy, check_manifest_adequacy, reachable, restrict_live,
    strongest_annotation,
)
from .vcgen import check_condition_c, discharge, edges, encoded_rel_vcs, rel_vcs, unary_vcs
from .kat import equiv_commands, equiv_semantic, mkt, show_kat
from .normalform import add_pc, is_norm, normalize, verify_norm_equiv
from .proof import (
    MALFORMED, HypothesisFailure, audit_provenance, check_proof, expand_derived, from_json,
    provenance, synthesize_relational, synthesize_unary, to_json,
)
from .specfile import SpecFile, load_spec, parse_spec
