"""Seeded single-point mutations of proof trees, for exercising the checker."""
from __future__ import annotations

import random
from dataclasses import replace

from .gcl_syntax import FALSE, TRUE, Not, conj
from .proof import Entailment, Malformed, required_obligations

KINDS = ("obligation-rhs", "obligation-drop", "obligation-swap", "premise-drop", "premise-swap",
         "premise-foreign", "conclusion-pre", "conclusion-post")


def _replace_at(tree, path, new):
    if path == ["root"]:
        return new
    idx = int(path[1])
    prem = list(tree.premises)
    prem[idx] = _replace_at(tree.premises[idx], ["root"] + path[2:], new)
    return replace(tree, premises=tuple(prem))


def _weaken(f):
    return FALSE if f != FALSE else TRUE


def _mutate_node(n, kind, rng, nodes):
    if kind == "obligation-rhs":
        ents = [i for i, o in enumerate(n.obligations) if isinstance(o, Entailment)]
        if not ents:
            return None
        i = rng.choice(ents)
        obs = list(n.obligations)
        # FALSE on the right makes the entailment fail unless its left side is unsatisfiable
        obs[i] = Entailment(obs[i].lhs, conj(obs[i].rhs, Not(obs[i].lhs)))
        return replace(n, obligations=tuple(obs))
    if kind == "obligation-drop":
        if not n.obligations:
            return None
        i = rng.randrange(len(n.obligations))
        return replace(n, obligations=n.obligations[:i] + n.obligations[i + 1:])
    if kind == "obligation-swap":
        donors = [m for m in nodes if m.obligations and m.obligations != n.obligations]
        if not n.obligations or not donors:
            return None
        obs = list(n.obligations)
        obs[rng.randrange(len(obs))] = rng.choice(rng.choice(donors).obligations)
        return replace(n, obligations=tuple(obs))
    if kind == "premise-drop":
        if not n.premises:
            return None
        i = rng.randrange(len(n.premises))
        return replace(n, premises=n.premises[:i] + n.premises[i + 1:])
    if kind == "premise-swap":
        if len(n.premises) < 2:
            return None
        i, j = rng.sample(range(len(n.premises)), 2)
        prem = list(n.premises)
        prem[i], prem[j] = prem[j], prem[i]
        return replace(n, premises=tuple(prem))
    if kind == "premise-foreign":
        if not n.premises:
            return None
        i = rng.randrange(len(n.premises))
        prem = list(n.premises)
        prem[i] = rng.choice(nodes)
        return replace(n, premises=tuple(prem))
    # conclusion edits keep the node locally consistent by recomputing its obligations
    j = n.conclusion
    field = "pre" if kind == "conclusion-pre" else "post"
    new_j = replace(j, **{field: TRUE if field == "pre" else _weaken(getattr(j, field))})
    m = replace(n, conclusion=new_j)
    try:
        m.obligations = tuple(required_obligations(m))
    except Malformed:
        pass
    return m


def mutate(tree, rng, kind=None, tries=200):
    """A tree that differs from `tree` at exactly one node, with the kind and path used."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    entries = list(tree.walk())
    nodes = [n for _, n in entries]
    for _ in range(tries):
        k = kind or rng.choice(KINDS)
        path, n = rng.choice(entries)
        m = _mutate_node(n, k, rng, nodes)
        if m is None or m == n:
            continue
        return _replace_at(tree, path.split("/"), m), k, path
    raise ValueError("no applicable mutation found")
