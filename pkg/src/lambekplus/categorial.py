"""Categorial grammars with unique type assignment, compiled from CFGs.

Every context-free language (without the empty word) is generated by a
categorial grammar assigning exactly one type per letter.  The compiler
works on the three-shape normal form: each nonterminal N_i gets the type
H_i = p/((p_i/p_i)*p); each rule with terminal a_j contributes a type
K = r/((H_k * H_l * (p_i/p_i)) \\ r) (shorter denominators for shorter
rules) to the set U_j; the letter's type is A_j = p/(D_j * p) where D_j
is a single-type stand-in for the disjunction of U_j.

The stand-in is ``iso``: with fresh primitives u, t, s, E interleaves the
members with t/t separators and

    is(U) = ((s/E) * B) \\ s / C,
    B = E * (((u/F)\\u)\\(t/t)),   C = ((t/t)/(u/(G\\u))) * E,

where F and G are verified joins of the suffix and prefix subproducts of
E.  Membership of each U-member in the stand-in is machine-checked at
construction time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .formula import (
    Formula, LDiv, Prod, RDiv, Sequent, Var, fgi, parse_formula, plus_free,
    or_free, prod_of, primitives, render_formula, render_sequent,
)
from .prover import ProveResult, derivable, prove
from .grammar import CFG, GNFGrammar, GrammarError, to_gnf
from .conjoin import JoinError, prefix_family_join, suffix_family_join

__all__ = ["CatGrammar", "iso", "safiullin", "parse_word",
           "grammar_rule_sequents", "catgrammar_to_json", "catgrammar_from_json"]


@dataclass
class CatGrammar:
    assign: dict             # letter -> Formula, exactly one type per letter
    target: Formula

    @property
    def alphabet(self) -> tuple:
        return tuple(sorted(self.assign))


def iso(members, u: str = "u", t: str = "t", s: str = "s") -> Formula:
    """A single type every member of ``members`` derives into.

    Members must be iteration- and disjunction-free zero-balance types not
    containing the fresh primitives u, t, s.
    """
    members = list(members)
    if not members:
        raise ValueError("iso of an empty set")
    used = set()
    for m in members:
        if not (plus_free(m) and or_free(m)):
            raise ValueError(f"member {render_formula(m)} uses + or |")
        if not fgi(m).is_unit():
            raise ValueError(f"member {render_formula(m)} is not zero-balance")
        used |= primitives(m)
    for name in (u, t, s):
        if name in used:
            raise ValueError(f"fresh primitive {name!r} occurs in a member")

    uv, sv = Var(u), Var(s)
    tt = RDiv(Var(t), Var(t))
    e_parts = [tt]
    for m in members:
        e_parts.extend([m, tt])
    e = prod_of(e_parts)
    f = suffix_family_join(members, t)
    g = prefix_family_join(members, t)
    b = Prod(e, LDiv(LDiv(RDiv(uv, f), uv), tt))
    c = Prod(RDiv(tt, RDiv(uv, LDiv(g, uv))), e)
    out = RDiv(LDiv(Prod(RDiv(sv, e), b), sv), c)
    for m in members:
        if not derivable(Sequent((m,), out)):
            raise JoinError(
                f"stand-in verification failed: {render_formula(m)} does not "
                "derive the constructed type")
    return out


def _gnf_indexing(gnf: GNFGrammar):
    nts = sorted(gnf.nonterminals, key=lambda n: (n != gnf.start, n))
    return {n: i for i, n in enumerate(nts)}


def _h_type(i: int) -> Formula:
    p = Var("p")
    unit = RDiv(Var(f"p{i}"), Var(f"p{i}"))
    return RDiv(p, Prod(unit, p))


def _k_type(i: int, tail) -> Formula:
    r = Var("r")
    parts = [_h_type(k) for k in tail] + [RDiv(Var(f"p{i}"), Var(f"p{i}"))]
    return RDiv(r, LDiv(prod_of(parts), r))


def safiullin(g: CFG, progress=None) -> CatGrammar:
    """Compile an epsilon-free CFG into a unique-assignment grammar.

    The resulting grammar parses a word exactly when the grammar generates
    it; the per-rule sequents from ``grammar_rule_sequents`` are verified
    with the prover as the construction runs.
    """
    gnf = to_gnf(g)
    index = _gnf_indexing(gnf)
    letters = sorted(gnf.terminals)

    groups = {a: [] for a in letters}
    for lhs, rhs in gnf.rules:
        a = rhs[0]
        tail = tuple(index[x] for x in rhs[1:])
        groups[a].append((index[lhs], tail))

    assign = {}
    dead = 0
    for a in letters:
        rules = groups[a]
        if not rules:
            assign[a] = RDiv(Var("p"), Prod(Var(f"dead{dead}"), Var("p")))
            dead += 1
            continue
        members = [_k_type(i, tail) for (i, tail) in rules]
        d = iso(members)
        assign[a] = RDiv(Var("p"), Prod(d, Var("p")))
        if progress:
            progress(f"letter {a}: {len(members)} rule types")

    cg = CatGrammar(assign, _h_type(0))
    for seq in grammar_rule_sequents(gnf, cg):
        if not derivable(seq):
            raise GrammarError(f"rule sequent failed verification: "
                               f"{render_sequent(seq)}")
    return cg


def grammar_rule_sequents(gnf: GNFGrammar, cg: CatGrammar) -> list:
    """The per-rule audit sequents A_j, H_k, H_l -> H_i."""
    index = _gnf_indexing(gnf)
    out = []
    for lhs, rhs in gnf.rules:
        ant = [cg.assign[rhs[0]]] + [_h_type(index[x]) for x in rhs[1:]]
        out.append(Sequent(tuple(ant), _h_type(index[lhs])))
    return out


def parse_word(cg: CatGrammar, w, budget: Optional[int] = None) -> str:
    """Membership via derivability: returns "in", "out" or "unknown"."""
    w = tuple(w)
    if len(w) == 0:
        raise ValueError("the empty word is never in the language")
    bad = [c for c in w if c not in cg.assign]
    if bad:
        raise ValueError(f"letters {sorted(set(bad))} are not in the alphabet")
    seq = Sequent(tuple(cg.assign[c] for c in w), cg.target)
    result = prove(seq, budget)
    return {"derivable": "in", "underivable": "out", "unknown": "unknown"}[result.status]


# ---------------------------------------------------------------------------
# files: {"assign": {"a": "<formula>"}, "target": "<formula>"}

def catgrammar_to_json(cg: CatGrammar) -> dict:
    return {"assign": {a: render_formula(f) for a, f in sorted(cg.assign.items())},
            "target": render_formula(cg.target)}


def catgrammar_from_json(doc) -> CatGrammar:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        assign = {a: parse_formula(txt) for a, txt in doc["assign"].items()}
        return CatGrammar(assign, parse_formula(doc["target"]))
    except (KeyError, TypeError) as exc:
        raise GrammarError(f"malformed grammar document: {exc}") from exc
