"""Context-free grammars, Greibach normal form and membership.

Grammars are epsilon-free throughout.  ``to_gnf`` produces the three-shape
normal form (``N => a``, ``N => a K`` or ``N => a K L``); ``cfg_member`` is
the exact dynamic-programming oracle over those shapes, and
``baseline_member`` is an independent recogniser for arbitrary
epsilon-free grammars used to cross-check the conversion.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

__all__ = ["CFG", "GNFGrammar", "GrammarError", "to_gnf", "cfg_member",
           "baseline_member", "cfg_to_json", "cfg_from_json", "words_over"]


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class CFG:
    start: str
    rules: tuple   # of (lhs, rhs) with rhs a non-empty tuple of symbols

    def __post_init__(self):
        object.__setattr__(self, "rules",
                           tuple((l, tuple(r)) for l, r in self.rules))
        for lhs, rhs in self.rules:
            if len(rhs) == 0:
                raise GrammarError(f"epsilon rule for {lhs!r} not allowed")
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} has no rules")

    @property
    def nonterminals(self) -> frozenset:
        return frozenset(l for l, _ in self.rules)

    @property
    def terminals(self) -> frozenset:
        nts = self.nonterminals
        return frozenset(s for _, rhs in self.rules for s in rhs if s not in nts)


@dataclass(frozen=True)
class GNFGrammar(CFG):
    def __post_init__(self):
        super().__post_init__()
        nts = self.nonterminals
        for lhs, rhs in self.rules:
            if rhs[0] in nts or len(rhs) > 3 \
                    or any(s not in nts for s in rhs[1:]):
                raise GrammarError(
                    f"rule {lhs} => {' '.join(rhs)} is not in the three-shape "
                    "normal form")


# ---------------------------------------------------------------------------
# conversion

def _fresh(base: str, used: set) -> str:
    if base not in used:
        used.add(base)
        return base
    k = 0
    while f"{base}_{k}" in used:
        k += 1
    used.add(f"{base}_{k}")
    return f"{base}_{k}"


def _remove_useless(start, rules):
    productive = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs not in productive and all(
                    s in productive or all(s != l for l, _ in rules) for s in rhs):
                productive.add(lhs)
                changed = True
    rules = [(l, r) for l, r in rules
             if l in productive and all(s in productive or not _is_nt(s, rules) for s in r)]
    if start not in productive:
        raise GrammarError("the grammar generates the empty language")
    reachable = {start}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs in reachable:
                for s in rhs:
                    if s not in reachable and _is_nt(s, rules):
                        reachable.add(s)
                        changed = True
    return [(l, r) for l, r in rules if l in reachable]


def _is_nt(sym, rules) -> bool:
    return any(sym == l for l, _ in rules)


def _remove_units(rules):
    nts = {l for l, _ in rules}
    pairs = {(l, l) for l in nts}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if len(rhs) == 1 and rhs[0] in nts:
                for (a, b) in list(pairs):
                    if b == lhs and (a, rhs[0]) not in pairs:
                        pairs.add((a, rhs[0]))
                        changed = True
    out = []
    for (a, b) in pairs:
        for lhs, rhs in rules:
            if lhs == b and not (len(rhs) == 1 and rhs[0] in nts):
                if (a, rhs) not in out:
                    out.append((a, rhs))
    return out


def to_gnf(g: CFG) -> GNFGrammar:
    """Greibach normal form with at most two trailing nonterminals."""
    rules = _remove_units(list(g.rules))
    rules = _remove_useless(g.start, rules)
    nts = sorted({l for l, _ in rules}, key=lambda n: (n != g.start, n))
    used = set(nts)
    terminals = {s for _, rhs in rules for s in rhs if s not in set(nts)}
    used |= terminals

    # binarise to CNF-like shape first: tails of length <= 2 over nonterminals
    lifted = {}
    def lift(t):
        if t not in lifted:
            lifted[t] = _fresh(f"t_{t}", used)
        return lifted[t]

    work = []
    for lhs, rhs in rules:
        if len(rhs) == 1:
            work.append((lhs, rhs))
            continue
        syms = [s if s not in terminals else lift(s) for s in rhs]
        while len(syms) > 2:
            head = _fresh(f"{lhs}_b", used)
            work.append((head, (syms[-2], syms[-1])))
            syms = syms[:-2] + [head]
        work.append((lhs, tuple(syms)))
    for t, n in lifted.items():
        work.append((n, (t,)))

    order = sorted({l for l, _ in work}, key=lambda n: (n != g.start, n))
    index = {n: i for i, n in enumerate(order)}
    by_lhs = {n: [] for n in order}
    for lhs, rhs in work:
        by_lhs[lhs].append(tuple(rhs))

    def is_nt(s):
        return s in by_lhs

    # ascending pass: leading nonterminal indices increase, then kill direct
    # left recursion
    for i, ni in enumerate(order):
        changed = True
        while changed:
            changed = False
            new = []
            for rhs in by_lhs[ni]:
                if is_nt(rhs[0]) and index.get(rhs[0], len(order)) < i:
                    for sub in by_lhs[rhs[0]]:
                        new.append(sub + rhs[1:])
                    changed = True
                else:
                    new.append(rhs)
            by_lhs[ni] = new
        rec = [rhs[1:] for rhs in by_lhs[ni] if rhs[0] == ni]
        if rec:
            z = _fresh(f"{ni}_z", used)
            base = [rhs for rhs in by_lhs[ni] if rhs[0] != ni]
            by_lhs[ni] = base + [rhs + (z,) for rhs in base]
            by_lhs[z] = list(rec) + [rhs + (z,) for rhs in rec]
            order.append(z)
            index[z] = len(order) - 1

    # descending pass: expand leading nonterminals into terminal heads
    for ni in reversed(order):
        changed = True
        while changed:
            changed = False
            new = []
            for rhs in by_lhs[ni]:
                if is_nt(rhs[0]):
                    for sub in by_lhs[rhs[0]]:
                        new.append(sub + rhs[1:])
                    changed = True
                else:
                    new.append(rhs)
            by_lhs[ni] = new

    # replace terminals in tails and shorten tails to length <= 2
    out = []
    queue = list(order)
    seq_names = {}

    def seq_nt(seq) -> str:
        if len(seq) == 1:
            return seq[0]
        if seq not in seq_names:
            seq_names[seq] = _fresh("q_" + "_".join(seq), used)
            queue.append(seq_names[seq])
            by_lhs[seq_names[seq]] = [seq]
        return seq_names[seq]

    guard = 0
    while queue:
        guard += 1
        if guard > 10000:
            raise GrammarError("normal-form conversion did not stabilise")
        ni = queue.pop(0)
        for rhs in by_lhs[ni]:
            if is_nt(rhs[0]):
                # a pending composite: expand its head
                head, rest = rhs[0], rhs[1:]
                for sub in by_lhs[head]:
                    tail = tuple(s if s not in terminals else lift(s)
                                 for s in sub[1:]) + rest
                    if len(tail) > 2:
                        tail = (tail[0], seq_nt(tail[1:]))
                    out.append((ni, (sub[0],) + tail))
                continue
            tail = tuple(s if s not in terminals else lift(s) for s in rhs[1:])
            if len(tail) > 2:
                tail = (tail[0], seq_nt(tail[1:]))
            out.append((ni, (rhs[0],) + tail))
    for t, n in lifted.items():
        if not any(l == n for l, _ in out):
            out.append((n, (t,)))

    dedup = []
    for r in out:
        if r not in dedup:
            dedup.append(r)
    dedup = _remove_useless(g.start, dedup)
    return GNFGrammar(g.start, tuple(dedup))


# ---------------------------------------------------------------------------
# membership

def cfg_member(g: GNFGrammar, w) -> bool:
    """Exact membership for three-shape normal-form grammars."""
    w = tuple(w)
    if len(w) == 0:
        return False
    bad = set(w) - set(g.terminals)
    if bad:
        raise GrammarError(f"symbols {sorted(bad)} are not in the alphabet")
    rules = {}
    for lhs, rhs in g.rules:
        rules.setdefault(lhs, []).append(rhs)

    from functools import lru_cache

    @lru_cache(maxsize=None)
    def derives(nt, lo, hi) -> bool:
        for rhs in rules.get(nt, ()):
            if w[lo] != rhs[0]:
                continue
            if len(rhs) == 1:
                if hi - lo == 1:
                    return True
            elif len(rhs) == 2:
                if hi - lo >= 2 and derives(rhs[1], lo + 1, hi):
                    return True
            else:
                for mid in range(lo + 2, hi):
                    if derives(rhs[1], lo + 1, mid) and derives(rhs[2], mid, hi):
                        return True
        return False

    return derives(g.start, 0, len(w))


def baseline_member(g: CFG, w) -> bool:
    """Independent recogniser for arbitrary epsilon-free grammars."""
    w = tuple(w)
    if len(w) == 0:
        return False
    rules = {}
    for lhs, rhs in g.rules:
        rules.setdefault(lhs, []).append(rhs)
    nts = g.nonterminals

    @lru_cache(maxsize=None)
    def sym_derives(sym, lo, hi) -> bool:
        if sym not in nts:
            return hi - lo == 1 and w[lo] == sym
        return nt_derives(sym, lo, hi)

    seen = set()

    def nt_derives(nt, lo, hi) -> bool:
        key = (nt, lo, hi)
        if key in seen:
            return False          # guard against unit cycles
        seen.add(key)
        try:
            for rhs in rules.get(nt, ()):
                if seq_derives(rhs, lo, hi):
                    return True
            return False
        finally:
            seen.discard(key)

    def seq_derives(seq, lo, hi) -> bool:
        if len(seq) == 1:
            return sym_derives(seq[0], lo, hi)
        head, rest = seq[0], seq[1:]
        for mid in range(lo + 1, hi - len(rest) + 1):
            if sym_derives(head, lo, mid) and seq_derives(rest, mid, hi):
                return True
        return False

    return nt_derives(g.start, 0, len(w))


def words_over(alphabet, max_len: int):
    alphabet = sorted(alphabet)
    for n in range(1, max_len + 1):
        for w in itertools.product(alphabet, repeat=n):
            yield w


# ---------------------------------------------------------------------------
# files: {"start": "S", "rules": [["S", ["a", "S"]], ...]}

def cfg_to_json(g: CFG) -> dict:
    return {"start": g.start, "rules": [[l, list(r)] for l, r in g.rules]}


def cfg_from_json(doc) -> CFG:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        return CFG(doc["start"], tuple((l, tuple(r)) for l, r in doc["rules"]))
    except (KeyError, TypeError) as exc:
        raise GrammarError(f"malformed grammar document: {exc}") from exc
