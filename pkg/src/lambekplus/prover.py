"""Cut-free backward proof search and derivation checking.

The finitary calculus: axiom, the six Lambek rules, the two disjunction
rules and the right iteration rules ``(+Rn)`` for every arity n >= 1.
There is no left rule for ``+``, so proof search only accepts sequents
without negative occurrences of ``+`` (callers with negative iteration
go through the omega or cyclic modules instead).

Derivation node field conventions (also used by the cyclic checker):

=======  ===========================================================
rule     premises / fields
=======  ===========================================================
ax       leaf; antecedent is ``[A]`` and succedent ``A``
\\R       ``A, Pi -> B``  under  ``Pi -> A \\ B``
/R       ``Pi, A -> B``  under  ``Pi -> B / A``
*R       ``G -> A``, ``D -> B``; ``splits=(len(G),)``
+Rn      n premises ``Pi_i -> A``; ``splits`` = cumulative boundaries
vR1/vR2  one premise ``G -> A_i``
*L       one premise; ``active`` = index of the product
vL       two premises; ``active`` = index of the disjunction
\\L       ``Pi -> A`` and ``G, B, D -> C``; ``active`` = index of
         ``A \\ B``, ``splits=(j,)`` with ``Pi = ant[j:active]``
/L       ``Pi -> A`` and ``G, B, D -> C``; ``active`` = index of
         ``B / A``, ``splits=(j,)`` with ``Pi = ant[active+1:j]``
cut      ``Pi -> A`` and ``G, A, D -> C``; ``active`` = index of the
         cut formula in the right premise
=======  ===========================================================
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .formula import (
    LDiv, Or, Plus, Prod, RDiv, Sequent, Var,
    FormulaError, _plain, fgi, has_negative_plus, parse_sequent,
    render_sequent, top,
)

__all__ = [
    "Derivation", "ProofReport", "ProveResult", "NegativePlusError",
    "prove", "check", "decompose", "principal_occurrence",
    "derivation_to_json", "derivation_from_json",
    "derivable", "clear_cache",
]


class NegativePlusError(ValueError):
    """Sequent has a negative ``+``: use the omega or cyclic machinery."""


@dataclass(frozen=True)
class Derivation:
    sequent: Sequent
    rule: str
    premises: tuple = ()
    active: Optional[int] = None
    splits: Optional[tuple] = None

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()


@dataclass(frozen=True)
class ProofReport:
    valid: bool
    node: Optional[int] = None     # preorder index of first offender
    violation: Optional[str] = None

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class ProveResult:
    status: str                     # "derivable" | "underivable" | "unknown"
    derivation: Optional[Derivation] = None


class BudgetExhausted(Exception):
    pass


def _balanced(s: Sequent) -> bool:
    word = None
    for f in s.antecedent:
        word = fgi(f) if word is None else word * fgi(f)
    return word == fgi(s.succedent)


def _pure(s: Sequent) -> bool:
    return all(_plain(f) for f in s.antecedent) and _plain(s.succedent)


class _Search:
    """Exhaustive deterministic backward search with memoisation.

    The memo is shared between calls; entries are only written for fully
    explored subgoals, which keeps budgeted runs sound.
    """

    def __init__(self):
        self.memo = {}

    def prove(self, s: Sequent, budget: Optional[int]) -> ProveResult:
        self.remaining = budget
        try:
            d = self._solve(s)
        except BudgetExhausted:
            return ProveResult("unknown")
        if d is None:
            return ProveResult("underivable")
        return ProveResult("derivable", d)

    def _tick(self):
        if self.remaining is not None:
            self.remaining -= 1
            if self.remaining < 0:
                raise BudgetExhausted

    def _solve(self, s: Sequent) -> Optional[Derivation]:
        hit = self.memo.get(s, _MISS)
        if hit is not _MISS:
            return hit
        self._tick()
        out = self._expand(s)
        self.memo[s] = out
        return out

    def _expand(self, s: Sequent) -> Optional[Derivation]:
        ant, suc = s.antecedent, s.succedent

        if _pure(s) and not _balanced(s):
            return None

        # principal-occurrence filter: a primitive succedent must appear as
        # the top of some antecedent member once every member has a top
        if isinstance(suc, Var):
            name = suc.name
            found = False
            defined = True
            for f in ant:
                tp = top(f)
                if tp is None:
                    defined = False
                    break
                if tp == name:
                    found = True
            if defined and not found:
                return None

        if len(ant) == 1 and ant[0] == suc:
            return Derivation(s, "ax")

        # invertible rules first: \R, /R, *L, vL
        if isinstance(suc, LDiv):
            sub = self._solve(Sequent((suc.den,) + ant, suc.num))
            return None if sub is None else Derivation(s, "\\R", (sub,))
        if isinstance(suc, RDiv):
            sub = self._solve(Sequent(ant + (suc.den,), suc.num))
            return None if sub is None else Derivation(s, "/R", (sub,))
        for i, f in enumerate(ant):
            if isinstance(f, Prod):
                sub = self._solve(Sequent(ant[:i] + (f.left, f.right) + ant[i + 1:], suc))
                return None if sub is None else Derivation(s, "*L", (sub,), active=i)
        for i, f in enumerate(ant):
            if isinstance(f, Or):
                a = self._solve(Sequent(ant[:i] + (f.left,) + ant[i + 1:], suc))
                if a is None:
                    return None
                b = self._solve(Sequent(ant[:i] + (f.right,) + ant[i + 1:], suc))
                return None if b is None else Derivation(s, "vL", (a, b), active=i)

        # branching choices, left-to-right
        for i, f in enumerate(ant):
            if isinstance(f, LDiv):
                # Pi = ant[j:i] non-empty; split points scanned left-to-right
                for j in range(0, i):
                    left = self._solve(Sequent(ant[j:i], f.den))
                    if left is None:
                        continue
                    rest = self._solve(Sequent(ant[:j] + (f.num,) + ant[i + 1:], suc))
                    if rest is not None:
                        return Derivation(s, "\\L", (left, rest), active=i, splits=(j,))
            elif isinstance(f, RDiv):
                for j in range(i + 2, len(ant) + 1):
                    left = self._solve(Sequent(ant[i + 1:j], f.den))
                    if left is None:
                        continue
                    rest = self._solve(Sequent(ant[:i] + (f.num,) + ant[j:], suc))
                    if rest is not None:
                        return Derivation(s, "/L", (left, rest), active=i, splits=(j,))

        if isinstance(suc, Prod):
            for k in range(1, len(ant)):
                a = self._solve(Sequent(ant[:k], suc.left))
                if a is None:
                    continue
                b = self._solve(Sequent(ant[k:], suc.right))
                if b is not None:
                    return Derivation(s, "*R", (a, b), splits=(k,))
        elif isinstance(suc, Or):
            a = self._solve(Sequent(ant, suc.left))
            if a is not None:
                return Derivation(s, "vR1", (a,))
            b = self._solve(Sequent(ant, suc.right))
            if b is not None:
                return Derivation(s, "vR2", (b,))
        elif isinstance(suc, Plus):
            for n in range(1, len(ant) + 1):
                for bounds in _compositions(len(ant), n):
                    subs = []
                    ok = True
                    lo = 0
                    for hi in bounds + (len(ant),):
                        sub = self._solve(Sequent(ant[lo:hi], suc.body))
                        if sub is None:
                            ok = False
                            break
                        subs.append(sub)
                        lo = hi
                    if ok:
                        return Derivation(s, "+Rn", tuple(subs), splits=bounds)
        return None


_MISS = object()


def _compositions(total: int, parts: int):
    """Cumulative boundaries for ordered splits into non-empty parts."""
    if parts == 1:
        yield ()
        return

    def rec(start, left):
        if left == 1:
            yield ()
            return
        for b in range(start + 1, total - left + 2):
            for rest in rec(b, left - 1):
                yield (b,) + rest

    yield from rec(0, parts)


_SEARCH = _Search()


def clear_cache():
    _SEARCH.memo.clear()


def prove(s: Sequent, budget: Optional[int] = None) -> ProveResult:
    """Decide ``s`` in the finitary calculus; exact when budget is None."""
    if has_negative_plus(s):
        raise NegativePlusError(
            f"{render_sequent(s)} has a negative '+' occurrence; "
            "use the omega refuter or the cyclic prover")
    return _SEARCH.prove(s, budget)


def derivable(s: Sequent) -> bool:
    return prove(s).status == "derivable"


# ---------------------------------------------------------------------------
# checking

def _rule_violation(rule, seq, premises, active, splits, allow=None):
    """None if the node is a correct rule instance, else a message.

    ``premises`` is the tuple of premise sequents.  Covers the finitary
    rules plus cut; the cyclic module layers +R1/+RL/+L and backlink on
    top of this table.
    """
    ant, suc = seq.antecedent, seq.succedent
    n = len(premises)

    def fail(msg):
        return msg

    if rule == "ax":
        if n != 0:
            return fail("ax must be a leaf")
        if len(ant) != 1 or ant[0] != suc:
            return fail("ax requires antecedent [A] with succedent A")
        return None
    if rule == "\\R":
        if not isinstance(suc, LDiv) or n != 1:
            return fail("\\R requires an LDiv succedent and one premise")
        if premises[0] != Sequent((suc.den,) + ant, suc.num):
            return fail("\\R premise mismatch")
        return None
    if rule == "/R":
        if not isinstance(suc, RDiv) or n != 1:
            return fail("/R requires an RDiv succedent and one premise")
        if premises[0] != Sequent(ant + (suc.den,), suc.num):
            return fail("/R premise mismatch")
        return None
    if rule == "*R":
        if not isinstance(suc, Prod) or n != 2 or not splits or len(splits) != 1:
            return fail("*R requires a Prod succedent, two premises and one split")
        k = splits[0]
        if not 1 <= k <= len(ant) - 1:
            return fail("*R split out of range")
        if premises[0] != Sequent(ant[:k], suc.left) or premises[1] != Sequent(ant[k:], suc.right):
            return fail("*R premise mismatch")
        return None
    if rule == "vR1" or rule == "vR2":
        if not isinstance(suc, Or) or n != 1:
            return fail("vR requires an Or succedent and one premise")
        target = suc.left if rule == "vR1" else suc.right
        if premises[0] != Sequent(ant, target):
            return fail(f"{rule} premise mismatch")
        return None
    if rule == "+Rn":
        if not isinstance(suc, Plus) or n < 1:
            return fail("+Rn requires a Plus succedent and n >= 1 premises")
        bounds = splits if splits else ()
        if len(bounds) != n - 1:
            return fail("+Rn splits must list n-1 boundaries")
        lo = 0
        for idx, hi in enumerate(tuple(bounds) + (len(ant),)):
            if hi <= lo or hi > len(ant):
                return fail("+Rn split out of range")
            if premises[idx] != Sequent(ant[lo:hi], suc.body):
                return fail("+Rn premise mismatch")
            lo = hi
        return None
    if rule == "*L":
        if n != 1 or active is None or not 0 <= active < len(ant) \
                or not isinstance(ant[active], Prod):
            return fail("*L requires one premise and an active Prod")
        f = ant[active]
        if premises[0] != Sequent(ant[:active] + (f.left, f.right) + ant[active + 1:], suc):
            return fail("*L premise mismatch")
        return None
    if rule == "vL":
        if n != 2 or active is None or not 0 <= active < len(ant) \
                or not isinstance(ant[active], Or):
            return fail("vL requires two premises and an active Or")
        f = ant[active]
        if premises[0] != Sequent(ant[:active] + (f.left,) + ant[active + 1:], suc):
            return fail("vL first premise mismatch")
        if premises[1] != Sequent(ant[:active] + (f.right,) + ant[active + 1:], suc):
            return fail("vL second premise mismatch")
        return None
    if rule == "\\L":
        if n != 2 or active is None or not 0 <= active < len(ant) \
                or not isinstance(ant[active], LDiv):
            return fail("\\L requires two premises and an active LDiv")
        if not splits or len(splits) != 1:
            return fail("\\L requires one split")
        j = splits[0]
        if not 0 <= j < active:
            return fail("\\L slice must be non-empty")
        f = ant[active]
        if premises[0] != Sequent(ant[j:active], f.den):
            return fail("\\L left premise mismatch")
        if premises[1] != Sequent(ant[:j] + (f.num,) + ant[active + 1:], suc):
            return fail("\\L right premise mismatch")
        return None
    if rule == "/L":
        if n != 2 or active is None or not 0 <= active < len(ant) \
                or not isinstance(ant[active], RDiv):
            return fail("/L requires two premises and an active RDiv")
        if not splits or len(splits) != 1:
            return fail("/L requires one split")
        j = splits[0]
        if not active + 1 < j <= len(ant):
            return fail("/L slice must be non-empty")
        f = ant[active]
        if premises[0] != Sequent(ant[active + 1:j], f.den):
            return fail("/L left premise mismatch")
        if premises[1] != Sequent(ant[:active] + (f.num,) + ant[j:], suc):
            return fail("/L right premise mismatch")
        return None
    if rule == "cut":
        if n != 2 or active is None:
            return fail("cut requires two premises and the cut position")
        left, right = premises
        if not 0 <= active < len(right.antecedent):
            return fail("cut position out of range")
        if right.antecedent[active] != left.succedent:
            return fail("cut formula mismatch")
        merged = right.antecedent[:active] + left.antecedent + right.antecedent[active + 1:]
        if seq != Sequent(merged, right.succedent):
            return fail("cut conclusion mismatch")
        return None
    return fail(f"unknown rule {rule!r}")


_FINITARY_RULES = {"ax", "\\R", "/R", "*R", "vR1", "vR2", "+Rn", "*L", "vL",
                   "\\L", "/L", "cut"}


def check(d: Derivation) -> ProofReport:
    """Validate every node against its rule schema; cut is accepted."""
    for idx, node in enumerate(d.nodes()):
        if node.rule not in _FINITARY_RULES:
            return ProofReport(False, idx, f"unknown rule {node.rule!r}")
        msg = _rule_violation(node.rule, node.sequent,
                              tuple(p.sequent for p in node.premises),
                              node.active, node.splits)
        if msg is not None:
            return ProofReport(False, idx, msg)
    return ProofReport(True)


# ---------------------------------------------------------------------------
# invertible decomposition

def decompose(s: Sequent) -> list:
    """Residual goals after exhaustively inverting \\R, /R, *L and vL."""
    out = []
    stack = [s]
    while stack:
        g = stack.pop()
        ant, suc = g.antecedent, g.succedent
        if isinstance(suc, LDiv):
            stack.append(Sequent((suc.den,) + ant, suc.num))
            continue
        if isinstance(suc, RDiv):
            stack.append(Sequent(ant + (suc.den,), suc.num))
            continue
        red = None
        for i, f in enumerate(ant):
            if isinstance(f, Prod):
                red = [Sequent(ant[:i] + (f.left, f.right) + ant[i + 1:], suc)]
                break
            if isinstance(f, Or):
                red = [Sequent(ant[:i] + (f.right,) + ant[i + 1:], suc),
                       Sequent(ant[:i] + (f.left,) + ant[i + 1:], suc)]
                break
        if red is None:
            out.append(g)
        else:
            stack.extend(red)
    return out


# ---------------------------------------------------------------------------
# principal occurrences

def principal_occurrence(d: Derivation) -> int:
    """Index in the root antecedent of the principal occurrence.

    Traces the primitive succedent up to its axiom leaf, then maps the
    axiom's antecedent position back down.  Requires a valid cut-free
    derivation whose root succedent is primitive.
    """
    if not isinstance(d.sequent.succedent, Var):
        raise ValueError("principal occurrence needs a primitive succedent")
    node = d
    path = []
    while node.rule != "ax":
        rule = node.rule
        if rule == "cut":
            raise ValueError("principal occurrence undefined for proofs with cut")
        if rule in ("\\R", "/R", "*R", "vR1", "vR2", "+Rn"):
            raise ValueError("right rule on the succedent trace; succedent not primitive")
        if rule in ("\\L", "/L"):
            child = 1
        elif rule in ("*L", "vL"):
            child = 0
        else:
            raise ValueError(f"unsupported rule {rule!r} on the trace")
        path.append((node, child))
        node = node.premises[child]
    pos = 0  # the lone antecedent formula of the axiom
    for parent, child in reversed(path):
        pos = _map_down(parent, child, pos)
    return pos


def _map_down(node: Derivation, child: int, pos: int) -> int:
    """Map an antecedent position of premise ``child`` to the conclusion."""
    ant = node.sequent.antecedent
    rule = node.rule
    a = node.active
    if rule == "*L":
        if pos in (a, a + 1):
            return a
        return pos if pos < a else pos - 1
    if rule == "vL":
        return pos
    if rule == "\\L":
        j = node.splits[0]
        plen = a - j
        if child == 0:
            return j + pos
        if pos < j:
            return pos
        if pos == j:
            return a
        return pos + plen
    if rule == "/L":
        j = node.splits[0]
        plen = j - a - 1
        if child == 0:
            return a + 1 + pos
        if pos < a:
            return pos
        if pos == a:
            return a
        return pos + plen
    raise ValueError(f"no antecedent map for rule {rule!r}")


# ---------------------------------------------------------------------------
# serialization

def derivation_to_json(d: Derivation) -> dict:
    doc = {"rule": d.rule, "sequent": render_sequent(d.sequent)}
    if d.active is not None:
        doc["active"] = d.active
    if d.splits is not None:
        doc["splits"] = list(d.splits)
    doc["premises"] = [derivation_to_json(p) for p in d.premises]
    return doc


def derivation_from_json(doc) -> Derivation:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        seq = parse_sequent(doc["sequent"])
        rule = doc["rule"]
        active = doc.get("active")
        splits = tuple(doc["splits"]) if doc.get("splits") is not None else None
        premises = tuple(derivation_from_json(p) for p in doc.get("premises", []))
    except (KeyError, TypeError) as exc:
        raise FormulaError(f"malformed derivation document: {exc}") from exc
    return Derivation(seq, rule, premises, active, splits)
