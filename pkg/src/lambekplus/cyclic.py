"""Cyclic derivations: finite proof trees closed by backlinks.

The rule set extends the Lambek rules with the asymmetric iteration rules

    +R1:  Pi -> A              under  Pi -> A+
    +RL:  Pi1 -> A, Pi2 -> A+  under  Pi1, Pi2 -> A+
    +L:   G, A, D -> C  and  G, A, A+, D -> C   under   G, A+, D -> C

plus cut.  A branch may close with a backlink to a strict ancestor, which
must be a +L conclusion with the same sequent; the active iterated
occurrence is traced upward through explicit per-rule position maps and
must arrive at the backlink in the same position.  Valid derivations
unfold into the non-wellfounded system where every infinite path keeps
unfolding one tracked occurrence.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

from .formula import (
    LDiv, Or, Plus, Prod, RDiv, Sequent, Var,
    FormulaError, parse_sequent, render_sequent, has_negative_plus, plus_free,
)
from .prover import (
    Derivation, ProofReport, _rule_violation, prove,
)

__all__ = [
    "CNode", "CyclicDerivation", "check_cyclic", "search_cyclic", "unfold",
    "check_unfolded", "from_finitary", "cyclic_to_json", "cyclic_from_json",
    "trace_map", "CYCLIC_RULES",
]

CYCLIC_RULES = {"ax", "\\L", "\\R", "/L", "/R", "*L", "*R", "+R1", "+RL",
                "+L", "vL", "vR1", "vR2", "cut", "backlink"}


@dataclass(frozen=True)
class CNode:
    id: int
    sequent: Sequent
    rule: str
    premises: tuple = ()            # premise node ids, left to right
    active: Optional[int] = None
    splits: Optional[tuple] = None
    target: Optional[int] = None    # backlink target id


@dataclass
class CyclicDerivation:
    root: int
    nodes: dict                     # id -> CNode

    def node(self, nid: int) -> CNode:
        return self.nodes[nid]

    def parent_map(self) -> dict:
        out = {}
        for node in self.nodes.values():
            for child in node.premises:
                out[child] = node.id
        return out

    def preorder(self):
        stack = [self.root]
        while stack:
            nid = stack.pop()
            node = self.nodes[nid]
            yield node
            stack.extend(reversed(node.premises))

    def backlink_nodes(self):
        return [n for n in self.preorder() if n.rule == "backlink"]

    def cycle_count(self) -> int:
        return len(self.backlink_nodes())


# ---------------------------------------------------------------------------
# per-rule antecedent position maps

def _cyclic_rule_violation(node: CNode, premise_seqs) -> Optional[str]:
    seq, rule = node.sequent, node.rule
    ant, suc = seq.antecedent, seq.succedent
    n = len(premise_seqs)
    if rule == "+R1":
        if not isinstance(suc, Plus) or n != 1:
            return "+R1 requires a Plus succedent and one premise"
        if premise_seqs[0] != Sequent(ant, suc.body):
            return "+R1 premise mismatch"
        return None
    if rule == "+RL":
        if not isinstance(suc, Plus) or n != 2 or not node.splits or len(node.splits) != 1:
            return "+RL requires a Plus succedent, two premises and one split"
        k = node.splits[0]
        if not 1 <= k <= len(ant) - 1:
            return "+RL split out of range"
        if premise_seqs[0] != Sequent(ant[:k], suc.body):
            return "+RL first premise mismatch"
        if premise_seqs[1] != Sequent(ant[k:], suc):
            return "+RL second premise mismatch"
        return None
    if rule == "+L":
        a = node.active
        if n != 2 or a is None or not 0 <= a < len(ant) or not isinstance(ant[a], Plus):
            return "+L requires two premises and an active Plus"
        body = ant[a].body
        if premise_seqs[0] != Sequent(ant[:a] + (body,) + ant[a + 1:], suc):
            return "+L first premise mismatch"
        if premise_seqs[1] != Sequent(ant[:a] + (body, ant[a]) + ant[a + 1:], suc):
            return "+L second premise mismatch"
        return None
    if rule == "+Rn":
        return "+Rn is not a cyclic rule (expand to +RL/+R1)"
    return _rule_violation(rule, seq, premise_seqs, node.active, node.splits)


def trace_map(node: CNode, premise_seqs, child: int, pos: int) -> Optional[int]:
    """Where antecedent position ``pos`` of the conclusion sits in premise
    ``child``, or None when the occurrence does not persist there."""
    rule = node.rule
    ant = node.sequent.antecedent
    a = node.active
    if rule == "\\R":
        return pos + 1
    if rule == "/R" or rule == "vR1" or rule == "vR2" or rule == "+R1":
        return pos
    if rule in ("*R", "+RL"):
        k = node.splits[0]
        if child == 0:
            return pos if pos < k else None
        return pos - k if pos >= k else None
    if rule == "*L":
        if pos == a:
            return None
        return pos if pos < a else pos + 1
    if rule == "vL":
        return None if pos == a else pos
    if rule == "+L":
        if pos == a:
            return a + 1 if child == 1 else None
        if pos < a:
            return pos
        return pos if child == 0 else pos + 1
    if rule == "\\L":
        j = node.splits[0]
        if child == 0:
            return pos - j if j <= pos < a else None
        if pos < j:
            return pos
        if pos <= a:
            return None
        return pos - (a - j)
    if rule == "/L":
        j = node.splits[0]
        if child == 0:
            return pos - (a + 1) if a + 1 <= pos < j else None
        if pos < a:
            return pos
        if pos < j:
            return None
        return pos - (j - a - 1)
    if rule == "cut":
        llen = len(premise_seqs[0].antecedent)
        c = a
        if pos < c:
            return pos if child == 1 else None
        if pos < c + llen:
            return pos - c if child == 0 else None
        return pos - llen + 1 if child == 1 else None
    return None


# ---------------------------------------------------------------------------
# checking

def check_cyclic(d: CyclicDerivation) -> ProofReport:
    # structural sanity: premise edges form a tree rooted at d.root
    seen = set()
    order = []
    stack = [d.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            return ProofReport(False, nid, "bad-structure: node shared or cyclic")
        if nid not in d.nodes:
            return ProofReport(False, nid, "bad-structure: dangling premise id")
        seen.add(nid)
        node = d.nodes[nid]
        order.append(node)
        stack.extend(reversed(node.premises))
    if len(seen) != len(d.nodes):
        return ProofReport(False, d.root, "bad-structure: unreachable nodes")

    parents = d.parent_map()

    for node in order:
        if node.rule not in CYCLIC_RULES:
            return ProofReport(False, node.id, f"bad-rule: unknown rule {node.rule!r}")
        if node.rule == "backlink":
            continue
        msg = _cyclic_rule_violation(node, tuple(d.nodes[p].sequent for p in node.premises))
        if msg is not None:
            return ProofReport(False, node.id, f"bad-rule: {msg}")

    for node in order:
        if node.rule != "backlink":
            continue
        if node.premises:
            return ProofReport(False, node.id, "bad-rule: backlink must be a leaf")
        if node.target not in d.nodes:
            return ProofReport(False, node.id, "bad-structure: dangling backlink target")
        # strict ancestry
        path = [node.id]
        cur = node.id
        while cur in parents:
            cur = parents[cur]
            path.append(cur)
            if cur == node.target:
                break
        if path[-1] != node.target or node.target == node.id:
            return ProofReport(False, node.id,
                               "bad-structure: backlink target is not a strict ancestor")
        target = d.nodes[node.target]
        if target.rule != "+L":
            return ProofReport(False, node.id, "backlink-not-plusL")
        if node.sequent != target.sequent:
            return ProofReport(False, node.id, "backlink-sequent-mismatch")
        # trace the active occurrence up the path from target to backlink
        down_path = list(reversed(path))      # target ... backlink
        pos = target.active
        for step, nid in enumerate(down_path[:-1]):
            parent = d.nodes[nid]
            child_id = down_path[step + 1]
            child = parent.premises.index(child_id)
            if parent.id == target.id and parent.rule == "+L" and pos == parent.active \
                    and child == 0:
                return ProofReport(False, node.id, "trace-not-through-plusL")
            pos = trace_map(parent, tuple(d.nodes[p].sequent for p in parent.premises),
                            child, pos)
            if pos is None:
                return ProofReport(False, node.id, "trace-broken")
        if pos != target.active:
            return ProofReport(False, node.id, "trace-broken")
    return ProofReport(True)


# ---------------------------------------------------------------------------
# building from finitary derivations

class _Builder:
    def __init__(self):
        self.nodes = {}
        self.counter = itertools.count()

    def add(self, sequent, rule, premises=(), active=None, splits=None, target=None):
        nid = next(self.counter)
        self.nodes[nid] = CNode(nid, sequent, rule, tuple(premises), active, splits, target)
        return nid

    def done(self, root) -> CyclicDerivation:
        return CyclicDerivation(root, self.nodes)


def _embed(b: _Builder, d: Derivation) -> int:
    if d.rule == "+Rn":
        bounds = (d.splits or ()) + (len(d.sequent.antecedent),)
        return _embed_plus_chain(b, d.sequent, list(d.premises), list(bounds), 0)
    kids = [_embed(b, p) for p in d.premises]
    return b.add(d.sequent, d.rule, kids, d.active, d.splits)


def _embed_plus_chain(b, seq, premises, bounds, lo) -> int:
    first = _embed(b, premises[0])
    if len(premises) == 1:
        return b.add(seq, "+R1", [first])
    k = bounds[0] - lo
    rest_seq = Sequent(seq.antecedent[k:], seq.succedent)
    rest = _embed_plus_chain(b, rest_seq, premises[1:], bounds[1:], bounds[0])
    return b.add(seq, "+RL", [first, rest], splits=(k,))


def from_finitary(d: Derivation) -> CyclicDerivation:
    """Re-express a finitary derivation with +R1/+RL chains for +Rn."""
    b = _Builder()
    root = _embed(b, d)
    return b.done(root)


# ---------------------------------------------------------------------------
# bounded backward search

class _Budget(Exception):
    pass


@dataclass
class _Ancestor:
    node_id: int
    sequent: Sequent
    active: int
    pos: Optional[int]              # traced position in the current goal


class _CyclicSearch:
    def __init__(self, budget: int):
        self.budget = budget
        self.b = _Builder()

    def tick(self):
        self.budget -= 1
        if self.budget < 0:
            raise _Budget

    def search(self, goal: Sequent):
        try:
            return self.solve(goal, ())
        except _Budget:
            return None

    def solve(self, goal: Sequent, ancs) -> Optional[int]:
        self.tick()
        ant, suc = goal.antecedent, goal.succedent

        if not has_negative_plus(goal):
            r = prove(goal)
            if r.status != "derivable":
                return None
            return _embed(self.b, r.derivation)

        # invertible steps keep the trace alive through deterministic maps
        if isinstance(suc, LDiv):
            sub = self.child(Sequent((suc.den,) + ant, suc.num), goal, "\\R", None, None, 0, ancs)
            return None if sub is None else self.b.add(goal, "\\R", [sub])
        if isinstance(suc, RDiv):
            sub = self.child(Sequent(ant + (suc.den,), suc.num), goal, "/R", None, None, 0, ancs)
            return None if sub is None else self.b.add(goal, "/R", [sub])
        for i, f in enumerate(ant):
            if isinstance(f, Prod):
                sub = self.child(Sequent(ant[:i] + (f.left, f.right) + ant[i + 1:], suc),
                                 goal, "*L", i, None, 0, ancs)
                return None if sub is None else self.b.add(goal, "*L", [sub], active=i)
        for i, f in enumerate(ant):
            if isinstance(f, Or):
                l = self.child(Sequent(ant[:i] + (f.left,) + ant[i + 1:], suc),
                               goal, "vL", i, None, 0, ancs)
                if l is None:
                    return None
                r = self.child(Sequent(ant[:i] + (f.right,) + ant[i + 1:], suc),
                               goal, "vL", i, None, 1, ancs)
                return None if r is None else self.b.add(goal, "vL", [l, r], active=i)

        # close by backlink on a repeated +L conclusion with a live trace
        for anc in ancs:
            if anc.pos is not None and anc.sequent == goal and anc.pos == anc.active:
                return self.b.add(goal, "backlink", target=anc.node_id)

        # succedent choices
        if isinstance(suc, Prod):
            for k in range(1, len(ant)):
                l = self.child(Sequent(ant[:k], suc.left), goal, "*R", None, (k,), 0, ancs)
                if l is None:
                    continue
                r = self.child(Sequent(ant[k:], suc.right), goal, "*R", None, (k,), 1, ancs)
                if r is not None:
                    return self.b.add(goal, "*R", [l, r], splits=(k,))
        elif isinstance(suc, Plus):
            sub = self.child(Sequent(ant, suc.body), goal, "+R1", None, None, 0, ancs)
            if sub is not None:
                return self.b.add(goal, "+R1", [sub])
            for k in range(1, len(ant)):
                l = self.child(Sequent(ant[:k], suc.body), goal, "+RL", None, (k,), 0, ancs)
                if l is None:
                    continue
                r = self.child(Sequent(ant[k:], suc), goal, "+RL", None, (k,), 1, ancs)
                if r is not None:
                    return self.b.add(goal, "+RL", [l, r], splits=(k,))
        elif isinstance(suc, Or):
            sub = self.child(Sequent(ant, suc.left), goal, "vR1", None, None, 0, ancs)
            if sub is not None:
                return self.b.add(goal, "vR1", [sub])
            sub = self.child(Sequent(ant, suc.right), goal, "vR2", None, None, 0, ancs)
            if sub is not None:
                return self.b.add(goal, "vR2", [sub])

        # left division rules
        for i, f in enumerate(ant):
            if isinstance(f, LDiv):
                for j in range(0, i):
                    l = self.child(Sequent(ant[j:i], f.den), goal, "\\L", i, (j,), 0, ancs)
                    if l is None:
                        continue
                    r = self.child(Sequent(ant[:j] + (f.num,) + ant[i + 1:], suc),
                                   goal, "\\L", i, (j,), 1, ancs)
                    if r is not None:
                        return self.b.add(goal, "\\L", [l, r], active=i, splits=(j,))
            elif isinstance(f, RDiv):
                for j in range(i + 2, len(ant) + 1):
                    l = self.child(Sequent(ant[i + 1:j], f.den), goal, "/L", i, (j,), 0, ancs)
                    if l is None:
                        continue
                    r = self.child(Sequent(ant[:i] + (f.num,) + ant[j:], suc),
                                   goal, "/L", i, (j,), 1, ancs)
                    if r is not None:
                        return self.b.add(goal, "/L", [l, r], active=i, splits=(j,))

        # left iteration unfolding; conclusions become backlink candidates
        for i, f in enumerate(ant):
            if isinstance(f, Plus):
                node_id = self.b.add(goal, "+L", [], active=i)  # placeholder
                entry = _Ancestor(node_id, goal, i, i)
                l = self.child(Sequent(ant[:i] + (f.body,) + ant[i + 1:], suc),
                               goal, "+L", i, None, 0, ancs, extra=None)
                if l is None:
                    del self.b.nodes[node_id]
                    continue
                r = self.child(Sequent(ant[:i] + (f.body, f) + ant[i + 1:], suc),
                               goal, "+L", i, None, 1, ancs, extra=entry)
                if r is None:
                    del self.b.nodes[node_id]
                    continue
                self.b.nodes[node_id] = CNode(node_id, goal, "+L", (l, r), i, None, None)
                return node_id
        return None

    def child(self, subgoal, goal, rule, active, splits, child_idx, ancs, extra=None):
        probe = CNode(-1, goal, rule, (), active, splits, None)
        fake_premises = (subgoal, subgoal)  # only cut needs premise widths
        new = []
        for anc in ancs:
            pos = None
            if anc.pos is not None:
                pos = trace_map(probe, fake_premises, child_idx, anc.pos)
            new.append(_Ancestor(anc.node_id, anc.sequent, anc.active, pos))
        if extra is not None:
            pos = trace_map(probe, fake_premises, child_idx, extra.pos)
            new.append(_Ancestor(extra.node_id, extra.sequent, extra.active, pos))
        return self.solve(subgoal, tuple(new))


def search_cyclic(s: Sequent, budget: int = 2000) -> Optional[CyclicDerivation]:
    """Bounded cut-free backward search; None means out of budget or no proof
    found, never a refutation."""
    if budget < 1:
        raise ValueError("search_cyclic requires budget >= 1")
    searcher = _CyclicSearch(budget)
    root = searcher.search(s)
    if root is None:
        return None
    out = CyclicDerivation(root, searcher.b.nodes)
    out = _prune(out)
    return out


def _prune(d: CyclicDerivation) -> CyclicDerivation:
    keep = set()
    for node in d.preorder():
        keep.add(node.id)
    d.nodes = {nid: n for nid, n in d.nodes.items() if nid in keep}
    return d


# ---------------------------------------------------------------------------
# unfolding

def unfold(d: CyclicDerivation, depth: int) -> Derivation:
    """Finite prefix of the infinite unfolding.

    Each cycle body appears ``depth`` times; remaining cycle entry points
    become leaves labelled ``open``.
    """
    if depth < 1:
        raise ValueError("unfold requires depth >= 1")

    def expand(nid: int, rounds: int) -> Derivation:
        node = d.nodes[nid]
        if node.rule == "backlink":
            if rounds > 0:
                return expand(node.target, rounds - 1)
            return Derivation(node.sequent, "open")
        premises = tuple(expand(p, rounds) for p in node.premises)
        return Derivation(node.sequent, node.rule, premises, node.active, node.splits)

    return expand(d.root, depth - 1)


def check_unfolded(d: Derivation) -> ProofReport:
    """Validate an unfolded prefix: open leaves allowed, cyclic rules only."""
    for idx, node in enumerate(d.nodes()):
        if node.rule == "open":
            if node.premises:
                return ProofReport(False, idx, "open leaf with premises")
            continue
        cnode = CNode(idx, node.sequent, node.rule, (), node.active, node.splits)
        msg = _cyclic_rule_violation(cnode, tuple(p.sequent for p in node.premises))
        if msg is not None:
            return ProofReport(False, idx, msg)
    return ProofReport(True)


# ---------------------------------------------------------------------------
# serialization: nested derivation documents with id/backlink fields

def cyclic_to_json(d: CyclicDerivation) -> dict:
    def conv(nid: int) -> dict:
        node = d.nodes[nid]
        doc = {"id": node.id, "rule": node.rule,
               "sequent": render_sequent(node.sequent)}
        if node.active is not None:
            doc["active"] = node.active
        if node.splits is not None:
            doc["splits"] = list(node.splits)
        if node.target is not None:
            doc["backlink"] = node.target
        doc["premises"] = [conv(p) for p in node.premises]
        return doc

    return conv(d.root)


def cyclic_from_json(doc) -> CyclicDerivation:
    if isinstance(doc, str):
        doc = json.loads(doc)
    nodes = {}

    def conv(entry) -> int:
        try:
            nid = int(entry["id"])
            seq = parse_sequent(entry["sequent"])
            rule = entry["rule"]
            active = entry.get("active")
            splits = tuple(entry["splits"]) if entry.get("splits") is not None else None
            target = entry.get("backlink")
            premises = tuple(conv(p) for p in entry.get("premises", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormulaError(f"malformed cyclic derivation document: {exc}") from exc
        if nid in nodes:
            raise FormulaError(f"duplicate node id {nid}")
        nodes[nid] = CNode(nid, seq, rule, premises, active, splits, target)
        return nid

    root = conv(doc)
    return CyclicDerivation(root, nodes)
