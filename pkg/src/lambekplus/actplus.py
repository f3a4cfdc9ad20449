"""Hilbert-style calculus for residuated structures with positive iteration.

Statements are single implications ``E -> F``.  Axioms: identity, the two
associativity directions, and ``A | (A+ * A+) -> A+``.  Rules: the four
residuation rules, transitivity, disjunction introduction/elimination and
the iteration rule deriving ``A+ -> B`` from ``A | (B * B) -> B``.

Proof objects are line-based with back references so that repeated
sublemmas (distributivity in particular) are shared rather than copied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .formula import (
    Formula, LDiv, Or, Plus, Prod, RDiv, Sequent,
    FormulaError, parse_sequent, prod_of, power,
    disjunction_of, render_formula,
)
from .prover import ProofReport

__all__ = [
    "Implication", "Line", "HilbertProof", "ProofBuilder", "check_act",
    "seq_to_impl", "build_distrib", "build_lemma_short", "build_lemma_long",
    "act_to_json", "act_from_json", "TranslationError",
]


class TranslationError(ValueError):
    pass


@dataclass(frozen=True)
class Implication:
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return f"{render_formula(self.lhs)} -> {render_formula(self.rhs)}"


@dataclass(frozen=True)
class Line:
    stmt: Implication
    by: str
    refs: tuple = ()


@dataclass
class HilbertProof:
    lines: list = field(default_factory=list)

    @property
    def conclusion(self) -> Implication:
        return self.lines[-1].stmt

    def __len__(self):
        return len(self.lines)


def seq_to_impl(s: Sequent) -> Implication:
    return Implication(prod_of(s.antecedent), s.succedent)


# ---------------------------------------------------------------------------
# checking

_AXIOMS = {"id", "assoc_r", "assoc_l", "plus_ax"}
_RULES = {"res_r", "unres_r", "res_l", "unres_l", "trans",
          "or_in1", "or_in2", "or_el", "plus_rule"}


def _axiom_violation(stmt: Implication, by: str) -> Optional[str]:
    l, r = stmt.lhs, stmt.rhs
    if by == "id":
        return None if l == r else "id requires A -> A"
    if by == "assoc_r":
        ok = (isinstance(l, Prod) and isinstance(l.left, Prod)
              and isinstance(r, Prod) and isinstance(r.right, Prod)
              and l.left.left == r.left and l.left.right == r.right.left
              and l.right == r.right.right)
        return None if ok else "assoc_r requires (A*B)*C -> A*(B*C)"
    if by == "assoc_l":
        ok = (isinstance(l, Prod) and isinstance(l.right, Prod)
              and isinstance(r, Prod) and isinstance(r.left, Prod)
              and l.left == r.left.left and l.right.left == r.left.right
              and l.right.right == r.right)
        return None if ok else "assoc_l requires A*(B*C) -> (A*B)*C"
    if by == "plus_ax":
        ok = (isinstance(l, Or) and isinstance(r, Plus) and l.left == r.body
              and l.right == Prod(r, r))
        return None if ok else "plus_ax requires A|(A+*A+) -> A+"
    return f"unknown axiom {by!r}"


def _rule_violation_act(stmt: Implication, by: str, premises) -> Optional[str]:
    l, r = stmt.lhs, stmt.rhs
    if by == "res_r":
        if len(premises) != 1:
            return "res_r takes one premise"
        p = premises[0]
        ok = (isinstance(p.lhs, Prod) and isinstance(r, RDiv)
              and p.lhs.left == l and p.lhs.right == r.den and p.rhs == r.num)
        return None if ok else "res_r: from A*B -> C conclude A -> C/B"
    if by == "unres_r":
        if len(premises) != 1:
            return "unres_r takes one premise"
        p = premises[0]
        ok = (isinstance(l, Prod) and isinstance(p.rhs, RDiv)
              and p.lhs == l.left and p.rhs.den == l.right and p.rhs.num == r)
        return None if ok else "unres_r: from A -> C/B conclude A*B -> C"
    if by == "res_l":
        if len(premises) != 1:
            return "res_l takes one premise"
        p = premises[0]
        ok = (isinstance(p.lhs, Prod) and isinstance(r, LDiv)
              and p.lhs.right == l and p.lhs.left == r.den and p.rhs == r.num)
        return None if ok else "res_l: from A*B -> C conclude B -> A\\C"
    if by == "unres_l":
        if len(premises) != 1:
            return "unres_l takes one premise"
        p = premises[0]
        ok = (isinstance(l, Prod) and isinstance(p.rhs, LDiv)
              and p.lhs == l.right and p.rhs.den == l.left and p.rhs.num == r)
        return None if ok else "unres_l: from B -> A\\C conclude A*B -> C"
    if by == "trans":
        if len(premises) != 2:
            return "trans takes two premises"
        p, q = premises
        ok = p.lhs == l and p.rhs == q.lhs and q.rhs == r
        return None if ok else "trans: from A -> B and B -> C conclude A -> C"
    if by == "or_in1":
        if len(premises) != 1:
            return "or_in1 takes one premise"
        p = premises[0]
        ok = isinstance(r, Or) and p.lhs == l and p.rhs == r.left
        return None if ok else "or_in1: from A -> B1 conclude A -> B1|B2"
    if by == "or_in2":
        if len(premises) != 1:
            return "or_in2 takes one premise"
        p = premises[0]
        ok = isinstance(r, Or) and p.lhs == l and p.rhs == r.right
        return None if ok else "or_in2: from A -> B2 conclude A -> B1|B2"
    if by == "or_el":
        if len(premises) != 2:
            return "or_el takes two premises"
        p, q = premises
        ok = (isinstance(l, Or) and p.lhs == l.left and q.lhs == l.right
              and p.rhs == r and q.rhs == r)
        return None if ok else "or_el: from A1 -> B and A2 -> B conclude A1|A2 -> B"
    if by == "plus_rule":
        if len(premises) != 1:
            return "plus_rule takes one premise"
        p = premises[0]
        ok = (isinstance(p.lhs, Or) and isinstance(l, Plus)
              and p.lhs.left == l.body and p.lhs.right == Prod(p.rhs, p.rhs)
              and p.rhs == r)
        return None if ok else "plus_rule: from A|(B*B) -> B conclude A+ -> B"
    return f"unknown rule {by!r}"


def check_act(p: HilbertProof) -> ProofReport:
    for idx, line in enumerate(p.lines):
        if any(ref < 0 or ref >= idx for ref in line.refs):
            return ProofReport(False, idx, "premise reference out of range")
        if line.by in _AXIOMS:
            if line.refs:
                return ProofReport(False, idx, "axiom lines take no premises")
            msg = _axiom_violation(line.stmt, line.by)
        elif line.by in _RULES:
            msg = _rule_violation_act(line.stmt, line.by,
                                      tuple(p.lines[r].stmt for r in line.refs))
        else:
            msg = f"unknown justification {line.by!r}"
        if msg is not None:
            return ProofReport(False, idx, msg)
    return ProofReport(True)


# ---------------------------------------------------------------------------
# proof construction

class ProofBuilder:
    """Accumulates deduplicated proof lines with combinators for the
    derived rules the translations rely on."""

    def __init__(self):
        self.proof = HilbertProof()
        self._index = {}

    def line(self, lhs, rhs, by, refs=()) -> int:
        key = (lhs, rhs, by, tuple(refs))
        hit = self._index.get(key)
        if hit is not None:
            return hit
        self.proof.lines.append(Line(Implication(lhs, rhs), by, tuple(refs)))
        idx = len(self.proof.lines) - 1
        self._index[key] = idx
        return idx

    def stmt(self, i: int) -> Implication:
        return self.proof.lines[i].stmt

    def finish(self, i: int) -> HilbertProof:
        """Make line ``i`` the conclusion (re-emitting it if needed)."""
        if i != len(self.proof.lines) - 1:
            line = self.proof.lines[i]
            self.proof.lines.append(line)
        return self.proof

    # -- axioms
    def ax_id(self, a) -> int:
        return self.line(a, a, "id")

    def ax_assoc_r(self, a, b, c) -> int:
        return self.line(Prod(Prod(a, b), c), Prod(a, Prod(b, c)), "assoc_r")

    def ax_assoc_l(self, a, b, c) -> int:
        return self.line(Prod(a, Prod(b, c)), Prod(Prod(a, b), c), "assoc_l")

    def ax_plus(self, a) -> int:
        return self.line(Or(a, Prod(Plus(a), Plus(a))), Plus(a), "plus_ax")

    # -- primitive rules
    def res_r(self, i) -> int:
        s = self.stmt(i)
        return self.line(s.lhs.left, RDiv(s.rhs, s.lhs.right), "res_r", (i,))

    def unres_r(self, i) -> int:
        s = self.stmt(i)
        return self.line(Prod(s.lhs, s.rhs.den), s.rhs.num, "unres_r", (i,))

    def res_l(self, i) -> int:
        s = self.stmt(i)
        return self.line(s.lhs.right, LDiv(s.lhs.left, s.rhs), "res_l", (i,))

    def unres_l(self, i) -> int:
        s = self.stmt(i)
        return self.line(Prod(s.rhs.den, s.lhs), s.rhs.num, "unres_l", (i,))

    def trans(self, i, j) -> int:
        a, b = self.stmt(i), self.stmt(j)
        if a.rhs != b.lhs:
            raise TranslationError(f"trans mismatch: {a} then {b}")
        if a.lhs == a.rhs:
            return j
        if b.lhs == b.rhs:
            return i
        return self.line(a.lhs, b.rhs, "trans", (i, j))

    def or_in1(self, i, other) -> int:
        s = self.stmt(i)
        return self.line(s.lhs, Or(s.rhs, other), "or_in1", (i,))

    def or_in2(self, i, other) -> int:
        s = self.stmt(i)
        return self.line(s.lhs, Or(other, s.rhs), "or_in2", (i,))

    def or_el(self, i, j) -> int:
        a, b = self.stmt(i), self.stmt(j)
        if a.rhs != b.rhs:
            raise TranslationError("or_el premises must share a conclusion")
        return self.line(Or(a.lhs, b.lhs), a.rhs, "or_el", (i, j))

    def plus_rule(self, i) -> int:
        s = self.stmt(i)
        body = s.lhs.left
        return self.line(Plus(body), s.rhs, "plus_rule", (i,))

    # -- derived combinators
    def mono_left(self, i, w) -> int:
        """From U -> V derive U*W -> V*W."""
        s = self.stmt(i)
        step = self.res_r(self.ax_id(Prod(s.rhs, w)))
        return self.unres_r(self.trans(i, step))

    def mono_right(self, i, w) -> int:
        """From U -> V derive W*U -> W*V."""
        s = self.stmt(i)
        step = self.res_l(self.ax_id(Prod(w, s.rhs)))
        return self.unres_l(self.trans(i, step))

    def a_to_aplus(self, a) -> int:
        return self.trans(self.or_in1(self.ax_id(a), Prod(Plus(a), Plus(a))),
                          self.ax_plus(a))

    def plusplus(self, a) -> int:
        """A+ * A+ -> A+."""
        return self.trans(self.or_in2(self.ax_id(Prod(Plus(a), Plus(a))), a),
                          self.ax_plus(a))

    def to_right_comb(self, f) -> int:
        """f -> rc(f) where rc is the fully right-nested association."""
        if not isinstance(f, Prod):
            return self.ax_id(f)
        a, b = f.left, f.right
        if not isinstance(a, Prod):
            return self.mono_right(self.to_right_comb(b), a)
        step = self.ax_assoc_r(a.left, a.right, b)
        return self.trans(step, self.to_right_comb(Prod(a.left, Prod(a.right, b))))

    def from_right_comb(self, f) -> int:
        """rc(f) -> f."""
        if not isinstance(f, Prod):
            return self.ax_id(f)
        a, b = f.left, f.right
        if not isinstance(a, Prod):
            return self.mono_right(self.from_right_comb(b), a)
        inner = self.from_right_comb(Prod(a.left, Prod(a.right, b)))
        return self.trans(inner, self.ax_assoc_l(a.left, a.right, b))

    def reassoc(self, u, v) -> int:
        """u -> v when u and v are associations of the same factor list."""
        if u == v:
            return self.ax_id(u)
        if _leaves(u) != _leaves(v):
            raise TranslationError(
                f"cannot reassociate {render_formula(u)} into {render_formula(v)}")
        return self.trans(self.to_right_comb(u), self.from_right_comb(v))

    def or_intro_into(self, part, whole) -> int:
        """part -> whole, where part is a disjunct of the Or-tree whole."""
        hit = self._or_path(part, whole)
        if hit is None:
            raise TranslationError(f"{render_formula(part)} is not a disjunct "
                                   f"of {render_formula(whole)}")
        out = self.ax_id(part)
        for side, other in hit:
            out = self.or_in1(out, other) if side == 0 else self.or_in2(out, other)
        return out

    def _or_path(self, part, whole):
        if part == whole:
            return []
        if isinstance(whole, Or):
            sub = self._or_path(part, whole.left)
            if sub is not None:
                return sub + [(0, whole.right)]
            sub = self._or_path(part, whole.right)
            if sub is not None:
                return sub + [(1, whole.left)]
        return None

    def or_elim_all(self, whole, handler) -> int:
        """whole -> C given handler(disjunct) -> line of disjunct -> C."""
        if not isinstance(whole, Or):
            return handler(whole)
        return self.or_el(self.or_elim_all(whole.left, handler),
                          self.or_elim_all(whole.right, handler))

    def or_elim_parts(self, whole, handlers) -> int:
        """Like or_elim_all with one handler per disjunct, left to right
        (robust when disjuncts are equal as formulas)."""
        queue = list(handlers)

        def walk(f):
            if not isinstance(f, Or):
                return queue.pop(0)(f)
            left = walk(f.left)
            return self.or_el(left, walk(f.right))

        out = walk(whole)
        if queue:
            raise TranslationError("handler count does not match disjuncts")
        return out

    def or_mono(self, i, j) -> int:
        """From L -> L' and R -> R' derive L|R -> L'|R'."""
        a, b = self.stmt(i), self.stmt(j)
        return self.or_el(self.trans(i, self.or_in1(self.ax_id(a.rhs), b.rhs)),
                          self.trans(j, self.or_in2(self.ax_id(b.rhs), a.rhs)))

    def mono_at(self, i, gamma, delta) -> int:
        """From X -> Y derive prod(gamma+[X]+delta) -> prod(gamma+[Y]+delta),
        with the standard right-nested association on both sides."""
        s = self.stmt(i)
        out = i
        if delta:
            out = self.mono_left(out, prod_of(delta))
        for g in reversed(list(gamma)):
            out = self.mono_right(out, g)
        src = prod_of(list(gamma) + [s.lhs] + list(delta))
        dst = prod_of(list(gamma) + [s.rhs] + list(delta))
        pre = self.reassoc(src, self.stmt(out).lhs)
        post = self.reassoc(self.stmt(out).rhs, dst)
        return self.trans(self.trans(pre, out), post)


def _leaves(f) -> tuple:
    if isinstance(f, Prod):
        return _leaves(f.left) + _leaves(f.right)
    return (f,)


# ---------------------------------------------------------------------------
# distributivity

def _distrib(b: ProofBuilder, e, f, g, side, direction) -> int:
    if side == "left" and direction == "fwd":
        target = Or(Prod(e, g), Prod(f, g))
        pe = b.res_r(b.or_intro_into(Prod(e, g), target))
        pf = b.res_r(b.or_intro_into(Prod(f, g), target))
        return b.unres_r(b.or_el(pe, pf))
    if side == "left" and direction == "bwd":
        u = Or(e, f)
        pe = b.mono_left(b.or_intro_into(e, u), g)
        pf = b.mono_left(b.or_intro_into(f, u), g)
        return b.or_el(pe, pf)
    if side == "right" and direction == "fwd":
        target = Or(Prod(g, e), Prod(g, f))
        pe = b.res_l(b.or_intro_into(Prod(g, e), target))
        pf = b.res_l(b.or_intro_into(Prod(g, f), target))
        return b.unres_l(b.or_el(pe, pf))
    if side == "right" and direction == "bwd":
        u = Or(e, f)
        pe = b.mono_right(b.or_intro_into(e, u), g)
        pf = b.mono_right(b.or_intro_into(f, u), g)
        return b.or_el(pe, pf)
    raise ValueError("side must be left/right and direction fwd/bwd")


def build_distrib(e: Formula, f: Formula, g: Formula,
                  side: str, direction: str) -> HilbertProof:
    b = ProofBuilder()
    return b.finish(_distrib(b, e, f, g, side, direction))


def _distribute_or_left(b: ProofBuilder, whole, g) -> int:
    """whole*g -> the disjunction of d*g over disjuncts d of whole."""
    if not isinstance(whole, Or):
        return b.ax_id(Prod(whole, g))
    step = _distrib(b, whole.left, whole.right, g, "left", "fwd")
    left = _distribute_or_left(b, whole.left, g)
    right = _distribute_or_left(b, whole.right, g)
    return b.trans(step, b.or_mono(left, right))


def _distribute_or_right(b: ProofBuilder, g, whole) -> int:
    """g*whole -> the disjunction of g*d over disjuncts d of whole."""
    if not isinstance(whole, Or):
        return b.ax_id(Prod(g, whole))
    step = _distrib(b, whole.left, whole.right, g, "right", "fwd")
    left = _distribute_or_right(b, g, whole.left)
    right = _distribute_or_right(b, g, whole.right)
    return b.trans(step, b.or_mono(left, right))


def _or_flat(f) -> list:
    if isinstance(f, Or):
        return _or_flat(f.left) + _or_flat(f.right)
    return [f]


# ---------------------------------------------------------------------------
# the two admissible iteration rules

def _unfold_right(b: ProofBuilder, d) -> int:
    """d+ -> d | (d+ * d)."""
    t = Or(d, Prod(Plus(d), d))
    p_d = b.or_intro_into(d, t)
    # t*d -> t
    dist = _distribute_or_left(b, t, d)
    dd = b.trans(b.mono_left(b.a_to_aplus(d), d),
                 b.or_intro_into(Prod(Plus(d), d), t))
    pd_d = b.trans(b.mono_left(_plus_absorb_right(b, d), d),
                   b.or_intro_into(Prod(Plus(d), d), t))
    td = b.trans(dist, b.or_el(dd, pd_d))
    return _lemma_short(b, p_d, td)


def _plus_absorb_right(b: ProofBuilder, a) -> int:
    """a+ * a -> a+."""
    return b.trans(b.mono_right(b.a_to_aplus(a), Plus(a)), b.plusplus(a))


def _plus_absorb_left(b: ProofBuilder, a) -> int:
    """a * a+ -> a+."""
    return b.trans(b.mono_left(b.a_to_aplus(a), Plus(a)), b.plusplus(a))


def _unfold_left(b: ProofBuilder, a) -> int:
    """a+ -> a | (a * a+): the left unfolding used to embed +L steps."""
    bb = Or(a, Prod(a, Plus(a)))
    u1 = b.or_intro_into(a, bb)
    # bb*bb -> bb
    dist1 = _distribute_or_left(b, bb, bb)
    # a*bb -> a*a+ -> bb
    dist_a = _distribute_or_right(b, a, bb)
    aa = b.mono_right(b.a_to_aplus(a), a)
    a_aap = b.mono_right(_plus_absorb_left(b, a), a)
    into = b.or_intro_into(Prod(a, Plus(a)), bb)
    a_bb = b.trans(b.trans(dist_a, b.or_el(aa, a_aap)), into)
    # (a*a+)*bb -> a*a+ -> bb
    g = Prod(a, Plus(a))
    dist_g = _distribute_or_right(b, g, bb)
    # g*a = (a*a+)*a -> a*(a+*a) -> a*a+
    ga = b.trans(b.ax_assoc_r(a, Plus(a), a),
                 b.mono_right(_plus_absorb_right(b, a), a))
    # g*g = (a*a+)*(a*a+) -> a*(a+*(a*a+)) -> a*a+
    inner = b.trans(b.mono_right(_plus_absorb_left(b, a), Plus(a)), b.plusplus(a))
    gg = b.trans(b.ax_assoc_r(a, Plus(a), g), b.mono_right(inner, a))
    g_bb = b.trans(b.trans(dist_g, b.or_el(ga, gg)), into)
    bb_bb = b.trans(dist1, b.or_el(a_bb, g_bb))
    u3 = b.or_el(u1, bb_bb)
    return b.plus_rule(u3)


def _or_context_elim_builder(b: ProofBuilder, gamma, x, y, delta,
                             h_left: int, h_right: int) -> int:
    """prod(gamma+[x|y]+delta) -> C from branch lines for x and for y.

    ``h_left`` must prove prod(gamma+[x]+delta) -> C and ``h_right`` the
    same for y.
    """
    gamma, delta = list(gamma), list(delta)
    orf = Or(x, y)
    src = prod_of(gamma + [orf] + delta)
    if not gamma and not delta:
        return b.or_el(h_left, h_right)
    if gamma and delta:
        pg, pd = prod_of(gamma), prod_of(delta)
        d1 = _distrib(b, x, y, pd, "left", "fwd")
        lifted = b.mono_right(d1, pg)
        d2 = _distrib(b, Prod(x, pd), Prod(y, pd), pg, "right", "fwd")
        chain = b.trans(lifted, d2)
        src_assoc = Prod(pg, Prod(orf, pd))
        branch = lambda z: Prod(pg, Prod(z, pd))
    elif gamma:
        pg = prod_of(gamma)
        chain = _distrib(b, x, y, pg, "right", "fwd")
        src_assoc = Prod(pg, orf)
        branch = lambda z: Prod(pg, z)
    else:
        pd = prod_of(delta)
        chain = _distrib(b, x, y, pd, "left", "fwd")
        src_assoc = Prod(orf, pd)
        branch = lambda z: Prod(z, pd)
    start = b.trans(b.reassoc(src, src_assoc), chain)
    lx = b.trans(b.reassoc(branch(x), prod_of(gamma + [x] + delta)), h_left)
    ly = b.trans(b.reassoc(branch(y), prod_of(gamma + [y] + delta)), h_right)
    return b.trans(start, b.or_el(lx, ly))


def _lemma_short(b: ProofBuilder, p_a: int, p_ca: int) -> int:
    """From lines A -> C and C*A -> C derive A+ -> C (Lemma about the
    two-premise iteration rule)."""
    sa, sca = b.stmt(p_a), b.stmt(p_ca)
    a = sa.lhs
    c = sa.rhs
    if not (isinstance(sca.lhs, Prod) and sca.lhs.left == c
            and sca.lhs.right == a and sca.rhs == c):
        raise TranslationError(f"premise shapes must be A -> C and C*A -> C, "
                               f"got {sa} and {sca}")
    cc = LDiv(c, c)
    s1 = b.res_l(p_ca)                                   # A -> C\C
    w1 = b.unres_l(b.ax_id(cc))                          # C*(C\C) -> C
    w2 = b.ax_assoc_l(c, cc, cc)
    w5 = b.trans(b.trans(w2, b.mono_left(w1, cc)), w1)   # C*((C\C)*(C\C)) -> C
    w6 = b.res_l(w5)                                     # (C\C)*(C\C) -> C\C
    s3 = b.plus_rule(b.or_el(s1, w6))                    # A+ -> C\C
    s5 = b.res_r(b.unres_l(s3))                          # C -> C/A+
    s7 = b.unres_r(b.trans(p_a, s5))                     # A*A+ -> C
    s8 = b.or_el(p_a, s7)                                # A|(A*A+) -> C
    u4 = _unfold_left(b, a)                              # A+ -> A|(A*A+)
    return b.trans(u4, s8)


def build_lemma_short(p_a: HilbertProof, p_ca: HilbertProof) -> HilbertProof:
    b = ProofBuilder()
    ia = _import_proof(b, p_a)
    ica = _import_proof(b, p_ca)
    return b.finish(_lemma_short(b, ia, ica))


def _import_proof(b: ProofBuilder, p: HilbertProof) -> int:
    rep = check_act(p)
    if not rep.valid:
        raise TranslationError(f"premise proof invalid at line {rep.node}: {rep.violation}")
    mapping = {}
    for idx, line in enumerate(p.lines):
        mapping[idx] = b.line(line.stmt.lhs, line.stmt.rhs, line.by,
                              tuple(mapping[r] for r in line.refs))
    return mapping[len(p.lines) - 1]


def _lemma_long(b: ProofBuilder, k: int, p_js: list, p_last: int) -> int:
    """From lines A^j -> C (j = 1..k) and A^k*C -> C derive A+ -> C."""
    if k < 1 or len(p_js) != k:
        raise TranslationError("lemma_long needs premises A^1..A^k -> C")
    s1 = b.stmt(p_js[0])
    a, c = s1.lhs, s1.rhs
    for j, ref in enumerate(p_js, start=1):
        if b.stmt(ref) != Implication(power(a, j), c):
            raise TranslationError(f"premise {j} must conclude A^{j} -> C")
    ak = power(a, k)
    akp = Plus(ak)
    if b.stmt(p_last) != Implication(Prod(ak, c), c):
        raise TranslationError("last premise must conclude A^k*C -> C")

    kinds = [("pow", j) for j in range(1, k + 1)] + [("akp", 0)] \
        + [("tail", i) for i in range(1, k)]

    def part_formula(kind):
        tag, n = kind
        if tag == "pow":
            return power(a, n)
        if tag == "akp":
            return akp
        return Prod(akp, power(a, n))

    parts = [part_formula(kind) for kind in kinds]
    big = disjunction_of(parts)

    # A+ -> big, by the two-premise rule with C := big
    pa_big = b.or_intro_into(a, big)

    def times_a_into_big(kind, x) -> int:
        """x -> big where x = d*a for the disjunct d of the given kind."""
        tag, n = kind
        if tag == "akp":
            if k >= 2:
                return b.or_intro_into(x, big)
            # k == 1: a+*a -> a+, which is a disjunct
            return b.trans(_plus_absorb_right(b, a), b.or_intro_into(akp, big))
        if tag == "tail":
            canon = Prod(akp, power(a, n + 1))
            start = b.reassoc(x, canon)
            if n + 1 <= k - 1:
                return b.trans(start, b.or_intro_into(canon, big))
            # (a^k)+ * a^k -> (a^k)+
            absorb = b.trans(b.mono_right(b.a_to_aplus(ak), akp), b.plusplus(ak))
            closing = b.trans(absorb, b.or_intro_into(akp, big))
            return b.trans(start, closing)
        j = n
        canon = power(a, j + 1)
        start = b.reassoc(x, canon)
        if j + 1 <= k:
            return b.trans(start, b.or_intro_into(canon, big))
        # a^(k+1) -> a^k*a -> (a^k)+*a
        step = b.trans(b.reassoc(canon, Prod(ak, a)), b.mono_left(b.a_to_aplus(ak), a))
        if k >= 2:
            return b.trans(b.trans(start, step), b.or_intro_into(Prod(akp, a), big))
        closing = b.trans(_plus_absorb_right(b, a), b.or_intro_into(akp, big))
        return b.trans(b.trans(start, step), closing)

    dist = _distribute_or_left(b, big, a)
    handlers = [(lambda x, kind=kind: times_a_into_big(kind, x)) for kind in kinds]
    cases = b.or_elim_parts(b.stmt(dist).rhs, handlers)
    big_a = b.trans(dist, cases)
    p_plus_big = _lemma_short(b, pa_big, big_a)

    # big -> C
    ccr = RDiv(c, c)
    c1 = b.res_r(p_last)                                  # A^k -> C/C
    v1 = b.unres_r(b.ax_id(ccr))                          # (C/C)*C -> C
    v2 = b.ax_assoc_r(ccr, ccr, c)
    v5 = b.trans(b.trans(v2, b.mono_right(v1, ccr)), v1)  # ((C/C)*(C/C))*C -> C
    v6 = b.res_r(v5)                                      # (C/C)*(C/C) -> C/C
    c4 = b.plus_rule(b.or_el(c1, v6))                     # (A^k)+ -> C/C
    c5 = b.unres_r(c4)                                    # (A^k)+*C -> C
    c6 = b.res_l(c5)                                      # C -> (A^k)+\C

    def tail_into_c(i: int) -> int:
        return b.unres_l(b.trans(p_js[i - 1], c6))        # (A^k)+*A^i -> C

    c7 = tail_into_c(k)                                   # (A^k)+*A^k -> C
    c8 = _unfold_right(b, ak)                             # (A^k)+ -> A^k|((A^k)+*A^k)
    c10 = b.trans(c8, b.or_el(p_js[k - 1], c7))           # (A^k)+ -> C

    def part_into_c(kind, _d) -> int:
        tag, n = kind
        if tag == "akp":
            return c10
        if tag == "tail":
            return tail_into_c(n)
        return p_js[n - 1]

    big_c = b.or_elim_parts(big, [(lambda d, kind=kind: part_into_c(kind, d))
                                  for kind in kinds])
    return b.trans(p_plus_big, big_c)


def build_lemma_long(k: int, premises: list, last: HilbertProof) -> HilbertProof:
    """``premises`` prove A^j -> C for j = 1..k; ``last`` proves A^k*C -> C."""
    if len(premises) != k:
        raise TranslationError(f"need exactly {k} power premises, got {len(premises)}")
    b = ProofBuilder()
    refs = [_import_proof(b, p) for p in premises]
    ilast = _import_proof(b, last)
    return b.finish(_lemma_long(b, k, refs, ilast))


# ---------------------------------------------------------------------------
# serialization

def act_to_json(p: HilbertProof) -> list:
    out = []
    for line in p.lines:
        out.append({
            "stmt": f"{render_formula(line.stmt.lhs)} -> {render_formula(line.stmt.rhs)}",
            "by": line.by,
            "subst": {},
            "from": list(line.refs),
        })
    return out


def act_from_json(doc) -> HilbertProof:
    if isinstance(doc, str):
        doc = json.loads(doc)
    p = HilbertProof()
    try:
        for entry in doc:
            seq = parse_sequent(entry["stmt"])
            if len(seq.antecedent) != 1:
                raise FormulaError("statement must be a single implication")
            p.lines.append(Line(Implication(seq.antecedent[0], seq.succedent),
                                entry["by"], tuple(entry.get("from", ()))))
    except (KeyError, TypeError) as exc:
        raise FormulaError(f"malformed proof document: {exc}") from exc
    return p
