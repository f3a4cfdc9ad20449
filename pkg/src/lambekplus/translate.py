"""The two directions of the cyclic / Hilbert-calculus equivalence.

``cyclic_to_act`` eliminates cycles bottommost-first: a backlinked +L
conclusion ``G, A+, D -> B`` is discharged by forming ``C = G \\ (B / D)``,
extracting one side derivation ``G, A^j, D -> B`` per unfolding on the
traced occurrence plus the padded derivation ``G, A^k, C, D -> B`` by
substitution along the cycle path, recursing (each extract has strictly
fewer cycles), and applying the k-premise iteration rule.

``act_to_cyclic`` maps every axiom and rule to a cyclic template and
chains lines with cut; the iteration rule becomes the one-cycle
derivation whose track runs through the cut.
"""

from __future__ import annotations

import itertools
from typing import Optional

from .formula import (
    LDiv, Or, Plus, Prod, RDiv, Sequent, Var, power, prod_of,
    render_sequent,
)
from .prover import Derivation, prove
from .cyclic import (
    CNode, CyclicDerivation, _Builder, _embed, check_cyclic, trace_map,
)
from .actplus import (
    HilbertProof, Implication, ProofBuilder, TranslationError, check_act,
    _lemma_long, _unfold_left, _plus_absorb_left, _or_context_elim_builder,
)

__all__ = ["cyclic_to_act", "act_to_cyclic"]


# ---------------------------------------------------------------------------
# cyclic -> Hilbert

def cyclic_to_act(d: CyclicDerivation) -> HilbertProof:
    rep = check_cyclic(d)
    if not rep.valid:
        raise TranslationError(f"invalid cyclic derivation: {rep.violation} "
                               f"at node {rep.node}")
    b = ProofBuilder()
    return b.finish(_tr_tree(b, d))


def _tr_tree(b: ProofBuilder, d: CyclicDerivation) -> int:
    targets = {}
    for n in d.preorder():
        if n.rule == "backlink":
            targets.setdefault(n.target, []).append(n.id)
    return _tr(b, d, d.root, targets)


def _gamma_delta(seq: Sequent, a: int):
    return list(seq.antecedent[:a]), list(seq.antecedent[a + 1:])


def _tr(b: ProofBuilder, d: CyclicDerivation, nid: int, targets) -> int:
    node = d.nodes[nid]
    if node.id in targets:
        return _tr_cycle(b, d, node, targets)
    rule = node.rule
    seq = node.sequent
    ant, suc = seq.antecedent, seq.succedent
    kids = node.premises

    if rule == "ax":
        return b.ax_id(ant[0])
    if rule == "backlink":
        raise TranslationError("backlink outside of its cycle")

    if rule == "\\R":
        h = _tr(b, d, kids[0], targets)
        return b.res_l(h)
    if rule == "/R":
        h = _tr(b, d, kids[0], targets)
        src = Prod(prod_of(ant), suc.den)
        return b.res_r(b.trans(b.reassoc(src, b.stmt(h).lhs), h))
    if rule == "*L":
        h = _tr(b, d, kids[0], targets)
        return b.trans(b.reassoc(prod_of(ant), b.stmt(h).lhs), h)
    if rule == "*R":
        h1 = _tr(b, d, kids[0], targets)
        h2 = _tr(b, d, kids[1], targets)
        k = node.splits[0]
        pg, pd = prod_of(ant[:k]), prod_of(ant[k:])
        r = b.reassoc(prod_of(ant), Prod(pg, pd))
        step = b.trans(b.mono_left(h1, pd), b.mono_right(h2, suc.left))
        return b.trans(r, step)
    if rule == "vL":
        g, dl = _gamma_delta(seq, node.active)
        orf = ant[node.active]
        h1 = _tr(b, d, kids[0], targets)
        h2 = _tr(b, d, kids[1], targets)
        return _or_context_elim_builder(b, g, orf.left, orf.right, dl, h1, h2)
    if rule == "vR1":
        h = _tr(b, d, kids[0], targets)
        return b.or_in1(h, suc.right)
    if rule == "vR2":
        h = _tr(b, d, kids[0], targets)
        return b.or_in2(h, suc.left)
    if rule == "+R1":
        h = _tr(b, d, kids[0], targets)
        return b.trans(h, b.a_to_aplus(suc.body))
    if rule == "+RL":
        h1 = _tr(b, d, kids[0], targets)
        h2 = _tr(b, d, kids[1], targets)
        k = node.splits[0]
        pg, pd = prod_of(ant[:k]), prod_of(ant[k:])
        a = suc.body
        r = b.reassoc(prod_of(ant), Prod(pg, pd))
        step = b.trans(b.mono_left(h1, pd), b.mono_right(h2, a))
        return b.trans(b.trans(r, step), _plus_absorb_left(b, a))
    if rule == "\\L":
        f = ant[node.active]
        j = node.splits[0]
        pi = list(ant[j:node.active])
        g, dl = list(ant[:j]), list(ant[node.active + 1:])
        h1 = _tr(b, d, kids[0], targets)
        h2 = _tr(b, d, kids[1], targets)
        app = b.unres_l(b.ax_id(f))                    # den*(den\num) -> num
        inner = b.trans(b.mono_left(h1, f), app)       # prodPi*(den\num) -> num
        ctx = b.mono_at(inner, g, dl)
        r = b.reassoc(prod_of(ant), b.stmt(ctx).lhs)
        return b.trans(b.trans(r, ctx), h2)
    if rule == "/L":
        f = ant[node.active]
        j = node.splits[0]
        g, dl = list(ant[:node.active]), list(ant[j:])
        h1 = _tr(b, d, kids[0], targets)
        h2 = _tr(b, d, kids[1], targets)
        app = b.unres_r(b.ax_id(f))                    # (num/den)*den -> num
        inner = b.trans(b.mono_right(h1, f), app)      # (num/den)*prodPi -> num
        ctx = b.mono_at(inner, g, dl)
        r = b.reassoc(prod_of(ant), b.stmt(ctx).lhs)
        return b.trans(b.trans(r, ctx), h2)
    if rule == "cut":
        h1 = _tr(b, d, kids[0], targets)
        h2 = _tr(b, d, kids[1], targets)
        right = d.nodes[kids[1]].sequent
        g = list(right.antecedent[:node.active])
        dl = list(right.antecedent[node.active + 1:])
        ctx = b.mono_at(h1, g, dl)
        r = b.reassoc(prod_of(ant), b.stmt(ctx).lhs)
        return b.trans(b.trans(r, ctx), h2)
    if rule == "+L":
        # acyclic unfolding: A+ -> A | A*A+ inside the context
        a = ant[node.active].body
        g, dl = _gamma_delta(seq, node.active)
        h1 = _tr(b, d, kids[0], targets)
        h2 = _tr(b, d, kids[1], targets)
        pair = Prod(a, Plus(a))
        right_src = prod_of(g + [pair] + dl)
        h2a = b.trans(b.reassoc(right_src, b.stmt(h2).lhs), h2)
        u = b.mono_at(_unfold_left(b, a), g, dl)
        oce = _or_context_elim_builder(b, g, a, pair, dl, h1, h2a)
        return b.trans(u, oce)
    raise TranslationError(f"untranslatable rule {rule!r}")


def _closure_formula(gamma, b_formula, delta):
    """``gamma \\ (b / delta)`` with empty sides omitted."""
    out = b_formula
    if delta:
        out = RDiv(out, prod_of(delta))
    if gamma:
        out = LDiv(prod_of(gamma), out)
    return out


def _residuate_to_c(b: ProofBuilder, h: int, gamma, delta, x, b_formula) -> int:
    """From a line proving prod(gamma+[x-parts]+delta) -> B make x -> C."""
    lhs = b.stmt(h).lhs
    if gamma and delta:
        r = b.reassoc(Prod(Prod(prod_of(gamma), x), prod_of(delta)), lhs)
        return b.res_l(b.res_r(b.trans(r, h)))
    if gamma:
        r = b.reassoc(Prod(prod_of(gamma), x), lhs)
        return b.res_l(b.trans(r, h))
    if delta:
        r = b.reassoc(Prod(x, prod_of(delta)), lhs)
        return b.res_r(b.trans(r, h))
    return b.trans(b.reassoc(x, lhs), h)


def _apply_c(b: ProofBuilder, gamma, c, delta, b_formula) -> int:
    """prod(gamma+[C]+delta) -> B."""
    if gamma and delta:
        pd = prod_of(delta)
        u1 = b.unres_l(b.ax_id(c))                      # prodG*C -> B/prodD
        u2 = b.unres_r(b.ax_id(RDiv(b_formula, pd)))    # (B/prodD)*prodD -> B
        chain = b.trans(b.mono_left(u1, pd), u2)
        return b.trans(b.reassoc(prod_of(gamma + [c] + delta), Prod(Prod(prod_of(gamma), c), pd)), chain)
    if gamma:
        u1 = b.unres_l(b.ax_id(c))
        return b.trans(b.reassoc(prod_of(gamma + [c]), Prod(prod_of(gamma), c)), u1)
    if delta:
        u1 = b.unres_r(b.ax_id(c))
        return b.trans(b.reassoc(prod_of([c] + delta), Prod(c, prod_of(delta))), u1)
    return b.ax_id(c)


def _tr_cycle(b: ProofBuilder, d: CyclicDerivation, tnode: CNode, targets) -> int:
    backs = targets[tnode.id]
    if len(backs) != 1:
        raise TranslationError(
            "cycle elimination handles exactly one backlink per target; "
            f"node {tnode.id} has {len(backs)}")
    beta = backs[0]

    parents = d.parent_map()
    chain = [beta]
    cur = beta
    while cur != tnode.id:
        cur = parents[cur]
        chain.append(cur)
    path = list(reversed(chain))                 # T ... beta

    pos = [tnode.active]
    for i in range(len(path) - 1):
        node = d.nodes[path[i]]
        child = node.premises.index(path[i + 1])
        premseqs = tuple(d.nodes[p].sequent for p in node.premises)
        nxt = trace_map(node, premseqs, child, pos[i])
        if nxt is None:
            raise TranslationError("trace lost along a checked path")
        pos.append(nxt)

    ell = [i for i in range(len(path) - 1)
           if d.nodes[path[i]].rule == "+L" and d.nodes[path[i]].active == pos[i]]
    k = len(ell)
    if k == 0 or ell[0] != 0:
        raise TranslationError("cycle must start with the target's unfolding")

    seq = tnode.sequent
    a = seq.antecedent[tnode.active].body
    gamma, delta = _gamma_delta(seq, tnode.active)
    b_formula = seq.succedent
    c = _closure_formula(gamma, b_formula, delta)

    sides = []
    for j in range(1, k + 1):
        tree = _rebuild(d, path, pos, ell, mode=("side", j), a=a, c=c,
                        gamma=gamma, delta=delta, b_formula=b_formula)
        h = _tr_tree_sub(b, tree)
        sides.append(_residuate_to_c(b, h, gamma, delta, power(a, j), b_formula))
    long_tree = _rebuild(d, path, pos, ell, mode=("long", None), a=a, c=c,
                         gamma=gamma, delta=delta, b_formula=b_formula)
    h_long = _tr_tree_sub(b, long_tree)
    p_last = _residuate_to_c(b, h_long, gamma, delta,
                             Prod(power(a, k), c), b_formula)

    lemma = _lemma_long(b, k, sides, p_last)     # A+ -> C
    ctx = b.mono_at(lemma, gamma, delta)
    return b.trans(ctx, _apply_c(b, gamma, c, delta, b_formula))


def _tr_tree_sub(b: ProofBuilder, d: CyclicDerivation) -> int:
    rep = check_cyclic(d)
    if not rep.valid:
        raise TranslationError(
            f"cycle extraction produced an invalid derivation: {rep.violation} "
            f"at node {rep.node} of {render_sequent(d.nodes[d.root].sequent)}")
    return _tr_tree(b, d)


# ---------------------------------------------------------------------------
# the substitution surgery

def _subst_sequent(seq: Sequent, q: int, rep) -> Sequent:
    ant = seq.antecedent
    return Sequent(ant[:q] + tuple(rep) + ant[q + 1:], seq.succedent)


def _shift(x: Optional[int], q: int, delta: int) -> Optional[int]:
    if x is None or delta == 0:
        return x
    return x + delta if x > q else x


def _fix_fields(node: CNode, q: int, delta: int, right_traced: Optional[int]):
    """Adjusted (active, splits) after inserting ``delta`` extra formulas at
    position ``q`` of the conclusion antecedent."""
    active, splits = node.active, node.splits
    if node.rule == "cut":
        if right_traced is not None and active is not None:
            active = _shift(active, right_traced, delta)
        return active, splits
    active = _shift(active, q, delta)
    if splits is not None:
        splits = tuple(_shift(s, q, delta) for s in splits)
    return active, splits


def _rebuild(d, path, pos, ell, mode, a, c, gamma, delta, b_formula):
    kind, jmax = mode
    out = _Builder()
    idx_stop = ell[jmax - 1] if kind == "side" else None

    def count_at(i: int) -> int:
        if kind == "long":
            return sum(1 for e in ell if e >= i)
        return sum(1 for e in ell if i <= e <= idx_stop)

    def rep_at(i: int):
        n = count_at(i)
        if kind == "long":
            return [a] * n + [c]
        return [a] * n

    def copy_verbatim(nid: int, idmap: dict) -> int:
        node = d.nodes[nid]
        if node.rule == "backlink":
            if node.target not in idmap:
                raise TranslationError("backlink escapes the copied region")
            return out.add(node.sequent, "backlink", target=idmap[node.target])
        new = out.add(node.sequent, node.rule, [], node.active, node.splits)
        idmap[nid] = new
        kids = tuple(copy_verbatim(p, idmap) for p in node.premises)
        out.nodes[new] = CNode(new, node.sequent, node.rule, kids,
                               node.active, node.splits)
        return new

    def copy_subst(nid: int, q: int, rep, idmap: dict) -> int:
        node = d.nodes[nid]
        if node.rule == "backlink":
            if node.target not in idmap:
                raise TranslationError("backlink escapes the substituted region")
            return out.add(_subst_sequent(node.sequent, q, rep), "backlink",
                           target=idmap[node.target])
        if node.rule == "+L" and node.active == q:
            raise TranslationError(
                "off-path unfolding of the traced occurrence is not supported")
        premseqs = tuple(d.nodes[p].sequent for p in node.premises)
        newseq = _subst_sequent(node.sequent, q, rep)
        new = out.add(newseq, node.rule, [])
        idmap[nid] = new
        kids = []
        child_pos = []
        for ci, p in enumerate(node.premises):
            m = trace_map(node, premseqs, ci, q)
            child_pos.append(m)
            if m is None:
                kids.append(copy_verbatim(p, idmap))
            else:
                kids.append(copy_subst(p, m, rep, idmap))
        rt = child_pos[1] if len(child_pos) > 1 else None
        active, splits = _fix_fields(node, q, len(rep) - 1, rt)
        out.nodes[new] = CNode(new, newseq, node.rule, tuple(kids), active, splits)
        return new

    def build_path(i: int, idmap: dict) -> int:
        nid = path[i]
        node = d.nodes[nid]
        q = pos[i]
        if kind == "side" and i == idx_stop:
            # cut off the cyclic branch; the goal keeps a single unfolding
            return copy_verbatim(node.premises[0], idmap)
        if node.rule == "backlink":       # end of the long path
            seq = _subst_sequent(node.sequent, q, rep_at(i))
            return _closure_derivation(out, gamma, c, delta, b_formula, seq)
        if i in ell:
            # unfolding on the traced occurrence trivialises
            nxt = node.premises.index(path[i + 1])
            if nxt != 1:
                raise TranslationError("cycle path leaves through the wrong premise")
            return build_path(i + 1, idmap)
        rep = rep_at(i)
        premseqs = tuple(d.nodes[p].sequent for p in node.premises)
        newseq = _subst_sequent(node.sequent, q, rep)
        new = out.add(newseq, node.rule, [])
        idmap[nid] = new
        kids = []
        child_pos = []
        onpath = node.premises.index(path[i + 1])
        for ci, p in enumerate(node.premises):
            m = trace_map(node, premseqs, ci, q)
            child_pos.append(m)
            if ci == onpath:
                kids.append(build_path(i + 1, idmap))
            elif m is None:
                kids.append(copy_verbatim(p, idmap))
            else:
                kids.append(copy_subst(p, m, rep, idmap))
        rt = child_pos[1] if len(child_pos) > 1 else None
        active, splits = _fix_fields(node, q, len(rep) - 1, rt)
        out.nodes[new] = CNode(new, newseq, node.rule, tuple(kids), active, splits)
        return new

    root = build_path(0, {})
    return out.done(root)


def _product_intro(b: _Builder, forms) -> int:
    """Derivation of f1, ..., fn -> f1*(...*fn) by *R over axioms."""
    seq = Sequent(tuple(forms), prod_of(forms))
    if len(forms) == 1:
        return b.add(seq, "ax")
    rest = _product_intro(b, forms[1:])
    ax = b.add(Sequent((forms[0],), forms[0]), "ax")
    return b.add(seq, "*R", [ax, rest], splits=(1,))


def _closure_derivation(b: _Builder, gamma, c, delta, b_formula, seq) -> int:
    """Derivation of gamma, C, delta -> B where C = gamma \\ (B / delta)."""
    if not gamma and not delta:
        return b.add(seq, "ax")
    inner = c
    nodes_after = None
    if gamma:
        inner = c.num                      # B or B/prodD
        left = _product_intro(b, gamma)
        if delta:
            sub_seq = Sequent((inner,) + tuple(delta), b_formula)
            sub = _rdiv_apply(b, inner, delta, b_formula, sub_seq)
        else:
            sub = b.add(Sequent((inner,), b_formula), "ax")
        return b.add(seq, "\\L", [left, sub], active=len(gamma), splits=(0,))
    # delta only: C = B/prodD
    return _rdiv_apply(b, c, delta, b_formula, seq)


def _rdiv_apply(b: _Builder, f, delta, b_formula, seq) -> int:
    right = _product_intro(b, delta)
    ax = b.add(Sequent((b_formula,), b_formula), "ax")
    return b.add(seq, "/L", [right, ax], active=0, splits=(len(delta) + 1,))


# ---------------------------------------------------------------------------
# Hilbert -> cyclic

def act_to_cyclic(p: HilbertProof) -> CyclicDerivation:
    rep = check_act(p)
    if not rep.valid:
        raise TranslationError(f"invalid proof at line {rep.node}: {rep.violation}")
    b = _Builder()

    # The cyclic object is a tree, so a line referenced several times is
    # re-emitted per use rather than shared.
    def emit(i: int) -> int:
        line = p.lines[i]
        thunks = [(lambda r=r: emit(r)) for r in line.refs]
        return _emit_line(b, line.stmt, line.by, thunks,
                          [p.lines[r].stmt for r in line.refs])

    root = emit(len(p.lines) - 1)
    out = CyclicDerivation(root, b.nodes)
    keep = {n.id for n in out.preorder()}
    out.nodes = {nid: n for nid, n in out.nodes.items() if nid in keep}
    return out


def _ax(b: _Builder, f) -> int:
    return b.add(Sequent((f,), f), "ax")


def _rdiv_app(b: _Builder, f: RDiv) -> int:
    """f, den -> num by /L over axioms."""
    seq = Sequent((f, f.den), f.num)
    return b.add(seq, "/L", [_ax(b, f.den), _ax(b, f.num)], active=0, splits=(2,))


def _ldiv_app(b: _Builder, f: LDiv) -> int:
    """den, f -> num by \\L over axioms."""
    seq = Sequent((f.den, f), f.num)
    return b.add(seq, "\\L", [_ax(b, f.den), _ax(b, f.num)], active=1, splits=(0,))


def _assoc_tree(b: _Builder, goal: Sequent) -> int:
    """One association of a product to another: *L all the way, then *R."""
    lhs, rhs = goal.antecedent[0], goal.succedent
    inner = _splits_tree(b, _flatten(lhs), rhs)
    cur_forms = [lhs]
    steps = []
    while True:
        for i, f in enumerate(cur_forms):
            if isinstance(f, Prod):
                steps.append((list(cur_forms), i))
                cur_forms[i:i + 1] = [f.left, f.right]
                break
        else:
            break
    node = inner
    for forms, i in reversed(steps):
        node = b.add(Sequent(tuple(forms), rhs), "*L", [node], active=i)
    return node


def _flatten(f) -> list:
    if isinstance(f, Prod):
        return _flatten(f.left) + _flatten(f.right)
    return [f]


def _splits_tree(b: _Builder, forms, target) -> int:
    """forms -> target where target is a product association of forms."""
    if len(forms) == 1:
        return _ax(b, forms[0])
    k = len(_flatten(target.left))
    left = _splits_tree(b, forms[:k], target.left)
    right = _splits_tree(b, forms[k:], target.right)
    return b.add(Sequent(tuple(forms), target), "*R", [left, right], splits=(k,))


def _emit_line(b: _Builder, stmt: Implication, by: str, thunks, ref_stmts) -> int:
    lhs, rhs = stmt.lhs, stmt.rhs
    goal = Sequent((lhs,), rhs)
    if by == "id":
        return b.add(goal, "ax")
    if by in ("assoc_r", "assoc_l"):
        return _assoc_tree(b, goal)
    if by == "plus_ax":
        a = rhs.body
        ap = rhs
        ax_a = b.add(Sequent((a,), a), "ax")
        n_a = b.add(Sequent((a,), ap), "+R1", [ax_a])
        # a+, a+ -> a+ with one cycle
        s2 = Sequent((ap, ap), ap)
        ax_a2 = b.add(Sequent((a,), a), "ax")
        ax_ap = b.add(Sequent((ap,), ap), "ax")
        prem1 = b.add(Sequent((a, ap), ap), "+RL", [ax_a2, ax_ap], splits=(1,))
        back = b.add(s2, "backlink")
        ax_a3 = b.add(Sequent((a,), a), "ax")
        inner = b.add(Sequent((a, ap, ap), ap), "+RL", [ax_a3, back], splits=(1,))
        plus_l = b.add(s2, "+L", [prem1, inner], active=0)
        b.nodes[back] = CNode(back, s2, "backlink", (), None, None, plus_l)
        star = b.add(Sequent((Prod(ap, ap),), ap), "*L", [plus_l], active=0)
        return b.add(goal, "vL", [n_a, star], active=0)
    if by == "res_r":
        # from A*B -> C: [A, B] -> A*B by *R, cut, then /R
        p0 = ref_stmts[0]
        aa, bb = p0.lhs.left, p0.lhs.right
        intro = _product_intro(b, [aa, bb])
        cut = b.add(Sequent((aa, bb), p0.rhs), "cut", [intro, thunks[0]()], active=0)
        return b.add(goal, "/R", [cut])
    if by == "res_l":
        p0 = ref_stmts[0]
        aa, bb = p0.lhs.left, p0.lhs.right
        intro = _product_intro(b, [aa, bb])
        cut = b.add(Sequent((aa, bb), p0.rhs), "cut", [intro, thunks[0]()], active=0)
        return b.add(goal, "\\R", [cut])
    if by == "unres_r":
        # from A -> C/B: A, B -> C by cut against (C/B), B -> C
        p0 = ref_stmts[0]
        cb, bb = p0.rhs, p0.rhs.den
        app = _rdiv_app(b, cb)
        cut = b.add(Sequent((p0.lhs, bb), cb.num), "cut", [thunks[0](), app], active=0)
        return b.add(goal, "*L", [cut], active=0)
    if by == "unres_l":
        p0 = ref_stmts[0]
        ac, aa = p0.rhs, p0.rhs.den
        app = _ldiv_app(b, ac)
        cut = b.add(Sequent((aa, p0.lhs), ac.num), "cut", [thunks[0](), app], active=1)
        return b.add(goal, "*L", [cut], active=0)
    if by == "trans":
        return b.add(goal, "cut", [thunks[0](), thunks[1]()], active=0)
    if by == "or_in1":
        return b.add(goal, "vR1", [thunks[0]()])
    if by == "or_in2":
        return b.add(goal, "vR2", [thunks[0]()])
    if by == "or_el":
        return b.add(goal, "vL", [thunks[0](), thunks[1]()], active=0)
    if by == "plus_rule":
        # premise: A | (B*B) -> B; conclusion A+ -> B
        p0 = ref_stmts[0]
        a, bf = p0.lhs.left, p0.rhs

        def aux1() -> int:
            in1 = b.add(Sequent((a,), p0.lhs), "vR1", [b.add(Sequent((a,), a), "ax")])
            return b.add(Sequent((a,), bf), "cut", [in1, thunks[0]()], active=0)

        intro = _product_intro(b, [bf, bf])
        in2 = b.add(Sequent((bf, bf), p0.lhs), "vR2", [intro])
        aux2 = b.add(Sequent((bf, bf), bf), "cut", [in2, thunks[0]()], active=0)
        root_seq = goal
        back = b.add(root_seq, "backlink")
        mid = b.add(Sequent((bf, Plus(a)), bf), "cut", [back, aux2], active=1)
        upper = b.add(Sequent((a, Plus(a)), bf), "cut", [aux1(), mid], active=0)
        plus_l = b.add(root_seq, "+L", [aux1(), upper], active=0)
        b.nodes[back] = CNode(back, root_seq, "backlink", (), None, None, plus_l)
        return plus_l
    raise TranslationError(f"untranslatable justification {by!r}")
