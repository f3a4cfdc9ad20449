"""Common upper bounds ("joins") for types with equal free-group value.

The grammar compiler needs joins for the interleaved product families the
disjunction-substitute construction generates: for members A1..An and the
unit separator u = t/t, the suffix family

    s_i  =  u * A_i * u * A_{i+1} * ... * A_n * u        (i = 1..n)

and the prefix family

    p_i  =  u * A_1 * u * A_2 * ... * A_i * u            (i = 1..n).

Members are expected to look like ``r/(D\\r)`` (anything else is raised to
that shape first), with D a product of fireable factors: units ``q/q`` or
inner divisions ``w/((q/q)*w)``.

Suffix join: ``(t/(t\\t)) / T`` with a converter tape ``T``.  Family member
s_i consumes a prefix of the tape by firing its denominator slot and the
leftover converters discharge as a chain of axiom steps; the innermost
member's denominator may be opaque because its eater is used on every
path.

Prefix join: a nested consumer chain ``V_n`` with ``V_1`` the literal
product and ``V_i = t / (seed * (convs_i * ((r\\t) * ((V_{i-1}*t)\\t))))``;
the head member fires through its converter zone and the rest of the
product is swallowed whole by the ``(V_{i-1}*t)\\t`` consumer.

Every result is verified sequent-by-sequent with the exact prover before
being returned; failures raise ``JoinError`` naming the first bad goal.
"""

from __future__ import annotations

from typing import Optional

from .formula import (
    Formula, LDiv, Prod, RDiv, Sequent, Var, fgi,
    prod_of, primitives, render_formula, render_sequent, fresh_primitive,
)
from .prover import derivable

__all__ = ["JoinError", "join", "suffix_family_join", "prefix_family_join",
           "clear_join_cache"]


class JoinError(ValueError):
    pass


def _flat(f) -> list:
    if isinstance(f, Prod):
        return _flat(f.left) + _flat(f.right)
    return [f]


def _unit(q: str) -> Formula:
    return RDiv(Var(q), Var(q))


def _classify_factor(f: Formula):
    """("unit", q) or ("h", w, q) for fireable factors, else ("opaque", f)."""
    if isinstance(f, RDiv) and isinstance(f.num, Var) and f.num == f.den:
        return ("unit", f.num.name)
    if (isinstance(f, RDiv) and isinstance(f.num, Var)
            and isinstance(f.den, Prod) and f.den.right == f.num):
        inner = f.den.left
        if isinstance(inner, RDiv) and isinstance(inner.num, Var) \
                and inner.num == inner.den:
            return ("h", f.num.name, inner.num.name)
    return ("opaque", f)


def _member_specs(m: Formula, r: Var) -> Optional[list]:
    """Factor specs of D when m is ``r/(D\\r)``."""
    if isinstance(m, RDiv) and m.num == r and isinstance(m.den, LDiv) \
            and m.den.num == r:
        return [_classify_factor(f) for f in _flat(m.den.den)]
    return None


def _zone_converters(specs, t: Var, r: Var) -> list:
    """Converters turning ``D-seq, t`` into r by firing each factor.

    Factors fire right to left; a unit q/q consumes the carrier through a
    ``x\\q`` step, an inner division w/((q/q)*w) consumes the carrier into
    its q/q slot, takes a seeded t for its w slot, and routes its result
    through q so that the unused-residue path converges.
    """
    out = []
    carrier = t
    for spec in reversed(specs):
        if spec[0] == "unit":
            q = Var(spec[1])
            out.append(LDiv(carrier, q))
            carrier = q
        elif spec[0] == "h":
            _, w, qn = spec
            wv, q = Var(w), Var(qn)
            out.append(LDiv(carrier, _unit(qn)))
            out.append(t)                        # seed for the w slot
            out.append(LDiv(t, wv))
            out.append(LDiv(wv, q))
            carrier = q
        else:
            raise JoinError(
                f"cannot fire opaque denominator factor {render_formula(spec[1])}")
    out.append(LDiv(carrier, r))
    return out


def _raise_members(members, r: Var):
    """Bring every member to the r/(D\\r) shape, recording liftings."""
    specs, lifted = [], []
    for m in members:
        spec = _member_specs(m, r)
        if spec is None:
            lifted.append(RDiv(r, LDiv(m, r)))
            specs.append([_classify_factor(m)])
        else:
            lifted.append(m)
            specs.append(spec)
    return specs, lifted


def _verify(members, lifted, goals):
    for orig, lift in zip(members, lifted):
        if orig != lift and not derivable(Sequent((orig,), lift)):
            raise JoinError(f"member raising failed for {render_formula(orig)}")
    for seq in goals:
        if not derivable(seq):
            raise JoinError("candidate join failed verification on "
                            + render_sequent(seq))


def _suffix_seq(members, sep, target) -> list:
    out = []
    for i in range(len(members)):
        forms = [sep]
        for m in members[i:]:
            forms.extend([m, sep])
        out.append(Sequent(tuple(forms), target))
    return out


def _prefix_seq(members, sep, target) -> list:
    out = []
    for i in range(1, len(members) + 1):
        forms = [sep]
        for m in members[:i]:
            forms.extend([m, sep])
        out.append(Sequent(tuple(forms), target))
    return out


def _build_suffix(members, tname: str, rname: str) -> Formula:
    t, r = Var(tname), Var(rname)
    sep = _unit(tname)
    if len(members) == 1:
        return prod_of([sep, members[0], sep])
    specs, lifted = _raise_members(members, r)
    for idx, spec in enumerate(specs[:-1]):
        if any(s[0] == "opaque" for s in spec):
            raise JoinError(
                "an opaque member is only supported in the innermost slot; "
                f"found {render_formula(members[idx])} at position {idx}")
    tape = []
    dlast = prod_of([_render_spec(s) for s in specs[-1]])
    tape.append(LDiv(sep, LDiv(dlast, r)))       # always-used innermost eater
    tape.append(LDiv(r, t))
    for i in range(len(members) - 2, -1, -1):
        tape.extend(_zone_converters(specs[i], t, r))
        tape.append(LDiv(r, t))
    candidate = RDiv(RDiv(t, LDiv(t, t)), prod_of(tape))
    _verify(members, lifted, _suffix_seq(lifted, sep, candidate))
    if any(m != l for m, l in zip(members, lifted)):
        _verify(members, lifted, _suffix_seq(members, sep, candidate))
    return candidate


def _render_spec(spec) -> Formula:
    if spec[0] == "unit":
        return _unit(spec[1])
    if spec[0] == "h":
        _, w, q = spec
        return RDiv(Var(w), Prod(_unit(q), Var(w)))
    return spec[1]


def _build_prefix(members, tname: str, rname: str) -> Formula:
    t, r = Var(tname), Var(rname)
    sep = _unit(tname)
    if len(members) == 1:
        return prod_of([sep, members[0], sep])
    specs, lifted = _raise_members(members, r)
    for idx, spec in enumerate(specs[1:], start=1):
        if any(s[0] == "opaque" for s in spec):
            raise JoinError(
                "an opaque member is only supported in the head slot; "
                f"found {render_formula(members[idx])} at position {idx}")
    level = prod_of([sep, lifted[0], sep])
    for i in range(1, len(members)):
        body = [t] + _zone_converters(specs[i], t, r) \
            + [LDiv(r, t), LDiv(Prod(level, t), t)]
        level = RDiv(t, prod_of(body))
    _verify(members, lifted, _prefix_seq(lifted, sep, level))
    if any(m != l for m, l in zip(members, lifted)):
        _verify(members, lifted, _prefix_seq(members, sep, level))
    return level


def _fresh_r(members, tname) -> str:
    for m in members:
        if isinstance(m, RDiv) and isinstance(m.num, Var) \
                and isinstance(m.den, LDiv) and m.den.num == m.num \
                and m.num.name != tname:
            return m.num.name      # members carry their own result primitive
    used = set()
    for m in members:
        used |= primitives(m)
    return fresh_primitive("r", used | {tname})


_CACHE: dict = {}


def clear_join_cache():
    _CACHE.clear()


def suffix_family_join(members, tname: str, rname: Optional[str] = None) -> Formula:
    members = tuple(members)
    rname = rname or _fresh_r(members, tname)
    key = ("suf", members, tname, rname)
    if key not in _CACHE:
        _CACHE[key] = _build_suffix(list(members), tname, rname)
    return _CACHE[key]


def prefix_family_join(members, tname: str, rname: Optional[str] = None) -> Formula:
    members = tuple(members)
    rname = rname or _fresh_r(members, tname)
    key = ("pre", members, tname, rname)
    if key not in _CACHE:
        _CACHE[key] = _build_prefix(list(members), tname, rname)
    return _CACHE[key]


def _match_interleaved(ts):
    """Recognise a suffix or prefix family among plain product inputs."""
    seqs = [_flat(f) for f in ts]
    longest = max(seqs, key=len)
    sep = longest[0]
    if not (isinstance(sep, RDiv) and isinstance(sep.num, Var) and sep.num == sep.den):
        return None

    def split(seq):
        if len(seq) < 3 or len(seq) % 2 == 0:
            return None
        if any(seq[j] != sep for j in range(0, len(seq), 2)):
            return None
        return [seq[j] for j in range(1, len(seq), 2)]

    tables = [split(s) for s in seqs]
    if any(tb is None for tb in tables):
        return None
    full = max(tables, key=len)
    n = len(full)
    if sorted(len(tb) for tb in tables) != list(range(1, n + 1)):
        return None
    by_len = {len(tb): tb for tb in tables}
    if all(by_len[k] == full[n - k:] for k in by_len):
        return ("suf", full, sep.num.name)
    if all(by_len[k] == full[:k] for k in by_len):
        return ("pre", full, sep.num.name)
    return None


def join(ts) -> Formula:
    """A prover-verified common upper bound of the given types.

    All inputs must be iteration- and disjunction-free with pairwise equal
    free-group interpretation; raises JoinError when no witness is found.
    """
    ts = list(ts)
    if not ts:
        raise ValueError("join of an empty list")
    base = fgi(ts[0])
    for f in ts[1:]:
        if fgi(f) != base:
            raise JoinError(f"free-group mismatch: {render_formula(ts[0])} "
                            f"vs {render_formula(f)}")
    uniq = []
    for f in ts:
        if f not in uniq:
            uniq.append(f)
    if len(uniq) == 1:
        return uniq[0]
    for cand in uniq:
        if all(f == cand or derivable(Sequent((f,), cand)) for f in uniq):
            return cand
    matched = _match_interleaved(uniq)
    if matched is not None:
        kind, members, tname = matched
        builder = suffix_family_join if kind == "suf" else prefix_family_join
        return builder(members, tname)
    raise JoinError("no join witness found for "
                    + ", ".join(render_formula(f) for f in uniq))
