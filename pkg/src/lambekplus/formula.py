"""Types and sequents of the Lambek calculus with positive iteration.

The connective set is: product ``*``, left division ``\\`` (``A \\ B`` reads
"A under B"), right division ``/``, postfix positive iteration ``+`` and
additive disjunction ``|``.  Concrete syntax, precedence loosest to
tightest: ``|``  <  ``\\`` = ``/``  <  ``*``  <  ``+``.  Mixing ``\\`` and
``/`` at the same level requires parentheses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union
import re

__all__ = [
    "Formula", "Var", "Prod", "LDiv", "RDiv", "Plus", "Or",
    "Sequent", "GroupWord", "FormulaError", "UnsupportedConnectiveError",
    "parse_formula", "parse_sequent", "render_formula", "render_sequent",
    "top", "fgi", "count", "negative_mapping", "power", "disjunction_of",
    "subformulas", "primitives", "mirror", "mirror_sequent", "prod_of",
    "has_negative_plus", "plus_free", "or_free", "fresh_primitive",
]


class FormulaError(ValueError):
    """Malformed formula or sequent text."""


class UnsupportedConnectiveError(FormulaError):
    """Operation applied to a connective outside its domain."""


class _Node:
    """Shared behaviour: cached hash, identity-shortcut equality."""

    __slots__ = ()

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        h = getattr(self, "_hash", None)
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return render_formula(self)


@dataclass(frozen=True, eq=False, repr=False)
class Var(_Node):
    name: str

    def _key(self):
        return (self.name,)


@dataclass(frozen=True, eq=False, repr=False)
class Prod(_Node):
    left: "Formula"
    right: "Formula"

    def _key(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class LDiv(_Node):
    """``den \\ num`` -- denominator on the left."""

    den: "Formula"
    num: "Formula"

    def _key(self):
        return (self.den, self.num)


@dataclass(frozen=True, eq=False, repr=False)
class RDiv(_Node):
    """``num / den`` -- denominator on the right."""

    num: "Formula"
    den: "Formula"

    def _key(self):
        return (self.num, self.den)


@dataclass(frozen=True, eq=False, repr=False)
class Plus(_Node):
    body: "Formula"

    def _key(self):
        return (self.body,)


@dataclass(frozen=True, eq=False, repr=False)
class Or(_Node):
    left: "Formula"
    right: "Formula"

    def _key(self):
        return (self.left, self.right)


Formula = Union[Var, Prod, LDiv, RDiv, Plus, Or]


@dataclass(frozen=True, eq=False, repr=False)
class Sequent(_Node):
    """``A1, ..., An -> B`` with the non-empty antecedent built in."""

    antecedent: tuple
    succedent: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(self.antecedent))
        if len(self.antecedent) == 0:
            raise FormulaError("sequent antecedent must be non-empty")

    def _key(self):
        return (self.antecedent, self.succedent)

    def __repr__(self):
        return render_sequent(self)


# ---------------------------------------------------------------------------
# parsing

_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*$")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = re.match(r"[a-z][a-z0-9_]*", text[pos:])
        if m:
            tokens.append((m.group(0), pos))
            pos += len(m.group(0))
            continue
        if text.startswith("->", pos):
            tokens.append(("->", pos))
            pos += 2
            continue
        if text[pos] in "()*+|\\/,":
            tokens.append((text[pos], pos))
            pos += 1
            continue
        raise FormulaError(f"unexpected character {text[pos]!r} at position {pos}")
    return tokens


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok[0]

    def expect(self, tok):
        if self.peek() != tok:
            raise FormulaError(f"expected {tok!r} at position {self.pos()}")
        return self.take()

    def fail(self, msg):
        raise FormulaError(f"{msg} at position {self.pos()}")

    # precedence levels: or < div < prod < plus/atom
    def parse_or(self):
        left = self.parse_div()
        if self.peek() == "|":
            self.take()
            right = self.parse_or()  # right-associative
            return Or(left, right)
        return left

    def parse_div(self):
        items = [self.parse_prod()]
        ops = []
        while self.peek() in ("\\", "/"):
            ops.append(self.take())
            items.append(self.parse_prod())
        if not ops:
            return items[0]
        if all(op == "/" for op in ops):
            out = items[0]
            for rhs in items[1:]:
                out = RDiv(out, rhs)
            return out
        if all(op == "\\" for op in ops):
            out = items[-1]
            for lhs in reversed(items[:-1]):
                out = LDiv(lhs, out)
            return out
        self.fail("mixing \\ and / at the same level requires parentheses")

    def parse_prod(self):
        out = self.parse_postfix()
        while self.peek() == "*":
            self.take()
            out = Prod(out, self.parse_postfix())
        return out

    def parse_postfix(self):
        out = self.parse_atom()
        while self.peek() == "+":
            self.take()
            out = Plus(out)
        return out

    def parse_atom(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            out = self.parse_or()
            self.expect(")")
            return out
        if tok is not None and _IDENT_RE.match(tok):
            self.take()
            return Var(tok)
        self.fail("expected a formula")


def parse_formula(text: str) -> Formula:
    parser = _Parser(_tokenize(text), text)
    out = parser.parse_or()
    if parser.peek() is not None:
        parser.fail(f"trailing input {parser.peek()!r}")
    return out


def parse_sequent(text: str) -> Sequent:
    parser = _Parser(_tokenize(text), text)
    antecedent = [parser.parse_or()]
    while parser.peek() == ",":
        parser.take()
        antecedent.append(parser.parse_or())
    if parser.peek() != "->":
        parser.fail("expected '->'")
    parser.take()
    succedent = parser.parse_or()
    if parser.peek() is not None:
        parser.fail(f"trailing input {parser.peek()!r}")
    return Sequent(tuple(antecedent), succedent)


# ---------------------------------------------------------------------------
# printing

def render_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Plus):
        body = render_formula(f.body)
        if not isinstance(f.body, (Var, Plus)):
            body = f"({body})"
        return body + "+"
    if isinstance(f, Prod):
        left = render_formula(f.left)
        if isinstance(f.left, (Or, LDiv, RDiv)):
            left = f"({left})"
        right = render_formula(f.right)
        if isinstance(f.right, (Or, LDiv, RDiv, Prod)):
            right = f"({right})"
        return f"{left}*{right}"
    if isinstance(f, LDiv):
        den = render_formula(f.den)
        if isinstance(f.den, (Or, LDiv, RDiv)):
            den = f"({den})"
        num = render_formula(f.num)
        if isinstance(f.num, (Or, RDiv)):
            num = f"({num})"
        return f"{den}\\{num}"
    if isinstance(f, RDiv):
        num = render_formula(f.num)
        if isinstance(f.num, (Or, LDiv)):
            num = f"({num})"
        den = render_formula(f.den)
        if isinstance(f.den, (Or, LDiv, RDiv, Prod)):
            den = f"({den})"
        return f"{num}/{den}"
    if isinstance(f, Or):
        left = render_formula(f.left)
        if isinstance(f.left, Or):
            left = f"({left})"
        right = render_formula(f.right)
        return f"{left}|{right}"
    raise TypeError(f"not a formula: {f!r}")


def render_sequent(s: Sequent) -> str:
    return ", ".join(render_formula(f) for f in s.antecedent) + " -> " + render_formula(s.succedent)


# ---------------------------------------------------------------------------
# static analyses

_TOP_CACHE: dict = {}


def top(f: Formula) -> Optional[str]:
    """Head primitive through numerators of both divisions, if any."""
    hit = _TOP_CACHE.get(f, "")
    if hit != "":
        return hit
    g = f
    while True:
        if isinstance(g, Var):
            out = g.name
            break
        if isinstance(g, (LDiv, RDiv)):
            g = g.num
        else:
            out = None
            break
    _TOP_CACHE[f] = out
    return out


class GroupWord(tuple):
    """Reduced word of the free group over primitive names.

    Entries are ``(name, sign)`` with sign +1 or -1; adjacent inverse pairs
    never occur.  The empty tuple is the unit.
    """

    __slots__ = ()

    @staticmethod
    def unit() -> "GroupWord":
        return GroupWord()

    @staticmethod
    def gen(name: str) -> "GroupWord":
        return GroupWord(((name, 1),))

    def inv(self) -> "GroupWord":
        return GroupWord(tuple((n, -s) for (n, s) in reversed(self)))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        left = list(self)
        i = len(other)
        j = 0
        while left and j < i:
            n, s = other[j]
            ln, ls = left[-1]
            if ln == n and ls == -s:
                left.pop()
                j += 1
            else:
                break
        return GroupWord(tuple(left) + tuple(other[j:]))

    def is_unit(self) -> bool:
        return len(self) == 0


_FGI_CACHE: dict = {}


def fgi(f: Formula) -> GroupWord:
    """Free-group interpretation; defined on the +/|-free fragment only."""
    hit = _FGI_CACHE.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Var):
        out = GroupWord.gen(f.name)
    elif isinstance(f, Prod):
        out = fgi(f.left) * fgi(f.right)
    elif isinstance(f, LDiv):
        out = fgi(f.den).inv() * fgi(f.num)
    elif isinstance(f, RDiv):
        out = fgi(f.num) * fgi(f.den).inv()
    else:
        raise UnsupportedConnectiveError(
            f"free-group interpretation undefined for {render_formula(f)}")
    _FGI_CACHE[f] = out
    return out


def count(q: str, f: Formula) -> int:
    """Signed number of occurrences of primitive ``q``; +/|-free only."""
    if isinstance(f, Var):
        return 1 if f.name == q else 0
    if isinstance(f, Prod):
        return count(q, f.left) + count(q, f.right)
    if isinstance(f, LDiv):
        return count(q, f.num) - count(q, f.den)
    if isinstance(f, RDiv):
        return count(q, f.num) - count(q, f.den)
    raise UnsupportedConnectiveError(
        f"primitive count undefined for {render_formula(f)}")


def power(f: Formula, k: int) -> Formula:
    """Right-nested k-fold product of ``f``; k must be >= 1."""
    if k < 1:
        raise ValueError("power requires k >= 1")
    out = f
    for _ in range(k - 1):
        out = Prod(f, out)
    return out


def disjunction_of(parts) -> Formula:
    """Right-nested disjunction of a non-empty list."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = Or(part, out)
    return out


def prod_of(parts) -> Formula:
    """Right-nested product of a non-empty list."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty product")
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = Prod(part, out)
    return out


def _negmap(f: Formula, positive: bool, n: int) -> Formula:
    if isinstance(f, Var):
        return f
    if isinstance(f, Prod):
        return Prod(_negmap(f.left, positive, n), _negmap(f.right, positive, n))
    if isinstance(f, Or):
        return Or(_negmap(f.left, positive, n), _negmap(f.right, positive, n))
    if isinstance(f, LDiv):
        return LDiv(_negmap(f.den, not positive, n), _negmap(f.num, positive, n))
    if isinstance(f, RDiv):
        return RDiv(_negmap(f.num, positive, n), _negmap(f.den, not positive, n))
    if isinstance(f, Plus):
        body = _negmap(f.body, positive, n)
        if positive:
            return Plus(body)
        return disjunction_of([power(body, k) for k in range(1, n + 1)])
    raise TypeError(f"not a formula: {f!r}")


def negative_mapping(s: Sequent, n: int) -> Sequent:
    """Replace each negative ``A+`` by ``A | A^2 | ... | A^n``, innermost first."""
    if n < 1:
        raise ValueError("negative_mapping requires n >= 1")
    antecedent = tuple(_negmap(f, False, n) for f in s.antecedent)
    return Sequent(antecedent, _negmap(s.succedent, True, n))


def _plus_polarities(f: Formula, positive: bool) -> Iterator[bool]:
    if isinstance(f, Var):
        return
    if isinstance(f, Plus):
        yield positive
        yield from _plus_polarities(f.body, positive)
    elif isinstance(f, (Prod, Or)):
        yield from _plus_polarities(f.left, positive)
        yield from _plus_polarities(f.right, positive)
    elif isinstance(f, LDiv):
        yield from _plus_polarities(f.den, not positive)
        yield from _plus_polarities(f.num, positive)
    elif isinstance(f, RDiv):
        yield from _plus_polarities(f.num, positive)
        yield from _plus_polarities(f.den, not positive)


def has_negative_plus(s: Sequent) -> bool:
    for f in s.antecedent:
        if any(not pol for pol in _plus_polarities(f, False)):
            return True
    return any(not pol for pol in _plus_polarities(s.succedent, True))


_PLAIN_CACHE: dict = {}


def _plain(f: Formula) -> bool:
    """No + and no | anywhere (the pure Lambek fragment)."""
    hit = _PLAIN_CACHE.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Var):
        out = True
    elif isinstance(f, (Plus, Or)):
        out = False
    elif isinstance(f, Prod):
        out = _plain(f.left) and _plain(f.right)
    else:
        out = _plain(f.den) and _plain(f.num)
    _PLAIN_CACHE[f] = out
    return out


def plus_free(f: Formula) -> bool:
    if isinstance(f, Var):
        return True
    if isinstance(f, Plus):
        return False
    if isinstance(f, (Prod, Or)):
        return plus_free(f.left) and plus_free(f.right)
    return plus_free(f.den) and plus_free(f.num)


def or_free(f: Formula) -> bool:
    if isinstance(f, Var):
        return True
    if isinstance(f, Or):
        return False
    if isinstance(f, Plus):
        return or_free(f.body)
    if isinstance(f, Prod):
        return or_free(f.left) and or_free(f.right)
    return or_free(f.den) and or_free(f.num)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Var):
        return
    if isinstance(f, Plus):
        yield from subformulas(f.body)
    elif isinstance(f, (Prod, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    else:
        yield from subformulas(f.den)
        yield from subformulas(f.num)


def primitives(f: Formula) -> set:
    return {g.name for g in subformulas(f) if isinstance(g, Var)}


def mirror(f: Formula) -> Formula:
    """Reverse reading order: products flip, the two divisions swap.

    Derivability is invariant under mirroring a sequent (antecedent reversed,
    every formula mirrored), which lets left-handed constructions reuse
    right-handed ones.
    """
    if isinstance(f, Var):
        return f
    if isinstance(f, Prod):
        return Prod(mirror(f.right), mirror(f.left))
    if isinstance(f, LDiv):
        return RDiv(mirror(f.num), mirror(f.den))
    if isinstance(f, RDiv):
        return LDiv(mirror(f.den), mirror(f.num))
    if isinstance(f, Plus):
        return Plus(mirror(f.body))
    if isinstance(f, Or):
        return Or(mirror(f.left), mirror(f.right))
    raise TypeError(f"not a formula: {f!r}")


def mirror_sequent(s: Sequent) -> Sequent:
    return Sequent(tuple(mirror(f) for f in reversed(s.antecedent)), mirror(s.succedent))


def fresh_primitive(base: str, used) -> str:
    """First ``base``, ``base0``, ``base1``, ... not in ``used``."""
    if base not in used:
        return base
    k = 0
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"
