"""Formula AST, textual syntax, size and openness semantics, templates.

Formulae of the first-order language with a single membership predicate are
represented with De Bruijn indices: an index of value v refers to the variable
bound by the (v+1)st quantifier on the path to the root, and occurs free if
fewer quantifiers enclose it.  The concrete syntax is an s-expression per
node:

    formula  := atom | "(" "forall" formula ")" | "(" "exists" formula ")"
              | "(" name formula+ ")"
    atom     := "(" "in" nat nat ")"
    nat      := decimal digits

The classic empty-set axiom reads "(exists (forall (not (in 0 1))))": index 0
is bound by the inner universal quantifier, index 1 by the outer existential
one.  Templates extend the grammar with a single hole token "_" standing for
a missing subformula.

A formula is m-open when prefixing it with m quantifiers produces a sentence;
sentences are exactly the 0-open formulae.  Openness and size drive the whole
counting machinery, so both are defined here next to the AST.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .signature import Signature

__all__ = [
    "Atom",
    "Forall",
    "Exists",
    "Conn",
    "Hole",
    "Formula",
    "Template",
    "ParseError",
    "InvalidTemplateError",
    "parse_formula",
    "parse_template",
    "render_formula",
    "size",
    "openness",
    "is_m_open",
    "is_sentence",
    "permissiveness",
    "substitute",
    "iter_formulas",
    "enumerate_formulas",
    "ENUMERATION_GUARD",
]


class ParseError(ValueError):
    """Syntax error with a 0-based character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InvalidTemplateError(ValueError):
    """The template skeleton is malformed or has free indices of its own."""


@dataclass(frozen=True)
class Atom:
    """Membership atom; lhs and rhs are De Bruijn index values."""

    lhs: int
    rhs: int


@dataclass(frozen=True)
class Forall:
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    body: "Formula"


@dataclass(frozen=True)
class Conn:
    name: str
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Hole:
    """Placeholder leaf; only valid inside a template skeleton."""


Formula = Union[Atom, Forall, Exists, Conn]


# ---------------------------------------------------------------------------
# Parsing and rendering
# ---------------------------------------------------------------------------

def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            word = text[i:j]
            kind = "nat" if word.isdigit() else "sym"
            tokens.append((kind, word, i))
            i = j
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature, allow_hole: bool):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sig = sig
        self.allow_hole = allow_hole
        self.end = len(text)

    def _peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return ("eof", "", self.end)

    def _next(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def _expect(self, kind: str, what: str):
        tok = self._next()
        if tok[0] != kind:
            raise ParseError(f"expected {what}, got {tok[1]!r}", tok[2])
        return tok

    def _nat(self) -> int:
        kind, word, at = self._next()
        if kind != "nat":
            raise ParseError(f"expected an index value, got {word!r}", at)
        return int(word)

    def formula(self):
        kind, word, at = self._next()
        if kind == "sym" and word == "_":
            if not self.allow_hole:
                raise ParseError("hole '_' is only allowed in templates", at)
            return Hole()
        if kind != "(":
            raise ParseError(f"expected '(', got {word!r}", at)
        kind, head, head_at = self._next()
        if kind != "sym":
            raise ParseError(f"expected an operator name, got {head!r}", head_at)
        if head == "in":
            lhs = self._nat()
            rhs = self._nat()
            self._expect(")", "')'")
            return Atom(lhs, rhs)
        if head in ("forall", "exists"):
            body = self.formula()
            self._expect(")", "')'")
            return Forall(body) if head == "forall" else Exists(body)
        conn = self.sig.connective(head)
        if conn is None:
            raise ParseError(f"unknown connective {head!r}", head_at)
        children = []
        while self._peek()[0] not in (")", "eof"):
            children.append(self.formula())
        self._expect(")", "')'")
        if len(children) != conn.arity:
            raise ParseError(
                f"connective {head!r} expects {conn.arity} arguments, got "
                f"{len(children)}",
                head_at,
            )
        return Conn(head, tuple(children))

    def parse_single(self):
        node = self.formula()
        tok = self._peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return node


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse the s-expression syntax into a Formula.

    Raises ParseError (with a character position) on malformed input,
    unknown connectives and arity mismatches.
    """
    return _Parser(text, sig, allow_hole=False).parse_single()


def parse_template(text: str, sig: Signature) -> "Template":
    """Parse a template: a formula with exactly one hole token "_"."""
    skeleton = _Parser(text, sig, allow_hole=True).parse_single()
    return Template(skeleton)


def render_formula(phi: Formula | Hole) -> str:
    """Inverse of parse_formula; holes render as "_"."""
    if isinstance(phi, Atom):
        return f"(in {phi.lhs} {phi.rhs})"
    if isinstance(phi, Forall):
        return f"(forall {render_formula(phi.body)})"
    if isinstance(phi, Exists):
        return f"(exists {render_formula(phi.body)})"
    if isinstance(phi, Conn):
        parts = " ".join(render_formula(c) for c in phi.children)
        return f"({phi.name} {parts})"
    if isinstance(phi, Hole):
        return "_"
    raise TypeError(f"not a formula node: {phi!r}")


# ---------------------------------------------------------------------------
# Size and openness
# ---------------------------------------------------------------------------

def size(phi: Formula | Hole, sig: Signature) -> int:
    """Total constructor weight; a hole weighs zero.

    With unit weights the empty-set axiom has size 7: two quantifiers, one
    negation, one membership predicate, the index 0 and the index 1 encoded
    in unary (two constructors).
    """
    if isinstance(phi, Atom):
        return (
            sig.membership_weight
            + sig.index_weight(phi.lhs)
            + sig.index_weight(phi.rhs)
        )
    if isinstance(phi, (Forall, Exists)):
        return sig.quantifier_weight + size(phi.body, sig)
    if isinstance(phi, Conn):
        conn = sig.connective(phi.name)
        if conn is None:
            raise ValueError(f"connective {phi.name!r} not in signature")
        return conn.weight + sum(size(c, sig) for c in phi.children)
    if isinstance(phi, Hole):
        return 0
    raise TypeError(f"not a formula node: {phi!r}")


def openness(phi: Formula) -> int:
    """Minimal m such that m head quantifiers close the formula.

    An index of value v at quantifier depth q needs max(v - q + 1, 0) extra
    binders; the openness is the maximum over all occurrences.  Sentences
    return 0.
    """
    return _openness(phi, 0)


def _openness(phi, depth: int) -> int:
    if isinstance(phi, Atom):
        return max(phi.lhs - depth + 1, phi.rhs - depth + 1, 0)
    if isinstance(phi, (Forall, Exists)):
        return _openness(phi.body, depth + 1)
    if isinstance(phi, Conn):
        return max(_openness(c, depth) for c in phi.children)
    if isinstance(phi, Hole):
        return 0
    raise TypeError(f"not a formula node: {phi!r}")


def is_m_open(phi: Formula, m: int) -> bool:
    """True iff the formula is m-open; m-open implies (m+1)-open."""
    return openness(phi) <= m


def is_sentence(phi: Formula) -> bool:
    return openness(phi) == 0


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------

def _locate_holes(phi, depth: int) -> list[int]:
    """Quantifier depths of every hole in the tree."""
    if isinstance(phi, Hole):
        return [depth]
    if isinstance(phi, Atom):
        return []
    if isinstance(phi, (Forall, Exists)):
        return _locate_holes(phi.body, depth + 1)
    if isinstance(phi, Conn):
        out = []
        for c in phi.children:
            out.extend(_locate_holes(c, depth))
        return out
    raise TypeError(f"not a formula node: {phi!r}")


@dataclass(frozen=True)
class Template:
    """A formula with a single hole at a position where an atom could sit.

    The hole depth (number of quantifiers strictly above the hole) bounds the
    openness of formulae the template can close over; see permissiveness().
    """

    skeleton: Formula | Hole

    def __post_init__(self):
        depths = _locate_holes(self.skeleton, 0)
        if len(depths) != 1:
            raise InvalidTemplateError(
                f"template must contain exactly one hole, found {len(depths)}"
            )
        object.__setattr__(self, "_hole_depth", depths[0])

    @property
    def hole_depth(self) -> int:
        return self._hole_depth

    def size(self, sig: Signature) -> int:
        """Template size d: total weight with the hole weighing zero."""
        return size(self.skeleton, sig)

    def render(self) -> str:
        return render_formula(self.skeleton)


def permissiveness(template: Template) -> int:
    """Largest m such that filling the hole with any m-open formula yields a
    sentence.

    Equals the hole depth, provided the skeleton has no free indices of its
    own (otherwise no substitution can produce a sentence and the template is
    rejected).  A q-permissive template is also k-permissive for every k <= q.
    """
    if _openness(template.skeleton, 0) > 0:
        raise InvalidTemplateError(
            "template skeleton has free indices outside the hole"
        )
    return template.hole_depth


def substitute(template: Template, phi: Formula) -> Formula:
    """Graft phi into the hole.  No index shifting takes place: free indices
    of phi are captured by the quantifiers above the hole, which is exactly
    what makes an m-permissive template close m-open formulae.
    """
    return _graft(template.skeleton, phi)


def _graft(node, phi):
    if isinstance(node, Hole):
        return phi
    if isinstance(node, Atom):
        return node
    if isinstance(node, Forall):
        return Forall(_graft(node.body, phi))
    if isinstance(node, Exists):
        return Exists(_graft(node.body, phi))
    if isinstance(node, Conn):
        return Conn(node.name, tuple(_graft(c, phi) for c in node.children))
    raise TypeError(f"not a formula node: {node!r}")


# ---------------------------------------------------------------------------
# Brute-force enumeration (the test oracle)
# ---------------------------------------------------------------------------

#: enumerate_formulas refuses sizes beyond this limit; the formula count
#: grows roughly like 4^n for the default signature.
ENUMERATION_GUARD = 16


def iter_formulas(n: int, m: int | None, sig: Signature) -> Iterator[Formula]:
    """Yield every m-open formula of size exactly n (m=None: no constraint).

    The order is deterministic and lexicographic over (node kind, children):
    atoms ordered by index pair, then forall, then exists, then connectives
    in signature order with child size compositions ascending on the left.
    """
    yield from _gen(n, m, sig)


def _gen(n: int, m: int | None, sig: Signature) -> Iterator[Formula]:
    if n < sig.min_formula_weight:
        return
    # atoms: membership + two indices, both of value < m when m is finite
    rest = n - sig.membership_weight - 2 * sig.zero_weight
    tv, rem = divmod(rest, sig.succ_weight)
    if rest >= 0 and rem == 0:
        for lhs in range(tv + 1):
            rhs = tv - lhs
            if m is None or (lhs < m and rhs < m):
                yield Atom(lhs, rhs)
    # quantifiers: body one level more open
    body_size = n - sig.quantifier_weight
    inner = None if m is None else m + 1
    for body in _gen(body_size, inner, sig):
        yield Forall(body)
    for body in _gen(body_size, inner, sig):
        yield Exists(body)
    # connectives, children at the same openness level
    for conn in sig.connectives:
        budget = n - conn.weight
        for combo in _children(budget, conn.arity, m, sig):
            yield Conn(conn.name, combo)


def _children(budget: int, k: int, m: int | None, sig: Signature):
    if k == 1:
        for phi in _gen(budget, m, sig):
            yield (phi,)
        return
    lo = sig.min_formula_weight
    for first_size in range(lo, budget - lo * (k - 1) + 1):
        for first in _gen(first_size, m, sig):
            for rest in _children(budget - first_size, k - 1, m, sig):
                yield (first,) + rest


def enumerate_formulas(n: int, m: int | None, sig: Signature) -> list[Formula]:
    """Materialized iter_formulas with a size guard (default 16)."""
    if n > ENUMERATION_GUARD:
        raise ValueError(
            f"enumeration size {n} exceeds the guard limit {ENUMERATION_GUARD}"
        )
    return list(iter_formulas(n, m, sig))
