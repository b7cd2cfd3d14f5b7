"""Connective signatures and constructor weights.

A signature lists the propositional connectives available to the formula
grammar, each with a name, an arity and a positive integer weight.  The four
built-in constructors (quantifiers, the membership predicate, the index zero
and the index successor) carry their own weights, all defaulting to one.  The
size of a formula is the total weight of the constructors it is built from;
a De Bruijn index of value v contributes zero_weight + v * succ_weight.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

__all__ = [
    "Connective",
    "Signature",
    "SignatureError",
    "DEFAULT_SIGNATURE",
    "NAND_SIGNATURE",
    "load_signature",
    "parse_signature_json",
]

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_RESERVED = {"in", "forall", "exists"}


class SignatureError(ValueError):
    """Raised for malformed signatures or signature files."""


@dataclass(frozen=True)
class Connective:
    name: str
    arity: int
    weight: int = 1


@dataclass(frozen=True)
class Signature:
    """Immutable description of the connective set and constructor weights."""

    connectives: tuple[Connective, ...]
    quantifier_weight: int = 1
    membership_weight: int = 1
    zero_weight: int = 1
    succ_weight: int = 1
    _by_name: dict[str, Connective] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen: dict[str, Connective] = {}
        for c in self.connectives:
            if not _NAME_RE.match(c.name):
                raise SignatureError(f"invalid connective name {c.name!r}")
            if c.name in _RESERVED:
                raise SignatureError(f"connective name {c.name!r} is reserved")
            if c.name in seen:
                raise SignatureError(f"duplicate connective name {c.name!r}")
            if c.arity < 1:
                raise SignatureError(f"connective {c.name!r} has arity < 1")
            if c.weight < 1:
                raise SignatureError(f"connective {c.name!r} has weight < 1")
            seen[c.name] = c
        for label in ("quantifier", "membership", "zero", "succ"):
            if getattr(self, label + "_weight") < 1:
                raise SignatureError(f"{label}_weight must be >= 1")
        object.__setattr__(self, "_by_name", seen)

    def connective(self, name: str) -> Connective | None:
        return self._by_name.get(name)

    def index_weight(self, value: int) -> int:
        """Weight of the De Bruijn index with the given value."""
        return self.zero_weight + value * self.succ_weight

    @property
    def min_formula_weight(self) -> int:
        """Size of the smallest formula, an atom with two zero indices."""
        return self.membership_weight + 2 * self.zero_weight

    @property
    def admissible_for_asymptotics(self) -> bool:
        """True iff some connective has arity >= 2.

        Signatures with only unary connectives yield a generating function
        that is linear in itself, hence rational, with a polar rather than a
        square-root singularity; the asymptotics module rejects them.
        """
        return any(c.arity >= 2 for c in self.connectives)

    def to_json_dict(self) -> dict:
        return {
            "connectives": [
                {"name": c.name, "arity": c.arity, "weight": c.weight}
                for c in self.connectives
            ],
            "quantifier_weight": self.quantifier_weight,
            "membership_weight": self.membership_weight,
            "zero_weight": self.zero_weight,
            "succ_weight": self.succ_weight,
        }

    def digest(self) -> str:
        """Short stable hash of the signature, used in sample dump headers."""
        blob = json.dumps(self.to_json_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


#: The signature used throughout the documentation and tests.
DEFAULT_SIGNATURE = Signature(
    (Connective("and", 2), Connective("or", 2), Connective("not", 1))
)

#: Single-connective alternative, handy for robustness checks.
NAND_SIGNATURE = Signature((Connective("nand", 2),))


def parse_signature_json(text: str) -> Signature:
    """Build a Signature from its JSON description.

    The document must contain a "connectives" array of objects with "name"
    and "arity" fields and an optional "weight"; the four weight overrides
    ("quantifier_weight", "membership_weight", "zero_weight", "succ_weight")
    are optional top-level keys.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SignatureError(f"signature file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SignatureError("signature document must be a JSON object")
    raw = doc.get("connectives")
    if not isinstance(raw, list) or not raw:
        raise SignatureError('signature needs a non-empty "connectives" array')
    conns = []
    for entry in raw:
        if not isinstance(entry, dict) or "name" not in entry or "arity" not in entry:
            raise SignatureError(f"malformed connective entry: {entry!r}")
        for key in ("arity", "weight"):
            if key in entry and not isinstance(entry[key], int):
                raise SignatureError(f"connective {key} must be an integer: {entry!r}")
        conns.append(
            Connective(str(entry["name"]), entry["arity"], entry.get("weight", 1))
        )
    weights = {}
    for key in (
        "quantifier_weight",
        "membership_weight",
        "zero_weight",
        "succ_weight",
    ):
        if key in doc:
            if not isinstance(doc[key], int):
                raise SignatureError(f"{key} must be an integer")
            weights[key] = doc[key]
    unknown = set(doc) - {"connectives"} - set(weights)
    if unknown:
        raise SignatureError(f"unknown signature keys: {sorted(unknown)}")
    return Signature(tuple(conns), **weights)


def load_signature(path: str) -> Signature:
    """Read a signature from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SignatureError(f"cannot read signature file {path!r}: {exc}") from exc
    return parse_signature_json(text)
