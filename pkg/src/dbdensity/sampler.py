"""Uniform exact-size random generation of m-open formulae.

The recursive method inverts the counting recurrences: a production is chosen
with probability proportional to its contribution to c_m[n], and subtree
sizes of k-ary connectives are drawn by inverting cumulative big-integer
convolution weights (rejection-free, no floating-point bias).  Every sample
of class (n, m) is therefore exactly uniform over the c_m[n] candidates.

Streams are driven by Python's Mersenne Twister (MT19937), whose randrange
is unbiased for arbitrary-precision bounds; the algorithm identifier and the
seed are recorded in sample dumps so sequences can be reproduced.  Distinct
sampler states (distinct seeds) are required for concurrent use.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from typing import IO

from .counting import CountTable, atom_count
from .formulas import (
    Atom,
    Conn,
    Exists,
    Forall,
    Formula,
    Hole,
    Template,
    openness,
    permissiveness,
    render_formula,
)

__all__ = [
    "SamplerState",
    "EmptyClassError",
    "PRNG_ALGORITHM",
    "sample_uniform",
    "matches_template",
    "estimate_density_mc",
    "write_samples",
]

PRNG_ALGORITHM = "mt19937"


class EmptyClassError(ValueError):
    """No formula exists for the requested (size, openness) class."""


class SamplerState:
    """Frozen count table plus a seeded PRNG stream and weight caches.

    Identical (seed, n, m, signature) always reproduce the same samples.
    The table should cover sizes up to the sample size with all rows
    retained (count_m_open(n, sig)).
    """

    def __init__(self, table: CountTable, seed: int):
        self.table = table
        self.seed = seed
        self._rng = random.Random(seed)
        # (row_key, k, budget) -> (lo, cumulative weights) for subsize picks
        self._cums: dict[tuple, tuple[int, list[int]]] = {}
        # (row_key, k) -> k-fold convolution power of the row, filled lazily
        self._powers: dict[tuple, list[int]] = {}
        self._filled: dict[tuple, int] = {}

    def _row_key(self, m: int | None, upto: int):
        """Rows with m >= upto agree with the unconstrained row on every
        index we will touch, so they share its caches."""
        if m is None or m >= upto:
            return None
        return m

    def _row(self, m: int | None):
        return self.table.row(m)

    def _power(self, m: int | None, k: int, upto: int) -> list[int]:
        """k-fold self-convolution of row m, valid through index upto."""
        key = (self._row_key(m, upto), k)
        m = key[0]
        row = self._row(m)
        if k == 1:
            return row
        if key not in self._powers:
            self._powers[key] = [0] * (self.table.size_limit + 1)
            self._filled[key] = -1
        arr = self._powers[key]
        if self._filled[key] >= upto:
            return arr
        lower = self._power(m, k - 1, upto - 1)
        w0 = self.table.signature.min_formula_weight
        for s in range(self._filled[key] + 1, upto + 1):
            acc = 0
            for i in range(w0 * (k - 1), s - w0 + 1):
                acc += lower[i] * row[s - i]
            arr[s] = acc
        self._filled[key] = upto
        return arr

    def _pick_child_size(self, m: int | None, k: int, budget: int) -> int:
        """Size of the first of k children whose sizes sum to budget,
        weighted by count(first) * (k-1 fold convolution)(rest)."""
        w0 = self.table.signature.min_formula_weight
        lo, hi = w0, budget - w0 * (k - 1)
        if k == 1:
            return budget
        key = (self._row_key(m, budget), k, budget)
        cached = self._cums.get(key)
        if cached is None:
            row = self._row(key[0])
            rest = self._power(key[0], k - 1, budget - w0)
            cums: list[int] = []
            acc = 0
            for n1 in range(lo, hi + 1):
                acc += row[n1] * rest[budget - n1]
                cums.append(acc)
            cached = (lo, cums)
            self._cums[key] = cached
        lo, cums = cached
        r = self._rng.randrange(cums[-1])
        return lo + bisect_right(cums, r)


def _sample_atom(n: int, m: int | None, state: SamplerState) -> Atom:
    sig = state.table.signature
    t = (n - sig.membership_weight - 2 * sig.zero_weight) // sig.succ_weight
    if m is None:
        lo, hi = 0, t
    else:
        lo, hi = max(0, t - (m - 1)), min(t, m - 1)
    lhs = lo + state._rng.randrange(hi - lo + 1)
    return Atom(lhs, t - lhs)


def sample_uniform(n: int, m: int | None, state: SamplerState) -> Formula:
    """Draw one formula uniformly among all m-open formulae of size n."""
    table = state.table
    total = table.count(n, m)
    if total == 0:
        raise EmptyClassError(f"no {m}-open formulae of size {n}")
    sig = table.signature
    r = state._rng.randrange(total)
    r -= atom_count(n, m, sig)
    if r < 0:
        return _sample_atom(n, m, state)
    inner = None if m is None else m + 1
    body_size = n - sig.quantifier_weight
    quant_weight = table.count(body_size, inner) if body_size >= 0 else 0
    r -= quant_weight
    if r < 0:
        return Forall(sample_uniform(body_size, inner, state))
    r -= quant_weight
    if r < 0:
        return Exists(sample_uniform(body_size, inner, state))
    for conn in sig.connectives:
        budget = n - conn.weight
        if budget < sig.min_formula_weight * conn.arity:
            continue
        weight = state._power(m, conn.arity, budget)[budget]
        r -= weight
        if r < 0:
            children = []
            remaining = budget
            for j in range(conn.arity, 1, -1):
                n1 = state._pick_child_size(m, j, remaining)
                children.append(sample_uniform(n1, m, state))
                remaining -= n1
            children.append(sample_uniform(remaining, m, state))
            return Conn(conn.name, tuple(children))
    raise AssertionError("production weights did not sum to the class count")


def matches_template(phi: Formula, template: Template) -> bool:
    """True iff phi arises by filling the template hole with a formula of
    openness at most the template permissiveness."""
    m = permissiveness(template)
    return _match(template.skeleton, phi, m)


def _match(node, phi, m: int) -> bool:
    if isinstance(node, Hole):
        return openness(phi) <= m
    if isinstance(node, Atom):
        return node == phi
    if isinstance(node, Forall):
        return isinstance(phi, Forall) and _match(node.body, phi.body, m)
    if isinstance(node, Exists):
        return isinstance(phi, Exists) and _match(node.body, phi.body, m)
    if isinstance(node, Conn):
        return (
            isinstance(phi, Conn)
            and phi.name == node.name
            and all(_match(c, p, m) for c, p in zip(node.children, phi.children))
        )
    raise TypeError(f"not a formula node: {node!r}")


def estimate_density_mc(
    template: Template, n: int, trials: int, state: SamplerState
) -> tuple[float, float]:
    """Monte-Carlo density of the template class among size-n sentences.

    Returns (fraction, binomial standard error).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if state.table.count(n, 0) == 0:
        raise EmptyClassError(f"no sentences of size {n}")
    hits = 0
    for _ in range(trials):
        if matches_template(sample_uniform(n, 0, state), template):
            hits += 1
    fraction = hits / trials
    stderr = math.sqrt(fraction * (1.0 - fraction) / trials)
    return fraction, stderr


def write_samples(
    out: IO[str], state: SamplerState, n: int, m: int | None, count: int
) -> None:
    """Dump rendered samples, one per line, under an audit header."""
    m_label = "inf" if m is None else str(m)
    out.write(
        f"# seed={state.seed} n={n} m={m_label} algorithm={PRNG_ALGORITHM} "
        f"signature={state.table.signature.digest()}\n"
    )
    for _ in range(count):
        out.write(render_formula(sample_uniform(n, m, state)) + "\n")
