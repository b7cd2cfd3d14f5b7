"""Exact coefficient extraction for the formula counting series.

The number a_n of arbitrary formulae of size n satisfies a convolution
recurrence read off the grammar: an atom of size n contributes one count per
admissible index pair, each of the two quantifiers contributes the count one
quantifier weight below, and a k-ary connective contributes the k-fold
convolution of the sequence with itself shifted by the connective weight.

m-open formulae obey the same recurrence except that atoms may only use the
m smallest indices and the quantifier term refers to the (m+1)-open row, so
the rows form a chain solved by descending m.  Every size-n formula is n-open
(a free index of value v needs an atom of size at least v + 3 under unit
weights), hence rows with m >= n coincide with the unconstrained row; the
chain therefore starts from an unconstrained-row prefix and each step only
needs one quantifier weight more than the previous row retains.

All counts are exact big integers (gmpy2.mpz during the DP); the dominant
growth is roughly 3.96^n for the default signature, which overflows 64-bit
words near n = 32.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

from gmpy2 import mpz

from .signature import Signature

__all__ = [
    "CountTable",
    "TableTooSmallError",
    "count_infinity",
    "count_m_open",
    "atom_count",
    "atom_kernel_gap",
]

_ZERO = mpz(0)


class TableTooSmallError(LookupError):
    """A requested (m, n) cell was not computed for this table."""


def atom_count(n: int, m: int | None, sig: Signature) -> int:
    """Number of membership atoms of size n with both index values < m.

    m=None drops the index restriction.  With unit weights the unconstrained
    count is n - 2 for n >= 3.
    """
    rest = n - sig.membership_weight - 2 * sig.zero_weight
    if rest < 0:
        return 0
    t, rem = divmod(rest, sig.succ_weight)
    if rem != 0:
        return 0
    if m is None:
        return t + 1
    if m <= 0:
        return 0
    lo = max(0, t - (m - 1))
    hi = min(t, m - 1)
    return hi - lo + 1 if hi >= lo else 0


def atom_kernel_gap(n: int, m: int, sig: Signature) -> int:
    """Atoms of size n excluded by the index restriction to values < m.

    Under unit weights the gap is coefficientwise bounded by the series
    2 z^(3+m) / (1-z)^2, i.e. by 2 * max(0, n - m - 2), which witnesses the
    exponential convergence of the m-open rows to the unconstrained row.
    """
    return atom_count(n, None, sig) - atom_count(n, m, sig)


class _ConnectiveTerms:
    """Connectives grouped by (arity, weight) with multiplicities, plus the
    partial power arrays of a row needed for k-fold convolutions."""

    def __init__(self, sig: Signature, row: list, limit: int):
        self.row = row
        self.limit = limit
        self.min_size = sig.min_formula_weight
        groups: dict[tuple[int, int], int] = {}
        for c in sig.connectives:
            key = (c.arity, c.weight)
            groups[key] = groups.get(key, 0) + 1
        self.groups = sorted(groups.items())
        max_arity = max((c.arity for c in sig.connectives), default=1)
        # powers[k] is the k-fold self-convolution of row, filled lazily;
        # powers[1] aliases the row itself.
        self.powers: dict[int, list] = {1: row}
        self.filled = {1: limit}
        for k in range(2, max_arity + 1):
            self.powers[k] = [_ZERO] * (limit + 1)
            self.filled[k] = -1

    def _fill(self, k: int, upto: int):
        if k > 2:
            self._fill(k - 1, upto - self.min_size)
        row = self.row
        prev = self.powers[k - 1]
        target = self.powers[k]
        lo_prev = self.min_size * (k - 1)
        for s in range(self.filled[k] + 1, upto + 1):
            if k == 2:
                # symmetric self-convolution, halve the multiplications
                acc = _ZERO
                for i in range(self.min_size, s // 2 + 1):
                    j = s - i
                    if i == j:
                        acc += row[i] * row[i]
                    else:
                        acc += 2 * row[i] * row[j]
                target[s] = acc
            else:
                acc = _ZERO
                for i in range(lo_prev, s - self.min_size + 1):
                    acc += prev[i] * row[s - i]
                target[s] = acc
        self.filled[k] = max(self.filled[k], upto)

    def value_at(self, n: int) -> "mpz":
        """Sum over connective groups of mult * (row^arity)[n - weight]."""
        total = _ZERO
        for (arity, weight), mult in self.groups:
            s = n - weight
            if s < self.min_size * arity:
                continue
            if self.filled[arity] < s:
                self._fill(arity, s)
            total += mult * self.powers[arity][s]
        return total


def _dp_row(
    sig: Signature,
    limit: int,
    m: int | None,
    quant_row: list | None,
) -> list:
    """One counting row up to the size limit.

    quant_row is the (m+1)-open row the quantifier term pulls from; None
    means the row refers to itself (the unconstrained fixed point).
    """
    row = [_ZERO] * (limit + 1)
    qrow = row if quant_row is None else quant_row
    terms = _ConnectiveTerms(sig, row, limit)
    wq = sig.quantifier_weight
    for n in range(sig.min_formula_weight, limit + 1):
        total = mpz(atom_count(n, m, sig))
        if n >= wq:
            total += 2 * qrow[n - wq]
        total += terms.value_at(n)
        row[n] = total
    return row


def count_infinity(limit: int, sig: Signature) -> list[int]:
    """Exact counts of all formulae for sizes 0..limit."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    return [int(v) for v in _dp_row(sig, limit, None, None)]


@dataclass
class CountTable:
    """Counts c[m][n] of m-open formulae of size n for 0 <= n <= size_limit.

    Rows are stored for 0 <= m <= m_max plus the unconstrained row; queries
    with m >= n are answered from the unconstrained row (every size-n formula
    is n-open), anything else beyond m_max raises TableTooSmallError.
    """

    signature: Signature
    size_limit: int
    m_max: int
    rows: dict[int, list[int]] = field(repr=False)
    infinity: list[int] = field(repr=False)

    def count(self, n: int, m: int | None = None) -> int:
        if not 0 <= n <= self.size_limit:
            raise TableTooSmallError(f"size {n} outside table range")
        if m is None:
            return self.infinity[n]
        if m < 0:
            raise ValueError("m must be >= 0")
        if m <= self.m_max:
            return self.rows[m][n]
        if m >= n:
            return self.infinity[n]
        raise TableTooSmallError(
            f"row m={m} not retained (m_max={self.m_max}) and m < n={n}"
        )

    def row(self, m: int | None = None) -> list[int]:
        if m is None:
            return self.infinity
        if m <= self.m_max:
            return self.rows[m]
        raise TableTooSmallError(f"row m={m} not retained (m_max={self.m_max})")

    def tsv_lines(self, ms: Iterable[int | None] | None = None):
        """Yield "m<TAB>n<TAB>count" lines; m renders as "inf" for the
        unconstrained row.  Default: rows 0..m_max then inf."""
        if ms is None:
            ms = list(range(self.m_max + 1)) + [None]
        yield "m\tn\tcount"
        for m in ms:
            label = "inf" if m is None else str(m)
            row = self.row(m)
            for n, value in enumerate(row):
                yield f"{label}\t{n}\t{value}"

    def write_tsv(self, out: IO[str], ms=None) -> None:
        for line in self.tsv_lines(ms):
            out.write(line + "\n")


def count_m_open(limit: int, sig: Signature, m_max: int | None = None) -> CountTable:
    """Build the m-open count table by descending the row chain.

    m_max selects how many rows are retained (default: all of 0..limit).
    Intermediate chain rows above m_max are computed on progressively shorter
    prefixes, starting from the point where the row provably coincides with
    the unconstrained one over its needed range.
    """
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if m_max is None:
        m_max = limit
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    m_max = min(m_max, limit)
    wq = sig.quantifier_weight
    inf_row = _dp_row(sig, limit, None, None)

    def needed(m: int) -> int:
        return limit if m <= m_max else max(0, limit - (m - m_max) * wq)

    # first row (above m_max) whose needed prefix is covered by truncation
    m_start = m_max + 1
    while m_start < needed(m_start):
        # m >= limit always satisfies m >= needed(m); loop terminates
        m_start += 1
    current = inf_row[: needed(m_start) + 1]
    for m in range(m_start - 1, m_max, -1):
        current = _dp_row(sig, needed(m), m, current)
    rows: dict[int, list[int]] = {}
    for m in range(m_max, -1, -1):
        current = _dp_row(sig, limit, m, current)
        rows[m] = [int(v) for v in current]
    return CountTable(
        signature=sig,
        size_limit=limit,
        m_max=m_max,
        rows=rows,
        infinity=[int(v) for v in inf_row],
    )
