"""Asymptotic densities of template-generated sentence classes.

A template C of size d with permissiveness m generates the sentence class
{ C[phi] : phi m-open }.  Among all sentences of size n this class occupies
exactly c_m[n-d] / c_0[n], and since all rows share the growth gamma^n
n^(-3/2), the fraction converges to the positive limit C_m rho^d / C_0.

Two consequences about theories are computable as pure numbers.  For any
consistent theory, grafting sentences onto a fixed tautology tau witnesses a
band of nontrivial density: theorems have lower density at least rho^(w_or +
|tau|) (the disjunction-with-tau class consists of tautologies) and at most
1 - rho^(w_and + w_not + |tau|) (the conjunction-with-negated-tau class
consists of anti-tautologies).  And for a sentence phi independent of the
theory, the class ((tau or [.]) -> phi) consists of sentences provable only
in the extension by phi, of density rho^d for the corresponding template
size d.  Validity of the supplied tau is the caller's responsibility: the
functions compute densities of syntactic classes and cannot (and do not try
to) decide first-order validity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .asymptotics import SingularityData
from .counting import CountTable, TableTooSmallError
from .formulas import Formula, Template, is_sentence, permissiveness, size
from .signature import Signature

__all__ = [
    "DensityReport",
    "MissingConnectiveError",
    "NotASentenceError",
    "template_density_exact",
    "template_density_limit",
    "density_report",
    "tautology_bounds",
    "independence_density_bound",
    "implication_cost",
]


class MissingConnectiveError(ValueError):
    """The signature lacks a connective needed by a bound construction."""


class NotASentenceError(ValueError):
    """A construction required a sentence but got an open formula."""


def template_density_exact(template: Template, n: int, table: CountTable) -> Fraction:
    """Exact fraction of size-n sentences generated by the template.

    Substitution is size-additive and injective, so the numerator is the
    count of m-open formulae of size n - d.  The result is an exact rational
    in lowest terms.
    """
    m = permissiveness(template)
    sig = table.signature
    d = template.size(sig)
    if n < d + sig.min_formula_weight:
        raise ValueError(
            f"size {n} too small for template size {d} plus a formula"
        )
    if n > table.size_limit:
        raise TableTooSmallError(f"table covers sizes up to {table.size_limit}")
    sentences = table.count(n, 0)
    if sentences == 0:
        raise ValueError(f"no sentences of size {n} under this signature")
    return Fraction(table.count(n - d, m), sentences)


def template_density_limit(template: Template, sd: SingularityData) -> float:
    """Limiting density C_m rho^d / C_0; requires attached C_m estimates."""
    m = permissiveness(template)
    d = template.size(sd.signature)
    for needed in (m, 0):
        if needed not in sd.cm:
            raise KeyError(
                f"C_{needed} not estimated; call attach_cm_estimates first"
            )
    return sd.cm[m] * sd.rho**d / sd.cm[0]


@dataclass(frozen=True)
class DensityReport:
    """Exact finite-size densities of a template class next to their limit."""

    template_text: str
    template_size: int
    permissiveness: int
    exact: tuple[tuple[int, Fraction], ...]
    limit: float | None
    residuals: tuple[tuple[int, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "template": self.template_text,
            "template_size": self.template_size,
            "permissiveness": self.permissiveness,
            "exact": [
                {
                    "n": n,
                    "fraction": f"{q.numerator}/{q.denominator}",
                    "decimal": f"{float(q):.12f}",
                }
                for n, q in self.exact
            ],
            "limit": self.limit,
            "residuals": [
                {"n": n, "abs_error": e} for n, e in self.residuals
            ],
        }

    def tsv_lines(self):
        yield "n\texact_density"
        for n, q in self.exact:
            yield f"{n}\t{float(q):.12f}"


def density_report(
    template: Template,
    table: CountTable,
    sizes: list[int],
    sd: SingularityData | None = None,
) -> DensityReport:
    """Evaluate exact densities at the given sizes, plus the limit when
    singularity data with attached constants is available."""
    exact = tuple((n, template_density_exact(template, n, table)) for n in sizes)
    limit = None
    residuals: tuple = ()
    if sd is not None:
        limit = template_density_limit(template, sd)
        residuals = tuple((n, abs(float(q) - limit)) for n, q in exact)
    return DensityReport(
        template_text=template.render(),
        template_size=template.size(table.signature),
        permissiveness=permissiveness(template),
        exact=exact,
        limit=limit,
        residuals=residuals,
    )


def _require(sig: Signature, name: str, arity: int):
    conn = sig.connective(name)
    if conn is None or conn.arity != arity:
        raise MissingConnectiveError(
            f"signature lacks the {arity}-ary connective {name!r}"
        )
    return conn


def tautology_bounds(
    tau: Formula,
    sig: Signature,
    sd: SingularityData,
    or_name: str = "or",
    and_name: str = "and",
    not_name: str = "not",
) -> tuple[float, float]:
    """Density band (lower, upper) for the theorems of any consistent theory,
    relative to a tautology tau.

    lower is the limiting density of the class ([.] or tau), whose members
    are all tautologies: the hole sits at depth 0, so the class constant
    cancels and the density is rho^(w_or + |tau|).  upper subtracts the
    density rho^(w_and + w_not + |tau|) of the anti-tautology class
    ([.] and (not tau)) from one.  Both are strictly inside (0, 1).

    tau is used purely as a syntactic sentence; its logical validity is not
    checked (first-order validity is undecidable).
    """
    if not is_sentence(tau):
        raise NotASentenceError("tau must be a sentence (0-open)")
    conn_or = _require(sig, or_name, 2)
    conn_and = _require(sig, and_name, 2)
    conn_not = _require(sig, not_name, 1)
    t = size(tau, sig)
    lower = sd.rho ** (conn_or.weight + t)
    upper = 1.0 - sd.rho ** (conn_and.weight + conn_not.weight + t)
    return lower, upper


def implication_cost(
    sig: Signature,
    implies_name: str = "implies",
    and_name: str = "and",
    not_name: str = "not",
    require_native: bool = False,
) -> tuple[int, bool]:
    """Weight of one implication node: (cost, used_native).

    Without a native binary implication the construction x -> y is desugared
    to (not (and x (not y))), which costs w_and + 2 w_not instead.
    """
    conn = sig.connective(implies_name)
    if conn is not None and conn.arity == 2:
        return conn.weight, True
    if require_native:
        raise MissingConnectiveError(
            f"signature lacks the binary connective {implies_name!r}"
        )
    conn_and = _require(sig, and_name, 2)
    conn_not = _require(sig, not_name, 1)
    return conn_and.weight + 2 * conn_not.weight, False


def independence_density_bound(
    phi: Formula,
    tau: Formula,
    sig: Signature,
    sd: SingularityData,
    or_name: str = "or",
    implies_name: str = "implies",
    and_name: str = "and",
    not_name: str = "not",
    require_native: bool = False,
) -> float:
    """Limiting density of the class ((tau or [.]) -> phi).

    When phi is independent of a consistent theory T, every member is a
    theorem of T + phi but not of T, so the value lower-bounds the density
    gained by the extension.  The hole is 0-permissive, hence the density is
    exactly rho^d with d the template size.
    """
    for name, formula in (("phi", phi), ("tau", tau)):
        if not is_sentence(formula):
            raise NotASentenceError(f"{name} must be a sentence (0-open)")
    conn_or = _require(sig, or_name, 2)
    imp_cost, _native = implication_cost(
        sig, implies_name, and_name, not_name, require_native
    )
    d = imp_cost + conn_or.weight + size(tau, sig) + size(phi, sig)
    return sd.rho**d
