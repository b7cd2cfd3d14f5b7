"""Exact counting and asymptotic density analysis of first-order set-theory
formulae in De Bruijn representation.

The package provides, in dependency order: the formula AST with parsing,
size and openness semantics plus a brute-force enumerator (formulas); exact
big-integer counting of all and of m-open formulae (counting); the dominant
singularity, Puiseux constants and per-class growth constants (asymptotics);
exact and limiting densities of template sentence classes and theorem-density
bounds (density); and uniform exact-size random generation (sampler).  The
console script dbd fronts all of it.
"""

from .asymptotics import (
    ConvergenceError,
    DegenerateBranchError,
    GFSystem,
    InsufficientDataError,
    NotAdmissibleError,
    SingularityData,
    analyze_signature,
    asymptotic_count,
    attach_cm_estimates,
    empirical_error,
    estimate_Cm,
    puiseux_constants,
    solve_singularity,
)
from .counting import (
    CountTable,
    TableTooSmallError,
    atom_count,
    atom_kernel_gap,
    count_infinity,
    count_m_open,
)
from .density import (
    DensityReport,
    MissingConnectiveError,
    NotASentenceError,
    density_report,
    independence_density_bound,
    tautology_bounds,
    template_density_exact,
    template_density_limit,
)
from .formulas import (
    Atom,
    Conn,
    Exists,
    Forall,
    Formula,
    Hole,
    InvalidTemplateError,
    ParseError,
    Template,
    enumerate_formulas,
    is_m_open,
    is_sentence,
    iter_formulas,
    openness,
    parse_formula,
    parse_template,
    permissiveness,
    render_formula,
    size,
    substitute,
)
from .sampler import (
    EmptyClassError,
    SamplerState,
    estimate_density_mc,
    matches_template,
    sample_uniform,
    write_samples,
)
from .signature import (
    DEFAULT_SIGNATURE,
    NAND_SIGNATURE,
    Connective,
    Signature,
    SignatureError,
    load_signature,
    parse_signature_json,
)

__version__ = "0.1.0"
