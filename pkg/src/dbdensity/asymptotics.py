"""Dominant singularity, Puiseux constants and asymptotic coefficient growth.

The counting series y(z) of all formulae satisfies y = F(z, y) with

    F(z, y) = A(z) + 2 z^wq y + sum over connectives of z^w y^arity,

where A is the atom series z^we (z^w0 / (1 - z^wS))^2.  As soon as one
connective has arity >= 2 the equation is nonlinear, positive and proper, and
the solution has a unique square-root branch point rho in (0, 1) determined by

    tau = F(rho, tau),    F_y(rho, tau) = 1.

There the series expands as y(z) = a - b sqrt(1 - z/rho) + O(1 - z/rho) with
a = tau and b = sqrt(2 rho F_z / F_yy), so the coefficients grow like
C gamma^n n^(-3/2) with gamma = 1/rho and C = b / (2 sqrt(pi)).

The m-open rows share rho, gamma and the n^(-3/2) factor and differ only in
their multiplicative constants C_m, which this module estimates from exact
counts by Richardson extrapolation of c_m[n] rho^n n^(3/2).

Note on notation: rho is the singularity (a number below 1), gamma = 1/rho
the coefficient growth factor.  Estimates use gamma^n throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from .counting import CountTable, count_infinity
from .signature import Signature

__all__ = [
    "GFSystem",
    "SingularityData",
    "NotAdmissibleError",
    "ConvergenceError",
    "DegenerateBranchError",
    "InsufficientDataError",
    "solve_singularity",
    "puiseux_constants",
    "analyze_signature",
    "attach_cm_estimates",
    "estimate_Cm",
    "asymptotic_count",
    "empirical_error",
    "validation_report",
]

DEFAULT_TOL = 1e-12


class NotAdmissibleError(ValueError):
    """Signature has no connective of arity >= 2; the counting series is
    rational and has no square-root singularity."""


class ConvergenceError(RuntimeError):
    """Root finding failed; the message reports the bracketing state."""


class DegenerateBranchError(RuntimeError):
    """F_yy vanished at the candidate branch point (not a square-root
    singularity; outside the supported regime)."""


class InsufficientDataError(ValueError):
    """Count table too short for the requested extrapolation window."""


@dataclass(frozen=True)
class GFSystem:
    """Evaluable form of F(z, y) and its partial derivatives."""

    signature: Signature
    #: (arity, weight, multiplicity) per connective group
    groups: tuple[tuple[int, int, int], ...]

    @classmethod
    def from_signature(cls, sig: Signature) -> "GFSystem":
        seen: dict[tuple[int, int], int] = {}
        for c in sig.connectives:
            key = (c.arity, c.weight)
            seen[key] = seen.get(key, 0) + 1
        groups = tuple(sorted((a, w, mult) for (a, w), mult in seen.items()))
        return cls(signature=sig, groups=groups)

    def atom_series(self, z: float) -> float:
        s = self.signature
        p = s.membership_weight + 2 * s.zero_weight
        return z**p / (1 - z**s.succ_weight) ** 2

    def atom_series_dz(self, z: float) -> float:
        s = self.signature
        p = s.membership_weight + 2 * s.zero_weight
        ws = s.succ_weight
        return z ** (p - 1) * (p * (1 - z**ws) + 2 * ws * z**ws) / (1 - z**ws) ** 3

    def F(self, z: float, y: float) -> float:
        wq = self.signature.quantifier_weight
        val = self.atom_series(z) + 2 * z**wq * y
        for arity, w, mult in self.groups:
            val += mult * z**w * y**arity
        return val

    def F_y(self, z: float, y: float) -> float:
        wq = self.signature.quantifier_weight
        val = 2 * z**wq
        for arity, w, mult in self.groups:
            val += mult * arity * z**w * y ** (arity - 1)
        return val

    def F_z(self, z: float, y: float) -> float:
        wq = self.signature.quantifier_weight
        val = self.atom_series_dz(z) + 2 * wq * z ** (wq - 1) * y
        for arity, w, mult in self.groups:
            val += mult * w * z ** (w - 1) * y**arity
        return val

    def F_yy(self, z: float, y: float) -> float:
        val = 0.0
        for arity, w, mult in self.groups:
            if arity >= 2:
                val += mult * arity * (arity - 1) * z**w * y ** (arity - 2)
        return val

    def F_zy(self, z: float, y: float) -> float:
        wq = self.signature.quantifier_weight
        val = 2 * wq * z ** (wq - 1)
        for arity, w, mult in self.groups:
            val += mult * arity * w * z ** (w - 1) * y ** (arity - 1)
        return val

    def residuals(self, z: float, y: float) -> tuple[float, float]:
        """(y - F, 1 - F_y) at the candidate branch point."""
        return y - self.F(z, y), 1 - self.F_y(z, y)


@dataclass
class SingularityData:
    """Solved branch point and derived asymptotic constants.

    cm maps m to the estimated per-class constant C_m (None key styles are
    not used; the unconstrained constant is C).  Populated on demand via
    attach_cm_estimates.
    """

    signature: Signature
    rho: float
    tau: float
    a: float
    b: float
    gamma: float
    C: float
    residuals: tuple[float, float]
    cm: dict[int, float] = field(default_factory=dict)
    cm_spread: dict[int, float] = field(default_factory=dict)


def _series_eval(coeffs: list[int], z: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * z + float(c)
    return acc


def _inner_solve_y(sys: GFSystem, z: float, y0: float = 0.0):
    """Newton in y for y = F(z, y), following the small branch from y0.

    Returns the root or None when the iteration fails to converge, which for
    positive systems signals z past the branch point.
    """
    y = y0
    for _ in range(200):
        g = sys.F(z, y) - y
        dg = sys.F_y(z, y) - 1.0
        if dg == 0:
            return None
        step = g / dg
        y_new = y - step
        if not math.isfinite(y_new) or y_new < 0 or y_new > 1e9:
            return None
        if abs(y_new - y) < 1e-15 * max(1.0, abs(y_new)):
            return y_new
        y = y_new
    return None


def _bracket_and_bisect(sys: GFSystem, tol: float) -> tuple[float, float]:
    """Locate the branch point by bisection on 'the small root still exists
    and F_y < 1 there'.  Used when the direct Newton iteration strays."""

    def state(z: float):
        y = _inner_solve_y(sys, z)
        if y is None:
            return None
        return y

    lo, hi = 1e-9, 1.0 - 1e-9
    y_lo = state(lo)
    if y_lo is None:
        raise ConvergenceError("inner solve failed at z=1e-9; nothing to bracket")
    # shrink hi until the subcritical side is found
    for _ in range(200):
        y_hi = state(hi)
        if y_hi is None or sys.F_y(hi, y_hi) >= 1.0:
            break
        hi = (hi + 1.0) / 2  # should not happen for admissible signatures
    else:
        raise ConvergenceError(
            f"no supercritical point found in (0, 1); last bracket [{lo}, {hi}]"
        )
    y_best = y_lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        y_mid = state(mid)
        if y_mid is not None and sys.F_y(mid, y_mid) < 1.0:
            lo, y_best = mid, y_mid
        else:
            hi = mid
        if hi - lo < 0.25 * tol:
            break
    return lo, y_best


def solve_singularity(
    sig: Signature,
    tol: float = DEFAULT_TOL,
    counts: list[int] | None = None,
) -> tuple[float, float]:
    """Solve the branch-point system tau = F(rho, tau), F_y(rho, tau) = 1.

    Newton iteration on the 2x2 system with analytic derivatives; the initial
    guess comes from coefficient ratios of the exact counts.  Falls back to
    bisection when Newton leaves the unit interval.  Both residuals of the
    returned point are below tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not sig.admissible_for_asymptotics:
        raise NotAdmissibleError(
            "signature needs at least one connective of arity >= 2"
        )
    sys = GFSystem.from_signature(sig)
    if counts is None:
        counts = count_infinity(80, sig)
    n_top = len(counts) - 1
    while n_top > 0 and counts[n_top] == 0:
        n_top -= 1
    if n_top >= 4 and counts[n_top - 1] > 0:
        z = counts[n_top - 1] / counts[n_top]
        y = _series_eval(counts, z)
    else:
        z, y = 0.2, 0.2

    def newton(z: float, y: float):
        for _ in range(100):
            g1 = sys.F(z, y) - y
            g2 = sys.F_y(z, y) - 1.0
            if abs(g1) < tol and abs(g2) < tol:
                return z, y
            j11 = sys.F_z(z, y)
            j12 = sys.F_y(z, y) - 1.0
            j21 = sys.F_zy(z, y)
            j22 = sys.F_yy(z, y)
            det = j11 * j22 - j12 * j21
            if det == 0 or not math.isfinite(det):
                return None
            dz = (g1 * j22 - g2 * j12) / det
            dy = (j11 * g2 - j21 * g1) / det
            z, y = z - dz, y - dy
            if not (0 < z < 1) or not (0 <= y < 1e9) or not math.isfinite(y):
                return None
        g1, g2 = sys.F(z, y) - y, sys.F_y(z, y) - 1.0
        if abs(g1) < tol and abs(g2) < tol:
            return z, y
        return None

    sol = newton(z, y)
    if sol is None:
        z0, y0 = _bracket_and_bisect(sys, max(tol, 1e-13))
        sol = newton(z0, y0)
        if sol is None:
            r1, r2 = sys.residuals(z0, y0)
            raise ConvergenceError(
                f"Newton failed to polish bisection result z={z0!r}, y={y0!r} "
                f"(residuals {r1:.3e}, {r2:.3e})"
            )
    rho, tau = sol
    return rho, tau


def puiseux_constants(
    sys: GFSystem, rho: float, tau: float, tol: float = DEFAULT_TOL
) -> tuple[float, float]:
    """Constants (a, b) of the local expansion a - b sqrt(1 - z/rho).

    a equals the branch value tau; b follows from the smooth implicit-function
    branch-point formula b = sqrt(2 rho F_z / F_yy).
    """
    fyy = sys.F_yy(rho, tau)
    if fyy < tol:
        raise DegenerateBranchError(
            f"F_yy = {fyy!r} at the branch point; no square-root singularity"
        )
    b = math.sqrt(2 * rho * sys.F_z(rho, tau) / fyy)
    return tau, b


def analyze_signature(
    sig: Signature,
    tol: float = DEFAULT_TOL,
    counts: list[int] | None = None,
) -> SingularityData:
    """Bundle of solve_singularity and puiseux_constants results."""
    sys = GFSystem.from_signature(sig)
    rho, tau = solve_singularity(sig, tol, counts)
    a, b = puiseux_constants(sys, rho, tau, tol)
    return SingularityData(
        signature=sig,
        rho=rho,
        tau=tau,
        a=a,
        b=b,
        gamma=1.0 / rho,
        C=b / (2 * math.sqrt(math.pi)),
        residuals=sys.residuals(rho, tau),
    )


def _scaled_coefficient(count: int, n: int, rho: float) -> float:
    """count * rho^n * n^(3/2) computed in log space (counts overflow
    doubles near n = 515 for the default signature)."""
    return math.exp(math.log(count) + n * math.log(rho) + 1.5 * math.log(n))


def estimate_Cm(
    m: int | None,
    table: CountTable,
    sd: SingularityData,
    window_points: int = 9,
    min_size: int = 500,
) -> tuple[float, float]:
    """Estimate the constant C_m from exact counts.

    The scaled sequence s_n = c_m[n] rho^n n^(3/2) converges to C_m with a
    leading 1/n correction (the next Puiseux term contributes a half-integer
    power of 1 - z/rho whose transfer is one order of n down).  A two-point
    Richardson step 2 s_n - s_(n/2) removes that correction; the estimate is
    taken at n = size_limit and the spread of the Richardson values across a
    window [size_limit/2, size_limit] is returned as a quality indicator.

    m=None estimates the constant of the unconstrained row, which should
    reproduce the Puiseux-derived C.
    """
    N = table.size_limit
    if N < min_size:
        raise InsufficientDataError(
            f"table size {N} below the required minimum {min_size}"
        )
    row = table.row(m)
    points = []
    for i in range(window_points):
        n = N - (i * (N // 2)) // max(1, window_points - 1)
        n -= n % 2  # keep n even so the half point is exact
        if n >= 4 and n // 2 >= 4 and n not in points:
            points.append(n)
    estimates = []
    for n in points:
        c_n, c_half = table.count(n, m), table.count(n // 2, m)
        if c_n <= 0 or c_half <= 0:
            raise InsufficientDataError(f"zero counts in window at n={n}")
        s_n = _scaled_coefficient(c_n, n, sd.rho)
        s_half = _scaled_coefficient(c_half, n // 2, sd.rho)
        estimates.append(2 * s_n - s_half)
    value = estimates[0]
    spread = max(estimates) - min(estimates)
    return value, spread


def attach_cm_estimates(
    sd: SingularityData,
    table: CountTable,
    ms: range | list[int],
    min_size: int = 500,
) -> SingularityData:
    """Fill sd.cm for the given m values (table rows must be retained)."""
    for m in ms:
        value, spread = estimate_Cm(m, table, sd, min_size=min_size)
        sd.cm[m] = value
        sd.cm_spread[m] = spread
    return sd


def asymptotic_count(n: int, sd: SingularityData, m: int | None = None):
    """First-order coefficient estimate C_eff * gamma^n * n^(-3/2).

    Returns an mpmath.mpf since the value overflows IEEE doubles for large n
    (near n = 515 for the default signature).  For finite m the constant C_m
    must have been attached beforehand.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if m is None:
        c_eff = sd.C
    else:
        if m not in sd.cm:
            raise KeyError(
                f"C_{m} not estimated; call attach_cm_estimates for m={m}"
            )
        c_eff = sd.cm[m]
    return mpmath.mpf(c_eff) * mpmath.mpf(sd.gamma) ** n * mpmath.mpf(n) ** mpmath.mpf(-1.5)


def empirical_error(count: int, n: int, sd: SingularityData, m: int | None = None) -> float:
    """Relative error count / (C_eff gamma^n n^(-3/2)) - 1, in log space."""
    c_eff = sd.C if m is None else sd.cm[m]
    log_model = math.log(c_eff) + n * math.log(sd.gamma) - 1.5 * math.log(n)
    return math.exp(math.log(count) - log_model) - 1.0


def validation_report(
    sd: SingularityData,
    table: CountTable,
    checkpoints: list[int] | None = None,
) -> dict:
    """Diagnostics: branch residuals, positivity of counts, and the relative
    error of the first-order estimate at a few checkpoints."""
    N = table.size_limit
    if checkpoints is None:
        checkpoints = sorted({max(4, N // 4), max(4, N // 2), N})
    sig = sd.signature
    first = sig.min_formula_weight
    aperiodic = all(table.count(n) > 0 for n in range(first, N + 1))
    ratios = {n: empirical_error(table.count(n), n, sd) for n in checkpoints}
    return {
        "residual_fixed_point": sd.residuals[0],
        "residual_branch": sd.residuals[1],
        "counts_positive_from_min_size": aperiodic,
        "relative_error_at": ratios,
    }
