"""Command-line front end.

Subcommands: count, asymptotics, density, bounds, sample, check.  Outputs
are deterministic given the flags (plus the seed for sample): TSV by default,
JSON via --format json, floats fixed to 6 significant digits.  Exit codes:
0 success, 2 invalid arguments or inputs, 3 signature problems, 4 signature
not admissible for asymptotics, 5 invalid template.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import asymptotics as asym
from . import counting, density, formulas, sampler
from .signature import DEFAULT_SIGNATURE, Signature, SignatureError, load_signature

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SIGNATURE = 3
EXIT_NOT_ADMISSIBLE = 4
EXIT_TEMPLATE = 5

COUNT_SIZE_GUARD = 5000
SIG_ENV_VAR = "DBD_SIG"


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> float:
    """Round to 6 significant digits for stable, readable output."""
    return float(f"{x:.6g}")


def _resolve_signature(path: str | None) -> Signature:
    if path is None:
        path = os.environ.get(SIG_ENV_VAR)
    if path is None:
        return DEFAULT_SIGNATURE
    try:
        return load_signature(path)
    except SignatureError as exc:
        raise _CliError(str(exc), EXIT_SIGNATURE) from exc


def _emit_json(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------

def _cmd_count(args) -> int:
    sig = _resolve_signature(args.sig)
    n = args.size
    if n < 0:
        raise _CliError("--size must be >= 0", EXIT_USAGE)
    if n > COUNT_SIZE_GUARD and not args.force:
        raise _CliError(
            f"--size {n} exceeds the guard limit {COUNT_SIZE_GUARD}; "
            "pass --force to proceed",
            EXIT_USAGE,
        )
    if args.all:
        label, row = "inf", counting.count_infinity(n, sig)
    else:
        m = 0 if args.closed else args.open
        if m < 0:
            raise _CliError("--open must be >= 0", EXIT_USAGE)
        table = counting.count_m_open(n, sig, m_max=m)
        label, row = str(m), table.row(m)
    if args.format == "json":
        _emit_json(
            {
                "signature": sig.to_json_dict(),
                "size_limit": n,
                "rows": [
                    {"m": label, "n": i, "count": int(c)} for i, c in enumerate(row)
                ],
            }
        )
    else:
        print("m\tn\tcount")
        for i, c in enumerate(row):
            print(f"{label}\t{i}\t{c}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------

def _analyze(sig: Signature, tol: float):
    try:
        return asym.analyze_signature(sig, tol=tol)
    except asym.NotAdmissibleError as exc:
        raise _CliError(str(exc), EXIT_NOT_ADMISSIBLE) from exc


def _cmd_asymptotics(args) -> int:
    sig = _resolve_signature(args.sig)
    if args.size < 8:
        raise _CliError("--size must be >= 8", EXIT_USAGE)
    sd = _analyze(sig, args.tol)
    table = counting.count_m_open(args.size, sig, m_max=args.cm)
    min_size = min(500, args.size)
    asym.attach_cm_estimates(sd, table, range(args.cm + 1), min_size=min_size)
    c_inf_est, c_inf_spread = asym.estimate_Cm(None, table, sd, min_size=min_size)
    report = {
        "signature": sig.to_json_dict(),
        "rho": _fmt(sd.rho),
        "gamma": _fmt(sd.gamma),
        "a": _fmt(sd.a),
        "b": _fmt(sd.b),
        "C": _fmt(sd.C),
        "Cm": [
            {"m": m, "value": _fmt(sd.cm[m]), "spread": _fmt(sd.cm_spread[m])}
            for m in sorted(sd.cm)
        ],
        "C_extrapolated": _fmt(c_inf_est),
        "residuals": {
            "fixed_point": _fmt(abs(sd.residuals[0])),
            "branch": _fmt(abs(sd.residuals[1])),
        },
        "validation": {
            k: (v if not isinstance(v, dict) else {str(n): _fmt(e) for n, e in v.items()})
            for k, v in asym.validation_report(sd, table).items()
            if k != "residual_fixed_point" and k != "residual_branch"
        },
    }
    if args.format == "json":
        _emit_json(report)
    else:
        print("key\tvalue")
        for key in ("rho", "gamma", "a", "b", "C", "C_extrapolated"):
            print(f"{key}\t{report[key]}")
        for entry in report["Cm"]:
            print(f"C_{entry['m']}\t{entry['value']}")
        print(f"residual_fixed_point\t{report['residuals']['fixed_point']}")
        print(f"residual_branch\t{report['residuals']['branch']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def _parse_template(text: str, sig: Signature):
    try:
        return formulas.parse_template(text, sig)
    except formulas.ParseError as exc:
        raise _CliError(f"bad template: {exc}", EXIT_USAGE) from exc
    except formulas.InvalidTemplateError as exc:
        raise _CliError(str(exc), EXIT_TEMPLATE) from exc


def _cmd_density(args) -> int:
    sig = _resolve_signature(args.sig)
    template = _parse_template(args.template, sig)
    try:
        m = formulas.permissiveness(template)
    except formulas.InvalidTemplateError as exc:
        raise _CliError(str(exc), EXIT_TEMPLATE) from exc
    n_top = args.size
    d = template.size(sig)
    if n_top < d + sig.min_formula_weight:
        raise _CliError(
            f"--size must be at least {d + sig.min_formula_weight} for this "
            "template",
            EXIT_USAGE,
        )
    if args.at:
        try:
            sizes = sorted({int(s) for s in args.at.split(",")})
        except ValueError as exc:
            raise _CliError(f"bad --at list: {args.at!r}", EXIT_USAGE) from exc
    else:
        sizes = sorted({max(d + sig.min_formula_weight, n_top // 4), n_top // 2, n_top})
    if sizes[0] < d + sig.min_formula_weight or sizes[-1] > n_top:
        raise _CliError("--at sizes outside the computed table", EXIT_USAGE)
    table = counting.count_m_open(n_top, sig, m_max=m)
    sd = None
    if args.limit:
        sd = _analyze(sig, args.tol)
        asym.attach_cm_estimates(
            sd, table, sorted({m, 0}), min_size=min(500, n_top)
        )
    report = density.density_report(template, table, sizes, sd)
    if args.format == "json":
        doc = report.to_json_dict()
        if doc["limit"] is not None:
            doc["limit"] = _fmt(doc["limit"])
            doc["residuals"] = [
                {"n": r["n"], "abs_error": _fmt(r["abs_error"])}
                for r in doc["residuals"]
            ]
        _emit_json(doc)
    else:
        for line in report.tsv_lines():
            print(line)
        if report.limit is not None:
            print(f"# limit\t{_fmt(report.limit)}")
            trend = ",".join(f"{n}:{_fmt(e)}" for n, e in report.residuals)
            print(f"# residuals\t{trend}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def _parse_sentence(text: str, what: str, sig: Signature):
    try:
        phi = formulas.parse_formula(text, sig)
    except formulas.ParseError as exc:
        raise _CliError(f"bad {what}: {exc}", EXIT_USAGE) from exc
    if not formulas.is_sentence(phi):
        raise _CliError(f"{what} must be a sentence (0-open)", EXIT_USAGE)
    return phi


def _cmd_bounds(args) -> int:
    sig = _resolve_signature(args.sig)
    tau = _parse_sentence(args.tautology, "tautology", sig)
    sd = _analyze(sig, args.tol)
    try:
        lower, upper = density.tautology_bounds(tau, sig, sd)
        doc = {
            "tautology": formulas.render_formula(tau),
            "tautology_size": formulas.size(tau, sig),
            "theorem_density_lower": _fmt(lower),
            "theorem_density_upper": _fmt(upper),
            # upper sits exponentially close to 1 and rounds to it at six
            # digits; the complement (the anti-tautology class density,
            # exactly 1 - upper) carries the information
            "theorem_density_upper_complement": _fmt(1.0 - upper),
        }
        if args.phi is not None:
            phi = _parse_sentence(args.phi, "phi", sig)
            value = density.independence_density_bound(
                phi, tau, sig, sd, require_native=args.require_native
            )
            _cost, native = density.implication_cost(
                sig, require_native=args.require_native
            )
            doc["independent_extension_density"] = _fmt(value)
            doc["implication"] = "native" if native else "desugared"
    except density.MissingConnectiveError as exc:
        raise _CliError(str(exc), EXIT_SIGNATURE) from exc
    if args.format == "json":
        _emit_json(doc)
    else:
        for key, value in doc.items():
            print(f"{key}\t{value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def _cmd_sample(args) -> int:
    sig = _resolve_signature(args.sig)
    if args.size < 0 or args.open < 0 or args.count < 1:
        raise _CliError("--size/--open must be >= 0 and --count >= 1", EXIT_USAGE)
    if args.size > 400:
        raise _CliError("--size beyond 400 is not supported by sample", EXIT_USAGE)
    table = counting.count_m_open(args.size, sig)
    state = sampler.SamplerState(table, args.seed)
    try:
        sampler.write_samples(sys.stdout, state, args.size, args.open, args.count)
    except sampler.EmptyClassError as exc:
        raise _CliError(str(exc), EXIT_USAGE) from exc
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _cmd_check(args) -> int:
    sig = _resolve_signature(args.sig)
    try:
        phi = formulas.parse_formula(args.formula, sig)
    except formulas.ParseError as exc:
        raise _CliError(f"invalid formula: {exc}", EXIT_USAGE) from exc
    result = {
        "valid": True,
        "size": formulas.size(phi, sig),
        "openness": formulas.openness(phi),
        "sentence": formulas.is_sentence(phi),
    }
    if args.format == "json":
        _emit_json(result)
    else:
        for key, value in result.items():
            print(f"{key}\t{str(value).lower() if isinstance(value, bool) else value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sig", metavar="PATH", help="signature JSON file "
                   f"(default: ${SIG_ENV_VAR} or the built-in and/or/not set)")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--tol", type=float, default=asym.DEFAULT_TOL,
                   help="root-finding tolerance (default 1e-12)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbd",
        description="Exact counting and asymptotic density analysis of "
        "first-order set-theory formulae in De Bruijn representation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact counts of (m-open) formulae by size")
    p.add_argument("--size", type=int, required=True, metavar="N")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--open", type=int, metavar="M",
                       help="count M-open formulae")
    group.add_argument("--closed", action="store_true", help="count sentences")
    group.add_argument("--all", action="store_true", help="count all formulae")
    p.add_argument("--force", action="store_true",
                   help=f"allow --size beyond {COUNT_SIZE_GUARD}")
    _add_common(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("asymptotics",
                       help="dominant singularity, growth rate and constants")
    p.add_argument("--size", type=int, default=500, metavar="N",
                   help="table size for C_m estimates (default 500)")
    p.add_argument("--cm", type=int, default=6, metavar="M",
                   help="estimate C_0..C_M (default 6)")
    _add_common(p)
    p.set_defaults(func=_cmd_asymptotics)

    p = sub.add_parser("density", help="densities of a template sentence class")
    p.add_argument("--template", required=True, metavar="TEMPLATE")
    p.add_argument("--size", type=int, default=400, metavar="N",
                   help="table size (default 400)")
    p.add_argument("--at", metavar="N1,N2,...",
                   help="sizes to evaluate exactly (default N/4,N/2,N)")
    p.add_argument("--limit", action="store_true",
                   help="also estimate the limiting density")
    _add_common(p)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("bounds",
                       help="theorem-density bounds from a tautology")
    p.add_argument("--tautology", required=True, metavar="SENTENCE")
    p.add_argument("--phi", metavar="SENTENCE",
                   help="independent sentence for the extension bound")
    p.add_argument("--require-native", action="store_true",
                   help="fail instead of desugaring a missing implication")
    _add_common(p)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("sample", help="uniform random formulae of exact size")
    p.add_argument("--size", type=int, required=True, metavar="N")
    p.add_argument("--open", type=int, default=0, metavar="M")
    p.add_argument("--count", type=int, default=10, metavar="K")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("check", help="size, openness and sentence status")
    p.add_argument("formula", metavar="FORMULA")
    _add_common(p)
    p.set_defaults(func=_cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SignatureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIGNATURE
    except asym.ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE


if __name__ == "__main__":
    sys.exit(main())
