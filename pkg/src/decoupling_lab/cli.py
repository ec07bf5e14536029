"""Command-line front end: ``decoupling-lab <command> [flags]``.

Every command takes its parameters on argv only and prints a table, either as
CSV with a fixed header or as JSON ``{"schema", "command", "rows"}``.  Rational
values are printed as ``p/q``; ``--digits N`` switches them (and the float
columns) to N significant decimal digits.

Exit status: 0 on success, 1 on bad input, 2 when an internal consistency
check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Callable, Sequence

from . import cantor_lab, exponent_formulas, exponent_system
from .errors import InvariantViolation
from .exact_lp import as_rational

SCHEMA_VERSION = 1

HEADERS = {
    "lp": ["alpha", "K", "regime", "optimum"],
    "lp-verify": [
        "alpha", "K", "regime", "optimum", "certificate_bound", "closed_form",
        "terminal_term", "matches_closed_form", "saturating_value", "violations",
    ],
    "exponents": [
        "p", "alpha", "xi", "eta", "gamma8", "phi", "gamma_p", "gamma_dec", "c_exp",
        "psi1", "rho", "A_const", "E_const",
    ],
    "bootstrap": ["p", "alpha", "s", "psi", "linear"],
    "cantor": [
        "n", "k", "i", "alpha", "p", "E_p", "dp_lower", "cs_lower", "sumset_card", "c_ad",
    ],
    "expsum": [
        "n", "k", "i", "alpha", "p", "grid", "norm", "ratio", "theoretical_cap", "exact",
    ],
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for invariant failures
    def error(self, message):
        raise UsageError(message)


# -- argument types ---------------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _alphabet(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated digits like 0,2, got {text!r}") from None


def _grid(text: str) -> int | list[int]:
    try:
        parts = [int(t) for t in text.lower().split("x")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or NxM, got {text!r}") from None
    if any(g < 1 for g in parts) or len(parts) > 2:
        raise argparse.ArgumentTypeError(f"expected N or NxM with positive sizes, got {text!r}")
    return parts[0] if len(parts) == 1 else parts


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="decoupling-lab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--output", choices=["csv", "json"], default="csv")
        p.add_argument("--digits", type=_positive_int, default=None,
                       help="render numbers as decimals with this many significant digits")

    lp = sub.add_parser("lp", help="optimal exponent of the exponent LP")
    lp_verify = sub.add_parser("lp-verify", help="dual certificate and saturating point")
    for p in (lp, lp_verify):
        p.add_argument("--alpha", type=_rational, action="append", required=True)
        p.add_argument("--K", type=_positive_int, action="append")
        p.add_argument("--regime", choices=["kakeya", "small", "large", "auto"], default="auto")
        common(p)

    ex = sub.add_parser("exponents", help="closed-form exponents")
    boot = sub.add_parser("bootstrap", help="bootstrap sequence for the decoupling exponent")
    for p in (ex, boot):
        p.add_argument("--p", type=_rational, action="append", required=True)
        p.add_argument("--alpha", type=_rational, action="append", required=True)
        common(p)
    boot.add_argument("--s-max", type=_nonneg_int, default=30)
    boot.add_argument("--psi1", type=_rational, default=None,
                      help="starting value, default gamma_p")

    cantor = sub.add_parser("cantor", help="energies, sumsets and regularity of Cantor levels")
    expsum = sub.add_parser("expsum", help="exponential-sum norms and decoupling ratios")
    for p, default_p in ((cantor, 4), (expsum, 8)):
        p.add_argument("--base", type=int, required=True)
        p.add_argument("--alphabet", type=_alphabet, required=True)
        p.add_argument("--level", type=_nonneg_int, action="append", required=True)
        p.add_argument("--p", type=_rational, action="append", default=None,
                       help=f"default {default_p}")
        p.add_argument("--size-limit", type=_positive_int, default=None)
        common(p)
    expsum.add_argument("--grid", type=_grid, default=None, help="N or NxM per dimension")
    return parser


# -- commands --------------------------------------------------------------------------


def _guard(flag: str, fn: Callable, *args):
    """Call ``fn``, tagging input errors with the flag that caused them."""
    try:
        return fn(*args)
    except InvariantViolation:
        raise
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _cmd_lp(args) -> list[dict]:
    rows = []
    for alpha in args.alpha:
        for K in args.K or [1]:
            regime = _guard("--alpha/--regime", exponent_system.Regime.parse, args.regime, alpha)
            value = _guard("--alpha/--K", exponent_system.optimal_exponent, alpha, K, regime)
            rows.append({"alpha": alpha, "K": K, "regime": regime.value, "optimum": value})
    return rows


def _cmd_lp_verify(args) -> list[dict]:
    rows = []
    for alpha in args.alpha:
        for K in args.K or [1]:
            regime = _guard("--alpha/--regime", exponent_system.Regime.parse, args.regime, alpha)
            report = _guard("--alpha/--K", exponent_system.solve_report, alpha, K, regime)
            row = report.to_dict()
            row.update(alpha=alpha, optimum=report.optimum,
                       certificate_bound=report.certificate_bound,
                       saturating_value=report.saturating_value)
            row.update(closed_form=None, terminal_term=None, matches_closed_form=None)
            if report.certificate_bound is not None:
                cert = exponent_system.verify_paper_certificate(alpha, K, regime)
                row.update(closed_form=cert.closed_form, terminal_term=cert.terminal_term,
                           matches_closed_form=cert.matches_closed_form)
            row["violations"] = ";".join(report.violations)
            rows.append(row)
    return rows


def _cmd_exponents(args) -> list[dict]:
    rows = []
    for p in args.p:
        for alpha in args.alpha:
            params = _guard("--p/--alpha", exponent_formulas.formula_params, p, alpha)
            rows.append(dict(params.__dict__))
    return rows


def _cmd_bootstrap(args) -> list[dict]:
    rows = []
    for p in args.p:
        for alpha in args.alpha:
            steps = _guard("--p/--alpha", exponent_formulas.bootstrap_steps, p, alpha, args.s_max, args.psi1)
            rows.extend(dict(step.__dict__) for step in steps)
    return rows


def _cantor_specs(args) -> list[cantor_lab.CantorSpec]:
    return [
        _guard("--base/--alphabet/--level", cantor_lab.CantorSpec, args.base, args.alphabet, level)
        for level in args.level
    ]


def _check_limit(args, spec):
    limit = args.size_limit or cantor_lab.DEFAULT_POINT_LIMIT
    _guard("--level/--size-limit", cantor_lab.build_cantor, spec, limit)


def _cmd_cantor(args) -> list[dict]:
    rows = []
    for spec in _cantor_specs(args):
        _check_limit(args, spec)
        for p in args.p or [Fraction(4)]:
            if p.denominator != 1:
                raise UsageError(f"--p: energies need an even integer p >= 2, got {p}")
            limit = args.size_limit or cantor_lab.DEFAULT_SUPPORT_LIMIT
            report = _guard("--p/--size-limit", cantor_lab.level_report, spec, int(p), limit)
            row = dict(report.__dict__)
            rows.append(row)
    return rows


def _cmd_expsum(args) -> list[dict]:
    rows = []
    for spec in _cantor_specs(args):
        _check_limit(args, spec)
        for p in args.p or [Fraction(8)]:
            limit = args.size_limit or 10**9
            report = _guard("--p/--grid/--size-limit", cantor_lab.probe_report, spec, p, args.grid, limit)
            row = dict(report.__dict__)
            row["grid"] = "x".join(str(g) for g in report.grid)
            rows.append(row)
    return rows


COMMANDS = {
    "lp": _cmd_lp,
    "lp-verify": _cmd_lp_verify,
    "exponents": _cmd_exponents,
    "bootstrap": _cmd_bootstrap,
    "cantor": _cmd_cantor,
    "expsum": _cmd_expsum,
}


# -- rendering -----------------------------------------------------------------------


def _render(value, digits: int | None, json_out: bool = False):
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, Fraction):
        if digits is None:
            return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        return _decimal(value, digits)
    if isinstance(value, float):
        if digits is None:
            return value if json_out else repr(value)
        return f"{value:.{digits}g}"
    return value


def _decimal(x: Fraction, digits: int) -> str:
    # exact rounding of a rational to `digits` significant digits
    from decimal import Context, Decimal

    ctx = Context(prec=digits)
    return str(ctx.divide(Decimal(x.numerator), Decimal(x.denominator)))


def format_rows(command: str, rows: list[dict], output: str, digits: int | None) -> str:
    header = HEADERS[command]
    json_out = output == "json"
    rendered = [{key: _render(row.get(key), digits, json_out) for key in header} for row in rows]
    if json_out:
        doc = {"schema": f"decoupling-lab/{command}/v{SCHEMA_VERSION}", "command": command, "rows": rendered}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rendered:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        rows = COMMANDS[args.command](args)
        stdout.write(format_rows(args.command, rows, args.output, args.digits))
    except UsageError as exc:
        stderr.write(f"decoupling-lab: error: {exc}\n")
        return 1
    except InvariantViolation as exc:
        stderr.write(f"decoupling-lab: internal check failed: {exc}\n")
        return 2
    except ValueError as exc:
        stderr.write(f"decoupling-lab: error: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())
