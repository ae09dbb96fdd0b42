"""Verify the foliated product formula and its number-field counterpart.

Exit codes: 0 all checks passed, 2 a formula check failed beyond tolerance,
1 operational error (parse, validation, hypothesis violation, numerics).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .arithmetic import (
    analogy_table,
    gaussian_places,
    parse_gaussian_fraction,
    parse_rational,
    product_formula_residual,
    rational_places,
)
from .documents import parse_scenario, report_json, scenario_digest
from .errors import FoliationLabError
from .eta import Method
from .orbits import find_singular_orbits
from .projective import PointCP1, RationalFunction, format_complex
from .verifier import verify_all
from .winding import winding_order

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FORMULA = 2
ARITH_TOL = 1e-12


def parse_partition(text: str | None) -> dict[int, Method] | None:
    """'A,B,A' (by sorted orbit index) or '0:A,2:B'."""
    if not text:
        return None
    out = {}
    for i, item in enumerate(x.strip() for x in text.split(",") if x.strip()):
        key, sep, val = item.partition(":")
        if sep:
            out[int(key)] = Method(val.strip().upper())
        else:
            out[i] = Method(item.upper())
    return out


def _parse_coeffs(text: str) -> tuple[complex, ...]:
    return tuple(complex(tok.strip().replace("i", "j")) for tok in text.split(",") if tok.strip())


def _parse_point(text: str) -> PointCP1:
    if text.strip().lower() in ("inf", "infinity"):
        return PointCP1.infinity()
    re_, _, im = text.partition(",")
    return PointCP1.from_complex(complex(float(re_), float(im or 0.0)))


def _summary(report) -> str:
    lines = []
    if report.scenario_digest:
        lines.append(f"scenario {report.scenario_digest[:16]}")
    for i, o in enumerate(report.orbits):
        lines.append(
            f"  orbit {i}: n={o.period_n} l={o.length_l:.12g} ord={o.order:+d} base={o.base_point}"
        )
    lines.append(f"sum l*ord = {report.sum_l_ord:.6e}   residual = {report.residual:.3e}")
    lines.append(f"order constancy: {'ok' if report.constancy_ok else 'FAILED'}")
    for i, rel in report.tube_checks:
        lines.append(f"  tube {i}: relative error {rel:.3e}")
    for r in report.stokes_checks:
        lines.append(f"  stokes residual {r:.3e}")
    if report.balance_residual is not None:
        lines.append(f"boundary balance residual = {report.balance_residual:.3e}")
    if report.diagnostic:
        lines.append(report.diagnostic)
    lines.append("PASSED" if report.passed else "FAILED")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    scenario = parse_scenario(args.scenario)
    report = verify_all(scenario, parse_partition(args.partition), scenario_digest(scenario), args.jobs)
    print(_summary(report))
    if args.json:
        Path(args.json).write_text(report_json(report), encoding="utf-8")
    if report.passed:
        return EXIT_OK
    if report.diagnostic_code:
        print(report.diagnostic, file=sys.stderr)
        return EXIT_ERROR
    return EXIT_FORMULA


def cmd_orbits(args) -> int:
    scenario = parse_scenario(args.scenario)
    for i, o in enumerate(find_singular_orbits(scenario)):
        pts = ", ".join(str(p) for p in o.points)
        print(f"{i}: n={o.period_n} l={o.length_l:.12g} ord={o.order:+d} points=[{pts}]")
    return EXIT_OK


def cmd_order(args) -> int:
    f = RationalFunction(_parse_coeffs(args.num), _parse_coeffs(args.den))
    print(winding_order(f, _parse_point(args.center), args.radius))
    return EXIT_OK


def _places(args):
    if args.rational:
        return rational_places(*parse_rational(args.rational))
    if args.gaussian:
        return gaussian_places(*parse_gaussian_fraction(args.gaussian))
    return None


def cmd_arith(args) -> int:
    places = _places(args)
    if places is None:
        raise ValueError("one of --rational or --gaussian is required")
    for v in places:
        print(f"{str(v.place):<16} ord={v.ord:+d} log N={v.log_norm:.12f} log|f|={v.log_abs:+.12f}")
    residual = product_formula_residual(places)
    print(f"residual = {residual:.3e}")
    return EXIT_OK if residual < ARITH_TOL else EXIT_FORMULA


def cmd_analogy(args) -> int:
    scenario = parse_scenario(args.scenario)
    report = verify_all(scenario, None, scenario_digest(scenario))
    print(analogy_table(report, _places(args)))
    if report.diagnostic_code:
        print(report.diagnostic, file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if report.passed else EXIT_FORMULA


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1, keeping 2 for formula failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="foliation-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run every check on a scenario")
    p.add_argument("scenario")
    p.add_argument("--partition", help="per-orbit method, e.g. 'A,B' or '1:B'")
    p.add_argument("--json", metavar="OUT", help="write the machine-readable report")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbits", help="list the closed orbits through zeros and poles")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("order", help="winding number of f'/f around a circle")
    p.add_argument("--num", required=True, help="numerator coefficients, low degree first")
    p.add_argument("--den", default="1")
    p.add_argument("--center", required=True, help="re,im or inf (use --center=-2,0 for negatives)")
    p.add_argument("--radius", type=float, required=True)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("arith", help="places and product formula for a rational or Gaussian number")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--rational", metavar="P/Q")
    g.add_argument("--gaussian", metavar="A+BI[/C+DI]")
    p.set_defaults(func=cmd_arith)

    p = sub.add_parser("analogy", help="orbits beside the places of a number")
    p.add_argument("scenario")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--rational", metavar="P/Q")
    g.add_argument("--gaussian", metavar="A+BI[/C+DI]")
    p.set_defaults(func=cmd_analogy)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except FoliationLabError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
