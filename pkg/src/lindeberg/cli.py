"""Command line entry point: ``lindeberg {constants,table,fraction,bounds,experiment}``.

Exit codes: 0 success, 1 invalid input, 2 internal failure, 3 the fuzzer found
an inequality violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import bounds, experiments
from .constants import constants
from .distributions import DistributionError, parse_distribution
from .fractions import (G_0, G_1, G_CONST, G_STAR, FractionError, FractionKind, FractionParams,
                        WeightFunctionError, fraction, two_point_fraction_closed_form)
from .specfun import std_normal_cdf

EXIT_OK, EXIT_USER, EXIT_INTERNAL, EXIT_VIOLATION = 0, 1, 2, 3
FORMATS = ("table", "csv", "json")
REFERENCE_BANNER = "reference data quoted from prior work"
WEIGHTS = {"gstar": G_STAR, "gc": G_CONST, "g0": G_0, "g1": G_1}


class UserError(Exception):
    """Invalid input; reported on stderr with exit code 1."""


# -- argument parsing -------------------------------------------------------------

def _positive(text: str, allow_gstar: bool) -> float:
    t = text.strip().lower()
    if allow_gstar and t == "gstar":
        return constants().gamma_star
    try:
        v = float("inf") if t in ("inf", "infinity") else float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _epsilon(text: str) -> float:
    return _positive(text, allow_gstar=False)


def _gamma(text: str) -> float:
    return _positive(text, allow_gstar=True)


def _finite_positive(text: str) -> float:
    v = _positive(text, allow_gstar=False)
    if math.isinf(v):
        raise argparse.ArgumentTypeError("must be finite")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UserError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lindeberg", description=__doc__.splitlines()[0])
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=FORMATS, default="table")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("constants", parents=[fmt], help="named constants to 10 digits")

    p = sub.add_parser("table", parents=[fmt], help="computed tables 3 and 4, quoted tables ref1 and ref2")
    p.add_argument("which", choices=("3", "4", "ref1", "ref2"))

    p = sub.add_parser("fraction", parents=[fmt], help="fraction of n i.i.d. copies of a JSON distribution")
    p.add_argument("dist_file", type=Path)
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--g", choices=tuple(WEIGHTS), default="gstar")
    p.add_argument("--eps", type=_epsilon, default=1.0)
    p.add_argument("--gamma", type=_gamma, default=1.0)
    p.add_argument("--type", choices=("esseen", "rozovskii"), default="esseen")
    p.add_argument("--closed-form", action="store_true",
                   help="also evaluate the two-point closed form and report the difference")

    p = sub.add_parser("bounds", parents=[fmt], help="every lower and upper constant bound at (eps, gamma)")
    p.add_argument("--eps", type=_epsilon, default=1.0)
    p.add_argument("--gamma", type=_gamma, default=1.0)

    p = sub.add_parser("experiment", help="convergence experiments and the inequality fuzzer (CSV output)")
    p.add_argument("which", choices=("esseen", "bessel", "fuzz"))
    p.add_argument("--p", type=float, default=0.75, help="esseen: P(X > 0), in [1/2, 1)")
    p.add_argument("--alpha", type=_finite_positive, default=1.0, help="bessel: n P(|X| = 1)")
    p.add_argument("--n-max", type=_positive_int, default=None)
    p.add_argument("--points", type=_positive_int, default=50, help="bessel: number of even n values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=500)
    p.add_argument("--output", "-o", type=Path, default=None, help="CSV path (default stdout)")
    return parser


# -- rendering ------------------------------------------------------------------

def _num(v, digits: int = 10) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:.{digits}f}"
    return str(v)


def _render(headers: Sequence[str], rows: Sequence[Sequence], fmt: str, digits: int = 10,
            banner: str | None = None) -> str:
    if fmt == "json":
        doc = [dict(zip(headers, (_json_value(v) for v in r))) for r in rows]
        if banner:
            return json.dumps({"note": banner, "rows": doc}, indent=2) + "\n"
        return json.dumps(doc, indent=2) + "\n"
    cells = [[_num(v, digits) for v in r] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(headers)
        w.writerows(cells)
        return buf.getvalue()
    widths = [max([len(h)] + [len(c[i]) for c in cells]) for i, h in enumerate(headers)]
    lines = [banner] if banner else []
    lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def _gamma_label(g) -> str:
    return g if isinstance(g, str) else _num(float(g), 2).rstrip("0").rstrip(".")


# -- subcommands ----------------------------------------------------------------

def cmd_constants(args) -> str:
    c = constants().as_dict()
    c["gamma0"] = bounds.gamma0()
    return _render(("name", "value"), list(c.items()), args.format)


def cmd_table(args) -> str:
    if args.which == "3":
        rows = []
        for which, points, fn in (("esseen", bounds.TABLE3_ESSEEN_POINTS, bounds.aex_upper_esseen),
                                  ("rozovskii", bounds.TABLE3_ROZOVSKII_POINTS, bounds.aex_upper_rozovskii)):
            for eps, g in points:
                value = fn(FractionParams(eps, bounds.resolve_gamma(g))).value
                rows.append((which, _num(eps, 2) if math.isfinite(eps) else "inf", _gamma_label(g), value))
        return _render(("type", "epsilon", "gamma", "upper_bound"), rows, args.format, digits=5)
    if args.which == "4":
        rows = []
        for g in bounds.TABLE4_GAMMAS:
            b = bounds.abe_lower_esseen(g)
            rows.append((_gamma_label(g), b.witness_p, b.value))
        return _render(("gamma", "p", "lower_bound"), rows, args.format, digits=6)
    which = "esseen" if args.which == "ref1" else "rozovskii"
    rows = [("0+" if r.gamma is None else ("inf" if math.isinf(r.epsilon) else _num(r.epsilon, 2)),
             "any" if r.gamma is None else _gamma_label(r.gamma), r.value)
            for r in bounds.reference_tables()[which]]
    return _render(("epsilon", "gamma", "constant"), rows, args.format, digits=4, banner=REFERENCE_BANNER)


def _load_distribution(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_distribution(text)
    except json.JSONDecodeError as exc:
        raise UserError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except DistributionError as exc:
        raise UserError(f"{path}: {exc}") from None


def cmd_fraction(args) -> str:
    dist = _load_distribution(args.dist_file)
    kind = FractionKind.ESSEEN if args.type == "esseen" else FractionKind.ROZOVSKII
    params = FractionParams(args.eps, args.gamma)
    g = WEIGHTS[args.g]
    try:
        fv = fraction(kind, [dist] * args.n, g, params)
    except (FractionError, WeightFunctionError) as exc:
        raise UserError(str(exc)) from None
    row = {"type": args.type, "g": args.g, "n": args.n, "epsilon": args.eps, "gamma": args.gamma,
           "value": fv.value, "witness_z": fv.attained_z, "side": fv.side.value}
    if args.closed_form:
        atoms = dist.atoms
        if len(atoms) != 2:
            raise UserError("--closed-form needs a two-point distribution")
        p = next(pr for x, pr in atoms if x > 0)
        # the closed forms are stated for the heavier positive atom; -X has the same fractions
        # except for the sign of M, which enters only through |M|
        closed = two_point_fraction_closed_form(kind, g, max(p, 1.0 - p), args.n, params)
        row["closed_form"] = closed
        row["difference"] = fv.value - closed
    return _render(tuple(row), [tuple(row.values())], args.format, digits=12)


def cmd_bounds(args) -> str:
    params = FractionParams(args.eps, args.gamma)
    items = []
    if math.isfinite(args.gamma):
        items += bounds.exact_constant_lower_bounds(params)
        items.append(bounds.abe_lower_esseen(args.gamma))
    items.append(bounds.abe_lower_rozovskii(params) if math.isfinite(args.gamma) else None)
    items += bounds.asymptotic_lower_bounds(params)
    for low, up in bounds.aex_two_sided(params).values():
        items += [low, up]
    rows = [(b.target.value, b.kind.value, b.value, b.witness_p, b.formula) for b in items if b is not None]
    floor = (std_normal_cdf(1.0) - 0.5) / min(1.0, args.eps)
    rows.insert(0, ("symmetric_floor", "lower", floor, None, "(Phi(1) - 1/2) / min(1, eps)"))
    return _render(("target", "kind", "value", "witness_p", "formula"), rows, args.format, digits=6)


FUZZ_HEADER = ("fraction", "max_ratio", "trials", "checks", "violations")


def cmd_experiment(args) -> tuple[str, int]:
    if args.which == "fuzz":
        rep = experiments.inequality_fuzzer(args.seed, args.trials)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FUZZ_HEADER)
        for label, ratio in sorted(rep.max_ratio.items()):
            bad = sum(1 for v in rep.violations if v.fraction == label)
            w.writerow((label, repr(ratio), rep.trials, rep.checks, bad))
        for v in rep.violations:
            print(f"violation: trial {v.trial} {v.family} n={v.n} {v.fraction} eps={v.epsilon} "
                  f"gamma={v.gamma}: ratio {v.ratio} > {v.constant}", file=sys.stderr)
        return buf.getvalue(), (EXIT_OK if rep.ok else EXIT_VIOLATION)
    try:
        if args.which == "esseen":
            n_max = args.n_max or 10_000
            rep = experiments.esseen_expansion_experiment(args.p, range(1, n_max + 1))
        else:
            n_max = args.n_max or 2000
            start = 2 * (math.floor(args.alpha / 2) + 1)
            if start > n_max:
                raise UserError(f"--n-max must be at least {start} for alpha = {args.alpha}")
            step = max(2, 2 * ((n_max - start) // (2 * max(1, args.points - 1))))
            ns = list(range(n_max, start - 1, -step))[::-1]
            rep = experiments.three_point_bessel_experiment(args.alpha, ns)
    except ValueError as exc:
        raise UserError(str(exc)) from None
    return experiments.write_csv([rep]), EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        handlers: dict[str, Callable] = {"constants": cmd_constants, "table": cmd_table,
                                         "fraction": cmd_fraction, "bounds": cmd_bounds}
        if args.command == "experiment":
            text, code = cmd_experiment(args)
            if args.output is None:
                sys.stdout.write(text)
            else:
                try:
                    args.output.write_text(text)
                except OSError as exc:
                    raise UserError(f"cannot write {args.output}: {exc.strerror}") from None
                print(args.output)
            return code
        sys.stdout.write(handlers[args.command](args))
        return EXIT_OK
    except UserError as exc:
        print(f"lindeberg: error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception as exc:  # noqa: BLE001 - the exit-code contract maps every other failure to 2
        print(f"lindeberg: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
