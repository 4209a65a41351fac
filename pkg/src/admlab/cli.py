"""Command-line entry point.

Exit codes: 0 success, 2 the input could not be parsed, 3 a probe failed.
``ADMLAB_TOL`` overrides default tolerances (``"1e-9"`` or
``"quad_abs_tol=1e-9,limit_rel_tol=1e-7"``).
"""

from __future__ import annotations

import argparse
import os
import sys

from .convergence import flat_norm_upper
from .errors import AdmlabError, ParseError, ProbeFailed
from .numerics import Tolerances
from .scenario import (
    adm_summary,
    graph_of,
    validation_summary,
    builtin_document,
    builtin_names,
    emit_mass_curve,
    load_scenario,
    mass_curve_csv,
    parse_scenario,
    run_scenario,
)
from .serialization import dumps, load_geometry

EXIT_OK, EXIT_PARSE, EXIT_PROBE = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _interval(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    try:
        a, b = float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None
    if not sep or not a < b:
        raise argparse.ArgumentTypeError(f"expected a:b with a < b, got {text!r}")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="admlab", description="Hawking and ADM masses of rotationally symmetric manifolds")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check the class conditions for a geometry")
    v.add_argument("spec")
    v.add_argument("--curvature-tol", type=float, default=1e-8)

    m = sub.add_parser("mass", help="ADM mass of a geometry")
    m.add_argument("spec")
    m.add_argument("--method", choices=("limit", "chart", "both"), default="limit")

    c = sub.add_parser("curve", help="Hawking masses at geometric area radii, as CSV")
    c.add_argument("spec")
    c.add_argument("--range", type=_interval, required=True, metavar="a:b")
    c.add_argument("--count", type=int, default=20)
    c.add_argument("--out", help="write the CSV here instead of stdout")

    s = sub.add_parser("sequence", help="run a scenario file or a built-in scenario by name")
    s.add_argument("scenario")
    s.add_argument("--parallel", action="store_true", help="fan member computations over threads")
    s.add_argument("--json", help="write the run report here (overrides the scenario)")
    s.add_argument("--csv", help="write mass curves here (overrides the scenario)")

    f = sub.add_parser("flatnorm", help="flat-norm upper bound between two graphs")
    f.add_argument("spec_a")
    f.add_argument("spec_b")
    f.add_argument("--window", type=_interval, required=True, metavar="a:b")

    sub.add_parser("list-builtins", help="names of the packaged scenarios")
    return p


def _load_scenario(ref: str):
    if os.path.exists(ref):
        return load_scenario(ref)
    if ref in builtin_names():
        return parse_scenario(builtin_document(ref))
    raise ParseError(f"no scenario file or built-in named {ref!r}")


def _run(args, out) -> int:
    tols = Tolerances.from_env()
    if args.command == "list-builtins":
        for name in builtin_names():
            out.write(f"{name}\t{builtin_document(name).get('description', '')}\n")
        return EXIT_OK
    if args.command == "validate":
        out.write(dumps(validation_summary(load_geometry(args.spec), args.curvature_tol)))
        return EXIT_OK
    if args.command == "mass":
        out.write(dumps(adm_summary(load_geometry(args.spec), args.method, tols)))
        return EXIT_OK
    if args.command == "curve":
        if args.count < 2:
            raise ParseError("--count must be at least 2", field="count")
        text = mass_curve_csv(emit_mass_curve(load_geometry(args.spec), args.range, args.count))
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            out.write(text)
        return EXIT_OK
    if args.command == "flatnorm":
        ga, gb = graph_of(load_geometry(args.spec_a)), graph_of(load_geometry(args.spec_b))
        if ga is None or gb is None:
            raise ProbeFailed("flatnorm", "both geometries need a graph picture")
        out.write(dumps(flat_norm_upper(ga, gb, *args.window, tol=tols.quad_abs_tol)))
        return EXIT_OK
    if args.command == "sequence":
        sc = _load_scenario(args.scenario)
        if args.json:
            sc.output["json"] = args.json
        if args.csv:
            sc.output["csv"] = args.csv
        res = run_scenario(sc, parallel=args.parallel, tolerances=tols, check=False)
        out.write(dumps(res))
        if not res.ok:
            for f in res.failures:
                sys.stderr.write(f"probe {f['id']!r} failed: {f['diagnostic']}\n")
            return EXIT_PROBE
        return EXIT_OK
    raise AssertionError(args.command)  # argparse rejects unknown commands


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = _run(args, sys.stdout)
    except (ParseError, OSError) as exc:
        sys.stderr.write(f"admlab: {exc}\n")
        code = EXIT_PARSE
    except ValueError as exc:
        # malformed ADMLAB_TOL or arguments that fail a precondition
        sys.stderr.write(f"admlab: {exc}\n")
        code = EXIT_PARSE
    except AdmlabError as exc:
        sys.stderr.write(f"admlab: {exc}\n")
        code = EXIT_PROBE
    return code


if __name__ == "__main__":
    sys.exit(main())
