"""Command line entry point.

    arithchern verify <file> [--grid N] [--tol T] [--report out.json]
    arithchern selftest [--filter name] [--grid N] [--dc-scale S]
    arithchern convergence <file> --grids 64,128,256

Exit status is 0 whenever a run completes, whatever the residual; it is
nonzero only when an instance cannot be read or a computation fails.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .arithmetic import ImproperIntersection
from .poly_ring import NotZeroDimensional
from .verify import SchemaError, convergence, load_instance, verify

log = logging.getLogger("arithchern")

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3


def _load(path):
    try:
        return load_instance(path)
    except OSError as exc:
        log.error("cannot read %s: %s", path, exc)
    except (SchemaError, ImproperIntersection, NotZeroDimensional) as exc:
        log.error("%s: %s: %s", path, type(exc).__name__, exc)
    return None


def cmd_verify(args) -> int:
    spec = _load(args.file)
    if spec is None:
        return EXIT_INPUT
    N = args.grid or spec.N
    tol = args.tol if args.tol is not None else spec.tol
    report = verify(spec, N, mode=args.mode)
    for line in report.lines():
        print(line)
    d = report.diagnostics
    if "ddc_residual" in d:
        print(f"{'dd^c residual (sup)':<26} {d['ddc_residual']['sup']:.3e}"
              f"  (N^2 * sup = {d['ddc_residual']['C_estimate']:.3g})")
    if "family_spread" in d:
        print(f"{'family spread':<26} {d['family_spread']['spread']:.3e}")
    rc = d["resultant_cross_check"]
    print(f"{'|Res(s1, s2)|':<26} {rc['abs_resultant']}  "
          f"({'agrees' if rc['agrees'] else 'DISAGREES'} with #Gamma)")
    if report.residual is not None:
        verdict = "within" if abs(report.residual) <= tol else "outside"
        print(f"residual is {verdict} tolerance {tol:g}")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.dumps() + "\n")
        log.info("report written to %s", args.report)
    return EXIT_OK if report.complete else EXIT_COMPUTE


def cmd_selftest(args) -> int:
    from .selftest import selftest
    try:
        results = selftest(args.filter, args.grid, args.dc_scale)
    except KeyError as exc:
        log.error("%s", exc.args[0])
        return EXIT_INPUT
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed} passed, {failed} failed")
    return EXIT_OK


def cmd_convergence(args) -> int:
    spec = _load(args.file)
    if spec is None:
        return EXIT_INPUT
    try:
        grids = [int(g) for g in args.grids.split(",")]
    except ValueError:
        log.error("--grids takes a comma separated list of integers")
        return EXIT_INPUT
    rows = convergence(spec, grids, mode=args.mode)
    print(f"{'N':>6} {'residual':>12} {'ratio':>8}")
    for r in rows:
        res = f"{r['residual']:.4e}" if r["residual"] is not None else "n/a"
        ratio = f"{r['ratio']:.2f}" if "ratio" in r else ""
        print(f"{r['N']:>6} {res:>12} {ratio:>8}")
    if args.json:
        print(json.dumps(rows))
    return EXIT_OK if all(r["residual"] is not None for r in rows) else EXIT_COMPUTE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arithchern",
                                description="Check the c2 identity for exact sequences "
                                            "of hermitian bundles on P^1 over Z.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="compute every term and the residual")
    v.add_argument("file")
    v.add_argument("--grid", type=int, default=None, help="resolution N (default from file)")
    v.add_argument("--tol", type=float, default=None, help="tolerance to compare against")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--mode", choices=("fd", "analytic"), default="fd",
                   help="derivatives by finite differences or symbolically")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("selftest", help="run the invariant suites")
    s.add_argument("--filter", default=None, help="only suites whose name contains this")
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--dc-scale", type=float, default=1.0,
                   help="scale the d^c convention (negative control)")
    s.set_defaults(func=cmd_selftest)

    c = sub.add_parser("convergence", help="residual over several resolutions")
    c.add_argument("file")
    c.add_argument("--grids", default="64,128,256")
    c.add_argument("--mode", choices=("fd", "analytic"), default="fd")
    c.add_argument("--json", action="store_true", help="also print the rows as JSON")
    c.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
