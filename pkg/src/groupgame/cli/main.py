"""Command-line entry point: ``groupgame solve|verify|oligopoly|selftest``."""
from __future__ import annotations

import argparse
import dataclasses
import sys
import time

from groupgame import __version__
from groupgame.cli.config import METHODS, ConfigError, RunConfig, config_from_dict, load_config
from groupgame.cli.report import emit_report
from groupgame.cli.runner import EXIT_OK, EXIT_USAGE, run


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; 2 means non-convergence here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="report format (default json)")
    p.add_argument("--method", choices=METHODS, help="solver to run")
    p.add_argument("--seed", type=int, metavar="N", help="seed for randomized diagnostics")
    p.add_argument("--verbose", action="store_true", help="stream per-iteration residuals to stderr")
    p.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="groupgame", description="Relative-payoff zero-sum games between two symmetric groups.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="run the solver and the verification checks")
    solve.add_argument("--config", required=True, metavar="PATH")
    _common(solve)

    verify = sub.add_parser("verify", help="check a supplied symmetric profile")
    verify.add_argument("--config", required=True, metavar="PATH")
    verify.add_argument("--point", nargs=2, type=float, metavar=("S1", "S2"),
                        help="symmetric profile to check (overrides the config 'point')")
    _common(verify)

    olig = sub.add_parser("oligopoly", help="solve the oligopoly family from flags")
    olig.add_argument("--a", type=float, required=True)
    olig.add_argument("--b", type=float, required=True)
    olig.add_argument("--cA", type=float, required=True)
    olig.add_argument("--cC", type=float, required=True)
    olig.add_argument("--m", type=int, default=3)
    olig.add_argument("--n", type=int, default=2)
    olig.add_argument("--cap", type=float, help="strategy upper bound (default a)")
    _common(olig)

    sub.add_parser("selftest", help="run the acceptance suite")
    return parser


def _apply_flags(config: RunConfig, args) -> RunConfig:
    solver = config.solver
    if args.method:
        solver = dataclasses.replace(solver, method=args.method)
    changes = {"solver": solver}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.format:
        changes["output_format"] = args.format
    if args.out:
        changes["output_path"] = args.out
    if args.timings:
        changes["timings"] = True
    if getattr(args, "point", None):
        changes["point"] = tuple(args.point)
    return dataclasses.replace(config, **changes)


def _oligopoly_config(args) -> RunConfig:
    doc = {
        "family": "oligopoly",
        "params": {"a": args.a, "b": args.b, "cA": args.cA, "cC": args.cC},
        "groups": {"m": args.m, "n": args.n},
        "solver": {"method": "both"},
    }
    if args.cap is not None:
        doc["cap"] = args.cap
    return config_from_dict(doc)


def _selftest() -> int:
    from groupgame.acceptance import run_all

    t0 = time.perf_counter()
    results = run_all(lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    total = time.perf_counter() - t0
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed in {total:.2f} s")
    return EXIT_OK if not failed else 1


def _progress(method, k, point, residual):
    print(f"[{method}] iter {k:4d}  s1={point.s1:.10g}  s2={point.s2:.10g}  residual={residual:.3e}",
          file=sys.stderr, flush=True)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return _selftest()
    try:
        if args.command == "oligopoly":
            config = _oligopoly_config(args)
        else:
            config = load_config(args.config)
        config = _apply_flags(config, args)
    except ConfigError as exc:
        print(f"groupgame: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = run(config, verify_only=args.command == "verify",
                 on_iteration=_progress if args.verbose else None)
    for err in report.data["status"]["errors"]:
        print(f"groupgame: {err['type']}: {err['message']}", file=sys.stderr)
    try:
        emit_report(report, config.output_format, config.output_path)
    except OSError as exc:
        print(f"groupgame: cannot write report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
