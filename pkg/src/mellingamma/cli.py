"""Command-line frontend.

Exit codes: 0 when every selected check passes, 1 when a check fails, 2 on
input errors (malformed config, bad rationals, group cap exceeded, ...).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from mellingamma import __version__
from mellingamma.checks import CHECKS
from mellingamma.config import ConfigError, RunConfig, load_config
from mellingamma.rootdata import GroupTooLarge

SCHEMA = "mgk/1"
SUBCOMMANDS = ("key-prop", "unipotent", "e-theta", "multiplier", "coinvariants", "wprime", "tor-demo", "suite")

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="TOML (or JSON) run configuration")
    p.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--convention", choices=("unsigned", "signed"), help="sign convention for transported structures")
    p.add_argument("--c", metavar="P/Q", help="exponential parameter (nonzero rational)")
    p.add_argument("--window", type=_positive_int, metavar="N", help="de Rham window")
    p.add_argument("--cap", type=_positive_int, metavar="N", help="maximum Weyl group order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mellingamma", description="Exact checks for gamma-kernel convolution.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name: str, target, help_: str):
        p = target.add_parser(name, help=help_)
        _add_common(p)
        if name == "unipotent":
            p.add_argument("--n-max", type=_positive_int, metavar="N", help="top level of the tower")
        if name == "suite":
            p.add_argument("--profile", choices=("smoke", "full"), help="smoke: GL(2) cases only")
            p.add_argument("--jobs", type=_positive_int, metavar="N", help="worker processes")
        return p

    helps = {
        "key-prop": "gamma convolution preserves E_xi equivariantly",
        "unipotent": "gamma convolution on the unipotent tower",
        "e-theta": "gamma convolution on the induced module E_theta",
        "multiplier": "dimension of the gamma multiplier",
        "coinvariants": "coinvariant algebra of the stabilizer",
        "wprime": "the extension W' and its lifts",
        "tor-demo": "Koszul Tor of Kummer modules",
        "suite": "run the acceptance matrix",
    }
    for name in SUBCOMMANDS:
        add(name, sub, helps[name])
    check = sub.add_parser("check", help="alias: check <subcommand>")
    check_sub = check.add_subparsers(dest="check_command", metavar="CHECK")
    for name in SUBCOMMANDS[:-1]:
        add(name, check_sub, helps[name])
    return parser


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return cfg.with_overrides(
        c=args.c,
        window=args.window,
        convention=args.convention,
        cap=args.cap,
        n_max=getattr(args, "n_max", None),
        profile=getattr(args, "profile", None),
        jobs=getattr(args, "jobs", None),
    )


def _human(report: dict, out) -> None:
    for r in report["reports"]:
        mark = "PASS" if r["passed"] else "FAIL"
        name = r.get("id", r.get("check"))
        print(f"{mark}  {name}", file=out)
    for c in report.get("criteria", []):
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"{mark}  criterion {c['criterion']}: {c['name']}", file=out)
    print(f"overall: {'PASS' if report['passed'] else 'FAIL'}", file=out)


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _run_suite(cfg: RunConfig, args) -> dict:
    from mellingamma.suite import run_suite

    extra = []
    if args.config:
        rd = cfg.root()
        rd.order  # enumerate now so a cap violation is an input error
        for name in cfg.checks:
            extra.append(CHECKS[name](cfg))
    res = run_suite(cfg.profile, cfg.convention, cfg.jobs)
    return {"reports": res.cases + extra, "criteria": res.criteria(), "profile": cfg.profile}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    if command == "check":
        command = args.check_command
    if command is None:
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    try:
        cfg = _load(args)
        if command == "suite":
            body = _run_suite(cfg, args)
        else:
            body = {"reports": [CHECKS[command](cfg)]}
    except (ConfigError, GroupTooLarge, ValueError, KeyError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, RuntimeError) as exc:
        body = {"reports": [{"check": command, "passed": False, "details": {"error": str(exc)}}]}
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "input": cfg.echo(),
        "passed": all(r["passed"] for r in body["reports"]),
        **body,
        "timing": {"seconds": round(time.perf_counter() - start, 3)},
    }
    human_out = sys.stdout
    if args.json == "-":
        sys.stdout.write(render_json(report))
        human_out = sys.stderr
    elif args.json:
        try:
            Path(args.json).write_text(render_json(report), encoding="utf-8")
        except OSError as exc:
            print(f"input error: cannot write {args.json}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    _human(report, human_out)
    return EXIT_PASS if report["passed"] else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
