"""Command-line surface: verify / search / replay / list.

Exit codes: 0 success, 1 at least one check failed (or a replayed
instance no longer holds), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .checks import CHECK_ANCHORS
from .core import DEFAULT_TOL, ToleranceConfig
from .errors import InvalidSpec, OpineqError, UnknownCheck
from .generators import evaluate_instance, instance_from_json
from .harness import (
    DEFAULT_ALPHA_GRID, DEFAULT_EXPONENT_GRID, RunConfig, run_suite,
    search_counterexample,
)


def _ratio(text: str) -> float:
    """Parse a float, allowing a/b fractions such as 4/3."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _parse_pqr(values: list[str] | None):
    if not values:
        return DEFAULT_EXPONENT_GRID
    grid = []
    for item in values:
        parts = [p.strip() for p in item.split(",")]
        if len(parts) != 3:
            raise InvalidSpec(f"--pqr needs three comma-separated values, got {item!r}")
        grid.append(tuple(_ratio(p) for p in parts))
    return tuple(grid)


def _parse_checks(values: list[str] | None) -> tuple[str, ...]:
    if not values:
        return tuple(CHECK_ANCHORS)
    names = []
    for item in values:
        names.extend(v.strip() for v in item.split(",") if v.strip())
    for name in names:
        if name not in CHECK_ANCHORS:
            raise UnknownCheck(f"no check named {name!r}")
    return tuple(names)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opineq",
        description="Randomized verification of operator-norm inequalities "
                    "for elementary operators over matrix-tuple modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run randomized checks and report margins")
    verify.add_argument("--checks", action="append",
                        help="comma-separated check names (default: all)")
    verify.add_argument("--trials", type=int, default=25)
    verify.add_argument("--dim", type=int, default=None,
                        help="fix the matrix dimension (default: random 1..6)")
    verify.add_argument("--len", type=int, default=None, dest="length",
                        help="fix the tuple length (default: random 1..4)")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--tol", type=float, default=None,
                        help="override the relative tolerance")
    verify.add_argument("--pqr", action="append", metavar="P,Q,R",
                        help="exponent triple with 1/q + 1/r = 2/p; repeatable; "
                             "fractions like 4/3 are accepted")
    verify.add_argument("--alpha", action="append", type=_ratio,
                        help="fractional power; repeatable")
    verify.add_argument("--out", default=None, help="write JSONL reports here")
    verify.add_argument("--weights", choices=("uniform", "random"), default="random")

    search = sub.add_parser("search", help="hill-climb toward negative margins")
    search.add_argument("--check", required=True)
    search.add_argument("--drop", action="append", default=None,
                        choices=("normality", "contraction"),
                        help="hypothesis to drop during generation; repeatable")
    search.add_argument("--budget", type=int, default=1000)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--dim", type=int, default=None)
    search.add_argument("--len", type=int, default=None, dest="length")
    search.add_argument("--out", default=None,
                        help="write the minimal-margin instance as JSON here")

    replay = sub.add_parser("replay", help="re-evaluate a serialized instance")
    replay.add_argument("--instance", required=True)

    sub.add_parser("list", help="list available checks and their anchors")
    return parser


def _cmd_verify(args) -> int:
    tolerances = DEFAULT_TOL
    if args.tol is not None:
        tolerances = ToleranceConfig(tol_rel=args.tol)
    cfg = RunConfig(
        trials=args.trials,
        checks=_parse_checks(args.checks),
        tolerances=tolerances,
        exponent_grid=_parse_pqr(args.pqr),
        alpha_grid=tuple(args.alpha) if args.alpha else DEFAULT_ALPHA_GRID,
        output_path=args.out,
        seed=args.seed,
        dim=args.dim,
        length=args.length,
        weights_mode=args.weights,
    )
    summary = run_suite(cfg)
    for name in cfg.checks:
        slot = summary.counts.get(name, {"pass": 0, "fail": 0, "error": 0})
        worst = summary.worst_margin.get(name)
        worst_text = f"{worst:+.3e}" if worst is not None else "n/a"
        print(f"{name:22s} pass {slot['pass']:5d}  fail {slot['fail']:4d}  "
              f"error {slot['error']:4d}  worst margin {worst_text}")
    verdict = "FAIL" if summary.failed else "OK"
    print(f"{summary.lines} report lines; overall {verdict}")
    return 1 if summary.failed else 0


def _cmd_search(args) -> int:
    result = search_counterexample(
        args.check, drop=tuple(args.drop or ()), budget=args.budget,
        seed=args.seed, dim=args.dim, length=args.length)
    rep = result.report
    print(f"{args.check}: best normalized margin {rep.margin / rep.scale:+.6e} "
          f"after {result.evaluations} evaluations "
          f"(drop: {', '.join(args.drop) if args.drop else 'none'})")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(result.instance.to_json(), fh, sort_keys=True)
            fh.write("\n")
        print(f"instance written to {args.out}")
    return 0


def _cmd_replay(args) -> int:
    with open(args.instance, "r", encoding="utf-8") as fh:
        inst = instance_from_json(json.load(fh))
    rep = evaluate_instance(inst)
    print(json.dumps(rep.to_json_dict(), sort_keys=True))
    return 0 if rep.holds else 1


def _cmd_list() -> int:
    for name, anchor in CHECK_ANCHORS.items():
        print(f"{name:22s} {anchor}")
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "search":
            return _cmd_search(args)
        if args.command == "replay":
            return _cmd_replay(args)
        return _cmd_list()
    except (InvalidSpec, UnknownCheck) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OpineqError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
