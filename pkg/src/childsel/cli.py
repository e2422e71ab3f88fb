"""Command-line front end: ``childsel {validate,classify,bifurcations,count} NETWORK``.

Exit codes: 0 success, 1 I/O error, 2 invalid network or constraint,
3 analysis budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources

from .network import NetworkError, ReactionNetwork, network_summary, network_to_json, parse_network
from .report import (
    bifurcation_json,
    bifurcation_report,
    bifurcation_text,
    classify_json,
    classify_report,
    classify_text,
    summary_line,
)
from .selection import ConstraintInfeasible, SelectionConstraint, count_child_selections

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3

BUNDLED_PREFIX = "bundled:"


def bundled_names() -> list[str]:
    return sorted(p.name for p in resources.files("childsel.data").iterdir() if p.name.endswith(".rn"))


def read_network_text(path: str) -> str:
    """File contents; ``bundled:NAME`` reads one of the networks shipped with the package."""
    if path.startswith(BUNDLED_PREFIX):
        name = path[len(BUNDLED_PREFIX) :]
        if name not in bundled_names():
            raise FileNotFoundError(f"no bundled network {name!r} (have: {', '.join(bundled_names())})")
        return resources.files("childsel.data").joinpath(name).read_text(encoding="utf-8")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_network(path: str) -> ReactionNetwork:
    return parse_network(read_network_text(path))


def _parse_force(net: ReactionNetwork, items: list[str]) -> SelectionConstraint:
    pairs = []
    for item in items:
        met, sep, rxn = item.partition("=")
        if not sep or not met or not rxn:
            raise ConstraintInfeasible(f"--force expects METABOLITE=REACTION, got {item!r}")
        pairs.append((met.strip(), rxn.strip()))
    try:
        return SelectionConstraint.from_labels(net, pairs)
    except KeyError as exc:
        raise ConstraintInfeasible(str(exc.args[0])) from None


def _emit(args, text: str, payload: dict) -> None:
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(text)


def cmd_validate(args, net: ReactionNetwork) -> int:
    payload = {"summary": network_summary(net), **network_to_json(net)}
    _emit(args, f"ok: {summary_line(net)}\n", payload)
    return EXIT_OK


def cmd_count(args, net: ReactionNetwork) -> int:
    constraint = _parse_force(net, args.force)
    n = count_child_selections(net, constraint)
    _emit(args, f"{n}\n", {"count": n})
    return EXIT_OK


def cmd_classify(args, net: ReactionNetwork) -> int:
    constraint = _parse_force(net, args.force)
    rep = classify_report(net, constraint, args.limit, args.threads)
    verbose = args.verbose
    _emit(
        args,
        classify_text(net, rep, verbose, args.check_identity),
        classify_json(net, rep, verbose),
    )
    if args.timing:
        print(f"elapsed: {rep.timing:.3f} s", file=sys.stderr)
    if args.check_identity and rep.identity_unverified:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_bifurcations(args, net: ReactionNetwork) -> int:
    constraint = _parse_force(net, args.force)
    rep = bifurcation_report(net, constraint, args.limit, args.threads, args.witness)
    _emit(args, bifurcation_text(net, rep), bifurcation_json(net, rep))
    if args.timing:
        print(f"elapsed: {rep.timing:.3f} s", file=sys.stderr)
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(float(text)) if "e" in text.lower() else int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _epsilon(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("network", help="network file, or bundled:NAME for a shipped example")
    common.add_argument("--json", action="store_true", help="write JSON instead of text")
    common.add_argument("--limit", type=_positive_int, help="stop after this many Child Selections")
    common.add_argument(
        "--force",
        action="append",
        default=[],
        metavar="M=J",
        help="restrict to selections whose child of metabolite M is reaction J (repeatable)",
    )
    common.add_argument("--threads", type=int, default=1, help="worker processes for enumeration")
    common.add_argument("--verbose", "-v", action="store_true", help="per-selection detail")
    common.add_argument("--check-identity", action="store_true", help="report the det / (G, B) identity check")
    common.add_argument("--witness", type=_epsilon, metavar="EPS", help="build a sign-change witness per pair")
    common.add_argument("--timing", action="store_true", help="print elapsed time to stderr")

    parser = argparse.ArgumentParser(
        prog="childsel",
        description="Child Selection analysis of reaction-network Jacobian determinants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("validate", cmd_validate, "parse and summarize a network"),
        ("classify", cmd_classify, "classify Child Selections as good, bad or zero"),
        ("bifurcations", cmd_bifurcations, "find distance-1 good/bad pairs and their xi parameter"),
        ("count", cmd_count, "count Child Selections exactly"),
    ):
        p = sub.add_parser(name, parents=[common], help=doc, description=doc)
        p.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        text = read_network_text(args.network)
    except OSError as exc:
        print(f"error: cannot read {args.network}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        net = parse_network(text)
    except NetworkError as exc:
        where = f"{args.network}:{exc.lineno}" if exc.lineno is not None else args.network
        print(f"{where}: {type(exc).__name__}: {exc.message}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args, net)
    except ConstraintInfeasible as exc:
        print(f"error: infeasible constraint: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
