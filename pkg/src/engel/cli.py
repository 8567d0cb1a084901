"""``engel`` command line: ``sink``, ``verify`` and ``report``.

Exit status: 0 when every check passes, 1 on a mathematical check failure,
2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .catalog import GroupFileError, resolve_group
from .group import DEFAULT_ENUMERATION_THRESHOLD
from .perm import parse_cycles
from .report import LEMMAS, ConfigError, RunConfig, default_threads, read_config_file, render, run, with_overrides
from .sinks import minimal_sink

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("engel")


def _add_run_options(p: argparse.ArgumentParser, lemmas_default: str) -> None:
    # None means "not given", so config-file values survive
    p.add_argument("--config", help="JSON file with the same keys as these flags")
    p.add_argument("--catalog", help="'default', 'nilpotent', or comma-separated labels, recipes and group files")
    p.add_argument("--max-order", type=int)
    p.add_argument("--lemmas", help=f"comma-separated subset of {','.join(LEMMAS)} (default: {lemmas_default or 'none'})")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--threads", type=int, help="worker processes (default: $ENGEL_THREADS or 1)")
    p.add_argument("--enumeration-threshold", type=int)
    p.add_argument("--lattice-cap", type=int)
    p.add_argument("--l0-pairs", type=int, help="sample cap for (P, g) pairs per group")
    p.add_argument("--corrupt-oracle", action="store_true", default=None, help=argparse.SUPPRESS)
    p.set_defaults(lemmas_default=lemmas_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engel", description="Engel sinks, ranks and lemma checks for finite permutation groups.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sink", help="minimal Engel sink of one element")
    s.add_argument("--group", required=True, help="group file, catalog label, or recipe such as symmetric:4")
    s.add_argument("--element", required=True, help='element in 1-based cycle notation, e.g. "(1 2)"')
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--enumeration-threshold", type=int, default=DEFAULT_ENUMERATION_THRESHOLD)

    v = sub.add_parser("verify", help="run lemma checks over a catalog")
    _add_run_options(v, ",".join(LEMMAS))
    r = sub.add_parser("report", help="tabulate rank_G, r_star and rank_gamma_inf over a catalog")
    _add_run_options(r, "")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Built-in defaults, then the config file, then explicit flags."""
    data: dict = {"lemmas": args.lemmas_default, "threads": default_threads()}
    if args.config:
        data.update(read_config_file(args.config))
    base = RunConfig.from_mapping(data)
    lemmas = None
    if args.lemmas is not None:
        lemmas = tuple(x.strip() for x in args.lemmas.split(",") if x.strip())
    return with_overrides(
        base,
        catalog=args.catalog,
        max_order=args.max_order,
        lemmas=lemmas,
        seed=args.seed,
        format=args.format,
        out=args.out,
        threads=args.threads,
        enumeration_threshold=args.enumeration_threshold,
        lattice_cap=args.lattice_cap,
        l0_pairs=args.l0_pairs,
        corrupt_oracle=args.corrupt_oracle,
    )


def cmd_sink(args: argparse.Namespace) -> int:
    try:
        G = resolve_group(args.group, args.enumeration_threshold)
        g = parse_cycles(args.element, G.degree)
    except (GroupFileError, ValueError, OSError) as exc:
        print(f"engel sink: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not G.contains(g):
        print(f"engel sink: {args.element} is not an element of {G.label or args.group}", file=sys.stderr)
        return EXIT_USAGE
    if not G.is_enumerable:
        print(f"engel sink: group of order {G.order} is above the enumeration threshold", file=sys.stderr)
        return EXIT_USAGE
    rep = minimal_sink(G, g, rank=True)
    elements = [x.to_cycle_string() for x in rep.sink_elements()]
    if args.format == "json":
        doc = {
            "group": G.label or args.group,
            "order": G.order,
            "element": g.to_cycle_string(),
            "sink": elements,
            "sink_size": rep.size,
            "sink_subgroup_order": rep.sink_subgroup.order,
            "sink_rank": rep.sink_rank,
            "max_tail": rep.max_tail,
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"group: {G.label or args.group} (order {G.order})")
    print(f"element: {g.to_cycle_string()}")
    print(f"sink size: {rep.size}")
    print(f"sink subgroup order: {rep.sink_subgroup.order}")
    print(f"sink rank: {rep.sink_rank}")
    print(f"max tail: {rep.max_tail}")
    print("sink:")
    for e in elements:
        print(f"  {e}")
    return EXIT_OK


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"engel {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = run(cfg, structure=args.command == "report")
    except (ConfigError, GroupFileError) as exc:
        print(f"engel {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(render(result), cfg.out)
    for label, c in result.skipped():
        log.info("skipped %s on %s: %s", c.lemma, label, c.detail)
    for label, c in result.failures:
        print(f"FAIL {c.lemma} on {label}: {c.detail} (witness {c.witness})", file=sys.stderr)
    for label, v in result.violations:
        print(f"FAIL invariant on {label}: {v}", file=sys.stderr)
    n_checks = sum(len(r.lemmas) for r in result.rows)
    print(
        f"{len(result.rows)} groups, {n_checks} lemma verdicts, {len(result.failures)} failures, "
        f"{len(result.skipped())} skipped",
        file=sys.stderr,
    )
    return EXIT_OK if result.ok else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sink":
        return cmd_sink(args)
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
