"""Command-line front end: ``geodetic-forge <command> ...``.

Exit codes: 0 success (geodetic / all checks pass), 1 error, 2 non-geodetic
input for check-geodetic, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import GeodeticForgeError
from .graphs import cayley_graph, export_dot, is_geodetic, subdivide
from .groups import FiniteGroup, GenSet, check_genset, group_from_spec
from .nabla import load_system, nabla
from .rewriting import (
    STRATEGIES,
    check_confluence_bounded,
    irreducible_words,
    reduce_word,
)
from .verify import (
    verify_cayley_correspondence,
    verify_free_product_composition,
    verify_iterated_subdivision,
    verify_theorem_a,
    verify_theorem_b,
)
from .words import Letter, format_word, parse_word

EXIT_OK, EXIT_ERROR, EXIT_NON_GEODETIC, EXIT_CHECK_FAILED = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    """The validated scalar part of a command line."""

    command: str
    n: int = 0
    m: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("n and m must be non-negative")


def load_fixture(spec: str, gens: str | None) -> tuple[FiniteGroup, GenSet]:
    """Group from a spec string; generators from --gens, the group file, or all non-identity elements."""
    group, stored = group_from_spec(spec)
    if gens:
        elements = [group.resolve(t) for t in gens.split(",") if t.strip()]
    elif stored is not None:
        elements = list(stored)
    else:
        elements = [g for g in range(group.order) if g != group.identity]
    return group, check_genset(group, elements)


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _parse_order(text: str | None) -> list[Letter] | None:
    if not text:
        return None
    return [Letter.parse(t) for t in text.replace(",", " ").split()]


def cmd_check_geodetic(args) -> int:
    group, genset = load_fixture(args.group, args.gens)
    verdict = is_geodetic(cayley_graph(group, genset))
    if verdict.geodetic:
        print(f"geodetic: {group.name} with {len(genset.elements)} generators")
        return EXIT_OK
    s, v, p, q = verdict.witness
    print(f"not geodetic: two shortest paths from {s} to {v}")
    print("  " + " -> ".join(map(str, p)))
    print("  " + " -> ".join(map(str, q)))
    return EXIT_NON_GEODETIC


def cmd_nabla(args) -> int:
    group, genset = load_fixture(args.group, args.gens)
    system = nabla(group, genset, args.n, _parse_order(args.order))
    _write(_dump(system.to_json()), args.output)
    if args.dot:
        args.dot.write_text(export_dot(system.graph, "subdivision"), encoding="utf-8")
    return EXIT_OK


def cmd_subdivide(args) -> int:
    group, genset = load_fixture(args.group, args.gens)
    graph, _ = subdivide(cayley_graph(group, genset), args.n)
    doc = {"n": args.n, "old_vertices": group.order, **graph.to_json()}
    _write(_dump(doc), args.output)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    group, genset = load_fixture(args.group, args.gens)
    graph = cayley_graph(group, genset)
    if args.n is not None:
        graph, _ = subdivide(graph, args.n)
        names = None
    else:
        names = [group.element_name(g) for g in range(group.order)]
    _write(export_dot(graph, "cayley", names), args.output)
    return EXIT_OK


def cmd_rewrite(args) -> int:
    system = load_system(args.system)
    word = parse_word(args.word or ["_"])
    unknown = [str(x) for x in word if x not in set(system.alphabet)]
    if unknown:
        raise GeodeticForgeError(f"letters not in the system's alphabet: {' '.join(unknown)}")
    result, steps = reduce_word(word, system, args.strategy, random.Random(args.seed))
    print(format_word(result))
    print(f"steps: {steps}")
    return EXIT_OK


def cmd_confluence(args) -> int:
    system = load_system(args.system)
    report = check_confluence_bounded(system, args.max_len, args.seed)
    if report.confluent:
        print(f"confluent up to length {args.max_len} ({report.critical_pairs_checked} critical pairs)")
        return EXIT_OK
    print(f"not confluent: {format_word(report.counterexample)}")
    for form in report.normal_forms:
        print(f"  normal form: {format_word(form)}")
    return EXIT_CHECK_FAILED


def cmd_growth(args) -> int:
    system = load_system(args.system)
    for k, count in enumerate(irreducible_words(system, args.length)):
        print(f"{k} {count}")
    return EXIT_OK


def _probes(text: str | None):
    if not text:
        return None
    probes = []
    for token in text.split(","):
        token = token.strip().lower()
        if token.startswith("c") and token[1:].isdigit():
            token = f"cyclic:{token[1:]}"
        elif token.startswith("s") and token[1:].isdigit():
            token = f"symmetric:{token[1:]}"
        probes.append(group_from_spec(token)[0])
    return probes


def cmd_verify(args) -> int:
    group, genset = load_fixture(args.group, args.gens)
    if args.check == "theorem-a":
        report = verify_theorem_a(group, genset, args.n, _probes(args.probes))
    elif args.check == "theorem-b":
        report = verify_theorem_b(group, genset, args.n)
    elif args.check == "iterated":
        report = verify_iterated_subdivision(group, genset, args.n, args.m)
    elif args.check == "correspondence":
        report = verify_cayley_correspondence(nabla(group, genset, args.n), args.radius)
    else:
        if args.with_group is None:
            raise GeodeticForgeError("verify compose needs --with GROUP (or free:<rank>)")
        if args.with_group.startswith("free:"):
            second = int(args.with_group.split(":", 1)[1])
        else:
            second = load_fixture(args.with_group, args.with_gens)[1]
        report = verify_free_product_composition(genset, second, args.n, args.radius, args.seed)
    if args.no_timing:
        report.millis = 0.0
    print(report.to_text())
    if args.output:
        args.output.write_text(_dump(report.to_json()), encoding="utf-8")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geodetic-forge",
        description="Rewriting systems from odd subdivisions of Cayley graphs.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    parser.add_argument(
        "--threads", type=int, default=None, help="accepted for compatibility; work runs in-process"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def fixture(p, with_n=True):
        p.add_argument("group", help="cyclic:<m>, symmetric:<k>, klein, or a JSON group file")
        p.add_argument("--gens", help="comma-separated element indices or names")
        if with_n:
            p.add_argument("-n", type=int, default=0)

    p = sub.add_parser("check-geodetic", help="is the Cayley graph geodetic?")
    fixture(p, with_n=False)
    p.set_defaults(func=cmd_check_geodetic)

    p = sub.add_parser("nabla", help="build the rewriting system of the n-th subdivision")
    fixture(p)
    p.add_argument("--order", help="letter order, most preferred first (tokens)")
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--dot", type=Path, help="also write the subdivided graph as DOT")
    p.set_defaults(func=cmd_nabla)

    p = sub.add_parser("subdivide", help="write the subdivided Cayley graph as JSON")
    fixture(p)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("export-dot", help="write the Cayley graph (or a subdivision) as DOT")
    fixture(p, with_n=False)
    p.add_argument("-n", type=int, default=None)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("rewrite", help="normal form of a word")
    p.add_argument("system", type=Path, help="system JSON or rules file")
    p.add_argument("word", nargs="*", help="letter tokens; '_' or nothing is the empty word")
    p.add_argument("--strategy", choices=STRATEGIES, default="leftmost")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("confluence", help="bounded confluence check")
    p.add_argument("system", type=Path)
    p.add_argument("--max-len", type=int, default=6)
    p.set_defaults(func=cmd_confluence)

    p = sub.add_parser("growth", help="irreducible words per length")
    p.add_argument("system", type=Path)
    p.add_argument("--length", type=int, default=6)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("verify", help="run a verification procedure")
    p.add_argument("check", choices=["theorem-a", "theorem-b", "iterated", "compose", "correspondence"])
    fixture(p)
    p.add_argument("-m", type=int, default=0)
    p.add_argument("--probes", help="comma-separated probe groups, e.g. c2,c3,s3")
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--with", dest="with_group", help="second factor for compose")
    p.add_argument("--with-gens", help="generators of the second factor")
    p.add_argument("-o", "--output", type=Path, help="write the JSON report here")
    p.add_argument("--no-timing", action="store_true", help="report 0 ms for reproducible output")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        RunConfig(args.command, n=getattr(args, "n", None) or 0, m=getattr(args, "m", 0), seed=args.seed)
        return args.func(args)
    except (GeodeticForgeError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
