"""Command-line front end: parse graphs, enumerate, verify, generate.

Graph files use a plain text format: a header line ``p pm <nL> <nR> <m>``
followed by ``m`` lines ``e <u> <v>`` with 1-based ``u`` in the left
class and ``v`` in the right class.  Lines starting with ``c`` are
comments.  Exit codes: 0 success, 2 no perfect matching, 3 malformed
input.
"""

from __future__ import annotations

import argparse
import sys

from . import oracle
from .enumerator import enumerate_matchings, matching_of_tree
from .errors import MalformedInput, NoPerfectMatching, TestGuard
from .graph import BipartiteGraph, build_graph


def parse_graph_file(text: str) -> BipartiteGraph:
    header = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if header is not None:
                raise MalformedInput(f"line {lineno}: duplicate header")
            if len(fields) != 5 or fields[1] != "pm":
                raise MalformedInput(f"line {lineno}: header must be 'p pm nL nR m'")
            try:
                header = tuple(int(x) for x in fields[2:])
            except ValueError:
                raise MalformedInput(f"line {lineno}: non-integer header field")
            if any(x < 0 for x in header):
                raise MalformedInput(f"line {lineno}: negative header field")
        elif fields[0] == "e":
            if header is None:
                raise MalformedInput(f"line {lineno}: edge before header")
            if len(fields) != 3:
                raise MalformedInput(f"line {lineno}: edge line must be 'e u v'")
            try:
                u, v = int(fields[1]), int(fields[2])
            except ValueError:
                raise MalformedInput(f"line {lineno}: non-integer endpoint")
            n_left, n_right, _ = header
            if not (1 <= u <= n_left and 1 <= v <= n_right):
                raise MalformedInput(f"line {lineno}: endpoint out of range")
            edges.append((u - 1, v - 1))
        else:
            raise MalformedInput(f"line {lineno}: unknown record '{fields[0]}'")
    if header is None:
        raise MalformedInput("missing 'p pm' header")
    n_left, n_right, m = header
    if len(edges) != m:
        raise MalformedInput(f"header announces {m} edges, file has {len(edges)}")
    return build_graph(n_left, n_right, edges)


def format_graph_file(g: BipartiteGraph) -> str:
    lines = [f"p pm {g.left_count} {g.right_count} {g.alive_edge_count()}"]
    for e in sorted(g.alive_edges()):
        u, v = g.endpoints(e)
        lines.append(f"e {u + 1} {v - g.left_count + 1}")
    return "\n".join(lines) + "\n"


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}")


def _format_matching(g: BipartiteGraph, edges: list[int]) -> str:
    pairs = sorted((g.edge_u[e] + 1, g.edge_v[e] - g.left_count + 1) for e in edges)
    return " ".join(f"{u}-{v}" for u, v in pairs)


def cmd_enumerate(args) -> int:
    g = parse_graph_file(_read_input(args.file))
    out = sys.stdout
    truncated = False

    class Limit(Exception):
        pass

    emitted = 0

    def sink(tree: int) -> None:
        nonlocal emitted
        if args.format == "edges":
            out.write(_format_matching(g, matching_of_tree(g.arena, tree)) + "\n")
        emitted += 1
        if args.limit is not None and emitted >= args.limit:
            raise Limit

    try:
        count, _ = enumerate_matchings(g, sink)
    except Limit:
        truncated = True
    if truncated:
        out.write("truncated\n")
    else:
        out.write(f"count {count}\n")
    return 0


def cmd_check(args) -> int:
    g = parse_graph_file(_read_input(args.file))
    seen: list[frozenset[int]] = []

    def sink(tree: int) -> None:
        seen.append(frozenset(matching_of_tree(g.arena, tree)))

    try:
        count, _ = enumerate_matchings(g, sink)
    except NoPerfectMatching:
        count = 0
    if len(seen) != count or len(set(seen)) != len(seen):
        print(f"MISMATCH enumerated {len(seen)} trees for count {count}")
        return 1
    try:
        expected = oracle.brute_force(g)
    except TestGuard:
        expected = None
    if expected is not None and set(seen) != expected:
        missing = sorted(expected - set(seen), key=sorted)
        extra = sorted(set(seen) - expected, key=sorted)
        print(f"MISMATCH vs brute force: missing={missing[:3]} extra={extra[:3]}")
        return 1
    try:
        perm = oracle.permanent(g)
    except TestGuard:
        perm = None
    if perm is not None and count != perm:
        print(f"MISMATCH count={count} permanent={perm}")
        return 1
    print(f"OK count={count}")
    return 0


def cmd_gen(args) -> int:
    kind = args.kind
    params = args.params
    try:
        if kind == "complete":
            (n,) = params
            g = oracle.complete(n)
        elif kind == "cycle":
            (n,) = params
            g = oracle.cycle(n)
        elif kind == "hk":
            n, k = params
            g = oracle.path_substituted(n, k)
        elif kind == "mincount":
            n, m = params
            g = oracle.min_count_graph(n, m)
        elif kind == "random":
            (n,) = params
            g = oracle.random_with_matching(n, args.seed, args.density)
        else:
            raise MalformedInput(f"unknown generator '{kind}'")
    except (ValueError, TypeError) as exc:
        raise MalformedInput(f"bad parameters for '{kind}': {exc}")
    sys.stdout.write(format_graph_file(g))
    return 0


def cmd_stats(args) -> int:
    g = parse_graph_file(_read_input(args.file))
    _, stats = enumerate_matchings(g)
    for key, value in stats.as_dict().items():
        print(f"{key}={value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmenum",
        description="Enumerate all perfect matchings of a bipartite graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="list matchings of a graph file")
    p_enum.add_argument("file", help="graph file path, or - for stdin")
    p_enum.add_argument("--format", choices=("edges", "count-only"), default="edges")
    p_enum.add_argument("--limit", type=int, default=None, metavar="N")
    p_enum.set_defaults(func=cmd_enumerate)

    p_check = sub.add_parser("check", help="verify against exhaustive oracles")
    p_check.add_argument("file", help="graph file path, or - for stdin")
    p_check.set_defaults(func=cmd_check)

    p_gen = sub.add_parser("gen", help="emit a generated graph file")
    p_gen.add_argument("kind", choices=("complete", "cycle", "hk", "mincount", "random"))
    p_gen.add_argument("params", type=int, nargs="*")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--density", type=float, default=0.5)
    p_gen.set_defaults(func=cmd_gen)

    p_stats = sub.add_parser("stats", help="enumerate and print run counters")
    p_stats.add_argument("file", help="graph file path, or - for stdin")
    p_stats.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoPerfectMatching as exc:
        print(f"no perfect matching: {exc}", file=sys.stderr)
        return 2
    except MalformedInput as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
