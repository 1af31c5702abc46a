"""Command-line interface.

Exit codes: 0 = the command ran (for the isomorphism commands the verdict is
the last stdout line, `true` or `false`); 2 = usage error; 3 = unreadable or
invalid input.  Output is plain text with no color, and all randomness comes
from explicit --seed flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import aut_e_generators, is_isomorphic, is_isomorphic_swap
from .graphs import GraphError, format_graph_text, parse_graph_text
from .harness import BENCH_MODES, bench_csv, bench_run, bench_summary, random_ternary_graph
from .perm import Permutation
from .phylo import (
    NetworkError,
    parse_enewick,
    phylo_isomorphic,
    random_network,
    write_enewick,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_graph(path: str):
    try:
        return parse_graph_text(_read(path))
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_network(path: str):
    try:
        return parse_enewick(_read(path))
    except NetworkError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cycles_in_ids(p: Permutation, ids) -> str:
    """Cycle notation over the original node ids instead of positions."""
    seen = [False] * p.degree
    parts = []
    for i in range(p.degree):
        if seen[i] or p(i) == i:
            continue
        cyc = [i]
        seen[i] = True
        j = p(i)
        while j != i:
            seen[j] = True
            cyc.append(j)
            j = p(j)
        parts.append("(" + " ".join(str(ids[x]) for x in cyc) + ")")
    return "".join(parts) if parts else "()"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trigiso",
        description="Isomorphism of ternary graphs and rooted binary phylogenetic networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_iso = sub.add_parser("iso", help="test two graph files for isomorphism")
    p_iso.add_argument("first")
    p_iso.add_argument("second")
    p_iso.add_argument("--mapping", action="store_true", help="print a witness mapping")
    p_iso.add_argument(
        "--swap-only",
        action="store_true",
        help="search only the part-exchanging coset at every layer",
    )

    p_aut = sub.add_parser("aut", help="generators of the edge-fixing automorphisms")
    p_aut.add_argument("graph")
    p_aut.add_argument("--edge", required=True, metavar="U,V")

    p_phylo = sub.add_parser("phylo-iso", help="test two eNewick files for isomorphism")
    p_phylo.add_argument("first")
    p_phylo.add_argument("second")
    p_phylo.add_argument("--mapping", action="store_true")

    p_gen = sub.add_parser("gen", help="generate random inputs")
    gen_sub = p_gen.add_subparsers(dest="what", required=True)
    g_graph = gen_sub.add_parser("graph")
    g_graph.add_argument("n", type=int)
    g_graph.add_argument("--seed", type=int, default=0)
    g_graph.add_argument("--out")
    g_net = gen_sub.add_parser("network")
    g_net.add_argument("n", type=int)
    g_net.add_argument("--hybrid-prob", type=float, default=0.5)
    g_net.add_argument("--seed", type=int, default=0)
    g_net.add_argument("--out")

    p_bench = sub.add_parser("bench", help="run the benchmark protocol")
    p_bench.add_argument("--mode", required=True, choices=BENCH_MODES)
    p_bench.add_argument("--sizes", required=True, metavar="a,b,c")
    p_bench.add_argument("--trials", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out")
    p_bench.add_argument("--threads", type=int, default=1)
    return parser


def _parse_edge(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"--edge takes two comma-separated ids, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise InputError(f"--edge ids must be integers, got {text!r}") from exc


def _seed_ok(seed: int):
    if not 0 <= seed < 1 << 64:
        raise InputError("seeds are 64-bit unsigned integers")


def _cmd_iso(args) -> int:
    g1 = _load_graph(args.first)
    g2 = _load_graph(args.second)
    try:
        fn = is_isomorphic_swap if args.swap_only else is_isomorphic
        res = fn(g1, g2, want_mapping=args.mapping)
    except GraphError as exc:
        raise InputError(str(exc)) from exc
    if args.mapping and res.mapping is not None:
        for u in sorted(res.mapping):
            print(f"{u} -> {res.mapping[u]}")
    print("true" if res.isomorphic else "false")
    return EXIT_OK


def _cmd_aut(args) -> int:
    g = _load_graph(args.graph)
    edge = _parse_edge(args.edge)
    try:
        res = aut_e_generators(g, edge)
    except GraphError as exc:
        raise InputError(str(exc)) from exc
    for gen in res.generators:
        print(_cycles_in_ids(gen, res.node_order))
    if not res.generators:
        print("()")
    return EXIT_OK


def _cmd_phylo(args) -> int:
    n1 = _load_network(args.first)
    n2 = _load_network(args.second)
    try:
        res = phylo_isomorphic(n1, n2, want_mapping=args.mapping)
    except NetworkError as exc:
        raise InputError(str(exc)) from exc
    if args.mapping and res.mapping is not None:
        for u in sorted(res.mapping):
            print(f"{u} -> {res.mapping[u]}")
    print("true" if res.isomorphic else "false")
    return EXIT_OK


def _cmd_gen(args) -> int:
    _seed_ok(args.seed)
    if args.what == "graph":
        if args.n < 2:
            raise InputError("graph generation needs n >= 2")
        _emit(format_graph_text(random_ternary_graph(args.n, args.seed)), args.out)
    else:
        try:
            net = random_network(args.n, hybrid_prob=args.hybrid_prob, seed=args.seed)
        except NetworkError as exc:
            raise InputError(str(exc)) from exc
        _emit(write_enewick(net) + "\n", args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    _seed_ok(args.seed)
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x]
    except ValueError as exc:
        raise InputError(f"--sizes must be comma-separated integers: {exc}") from exc
    if not sizes:
        raise InputError("--sizes must name at least one size")
    records = bench_run(
        args.mode, sizes, trials=args.trials, seed=args.seed, threads=args.threads
    )
    _emit(bench_csv(records), args.out)
    print(bench_summary(records), file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "iso": _cmd_iso,
    "aut": _cmd_aut,
    "phylo-iso": _cmd_phylo,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
