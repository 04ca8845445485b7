"""Command-line interface: ``uniparity {solve,verify,gen,trees,bench}``."""
from __future__ import annotations

import argparse
import functools
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional, Sequence

from . import generate as gen_mod
from .game import GameError, ParityGame, Player, members
from .pgsolver import ParseError, ValidationError, parse_pgsolver, write_pgsolver
from .report import check_witness, write_report_json
from .solvers import (
    PruningRule,
    SolveReport,
    family_trees,
    mcnaughton_zielonka,
    mcnaughton_zielonka_enhanced,
    universal_solve,
)
from .symbolic import Layout, sym_universal_solve
from .trees import (
    Complete,
    Explicit,
    InvalidParams,
    Parys,
    Succinct,
    TreeFamily,
    parse_brackets,
    to_brackets,
)

EXIT_OK, EXIT_DISAGREE, EXIT_USAGE = 0, 1, 2
SUITE_SUFFIXES = (".gm", ".pg", ".pgsolver")


class UsageError(Exception):
    pass


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def load_game(path: str) -> ParityGame:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_pgsolver(text)
    except (ParseError, ValidationError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _explicit_trees(path: str):
    """One bracket tree per non-empty line: the even tree, then optionally the odd tree."""
    try:
        lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not 1 <= len(lines) <= 2:
        raise UsageError(f"{path}: expected one or two bracket trees")
    try:
        trees = [parse_brackets(ln) for ln in lines]
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    even = trees[0]
    odd = trees[1] if len(trees) == 2 else trees[0]
    return Explicit(even).cursor(), Explicit(odd).cursor()


def run_solver(game: ParityGame, args: argparse.Namespace) -> SolveReport:
    player = Player.EVEN if args.player == "even" else Player.ODD
    rule = PruningRule(args.rule)
    symbolic = getattr(args, "symbolic", "off")
    if args.solver != "universal" and (symbolic != "off" or rule is not PruningRule.NONE):
        raise UsageError("--rule and --symbolic only apply to --solver universal")
    if args.solver == "mz":
        return mcnaughton_zielonka(game, player)
    if args.solver == "mz-enhanced":
        return mcnaughton_zielonka_enhanced(game, player)
    if args.tree.startswith("explicit:"):
        t_even, t_odd = _explicit_trees(args.tree[len("explicit:"):])
    else:
        t_even, t_odd = family_trees(args.tree, game, player)
    try:
        if symbolic == "off":
            return universal_solve(game, player, t_even, t_odd, rule)
        return sym_universal_solve(game, player, t_even, t_odd, Layout(symbolic), rule)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _format_text(report: SolveReport) -> str:
    lines = [
        f"solver: {report.solver}",
        "w_even: " + " ".join(map(str, members(report.w_even))),
        "w_odd: " + " ".join(map(str, members(report.w_odd))),
        f"recursive_calls: {report.stats.recursive_calls}",
        f"loop_iterations: {report.stats.loop_iterations}",
    ]
    if report.symbolic:
        lines += [f"{k}: {v}" for k, v in report.symbolic.items()]
    return "\n".join(lines) + "\n"


def cmd_solve(args: argparse.Namespace) -> int:
    game = load_game(args.file)
    report = run_solver(game, args)
    _emit(write_report_json(report, game) if args.json else _format_text(report), args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    game = load_game(args.file)
    if args.emit_witness is None and args.witness is None:
        raise UsageError("verify needs --witness or --emit-witness")
    if args.emit_witness is not None:
        report = mcnaughton_zielonka_enhanced(game)
        atomic_write(args.emit_witness, write_report_json(report, game))
    if args.witness is None:
        return EXIT_OK
    try:
        data = json.loads(Path(args.witness).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load witness {args.witness}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("witness must be a JSON object")
    problems = check_witness(game, data)
    for p in problems:
        print(f"FAIL {p}")
    if problems:
        return EXIT_DISAGREE
    print("OK witness verified")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    spec: gen_mod.GeneratorSpec
    if args.kind == "random":
        spec = gen_mod.Random(args.n, args.d, (args.min_out, args.max_out), args.seed)
    elif args.kind == "cycle":
        spec = gen_mod.Cycle(args.n, args.d, args.seed)
    else:
        spec = gen_mod.Ladder(args.levels, args.seed)
    try:
        game = gen_mod.generate(spec)
    except gen_mod.InvalidSpec as exc:
        raise UsageError(str(exc)) from exc
    _emit(write_pgsolver(game), args.output)
    return EXIT_OK


def _family(kind: str, n: int, h: int) -> TreeFamily:
    try:
        if kind == "c":
            return Complete(n, h)
        if kind == "p":
            return Parys(n, h)
        return Succinct(n, h)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from exc


def family_stats(family: TreeFamily) -> dict[str, int]:
    """Leaves, nodes and height computed over the family's parameter states."""

    @functools.lru_cache(maxsize=None)
    def count(state) -> tuple[int, int]:
        leaves, nodes = 0, 1
        for child, mult in family.child_groups(state):
            a, b = count(child)
            leaves += mult * a
            nodes += mult * b
        return (leaves or 1), nodes

    leaves, nodes = count(family.root_state())
    return {"height": family.height(), "leaves": leaves, "nodes": nodes}


def cmd_trees(args: argparse.Namespace) -> int:
    fam = _family(args.family, args.n, args.H)
    stats = family_stats(fam)
    if args.dump:
        if stats["nodes"] > args.max_nodes:
            raise UsageError(f"tree has {stats['nodes']} nodes, above --max-nodes {args.max_nodes}")
        print(to_brackets(fam.materialize()))
    else:
        print(" ".join(f"{k}={v}" for k, v in stats.items()))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    suite = Path(args.suite)
    if not suite.is_dir():
        raise UsageError(f"{suite} is not a directory")
    files = sorted(p for p in suite.iterdir() if p.suffix in SUITE_SUFFIXES)
    rows = []
    for path in files:
        game = load_game(str(path))
        start = time.perf_counter()
        report = run_solver(game, args)
        wall = time.perf_counter() - start
        rows.append({
            "file": path.name,
            "vertices": game.vertex_count,
            "max_priority": game.max_priority,
            "solver": report.solver,
            "recursive_calls": report.stats.recursive_calls,
            "loop_iterations": report.stats.loop_iterations,
            "peak_live_variables": report.symbolic["peak_live_variables"] if report.symbolic else None,
            "w_even_size": bin(report.w_even).count("1"),
            "wall_time_s": round(wall, 6),
        })
    if args.json:
        text = json.dumps({"suite": suite.name, "games": rows}, indent=2) + "\n"
    else:
        text = "".join(
            f"{r['file']}\tn={r['vertices']}\td={r['max_priority']}\tcalls={r['recursive_calls']}"
            f"\titers={r['loop_iterations']}\tpeak={r['peak_live_variables']}"
            f"\t{r['wall_time_s']:.4f}s\n"
            for r in rows
        )
    _emit(text, args.output)
    return EXIT_OK


def _solver_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", choices=["mz", "mz-enhanced", "universal"], default="universal")
    p.add_argument("--tree", default="succinct",
                   help="complete, parys, succinct or explicit:<file> (default: succinct)")
    p.add_argument("--rule", choices=[r.value for r in PruningRule], default="none")
    p.add_argument("--symbolic", choices=["off"] + [m.value for m in Layout], default="off")
    p.add_argument("--player", choices=["even", "odd"], default="even",
                   help="player whose procedure is called first")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uniparity", description="Parity game solving toolkit.")
    parser.add_argument("-q", "--quiet", action="store_true", help="hide parser warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game in PGSolver format")
    p.add_argument("file")
    _solver_options(p)
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a witness against a game")
    p.add_argument("file")
    p.add_argument("--witness", help="JSON report with winning sets and optional witnesses")
    p.add_argument("--emit-witness", metavar="PATH", help="write a witness computed for the game")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a game")
    p.add_argument("--kind", choices=["random", "cycle", "ladder"], default="random")
    p.add_argument("-n", type=int, default=8, help="vertices")
    p.add_argument("-d", type=int, default=4, help="largest priority")
    p.add_argument("--min-out", type=int, default=1)
    p.add_argument("--max-out", type=int, default=3)
    p.add_argument("--levels", type=int, default=2, help="ladder rungs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("trees", help="inspect a universal tree family")
    p.add_argument("--family", choices=["c", "p", "s"], required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-H", type=int, required=True, help="height")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--stats", action="store_true", help="print height, leaves and nodes (default)")
    mode.add_argument("--dump", action="store_true", help="print the tree in bracket form")
    p.add_argument("--max-nodes", type=int, default=100_000)
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("bench", help="solve every game in a directory")
    p.add_argument("--suite", required=True)
    _solver_options(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(format="%(levelname)s: %(message)s")
    logging.getLogger("uniparity").setLevel(logging.ERROR if args.quiet else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
