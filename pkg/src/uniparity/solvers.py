"""McNaughton-Zielonka, the universal algorithm and a brute-force oracle.

All recursive procedures run on an explicit frame stack, so deep priority
ranges do not hit the interpreter's recursion limit.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Any, Optional

from .attractor import attractor_set
from .decomposition import AttractorDecomposition, DecompositionItem
from .game import ParityGame, Player, Strategy, VertexSet, members, verify_dominion_strategy
from .trees import (
    Complete,
    OrderedTree,
    Parys,
    Succinct,
    TreeCursor,
    TreeLike,
    as_cursor,
)


class PruningRule(enum.Enum):
    NONE = "none"
    EMPTY_SET = "empty-set"
    PARYS_BLOCKS = "parys-blocks"


class TooLarge(ValueError):
    pass


@dataclass
class SolveStats:
    recursive_calls: int = 0
    loop_iterations: int = 0
    recursion_tree: OrderedTree = ()
    trace: Optional[list] = None


@dataclass
class SolveReport:
    w_even: VertexSet
    w_odd: VertexSet
    even_decomposition: Optional[AttractorDecomposition] = None
    odd_decomposition: Optional[AttractorDecomposition] = None
    stats: SolveStats = field(default_factory=SolveStats)
    solver: str = ""
    symbolic: Optional[dict] = None

    def winner(self, player: Player) -> VertexSet:
        return self.w_even if player is Player.EVEN else self.w_odd


def normalize_degree(game: ParityGame, player: Player) -> int:
    """Max priority rounded up to the parity of ``player``."""
    d = game.max_priority
    return d if Player.of_priority(d) == player else d + 1


def tree_heights(d: int) -> tuple[int, int]:
    """Heights (even tree, odd tree) sufficient for priorities up to ``d``."""
    return (d + 1) // 2, d // 2


def family_trees(kind: str, game: ParityGame, player: Player = Player.EVEN,
                 n: Optional[int] = None) -> tuple[TreeCursor, TreeCursor]:
    """Cursors of the ``kind`` family sized for ``game`` seen from ``player``."""
    d = normalize_degree(game, player)
    he, ho = tree_heights(d)
    n = game.vertex_count if n is None else n
    if kind in ("c", "complete"):
        n = max(n, 1)
        return Complete(n, he).cursor(), Complete(n, ho).cursor()
    if kind in ("p", "parys"):
        return Parys(n, he).cursor(), Parys(n, ho).cursor()
    if kind in ("s", "succinct"):
        return Succinct(n, he).cursor(), Succinct(n, ho).cursor()
    raise ValueError(f"unknown tree family {kind!r}")


# -- shared frame machinery --------------------------------------------------

@dataclass
class _Frame:
    player: Player
    d: int
    g: VertexSet
    depth: int
    loop: Any = None  # cursor whose children drive the iterations
    keep: Any = None  # cursor handed unchanged to every child
    i: int = 0
    end: int = 0
    children: list = field(default_factory=list)
    pending: tuple = ()
    last_u: Optional[VertexSet] = None
    # decomposition bookkeeping (enhanced McNaughton-Zielonka only)
    other_items: list = field(default_factory=list)
    last_top: VertexSet = 0
    last_child_other: Optional[AttractorDecomposition] = None


def _begin_iteration(game: ParityGame, f: _Frame) -> VertexSet:
    target = f.g & game.with_priority(f.d)
    top = attractor_set(game, f.g, target, f.player)
    f.pending = (f.g, target, top)
    return f.g & ~top


def _finish_iteration(game: ParityGame, f: _Frame, u: VertexSet, stats: SolveStats) -> VertexSet:
    removed = attractor_set(game, f.g, u, f.player.opponent)
    g_i, target, top = f.pending
    f.g = g_i & ~removed
    stats.loop_iterations += 1
    if stats.trace is not None:
        stats.trace.append(("iter", f.depth, int(f.player), f.d, g_i, target, top, u, removed))
    return removed


def _report(universe: VertexSet, player: Player, won: VertexSet, stats: SolveStats, solver: str,
            own: Optional[AttractorDecomposition] = None,
            other: Optional[AttractorDecomposition] = None) -> SolveReport:
    lost = universe & ~won
    if player is Player.EVEN:
        return SolveReport(won, lost, own, other, stats, solver)
    return SolveReport(lost, won, other, own, stats, solver)


# -- McNaughton-Zielonka -------------------------------------------------------

def _mcnaughton_zielonka(game: ParityGame, player: Player, decompose: bool,
                         trace: bool, vertices: Optional[VertexSet]) -> SolveReport:
    d = normalize_degree(game, player)
    stats = SolveStats(trace=[] if trace else None)
    universe = game.all_vertices if vertices is None else vertices
    root = _Frame(player, d, universe, 0)
    stack = [root]
    returned: Optional[tuple] = None
    tree: OrderedTree = ()
    _enter(stats, root)
    while stack:
        f = stack[-1]
        if returned is not None:
            u, child_own, child_other, child_tree = returned
            returned = None
            f.children.append(child_tree)
            removed = _finish_iteration(game, f, u, stats)
            f.last_u = u
            if decompose:
                if u:
                    f.other_items.append(DecompositionItem(u, child_own, removed))
                else:
                    f.last_child_other = child_other
        base = f.player is Player.EVEN and f.d == 0
        if not base and (f.last_u is None or f.last_u):
            g_next = _begin_iteration(game, f)
            f.last_top = f.pending[2]
            child = _Frame(f.player.opponent, f.d - 1, g_next, f.depth + 1)
            _enter(stats, child)
            stack.append(child)
            continue
        stack.pop()
        own = other = None
        if decompose:
            other = AttractorDecomposition(f.player.opponent, f.d + 1, 0, tuple(f.other_items))
            if base:
                own = AttractorDecomposition(f.player, f.d, f.g)
            else:
                assert f.last_child_other is not None
                own = AttractorDecomposition(f.player, f.d, f.last_top, f.last_child_other.items)
        node = tuple(f.children)
        if stack:
            returned = (f.g, own, other, node)
        else:
            tree = node
            result = (f.g, own, other)
    stats.recursion_tree = tree
    won, own, other = result
    name = "mz-enhanced" if decompose else "mz"
    return _report(universe, player, won, stats, name, own, other)


def _enter(stats: SolveStats, f: _Frame) -> None:
    stats.recursive_calls += 1
    if stats.trace is not None:
        stats.trace.append(("call", f.depth, int(f.player), f.d, f.g))


def mcnaughton_zielonka(game: ParityGame, player_view: Player = Player.EVEN, *,
                        trace: bool = False, vertices: Optional[VertexSet] = None) -> SolveReport:
    """Classic McNaughton-Zielonka recursion entered as ``player_view``."""
    return _mcnaughton_zielonka(game, player_view, False, trace, vertices)


def mcnaughton_zielonka_enhanced(game: ParityGame, player_view: Player = Player.EVEN, *,
                                 trace: bool = False,
                                 vertices: Optional[VertexSet] = None) -> SolveReport:
    """McNaughton-Zielonka that also returns an attractor decomposition of each winning set.

    The entry player's decomposition has the normalized degree ``d``; the
    opponent's has degree ``d + 1``.
    """
    return _mcnaughton_zielonka(game, player_view, True, trace, vertices)


# -- universal algorithm -------------------------------------------------------

def _check_rule(rule: PruningRule, *cursors: TreeCursor) -> None:
    if rule is PruningRule.PARYS_BLOCKS:
        for c in cursors:
            if not isinstance(c.family, Parys):
                raise ValueError("the parys-blocks rule needs Parys trees on both sides")


def _run_universal(game: ParityGame, player: Player, d: int, t_even: TreeCursor,
                   t_odd: TreeCursor, rule: PruningRule, stats: SolveStats,
                   vertices: VertexSet) -> VertexSet:
    own, other = (t_even, t_odd) if player is Player.EVEN else (t_odd, t_even)
    root = _Frame(player, d, vertices, 0, loop=other, keep=own)
    root.end = other.child_count()
    stack = [root]
    _enter(stats, root)
    returned: Optional[tuple[VertexSet, OrderedTree]] = None
    result: VertexSet = 0
    while stack:
        f = stack[-1]
        if returned is not None:
            u, child_tree = returned
            returned = None
            f.children.append(child_tree)
            _finish_iteration(game, f, u, stats)
            if not u:
                if rule is PruningRule.EMPTY_SET:
                    f.end = f.i
                elif rule is PruningRule.PARYS_BLOCKS:
                    f.i = f.loop.family.block_end(f.loop.state, f.i - 1)
        if f.i < f.end:
            i = f.i
            f.i += 1
            g_next = _begin_iteration(game, f)
            child = _Frame(f.player.opponent, f.d - 1, g_next, f.depth + 1,
                           loop=f.keep, keep=f.loop.descend(i))
            child.end = child.loop.child_count()
            _enter(stats, child)
            stack.append(child)
            continue
        stack.pop()
        node = tuple(f.children)
        if stack:
            returned = (f.g, node)
        else:
            stats.recursion_tree = node
            result = f.g
    return result


def universal_solve(game: ParityGame, player_view: Player = Player.EVEN,
                    t_even: Optional[TreeLike] = None, t_odd: Optional[TreeLike] = None,
                    rule: PruningRule = PruningRule.NONE, *, trace: bool = False,
                    vertices: Optional[VertexSet] = None) -> SolveReport:
    """The universal attractor decomposition algorithm on two ordered trees.

    The entry procedure loops once per root child of the opponent's tree and
    hands its own tree unchanged to each recursive call.  Trees default to
    succinct universal trees sized for the game.
    """
    if t_even is None or t_odd is None:
        de, do = family_trees("succinct", game, player_view)
        t_even = de if t_even is None else t_even
        t_odd = do if t_odd is None else t_odd
    ce, co = as_cursor(t_even), as_cursor(t_odd)
    _check_rule(rule, ce, co)
    d = normalize_degree(game, player_view)
    stats = SolveStats(trace=[] if trace else None)
    universe = game.all_vertices if vertices is None else vertices
    won = _run_universal(game, player_view, d, ce, co, rule, stats, universe)
    return _report(universe, player_view, won, stats, "universal")


def separation_probe(game: ParityGame, t_even: TreeLike, t_odd: TreeLike,
                     player_view: Player = Player.EVEN) -> list[tuple[int, VertexSet]]:
    """The sets ``G_{i+1}`` after each top-level iteration, starting with ``(0, V)``."""
    report = universal_solve(game, player_view, t_even, t_odd, trace=True)
    out = [(0, game.all_vertices)]
    assert report.stats.trace is not None
    top = [ev for ev in report.stats.trace if ev[0] == "iter" and ev[1] == 0]
    for i, ev in enumerate(top, start=1):
        g_i, removed = ev[4], ev[8]
        out.append((i, g_i & ~removed))
    return out


# -- brute-force oracle ----------------------------------------------------------

ORACLE_LIMIT = 10


def _winning_under(game: ParityGame, player: Player, succ: list[int]) -> VertexSet:
    """Vertices from which no play consistent with ``succ`` reaches a losing cycle."""
    n = game.vertex_count
    bad = 0
    wrong = player.opponent
    for v in range(n):
        p = game.priority[v]
        if Player.of_priority(p) != wrong:
            continue
        allowed = game.priority_at_most(p)
        seen = 0
        frontier = succ[v] & allowed
        while frontier:
            seen |= frontier
            nxt = 0
            for u in members(frontier):
                nxt |= succ[u]
            frontier = nxt & allowed & ~seen
        if seen >> v & 1:
            bad |= 1 << v
    losing = bad
    changed = True
    while changed:
        changed = False
        for v in range(n):
            if not losing >> v & 1 and succ[v] & losing:
                losing |= 1 << v
                changed = True
    return game.all_vertices & ~losing


def largest_dominion_by_strategies(game: ParityGame, player: Player,
                                   verify: bool = True) -> VertexSet:
    """Union over all positional strategies of the region each one wins.

    Each candidate region is closed under the strategy, and with ``verify``
    it is re-checked as a dominion by :func:`verify_dominion_strategy`.
    """
    owned = [v for v in range(game.vertex_count) if game.owner[v] == player]
    base = list(game.succ_mask)
    whole = game.whole()
    union = 0
    checked: set[VertexSet] = set()
    for picks in itertools.product(*(game.successors[v] for v in owned)):
        succ = base[:]
        choice = dict(zip(owned, picks))
        for v, u in choice.items():
            succ[v] = 1 << u
        won = _winning_under(game, player, succ)
        if not won or not won & ~union:
            continue
        if verify and won not in checked:
            checked.add(won)
            sigma = Strategy.from_choice(whole, player, choice, won)
            if not verify_dominion_strategy(whole, won, sigma):
                raise AssertionError("strategy region failed dominion verification")
        union |= won
    return union


def largest_dominion_by_subsets(game: ParityGame, player: Player) -> VertexSet:
    """Literal definition: every subset, every strategy restricted to it."""
    whole = game.whole()
    n = game.vertex_count
    union = 0
    for dom in range(1, 1 << n):
        if not dom & ~union:
            continue
        options = []
        ok = True
        for v in members(dom):
            if game.owner[v] == player:
                inside = [u for u in game.successors[v] if dom >> u & 1]
                if not inside:
                    ok = False
                    break
                options.append((v, inside))
            elif game.succ_mask[v] & ~dom:
                ok = False
                break
        if not ok:
            continue
        verts = [v for v, _ in options]
        for picks in itertools.product(*(o for _, o in options)):
            sigma = Strategy.from_choice(whole, player, dict(zip(verts, picks)), dom)
            if verify_dominion_strategy(whole, dom, sigma):
                union |= dom
                break
    return union


def brute_force_oracle(game: ParityGame, limit: int = ORACLE_LIMIT) -> SolveReport:
    """Largest dominia of both players by exhaustive strategy enumeration."""
    if game.vertex_count > limit:
        raise TooLarge(f"oracle is limited to {limit} vertices, game has {game.vertex_count}")
    w_even = largest_dominion_by_strategies(game, Player.EVEN)
    w_odd = largest_dominion_by_strategies(game, Player.ODD)
    if w_even & w_odd or (w_even | w_odd) != game.all_vertices:
        raise AssertionError("largest dominia do not partition the vertices")
    return SolveReport(w_even, w_odd, solver="oracle")


__all__ = [
    "PruningRule",
    "SolveReport",
    "SolveStats",
    "TooLarge",
    "brute_force_oracle",
    "family_trees",
    "largest_dominion_by_strategies",
    "largest_dominion_by_subsets",
    "mcnaughton_zielonka",
    "mcnaughton_zielonka_enhanced",
    "normalize_degree",
    "separation_probe",
    "tree_heights",
    "universal_solve",
]
