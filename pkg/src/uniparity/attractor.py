"""Controllable predecessors and attractors inside subgames."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .game import ParityGame, Player, Subgame, VertexSet, as_subgame, members


@dataclass(frozen=True)
class AttractorResult:
    """``attractor`` plus a reachability strategy for the attracting player.

    ``strategy`` maps each player-owned vertex of ``attractor \\ target`` to a
    successor that entered the attractor in an earlier round.  ``rank`` is
    the round in which each vertex entered (0 for the target).
    """

    player: Player
    target: VertexSet
    attractor: VertexSet
    strategy: dict[int, int] = field(compare=False)
    rank: dict[int, int] = field(compare=False, repr=False)

    @property
    def strategy_edges(self) -> set[tuple[int, int]]:
        return set(self.strategy.items())


def cpre(g: ParityGame | Subgame, target: VertexSet, player: Player) -> VertexSet:
    """Vertices of ``g`` from which ``player`` forces one step into ``target``."""
    sub = as_subgame(g)
    sub.check_subset(target)
    game = sub.game
    inside = sub.vertices
    out = 0
    for v in members(inside):
        succ = game.succ_mask[v] & inside
        if game.owner[v] == player:
            if succ & target:
                out |= 1 << v
        elif not succ & ~target:
            out |= 1 << v
    return out


def attract(g: ParityGame | Subgame, target: VertexSet, player: Player) -> AttractorResult:
    """Least fixpoint of ``X -> target ∪ cpre(X)`` by a layered worklist.

    Opponent vertices keep a counter of successors not yet attracted; a
    player vertex joins on its first attracted successor.  Processing is
    breadth-first so ranks coincide with the round-based evaluation.
    """
    sub = as_subgame(g)
    sub.check_subset(target)
    game = sub.game
    inside = sub.vertices
    owner = game.owner
    preds = game.predecessors
    smask = game.succ_mask
    attr = target
    rank = {v: 0 for v in members(target)}
    strategy: dict[int, int] = {}
    remaining: dict[int, int] = {}
    queue = deque(rank)
    while queue:
        u = queue.popleft()
        r = rank[u] + 1
        for v in preds[u]:
            bit = 1 << v
            if not inside & bit or attr & bit:
                continue
            if owner[v] == player:
                strategy[v] = u
            else:
                left = remaining.get(v)
                if left is None:
                    left = bin(smask[v] & inside).count("1")
                left -= 1
                remaining[v] = left
                if left:
                    continue
            attr |= bit
            rank[v] = r
            queue.append(v)
    return AttractorResult(player, target, attr, strategy, rank)


def attractor_set(game: ParityGame, inside: VertexSet, target: VertexSet, player: Player) -> VertexSet:
    """The attractor set alone, for solver inner loops.

    ``inside`` must already be a subgame of ``game`` and ``target`` a subset of
    it; neither is checked.
    """
    owner = game.owner
    preds = game.predecessors
    smask = game.succ_mask
    attr = target
    stack = list(members(target))
    remaining: dict[int, int] = {}
    while stack:
        u = stack.pop()
        for v in preds[u]:
            bit = 1 << v
            if not inside & bit or attr & bit:
                continue
            if owner[v] != player:
                left = remaining.get(v)
                if left is None:
                    left = bin(smask[v] & inside).count("1")
                left -= 1
                remaining[v] = left
                if left:
                    continue
            attr |= bit
            stack.append(v)
    return attr


def attract_naive(g: ParityGame | Subgame, target: VertexSet, player: Player) -> AttractorResult:
    """Round-based evaluation of the same fixpoint; used to cross-check :func:`attract`."""
    sub = as_subgame(g)
    game = sub.game
    attr = target
    rank = {v: 0 for v in members(target)}
    strategy: dict[int, int] = {}
    r = 0
    while True:
        r += 1
        grown = cpre(sub, attr, player) | attr
        new = grown & ~attr
        if not new:
            break
        for v in members(new):
            rank[v] = r
            if game.owner[v] == player:
                strategy[v] = min(members(game.succ_mask[v] & attr))
        attr = grown
    return AttractorResult(player, target, attr, strategy, rank)
