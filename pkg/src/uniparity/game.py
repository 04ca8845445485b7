"""Parity games, subgame views and positional strategies.

Vertex sets are plain ``int`` bitmasks over the dense ids ``0..n-1`` of the
base game.  A :class:`Subgame` is a mask over its base game, never a
re-indexed copy, so ``G ∩ S`` is literally ``mask & S``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

VertexSet = int


class GameError(ValueError):
    pass


class NotASubgame(GameError):
    def __init__(self, vertex: int):
        super().__init__(f"vertex {vertex} has no successor inside the kept set")
        self.vertex = vertex


class OutOfRange(GameError):
    pass


class InvalidStrategy(GameError):
    pass


class Player(enum.IntEnum):
    EVEN = 0
    ODD = 1

    @property
    def opponent(self) -> "Player":
        return Player.ODD if self is Player.EVEN else Player.EVEN

    @classmethod
    def of_priority(cls, p: int) -> "Player":
        return cls(p & 1)

    def __str__(self) -> str:
        return self.name.lower()


# -- bitmask helpers ---------------------------------------------------------

def mask_of(vertices: Iterable[int]) -> VertexSet:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: VertexSet) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def size(mask: VertexSet) -> int:
    return bin(mask).count("1")


# -- games -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ParityGame:
    """An immutable parity game on vertices ``0..n-1``.

    ``successors[v]`` is the ordered, duplicate-free successor list of ``v``.
    """

    owner: tuple[Player, ...]
    priority: tuple[int, ...]
    successors: tuple[tuple[int, ...], ...]
    names: Optional[tuple[Optional[str], ...]] = None
    succ_mask: tuple[int, ...] = field(init=False, repr=False)
    predecessors: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    owned_mask: tuple[int, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.owner)
        if len(self.priority) != n or len(self.successors) != n:
            raise GameError("owner, priority and successors must have equal length")
        if self.names is not None and len(self.names) != n:
            raise GameError("names must have one entry per vertex")
        preds: list[list[int]] = [[] for _ in range(n)]
        smask = []
        for v, succ in enumerate(self.successors):
            if not succ:
                raise NotASubgame(v)
            if len(set(succ)) != len(succ):
                raise GameError(f"vertex {v} has duplicate successors")
            for u in succ:
                if not 0 <= u < n:
                    raise OutOfRange(f"edge {v}->{u} leaves the vertex range")
                preds[u].append(v)
            smask.append(mask_of(succ))
        for v, p in enumerate(self.priority):
            if p < 0:
                raise GameError(f"vertex {v} has negative priority {p}")
        owners = [0, 0]
        for v, o in enumerate(self.owner):
            owners[Player(o)] |= 1 << v
        object.__setattr__(self, "owner", tuple(Player(o) for o in self.owner))
        object.__setattr__(self, "succ_mask", tuple(smask))
        object.__setattr__(self, "predecessors", tuple(tuple(p) for p in preds))
        object.__setattr__(self, "owned_mask", (owners[0], owners[1]))
        by_priority: dict[int, int] = {}
        for v, p in enumerate(self.priority):
            by_priority[p] = by_priority.get(p, 0) | (1 << v)
        object.__setattr__(self, "_by_priority", by_priority)

    @classmethod
    def from_edges(
        cls,
        owner: Sequence[int],
        priority: Sequence[int],
        edges: Iterable[tuple[int, int]],
        names: Optional[Sequence[Optional[str]]] = None,
    ) -> "ParityGame":
        succ: list[list[int]] = [[] for _ in owner]
        for v, u in edges:
            if u not in succ[v]:
                succ[v].append(u)
        return cls(
            tuple(Player(o) for o in owner),
            tuple(priority),
            tuple(tuple(s) for s in succ),
            None if names is None else tuple(names),
        )

    @property
    def vertex_count(self) -> int:
        return len(self.owner)

    @property
    def all_vertices(self) -> VertexSet:
        return (1 << len(self.owner)) - 1

    @property
    def max_priority(self) -> int:
        return max(self.priority, default=0)

    def with_priority(self, p: int) -> VertexSet:
        return self._by_priority.get(p, 0)  # type: ignore[attr-defined]

    def priority_at_most(self, p: int) -> VertexSet:
        m = 0
        for q, vs in self._by_priority.items():  # type: ignore[attr-defined]
            if q <= p:
                m |= vs
        return m

    def edges(self) -> Iterator[tuple[int, int]]:
        for v, succ in enumerate(self.successors):
            for u in succ:
                yield v, u

    def whole(self) -> "Subgame":
        return Subgame(self, self.all_vertices)

    def __repr__(self) -> str:
        return f"ParityGame(n={self.vertex_count}, d={self.max_priority})"


@dataclass(frozen=True)
class Subgame:
    """The substructure ``G ∩ vertices``; every kept vertex keeps a successor."""

    game: ParityGame
    vertices: VertexSet

    def __post_init__(self) -> None:
        if self.vertices & ~self.game.all_vertices:
            raise OutOfRange("subgame mask exceeds the base game")
        smask = self.game.succ_mask
        for v in members(self.vertices):
            if not smask[v] & self.vertices:
                raise NotASubgame(v)

    def __contains__(self, v: int) -> bool:
        return bool(self.vertices >> v & 1)

    def __len__(self) -> int:
        return size(self.vertices)

    def __iter__(self) -> Iterator[int]:
        return members(self.vertices)

    def is_empty(self) -> bool:
        return self.vertices == 0

    def check_subset(self, mask: VertexSet) -> None:
        if mask & ~self.vertices:
            raise OutOfRange(f"set {sorted(members(mask & ~self.vertices))} lies outside the subgame")


def as_subgame(g: ParityGame | Subgame) -> Subgame:
    return g.whole() if isinstance(g, ParityGame) else g


def restrict(g: ParityGame | Subgame, keep: VertexSet) -> Subgame:
    """Return ``g ∩ keep``; raises :class:`NotASubgame` on a dead end."""
    sub = as_subgame(g)
    sub.check_subset(keep)
    if keep == sub.vertices:
        return sub
    return Subgame(sub.game, keep)


def is_trap(g: ParityGame | Subgame, trap: VertexSet, for_player: Player) -> bool:
    """True iff ``trap`` is a trap for ``for_player`` inside ``g``.

    ``for_player`` cannot leave: each of its vertices has all successors in
    ``trap`` and each opponent vertex has some successor in ``trap``.  The
    empty set is a trap vacuously.
    """
    sub = as_subgame(g)
    sub.check_subset(trap)
    game = sub.game
    inside = sub.vertices
    for v in members(trap):
        succ = game.succ_mask[v] & inside
        if game.owner[v] == for_player:
            if succ & ~trap:
                return False
        elif not succ & trap:
            return False
    return True


@dataclass(frozen=True)
class Strategy:
    """A positional strategy as a set of edges for ``player``."""

    player: Player
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_choice(cls, g: ParityGame | Subgame, player: Player, choice: dict[int, int],
                    domain: Optional[VertexSet] = None) -> "Strategy":
        """Build a strategy from one chosen successor per player vertex.

        Opponent vertices in ``domain`` contribute all their edges inside the
        subgame.
        """
        sub = as_subgame(g)
        game = sub.game
        dom = sub.vertices if domain is None else domain
        edges = set()
        for v in members(dom):
            if game.owner[v] == player:
                edges.add((v, choice[v]))
            else:
                edges.update((v, u) for u in members(game.succ_mask[v] & sub.vertices))
        return cls(player, frozenset(edges))

    def successors(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for v, u in self.edges:
            out[v] = out.get(v, 0) | (1 << u)
        return out


def _strongly_connected(nodes: VertexSet, succ: dict[int, int]) -> list[VertexSet]:
    """Iterative Tarjan over the graph induced by ``nodes``."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack = 0
    stack: list[int] = []
    out: list[VertexSet] = []
    counter = 0
    for root in members(nodes):
        if root in index:
            continue
        work = [(root, members(succ.get(root, 0) & nodes))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack |= 1 << root
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if u not in index:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack |= 1 << u
                    work.append((u, members(succ.get(u, 0) & nodes)))
                    advanced = True
                    break
                if on_stack >> u & 1:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = 0
                while True:
                    w = stack.pop()
                    on_stack &= ~(1 << w)
                    comp |= 1 << w
                    if w == v:
                        break
                out.append(comp)
    return out


def _check_strategy(sub: Subgame, domain: VertexSet, sigma: Strategy) -> dict[int, int]:
    game = sub.game
    succ = sigma.successors()
    for v, targets in succ.items():
        if not sub.vertices >> v & 1 or targets & ~(game.succ_mask[v] & sub.vertices):
            raise InvalidStrategy(f"strategy edge from {v} is not an edge of the subgame")
    for v in members(domain):
        chosen = succ.get(v, 0)
        if game.owner[v] == sigma.player:
            if not chosen:
                raise InvalidStrategy(f"{sigma.player} vertex {v} has no strategy edge")
        elif chosen != game.succ_mask[v] & sub.vertices:
            raise InvalidStrategy(f"opponent vertex {v} is missing some of its edges")
    return succ


def verify_dominion_strategy(g: ParityGame | Subgame, dominion: VertexSet, sigma: Strategy) -> bool:
    """Check that ``sigma`` witnesses ``dominion`` as a dominion of its player.

    The strategy must keep every play inside ``dominion`` and every cycle of
    the strategy subgraph must have a top priority of the player's parity.
    Cycles are found by priority peeling: for each priority ``p`` of the wrong
    parity, a bad cycle exists iff some vertex of priority ``p`` sits in a
    cyclic SCC of the subgraph limited to priorities ``<= p``.
    """
    sub = as_subgame(g)
    sub.check_subset(dominion)
    succ = _check_strategy(sub, dominion, sigma)
    game = sub.game
    for v in members(dominion):
        if succ[v] & ~dominion:
            return False
    wrong = sigma.player.opponent
    priorities = {game.priority[v] for v in members(dominion)}
    for p in sorted(priorities):
        if Player.of_priority(p) != wrong:
            continue
        allowed = dominion & game.priority_at_most(p)
        top = allowed & game.with_priority(p)
        for comp in _strongly_connected(allowed, succ):
            if not comp & top:
                continue
            if comp & (comp - 1):
                return False
            v = comp.bit_length() - 1
            if succ[v] >> v & 1:
                return False
    return True
