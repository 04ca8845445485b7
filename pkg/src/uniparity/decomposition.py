"""Attractor decompositions: validation, trees, strategies and enumeration."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .attractor import attract
from .game import (
    ParityGame,
    Player,
    Strategy,
    Subgame,
    VertexSet,
    as_subgame,
    is_trap,
    members,
    restrict,
    size,
)
from .trees import TRIVIAL, OrderedTree


class InvalidDecomposition(ValueError):
    pass


@dataclass(frozen=True)
class DecompositionItem:
    trap: VertexSet
    sub: "AttractorDecomposition"
    attractor: VertexSet


@dataclass(frozen=True)
class AttractorDecomposition:
    """``<A, (S1, H1, A1), ..., (Sk, Hk, Ak)>`` for ``player`` at ``degree``."""

    player: Player
    degree: int
    attractor: VertexSet
    items: tuple[DecompositionItem, ...] = ()

    def vertices(self) -> VertexSet:
        out = self.attractor
        for it in self.items:
            out |= it.attractor
        return out

    def walk(self) -> Iterator["AttractorDecomposition"]:
        yield self
        for it in self.items:
            yield from it.sub.walk()


@dataclass(frozen=True)
class Verdict:
    """Result of :func:`validate`; falsy on failure, with the first broken clause."""

    ok: bool
    clause: str = ""
    vertex: Optional[int] = None
    path: tuple[int, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        where = f" at item path {list(self.path)}" if self.path else ""
        at = f" (vertex {self.vertex})" if self.vertex is not None else ""
        return f"{self.clause}{at}{where}"


def _first(mask: VertexSet) -> Optional[int]:
    return (mask & -mask).bit_length() - 1 if mask else None


def validate(g: ParityGame | Subgame, dec: AttractorDecomposition) -> Verdict:
    """Check every clause of the attractor decomposition definition.

    Stored attractors are recomputed and compared, so stale witnesses fail.
    """
    return _validate(as_subgame(g), dec, ())


def _validate(sub: Subgame, dec: AttractorDecomposition, path: tuple[int, ...]) -> Verdict:
    game = sub.game
    p, d = dec.player, dec.degree

    def fail(clause: str, mask: VertexSet = 0) -> Verdict:
        return Verdict(False, clause, _first(mask), path)

    if d < 0 or Player.of_priority(d) != p:
        return fail(f"degree {d} does not have the parity of {p}")
    too_high = sub.vertices & ~game.priority_at_most(d)
    if too_high:
        return fail(f"priority above degree {d}", too_high)
    if dec.vertices() & ~sub.vertices:
        return fail("sets leave the subgame", dec.vertices() & ~sub.vertices)
    top = attract(sub, sub.vertices & game.with_priority(d), p).attractor
    if top != dec.attractor:
        return fail(f"top set is not the {p} attractor to priority {d}", top ^ dec.attractor)
    if d < 2 and dec.items:
        return fail(f"degree {d} admits no items")
    current = sub.vertices & ~top
    low = game.priority_at_most(d - 2)
    for idx, it in enumerate(dec.items):
        here = path + (idx,)
        s = it.trap
        if not s:
            return Verdict(False, "empty trap", None, here)
        if s & ~current:
            return Verdict(False, "trap leaves the remaining subgame", _first(s & ~current), here)
        if s & ~low:
            return Verdict(False, f"trap has priority above {d - 2}", _first(s & ~low), here)
        if not is_trap(Subgame(game, current), s, p.opponent):
            return Verdict(False, f"set is not a trap for {p.opponent}", None, here)
        if it.sub.player != p or it.sub.degree != d - 2:
            return Verdict(False, "nested decomposition has wrong player or degree", None, here)
        inner = _validate(Subgame(game, s), it.sub, here)
        if not inner:
            return inner
        a = attract(Subgame(game, current), s, p).attractor
        if a != it.attractor:
            return Verdict(False, f"item attractor is not the {p} attractor to the trap",
                           _first(a ^ it.attractor), here)
        current &= ~a
    if current:
        return fail("vertices left over after the last item", current)
    return Verdict(True)


def decomposition_tree(dec: AttractorDecomposition) -> OrderedTree:
    if not dec.items:
        return TRIVIAL
    return tuple(decomposition_tree(it.sub) for it in dec.items)


def dominion_from_decomposition(
    g: ParityGame | Subgame, trap: VertexSet, dec: AttractorDecomposition
) -> Strategy:
    """Union of the reachability strategies implicit in ``dec``.

    Vertices of the top priority pick their lowest-numbered successor that
    stays in the current subgame; every other player vertex follows its
    attractor layer inward, again preferring the lowest-numbered successor.
    """
    sub = as_subgame(g)
    inner = restrict(sub, trap)
    verdict = validate(inner, dec)
    if not verdict:
        raise InvalidDecomposition(str(verdict))
    if not is_trap(sub, trap, dec.player.opponent):
        raise InvalidDecomposition(f"set is not a trap for {dec.player.opponent}")
    choice: dict[int, int] = {}
    _collect(sub.game, trap, dec, choice)
    return Strategy.from_choice(sub, dec.player, choice, trap)


def _toward(game: ParityGame, current: VertexSet, v: int, rank: dict[int, int]) -> int:
    r = rank[v]
    return min(u for u in members(game.succ_mask[v] & current) if rank.get(u, r) < r)


def _collect(game: ParityGame, current: VertexSet, dec: AttractorDecomposition,
             choice: dict[int, int]) -> None:
    p = dec.player
    owned = game.owned_mask[p]
    sub = Subgame(game, current)
    res = attract(sub, current & game.with_priority(dec.degree), p)
    for v in members(res.attractor & owned):
        if res.rank[v] == 0:
            choice[v] = min(members(game.succ_mask[v] & current))
        else:
            choice[v] = _toward(game, current, v, res.rank)
    current &= ~res.attractor
    for it in dec.items:
        _collect(game, it.trap, it.sub, choice)
        res = attract(Subgame(game, current), it.trap, p)
        for v in members(res.attractor & ~it.trap & owned):
            choice[v] = _toward(game, current, v, res.rank)
        current &= ~res.attractor


# -- JSON form ---------------------------------------------------------------

def to_nested(dec: AttractorDecomposition) -> list:
    """``[A, [S1, H1, A1], ...]`` with sorted vertex lists."""
    out: list = [sorted(members(dec.attractor))]
    for it in dec.items:
        out.append([sorted(members(it.trap)), to_nested(it.sub), sorted(members(it.attractor))])
    return out


def from_nested(data: list, player: Player, degree: int) -> AttractorDecomposition:
    if not isinstance(data, list) or not data:
        raise InvalidDecomposition("decomposition must be a non-empty array")
    items = []
    for entry in data[1:]:
        if not isinstance(entry, list) or len(entry) != 3:
            raise InvalidDecomposition("each item must be [S, H, A]")
        s, h, a = entry
        items.append(DecompositionItem(_mask(s), from_nested(h, player, degree - 2), _mask(a)))
    return AttractorDecomposition(player, degree, _mask(data[0]), tuple(items))


def _mask(xs: list) -> VertexSet:
    if not isinstance(xs, list) or not all(isinstance(x, int) and x >= 0 for x in xs):
        raise InvalidDecomposition(f"expected a list of vertex ids, got {xs!r}")
    m = 0
    for x in xs:
        m |= 1 << x
    return m


# -- exhaustive enumeration (desk-scale oracle) -------------------------------

ENUMERATION_LIMIT = 6


class TooLarge(ValueError):
    pass


def _subsets_by_size(mask: VertexSet) -> Iterator[VertexSet]:
    verts = list(members(mask))
    by_size: list[list[int]] = [[] for _ in range(len(verts) + 1)]
    for bits in range(1, 1 << len(verts)):
        s = 0
        for i, v in enumerate(verts):
            if bits >> i & 1:
                s |= 1 << v
        by_size[size(s)].append(s)
    for group in by_size:
        yield from group


def enumerate_decompositions(
    g: ParityGame | Subgame, player: Player, degree: int
) -> Iterator[AttractorDecomposition]:
    """Every ``player`` decomposition of ``g`` at ``degree``; exponential."""
    sub = as_subgame(g)
    game = sub.game
    if size(sub.vertices) > ENUMERATION_LIMIT:
        raise TooLarge(f"enumeration is limited to {ENUMERATION_LIMIT} vertices")
    if sub.vertices & ~game.priority_at_most(degree):
        return
    top = attract(sub, sub.vertices & game.with_priority(degree), player).attractor

    def rest(current: VertexSet) -> Iterator[tuple[DecompositionItem, ...]]:
        if not current:
            yield ()
            return
        if degree < 2:
            return
        low = current & game.priority_at_most(degree - 2)
        cur = Subgame(game, current)
        for s in _subsets_by_size(low):
            if not is_trap(cur, s, player.opponent):
                continue
            a = attract(cur, s, player).attractor
            tails = list(rest(current & ~a))
            if not tails:
                continue
            for h in enumerate_decompositions(Subgame(game, s), player, degree - 2):
                for tail in tails:
                    yield (DecompositionItem(s, h, a),) + tail

    for items in rest(sub.vertices & ~top):
        yield AttractorDecomposition(player, degree, top, items)


class DecompositionTrees:
    """Memoized sets of decomposition trees per (vertex set, player, degree)."""

    def __init__(self, game: ParityGame):
        if game.vertex_count > ENUMERATION_LIMIT:
            raise TooLarge(f"enumeration is limited to {ENUMERATION_LIMIT} vertices")
        self.game = game
        self._memo: dict[tuple[VertexSet, Player, int], frozenset] = {}
        self._rest: dict[tuple[VertexSet, Player, int], frozenset] = {}

    def trees(self, vertices: VertexSet, player: Player, degree: int) -> frozenset:
        key = (vertices, player, degree)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        game = self.game
        out: frozenset = frozenset()
        if degree >= 0 and not vertices & ~game.priority_at_most(degree):
            sub = Subgame(game, vertices)
            top = attract(sub, vertices & game.with_priority(degree), player).attractor
            out = frozenset(
                seq if seq else TRIVIAL for seq in self._sequences(vertices & ~top, player, degree)
            )
        self._memo[key] = out
        return out

    def _sequences(self, current: VertexSet, player: Player, degree: int) -> frozenset:
        key = (current, player, degree)
        hit = self._rest.get(key)
        if hit is not None:
            return hit
        game = self.game
        found: set = set()
        if not current:
            found.add(())
        elif degree >= 2:
            cur = Subgame(game, current)
            low = current & game.priority_at_most(degree - 2)
            for s in _subsets_by_size(low):
                if not is_trap(cur, s, player.opponent):
                    continue
                tails = self._sequences(current & ~attract(cur, s, player).attractor, player, degree)
                if not tails:
                    continue
                for t in self.trees(s, player, degree - 2):
                    for tail in tails:
                        found.add((t,) + tail)
        out = frozenset(found)
        self._rest[key] = out
        return out

    def is_dominion(self, vertices: VertexSet, player: Player, degree: int) -> bool:
        sub = Subgame(self.game, self.game.all_vertices)
        if not is_trap(sub, vertices, player.opponent):
            return False
        return bool(self.trees(vertices, player, degree))
