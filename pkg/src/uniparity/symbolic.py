"""Set-based symbolic execution of the universal algorithm.

:class:`SymbolicStore` is an accounting layer over ordinary bitsets: it
hands out set variables, performs the primitive set operations and the
controllable predecessor on them, and counts every call.  Two variable
layouts are provided.  ``per-frame`` keeps one set variable per recursive
call (linear in the priority range).  ``succinct`` keeps the whole stack
of subgames in ``lg K`` bit-slice variables via :class:`SuccinctPartitionStack`.
"""
from __future__ import annotations

import enum
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .game import ParityGame, Player, VertexSet
from .solvers import (
    PruningRule,
    SolveReport,
    SolveStats,
    _check_rule,
    family_trees,
    normalize_degree,
)
from .trees import (
    Succinct,
    TreeCursor,
    TreeLike,
    as_cursor,
    cursor_height,
    succinct_cursor_width,
    succinct_step_bits,
)


class Layout(enum.Enum):
    PER_FRAME = "per-frame"
    SUCCINCT = "succinct"


# Documented ceilings on peak live set variables, asserted by the tests:
#   per-frame:  peak <= PER_FRAME_SLOPE * d + PER_FRAME_OFFSET
#   succinct:   peak <= SUCCINCT_SLOPE * ceil(lg d) + SUCCINCT_OFFSET
PER_FRAME_SLOPE, PER_FRAME_OFFSET = 1, 7
SUCCINCT_SLOPE, SUCCINCT_OFFSET = 1, 7


def ceil_lg(x: int) -> int:
    return max(x - 1, 0).bit_length()


def per_frame_budget(d: int) -> int:
    return PER_FRAME_SLOPE * d + PER_FRAME_OFFSET


def succinct_budget(d: int) -> int:
    return SUCCINCT_SLOPE * ceil_lg(max(d, 1)) + SUCCINCT_OFFSET


@dataclass
class Counters:
    peak_live_variables: int = 0
    set_ops: int = 0
    cpre_ops: int = 0
    attractor_calls: int = 0
    attractor_set_ops: int = 0


class Var(int):
    """Opaque handle of a symbolic set variable."""


class SymbolicStore:
    def __init__(self, game: ParityGame):
        self.game = game
        self.universe = game.all_vertices
        self.counters = Counters()
        self._vals: dict[int, VertexSet] = {}
        self._next = 0

    # allocation
    @property
    def live(self) -> int:
        return len(self._vals)

    def alloc(self, value: VertexSet = 0) -> Var:
        h = Var(self._next)
        self._next += 1
        self._vals[h] = value
        if len(self._vals) > self.counters.peak_live_variables:
            self.counters.peak_live_variables = len(self._vals)
        return h

    def free(self, *handles: Var) -> None:
        for h in handles:
            del self._vals[h]

    @contextmanager
    def scope(self) -> Iterator[list[Var]]:
        """Variables appended to the yielded list are freed on exit."""
        owned: list[Var] = []
        try:
            yield owned
        finally:
            for h in owned:
                if h in self._vals:
                    del self._vals[h]

    def read(self, h: Var) -> VertexSet:
        """Conventional read-out of a variable's contents; not a symbolic op."""
        return self._vals[h]

    # primitive symbolic operations, each writing into ``dst``
    def _op(self, dst: Var, value: VertexSet) -> Var:
        self.counters.set_ops += 1
        self._vals[dst] = value
        return dst

    def assign(self, dst: Var, src: Var) -> Var:
        self.counters.set_ops += 1
        self._vals[dst] = self._vals[src]
        return dst

    def union(self, dst: Var, a: Var, b: Var) -> Var:
        vals = self._vals
        self.counters.set_ops += 1
        vals[dst] = vals[a] | vals[b]
        return dst

    def intersect(self, dst: Var, a: Var, b: Var) -> Var:
        vals = self._vals
        self.counters.set_ops += 1
        vals[dst] = vals[a] & vals[b]
        return dst

    def diff(self, dst: Var, a: Var, b: Var) -> Var:
        vals = self._vals
        self.counters.set_ops += 1
        vals[dst] = vals[a] & ~vals[b]
        return dst

    def complement(self, dst: Var, a: Var) -> Var:
        return self._op(dst, self.universe & ~self._vals[a])

    def load_priority(self, dst: Var, p: int) -> Var:
        return self._op(dst, self.game.with_priority(p))

    def load_all(self, dst: Var) -> Var:
        return self._op(dst, self.universe)

    def is_empty(self, a: Var) -> bool:
        self.counters.set_ops += 1
        return not self._vals[a]

    def equal(self, a: Var, b: Var) -> bool:
        self.counters.set_ops += 1
        return self._vals[a] == self._vals[b]

    def cpre(self, dst: Var, a: Var, player: Player, within: Optional[Var] = None) -> Var:
        """One-step controllable predecessor, in the subgame held in ``within`` if given."""
        self.counters.cpre_ops += 1
        game = self.game
        x = self._vals[a]
        inside = self.universe if within is None else self._vals[within]
        succ_mask = game.succ_mask
        mine = game.owned_mask[player]
        out = 0
        rest = inside
        while rest:
            low = rest & -rest
            rest ^= low
            succ = succ_mask[low.bit_length() - 1] & inside
            if (succ & x) if mine & low else not succ & ~x:
                out |= low
        self._vals[dst] = out
        return dst


def sym_attract(store: SymbolicStore, sub: Var, target: Var, player: Player) -> Var:
    """Attractor to ``target`` inside the subgame held in ``sub``; returns a new variable.

    Iterates ``X := X ∪ cpre(X)`` with the predecessor taken inside ``sub``
    until stable, one controllable predecessor per round.
    """
    c = store.counters
    before = c.set_ops
    c.attractor_calls += 1
    x = store.alloc()
    store.assign(x, target)
    step = store.alloc()
    try:
        while True:
            store.cpre(step, x, player, within=sub)
            store.union(step, step, x)
            if store.equal(step, x):
                break
            store.assign(x, step)
    finally:
        store.free(step)
    c.attractor_set_ops += c.set_ops - before
    return x


def bit(k: int, i: int) -> int:
    """k-th binary digit of ``i``, counting from ``k = 1`` for the lowest."""
    return i >> (k - 1) & 1


class SuccinctPartitionStack:
    """A partition ``H_{K-1}, ..., H_0`` of the vertices kept as ``lg K`` slices.

    Slice ``S_k`` is the union of the ``H_i`` whose index has bit ``k`` set,
    so ``H_i`` is the intersection of the slices (or their complements)
    selected by the bits of ``i``.  ``K`` must be a power of two.  With
    ``shadow=True`` an explicit copy of every ``H_i`` is kept outside the
    store and compared after each update.  All vertices start in ``H_start``,
    by default the top slot.
    """

    def __init__(self, store: SymbolicStore, slots: int, shadow: bool = False,
                 start: Optional[int] = None):
        if slots < 1 or slots & (slots - 1):
            raise ValueError(f"slot count must be a power of two, got {slots}")
        self.store = store
        self.slots = slots
        self.width = slots.bit_length() - 1
        self.slices = [store.alloc() for _ in range(self.width)]
        top = slots - 1 if start is None else start
        if not 0 <= top < slots:
            raise ValueError(f"start slot {top} outside 0..{slots - 1}")
        for k, s in enumerate(self.slices, start=1):
            if bit(k, top):
                store.load_all(s)
        self.shadow: Optional[list[VertexSet]] = None
        self.checks = 0
        if shadow:
            self.shadow = [0] * slots
            self.shadow[top] = store.universe
            self.check()

    def read(self, i: int) -> Var:
        """Materialize ``H_i`` into a fresh scratch variable."""
        st = self.store
        out = st.alloc()
        st.load_all(out)
        for k, s in enumerate(self.slices):
            if i >> k & 1:
                st.intersect(out, out, s)
            else:
                st.diff(out, out, s)
        return out

    def replace(self, i: int, b: Var) -> None:
        """``H_{i+1} := H_{i+1} ∪ B`` and ``H_i := H_i \\ B`` for ``B ⊆ H_i``."""
        st = self.store
        for k, s in enumerate(self.slices):
            new, old = (i + 1) >> k & 1, i >> k & 1
            if new == old:
                continue
            if new:
                st.union(s, s, b)
            else:
                st.diff(s, s, b)
        if self.shadow is not None:
            moved = st.read(b)
            self.shadow[i + 1] |= moved
            self.shadow[i] &= ~moved
            self.check()

    def push(self, i: int, b: Var) -> None:
        """``H_i := B`` and ``H_{i-1} := H_i \\ B`` for ``B ⊆ H_i``."""
        st = self.store
        with st.scope() as tmp:
            rest = self.read(i)
            tmp.append(rest)
            st.diff(rest, rest, b)
            for k, s in enumerate(self.slices):
                here, below = i >> k & 1, (i - 1) >> k & 1
                if here == below:
                    continue
                if here:
                    st.diff(s, s, rest)
                else:
                    st.union(s, s, rest)
            if self.shadow is not None:
                moved = st.read(rest)
                self.shadow[i - 1] = moved
                self.shadow[i] &= ~moved
        if self.shadow is not None:
            self.check()

    def decoded(self) -> list[VertexSet]:
        """Every ``H_i`` recomputed from the slices (conventional read-out)."""
        vals = [self.store.read(s) for s in self.slices]
        out = []
        for i in range(self.slots):
            h = self.store.universe
            for k, v in enumerate(vals, start=1):
                h = h & v if bit(k, i) else h & ~v
            out.append(h)
        return out

    def chain(self, current: int) -> list[VertexSet]:
        """Subgames ``G_{K-2} ⊇ ... ⊇ G_current`` with ``G_j = H_j ∪ ... ∪ H_0``."""
        hs = self.decoded()
        out = []
        acc = 0
        for j in range(self.slots - 1):
            acc |= hs[j]
            if j >= current:
                out.append(acc)
        return out[::-1]

    def check(self) -> None:
        assert self.shadow is not None
        self.checks += 1
        got = self.decoded()
        if got != self.shadow:
            raise AssertionError(f"slices decode to {got}, expected {self.shadow}")

    def release(self) -> None:
        self.store.free(*self.slices)
        self.slices = []


def succ_update_replace(stack: SuccinctPartitionStack, i: int, b: Var) -> None:
    stack.replace(i, b)


def succ_update_push(stack: SuccinctPartitionStack, i: int, b: Var) -> None:
    stack.push(i, b)


# -- the solver ------------------------------------------------------------------

@dataclass
class _SymFrame:
    player: Player
    d: int
    loop: TreeCursor
    keep: TreeCursor
    index: int  # slot in the succinct stack, or unused
    g: Optional[Var] = None  # per-frame layout only
    i: int = 0
    end: int = 0
    children: list = field(default_factory=list)
    ops: int = 0
    # (non-empty step strings, their total length) along each cursor's path
    loop_bits: tuple[int, int] = (0, 0)
    keep_bits: tuple[int, int] = (0, 0)


def _slots_for(depth: int) -> int:
    # one slot per frame plus a bin for vertices the root frame discards
    k = 1
    while k < depth + 2:
        k <<= 1
    return k


def _non_attractor_ops(c: Counters) -> int:
    return c.set_ops - c.attractor_set_ops


def sym_universal_solve(game: ParityGame, player_view: Player = Player.EVEN,
                        t_even: Optional[TreeLike] = None, t_odd: Optional[TreeLike] = None,
                        layout: Layout = Layout.SUCCINCT,
                        rule: PruningRule = PruningRule.NONE, *,
                        shadow: bool = False, chain_check: bool = False) -> SolveReport:
    """The universal algorithm on a :class:`SymbolicStore`.

    Only cursors are used for tree navigation.  The report's ``symbolic``
    field carries the store counters, the layout, the largest per-iteration
    count of set operations outside attractor loops and, for succinct trees,
    the widest packed cursor.
    """
    layout = Layout(layout)
    if t_even is None or t_odd is None:
        de, do = family_trees("succinct", game, player_view)
        t_even = de if t_even is None else t_even
        t_odd = do if t_odd is None else t_odd
    ce, co = as_cursor(t_even), as_cursor(t_odd)
    _check_rule(rule, ce, co)
    d = normalize_degree(game, player_view)
    store = SymbolicStore(game)
    c = store.counters
    stats = SolveStats()
    own, other = (ce, co) if player_view is Player.EVEN else (co, ce)
    slots = _slots_for(cursor_height(ce) + cursor_height(co))
    stack_h = SuccinctPartitionStack(store, slots, shadow, slots - 2) if layout is Layout.SUCCINCT else None
    cursor_bits = 0

    def step_bits(cur: TreeCursor, i: int, bits: tuple[int, int]) -> tuple[int, int]:
        nonlocal cursor_bits
        if not isinstance(cur.family, Succinct):
            return bits
        k = succinct_step_bits(cur.state, i)
        strings, total = bits[0] + (k > 0), bits[1] + k
        cursor_bits = max(cursor_bits, succinct_cursor_width(cur.family, strings, total))
        return strings, total

    def current_g(f: _SymFrame) -> Var:
        if stack_h is None:
            assert f.g is not None
            return f.g
        return stack_h.read(f.index)

    root = _SymFrame(player_view, d, other, own, slots - 2)
    root.end = other.child_count()
    if stack_h is None:
        root.g = store.alloc()
        store.load_all(root.g)
    frames = [root]
    stats.recursive_calls = 1
    max_iter_ops = 0
    returned: Optional[tuple[Var, tuple]] = None
    result: VertexSet = 0
    while frames:
        f = frames[-1]
        if returned is not None:
            u, child_tree = returned
            returned = None
            f.children.append(child_tree)
            start = _non_attractor_ops(c)
            g = current_g(f)
            removed = sym_attract(store, g, u, f.player.opponent)
            empty = store.is_empty(u)
            if stack_h is None:
                store.diff(g, g, removed)
            else:
                stack_h.replace(f.index, removed)
                store.free(g)
            store.free(u, removed)
            stats.loop_iterations += 1
            f.ops += _non_attractor_ops(c) - start
            max_iter_ops = max(max_iter_ops, f.ops)
            if chain_check and stack_h is not None:
                _check_chain(stack_h, f.index)
            if empty:
                if rule is PruningRule.EMPTY_SET:
                    f.end = f.i
                elif rule is PruningRule.PARYS_BLOCKS:
                    f.i = f.loop.family.block_end(f.loop.state, f.i - 1)
        if f.i < f.end:
            i = f.i
            f.i += 1
            start = _non_attractor_ops(c)
            g = current_g(f)
            target = store.alloc()
            store.load_priority(target, f.d)
            store.intersect(target, target, g)
            top = sym_attract(store, g, target, f.player)
            store.free(target)
            child = _SymFrame(f.player.opponent, f.d - 1, f.keep, f.loop.descend(i), f.index - 1,
                              loop_bits=f.keep_bits, keep_bits=step_bits(f.loop, i, f.loop_bits))
            child.end = child.loop.child_count()
            if stack_h is None:
                child.g = store.alloc()
                store.diff(child.g, g, top)
            else:
                stack_h.push(f.index, top)
                store.free(g)
            store.free(top)
            f.ops = _non_attractor_ops(c) - start
            stats.recursive_calls += 1
            frames.append(child)
            continue
        frames.pop()
        node = tuple(f.children)
        if stack_h is None:
            assert f.g is not None
            out = f.g
        else:
            out = stack_h.read(f.index)
            if frames:
                stack_h.replace(f.index, out)
        if frames:
            returned = (out, node)
        else:
            stats.recursion_tree = node
            result = store.read(out)
            store.free(out)
    if stack_h is not None:
        stack_h.release()
    universe = game.all_vertices
    lost = universe & ~result
    w_even, w_odd = (result, lost) if player_view is Player.EVEN else (lost, result)
    report = SolveReport(w_even, w_odd, stats=stats, solver=f"symbolic-{layout.value}")
    report.symbolic = {
        "layout": layout.value,
        "peak_live_variables": c.peak_live_variables,
        "set_ops": c.set_ops,
        "cpre_ops": c.cpre_ops,
        "attractor_calls": c.attractor_calls,
        "max_ops_per_iteration": max_iter_ops,
        "slices": 0 if stack_h is None else stack_h.width,
        "degree": d,
        "max_cursor_bits": cursor_bits,
        "shadow_checks": 0 if stack_h is None else stack_h.checks,
    }
    return report


def _check_chain(stack_h: SuccinctPartitionStack, current: int) -> None:
    chain = stack_h.chain(current)
    for outer, inner in zip(chain, chain[1:]):
        if inner & ~outer:
            raise AssertionError("stacked subgames are not a descending chain")
    if chain and chain[0] | stack_h.decoded()[-1] != stack_h.store.universe:
        raise AssertionError("outermost subgame and discarded vertices miss some vertex")
    diffs = [a & ~b for a, b in zip(chain, chain[1:])] + [chain[-1]]
    rebuilt = []
    acc = 0
    for part in reversed(diffs):
        acc |= part
        rebuilt.append(acc)
    if rebuilt[::-1] != chain:
        raise AssertionError("difference encoding does not round-trip")


__all__ = [
    "Layout",
    "SymbolicStore",
    "SuccinctPartitionStack",
    "per_frame_budget",
    "succinct_budget",
    "succ_update_push",
    "succ_update_replace",
    "sym_attract",
    "sym_universal_solve",
]
