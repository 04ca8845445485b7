"""Ordered trees, the C/P/S universal families and lazy cursors.

An ordered tree is a plain tuple of ordered trees; ``()`` is the trivial
tree.  Tuples are immutable and compare structurally, which is all the
algorithms need.  The families additionally expose cursors so the solvers
can walk quasi-polynomially large trees without materializing them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Hashable, Iterator, Optional, Union

OrderedTree = tuple
TRIVIAL: OrderedTree = ()


class InvalidParams(ValueError):
    pass


class InvalidPath(ValueError):
    pass


# -- metrics -----------------------------------------------------------------

def height(t: OrderedTree) -> int:
    if not t:
        return 0
    return 1 + max(height(c) for c in t)


def leaves(t: OrderedTree) -> int:
    if not t:
        return 1
    return sum(leaves(c) for c in t)


def node_count(t: OrderedTree) -> int:
    return 1 + sum(node_count(c) for c in t)


def is_small(t: OrderedTree, n: int, h: int) -> bool:
    return height(t) <= h and leaves(t) <= n


# -- text form ---------------------------------------------------------------

def to_brackets(t: OrderedTree) -> str:
    parts: list[str] = []
    stack: list[Any] = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, str):
            parts.append(x)
            continue
        parts.append("[")
        stack.append("]")
        stack.extend(reversed(x))
    return "".join(parts)


def parse_brackets(text: str) -> OrderedTree:
    text = "".join(text.split())
    if not text:
        raise ValueError("empty tree text")
    stack: list[list] = []
    result: Optional[OrderedTree] = None
    for pos, ch in enumerate(text):
        if result is not None:
            raise ValueError(f"trailing characters at offset {pos}")
        if ch == "[":
            stack.append([])
        elif ch == "]":
            if not stack:
                raise ValueError(f"unbalanced ']' at offset {pos}")
            node = tuple(stack.pop())
            if stack:
                stack[-1].append(node)
            else:
                result = node
        else:
            raise ValueError(f"unexpected character {ch!r} at offset {pos}")
    if result is None:
        raise ValueError("unbalanced '['")
    return result


# -- families (explicit) -----------------------------------------------------

@lru_cache(maxsize=None)
def complete_tree(n: int, h: int) -> OrderedTree:
    if n < 1 or h < 0:
        raise InvalidParams(f"complete tree needs n >= 1 and h >= 0, got n={n}, h={h}")
    if h == 0:
        return TRIVIAL
    return (complete_tree(n, h - 1),) * n


@lru_cache(maxsize=None)
def parys_tree(n: int, h: int) -> OrderedTree:
    if n < 0 or h < 0:
        raise InvalidParams(f"parys tree needs n, h >= 0, got n={n}, h={h}")
    if h == 0:
        return TRIVIAL
    half = n // 2
    side = (parys_tree(half, h - 1),) * half
    return side + (parys_tree(n, h - 1),) + side


@lru_cache(maxsize=None)
def _succinct_forest(n: int, h: int) -> tuple:
    if n == 0:
        return ()
    side = _succinct_forest(n // 2, h)
    return side + (succinct_tree(n, h - 1),) + side


@lru_cache(maxsize=None)
def succinct_tree(n: int, h: int) -> OrderedTree:
    """S(n, h); the recurrence concatenates forests, with S(0, h) empty."""
    if n < 0 or h < 0:
        raise InvalidParams(f"succinct tree needs n, h >= 0, got n={n}, h={h}")
    if h == 0:
        return TRIVIAL
    return _succinct_forest(n, h)


# -- operations --------------------------------------------------------------

def interleave(a: OrderedTree, b: OrderedTree) -> OrderedTree:
    """``<> ⋈ b = <>`` and ``<a1..ak> ⋈ b = <b ⋈ a1, .., b ⋈ ak>``."""
    if not a:
        return TRIVIAL
    return tuple(interleave(b, child) for child in a)


def embeds(big: OrderedTree, small: OrderedTree) -> bool:
    """Decide whether ``small`` is obtained from ``big`` by pruning subtrees.

    Children of ``small`` are matched greedily to the earliest child of
    ``big`` that embeds them; embedding being monotone along the child
    sequence makes the earliest match never worse than a later one.
    """
    memo: dict[tuple[int, int], bool] = {}

    def go(b: OrderedTree, s: OrderedTree) -> bool:
        if not s:
            return True
        if len(s) > len(b):
            return False
        key = (id(b), id(s))
        hit = memo.get(key)
        if hit is not None:
            return hit
        i = 0
        ok = True
        for child in s:
            while i < len(b) and not go(b[i], child):
                i += 1
            if i == len(b):
                ok = False
                break
            i += 1
        memo[key] = ok
        return ok

    return go(big, small)


def embeds_exhaustive(big: OrderedTree, small: OrderedTree) -> bool:
    """Backtracking over all increasing index sequences; test oracle for :func:`embeds`."""
    if not small:
        return True

    def match(i: int, j: int) -> bool:
        if j == len(small):
            return True
        for k in range(i, len(big) - (len(small) - j) + 1):
            if embeds_exhaustive(big[k], small[j]) and match(k + 1, j + 1):
                return True
        return False

    return match(0, 0)


def _small_trees(n: int, h: int) -> list[tuple[OrderedTree, int]]:
    """All trees of height <= h with at most n leaves, paired with their leaf count."""
    if n < 1:
        return []
    out = [(TRIVIAL, 1)]
    if h == 0:
        return out
    children = _small_trees(n, h - 1)

    def sequences(budget: int) -> Iterator[tuple[tuple, int]]:
        for t, lv in children:
            if lv > budget:
                continue
            yield (t,), lv
            for rest, rl in sequences(budget - lv):
                yield (t,) + rest, lv + rl

    out.extend(sequences(n))
    return out


def enumerate_small_trees(n: int, h: int) -> Iterator[OrderedTree]:
    """Every (n, h)-small tree exactly once, shortest bracket form first."""
    trees = [t for t, _ in _small_trees(n, h)]
    keyed = sorted((len(s), s, t) for t in trees for s in [to_brackets(t)])
    for _, _, t in keyed:
        yield t


def count_small_trees(n: int, h: int) -> int:
    """Count (n, h)-small trees by a leaf-count recurrence, independent of the enumerator."""
    if n < 1:
        return 0
    # exact[g][m]: trees of height <= g with exactly m leaves
    exact = [[0] * (n + 1) for _ in range(h + 1)]
    exact[0][1] = 1
    for g in range(1, h + 1):
        prev = exact[g - 1]
        # seqs[m]: nonempty child sequences with m leaves in total
        seqs = [0] * (n + 1)
        for m in range(1, n + 1):
            total = prev[m]
            for j in range(1, m):
                total += prev[j] * seqs[m - j]
            seqs[m] = total
        exact[g] = [0] * (n + 1)
        for m in range(1, n + 1):
            exact[g][m] = seqs[m] + (1 if m == 1 else 0)
    return sum(exact[h][1:])


def random_tree(rng: random.Random, max_height: int, max_children: int = 3) -> OrderedTree:
    if max_height == 0 or rng.random() < 0.25:
        return TRIVIAL
    k = rng.randint(1, max_children)
    return tuple(random_tree(rng, max_height - 1, max_children) for _ in range(k))


# -- lazy families and cursors ----------------------------------------------

class TreeFamily:
    """A tree given by navigation rules over small node states."""

    name = "abstract"

    def root_state(self) -> Hashable:
        raise NotImplementedError

    def child_count(self, state: Any) -> int:
        raise NotImplementedError

    def child_state(self, state: Any, i: int) -> Any:
        raise NotImplementedError

    def height(self) -> int:
        raise NotImplementedError

    def child_groups(self, state: Any) -> Iterator[tuple[Any, int]]:
        """Child states with multiplicities, in no particular order."""
        for i in range(self.child_count(state)):
            yield self.child_state(state, i), 1

    def materialize(self) -> OrderedTree:
        def build(state: Any) -> OrderedTree:
            return tuple(build(self.child_state(state, i)) for i in range(self.child_count(state)))

        return build(self.root_state())

    def cursor(self) -> "TreeCursor":
        return TreeCursor(self, (), self.root_state())


@dataclass(frozen=True)
class Complete(TreeFamily):
    n: int
    h: int
    name = "complete"

    def __post_init__(self) -> None:
        if self.n < 1 or self.h < 0:
            raise InvalidParams(f"complete tree needs n >= 1 and h >= 0, got n={self.n}, h={self.h}")

    def root_state(self) -> int:
        return self.h

    def child_count(self, state: int) -> int:
        return self.n if state > 0 else 0

    def child_state(self, state: int, i: int) -> int:
        return state - 1

    def child_groups(self, state: int) -> Iterator[tuple[int, int]]:
        if state > 0:
            yield state - 1, self.n

    def height(self) -> int:
        return self.h


@dataclass(frozen=True)
class Parys(TreeFamily):
    n: int
    h: int
    name = "parys"

    def __post_init__(self) -> None:
        if self.n < 0 or self.h < 0:
            raise InvalidParams(f"parys tree needs n, h >= 0, got n={self.n}, h={self.h}")

    def root_state(self) -> tuple[int, int]:
        return (self.n, self.h)

    def child_count(self, state: tuple[int, int]) -> int:
        n, h = state
        return 2 * (n // 2) + 1 if h > 0 else 0

    def child_state(self, state: tuple[int, int], i: int) -> tuple[int, int]:
        n, h = state
        half = n // 2
        return (n, h - 1) if i == half else (half, h - 1)

    def child_groups(self, state: tuple[int, int]) -> Iterator[tuple[tuple[int, int], int]]:
        n, h = state
        if h > 0:
            yield (n, h - 1), 1
            if n // 2:
                yield (n // 2, h - 1), 2 * (n // 2)

    def block_end(self, state: tuple[int, int], i: int) -> int:
        """One past the last index of the block holding child ``i``."""
        half = state[0] // 2
        if i < half:
            return half
        if i == half:
            return half + 1
        return 2 * half + 1

    def height(self) -> int:
        return self.h


@dataclass(frozen=True)
class Succinct(TreeFamily):
    """S(n, h).  A node S(m, g) has ``2**bitlen(m) - 1`` children and child
    ``i`` is S(m >> (bitlen(m) - 1 - tz(i + 1)), g - 1), where ``tz`` counts
    trailing zero bits."""

    n: int
    h: int
    name = "succinct"

    def __post_init__(self) -> None:
        if self.n < 0 or self.h < 0:
            raise InvalidParams(f"succinct tree needs n, h >= 0, got n={self.n}, h={self.h}")

    def root_state(self) -> tuple[int, int]:
        return (self.n, self.h)

    def child_count(self, state: tuple[int, int]) -> int:
        n, h = state
        return (1 << n.bit_length()) - 1 if h > 0 else 0

    def child_state(self, state: tuple[int, int], i: int) -> tuple[int, int]:
        n, h = state
        j = i + 1
        tz = (j & -j).bit_length() - 1
        return (n >> (n.bit_length() - 1 - tz), h - 1)

    def child_groups(self, state: tuple[int, int]) -> Iterator[tuple[tuple[int, int], int]]:
        n, h = state
        if h == 0:
            return
        b = n.bit_length()
        # among 1..2**b - 1 exactly 2**(b-1-k) numbers have k trailing zeros
        for k in range(b):
            yield (n >> (b - 1 - k), h - 1), 1 << (b - 1 - k)

    def height(self) -> int:
        return self.h if self.n > 0 else 0


@dataclass(frozen=True)
class Explicit(TreeFamily):
    tree: OrderedTree = field(hash=False)
    name = "explicit"

    def root_state(self) -> OrderedTree:
        return self.tree

    def child_count(self, state: OrderedTree) -> int:
        return len(state)

    def child_state(self, state: OrderedTree, i: int) -> OrderedTree:
        return state[i]

    def height(self) -> int:
        return height(self.tree)

    def materialize(self) -> OrderedTree:
        return self.tree


@dataclass(frozen=True)
class TreeCursor:
    """A node of a family tree, addressed by its path of child indices."""

    family: TreeFamily
    path: tuple[int, ...]
    state: Any = field(compare=False, repr=False)

    def child_count(self) -> int:
        return self.family.child_count(self.state)

    def descend(self, i: int) -> "TreeCursor":
        if not 0 <= i < self.child_count():
            raise InvalidPath(f"child {i} does not exist at path {self.path}")
        return TreeCursor(self.family, self.path + (i,), self.family.child_state(self.state, i))

    def ascend(self) -> "TreeCursor":
        if not self.path:
            raise InvalidPath("the root has no parent")
        return cursor_at(self.family, self.path[:-1])

    @property
    def depth(self) -> int:
        return len(self.path)

    def materialize(self) -> OrderedTree:
        fam = self.family

        def build(state: Any) -> OrderedTree:
            return tuple(build(fam.child_state(state, i)) for i in range(fam.child_count(state)))

        return build(self.state)


def cursor_at(family: TreeFamily, path: tuple[int, ...]) -> TreeCursor:
    c = family.cursor()
    for i in path:
        c = c.descend(i)
    return c


def cursor_child_count(c: TreeCursor) -> int:
    return c.child_count()


def cursor_descend(c: TreeCursor, i: int) -> TreeCursor:
    return c.descend(i)


def cursor_ascend(c: TreeCursor) -> TreeCursor:
    return c.ascend()


TreeLike = Union[OrderedTree, TreeFamily, TreeCursor]


def as_cursor(t: TreeLike) -> TreeCursor:
    if isinstance(t, TreeCursor):
        return t
    if isinstance(t, TreeFamily):
        return t.cursor()
    if isinstance(t, tuple):
        return Explicit(t).cursor()
    raise TypeError(f"cannot navigate {type(t).__name__}")


def cursor_height(c: TreeCursor) -> int:
    """Height of the subtree below ``c`` (cheap for the parametric families)."""
    fam = c.family
    if isinstance(fam, (Parys, Succinct)):
        n, h = c.state
        if isinstance(fam, Succinct) and n == 0:
            return 0
        return h
    if isinstance(fam, Complete):
        return c.state
    return height(c.state)


# -- compact encoding of succinct-tree cursors --------------------------------

def _bits_for(x: int) -> int:
    """Bits needed to store values in ``0..x``."""
    return max(x, 0).bit_length()


def encode_succinct_cursor(c: TreeCursor) -> tuple[int, int]:
    """Pack a Succinct cursor into ``(value, bit_length)``.

    A step to child ``i`` of S(m, g) is fully described by a binary string
    of ``bitlen(m) - 1 - tz(i + 1)`` bits, and these lengths sum to less than
    ``bitlen(n)`` along any path.  Only non-empty strings are stored, each
    with its depth, so the footprint is O(lg n * lg h) bits.
    """
    fam = c.family
    if not isinstance(fam, Succinct):
        raise TypeError("compact encoding is defined for Succinct cursors only")
    depth_bits = _bits_for(fam.h)
    m_root = fam.n.bit_length()
    total_bits = _bits_for(m_root)
    fields: list[tuple[int, int]] = []  # (value, width), most significant first
    strings: list[tuple[int, int, int]] = []  # (depth, length, bits)
    state = fam.root_state()
    for depth, i in enumerate(c.path):
        k = succinct_step_bits(state, i)
        if k:
            strings.append((depth, k, (i + 1) >> (state[0].bit_length() - k)))
        state = fam.child_state(state, i)
    concat = 0
    marks = 0
    total = 0
    for _, k, b in strings:
        concat = concat << k | b
        marks = marks << k | (1 << (k - 1))
        total += k
    fields.append((len(c.path), depth_bits))
    fields.append((total, total_bits))
    fields.extend((d, depth_bits) for d, _, _ in strings)
    fields.append((concat, total))
    fields.append((marks, total))
    value = 0
    width = 0
    for v, w in fields:
        value = value << w | v
        width += w
    return value, width


def succinct_step_bits(state: tuple[int, int], i: int) -> int:
    """Length of the binary string recorded for the step to child ``i``."""
    j = i + 1
    return state[0].bit_length() - 1 - ((j & -j).bit_length() - 1)


def succinct_cursor_width(family: "Succinct", strings: int, total: int) -> int:
    """Width :func:`encode_succinct_cursor` produces for a path with ``strings``
    non-empty step strings of combined length ``total``."""
    depth_bits = _bits_for(family.h)
    return depth_bits + _bits_for(family.n.bit_length()) + strings * depth_bits + 2 * total


def decode_succinct_cursor(family: "Succinct", value: int, width: int) -> TreeCursor:
    depth_bits = _bits_for(family.h)
    total_bits = _bits_for(family.n.bit_length())
    pos = width

    def take(w: int) -> int:
        nonlocal pos
        pos -= w
        return (value >> pos) & ((1 << w) - 1)

    path_len = take(depth_bits)
    total = take(total_bits)
    # string count is only known after reading the marks, so peel from the end
    marks = value & ((1 << total) - 1)
    concat = (value >> total) & ((1 << total) - 1)
    count = bin(marks).count("1")
    depths = [take(depth_bits) for _ in range(count)]
    lengths = []
    run = 0
    for bit in range(total - 1, -1, -1):
        if marks >> bit & 1 and run:
            lengths.append(run)
            run = 0
        run += 1
    if run and total:
        lengths.append(run)
    by_depth: dict[int, tuple[int, int]] = {}
    shift = total
    for d, k in zip(depths, lengths):
        shift -= k
        by_depth[d] = (k, (concat >> shift) & ((1 << k) - 1))
    c = family.cursor()
    for depth in range(path_len):
        m = c.state[0].bit_length()
        k, b = by_depth.get(depth, (0, 0))
        tz = m - 1 - k
        c = c.descend((b << (tz + 1) | (1 << tz)) - 1)
    return c


def succinct_cursor_bit_ceiling(n: int, h: int) -> int:
    """Implementation bound on :func:`encode_succinct_cursor` widths.

    With ``L = bitlen(n)`` and ``D = bitlen(h)``: depth field ``D``, total
    length field ``bitlen(L)``, at most ``L - 1`` depth fields and ``2(L - 1)``
    bits of strings plus boundary marks.
    """
    L = n.bit_length()
    D = _bits_for(h)
    return D + _bits_for(L) + max(L - 1, 0) * (D + 2)
