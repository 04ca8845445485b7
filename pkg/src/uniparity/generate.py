"""Deterministic game generators."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Union

from .game import ParityGame, Player


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class Random:
    n: int
    d: int
    out_degree: tuple[int, int] = (1, 3)
    seed: int = 0


@dataclass(frozen=True)
class Cycle:
    n: int
    d: int
    seed: int = 0


@dataclass(frozen=True)
class Ladder:
    levels: int
    seed: int = 0


GeneratorSpec = Union[Random, Cycle, Ladder]


def random_game(n: int, d: int, out_degree: tuple[int, int] = (1, 3), seed: int = 0) -> ParityGame:
    """Priorities uniform in ``0..d``, owners uniform, out-degrees uniform in range."""
    lo, hi = out_degree
    if n < 1 or d < 0 or lo < 1 or hi < lo:
        raise InvalidSpec(f"bad random spec n={n} d={d} out_degree={out_degree}")
    rng = random.Random(seed & 0xFFFF_FFFF_FFFF_FFFF)
    owner = [Player(rng.randrange(2)) for _ in range(n)]
    priority = [rng.randint(0, d) for _ in range(n)]
    succ = []
    for _ in range(n):
        k = min(rng.randint(lo, hi), n)
        succ.append(tuple(sorted(rng.sample(range(n), k))))
    return ParityGame(tuple(owner), tuple(priority), tuple(succ))


def cycle_game(n: int, d: int) -> ParityGame:
    """A single directed cycle; vertex ``i`` has priority ``i mod (d + 1)``."""
    if n < 1 or d < 0:
        raise InvalidSpec(f"bad cycle spec n={n} d={d}")
    owner = tuple(Player(i % 2) for i in range(n))
    priority = tuple(i % (d + 1) for i in range(n))
    succ = tuple(((i + 1) % n,) for i in range(n))
    return ParityGame(owner, priority, succ)


def ladder_game(levels: int) -> ParityGame:
    """``levels`` rungs of an Even/Odd pair, each rung reaching the next and back.

    Rung ``j`` holds Even vertex ``2j`` (priority ``2j``) and Odd vertex
    ``2j+1`` (priority ``2j+1``); the last rung wraps around to the first.
    """
    if levels < 1:
        raise InvalidSpec(f"ladder needs at least one level, got {levels}")
    n = 2 * levels
    owner = tuple(Player(v % 2) for v in range(n))
    priority = tuple(range(n))
    succ = []
    for v in range(n):
        nxt = (v // 2 + 1) % levels * 2
        mate = v ^ 1
        succ.append(tuple(sorted({mate, nxt, nxt + 1})))
    return ParityGame(owner, priority, tuple(succ))


def generate(spec: GeneratorSpec) -> ParityGame:
    if isinstance(spec, Random):
        return random_game(spec.n, spec.d, spec.out_degree, spec.seed)
    if isinstance(spec, Cycle):
        return cycle_game(spec.n, spec.d)
    if isinstance(spec, Ladder):
        return ladder_game(spec.levels)
    raise InvalidSpec(f"unknown generator spec {spec!r}")
