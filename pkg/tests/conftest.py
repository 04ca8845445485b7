import random

import pytest
from hypothesis import strategies as st

from uniparity.game import ParityGame, Player
from uniparity.generate import random_game


def game_from(spec):
    """Build a game from ``[(owner, priority, [successors]), ...]``."""
    return ParityGame(
        tuple(Player(o) for o, _, _ in spec),
        tuple(p for _, p, _ in spec),
        tuple(tuple(s) for _, _, s in spec),
    )


def suite(count, n_max=8, d_max=4, seed=0):
    """Seeded random games with ``1..n_max`` vertices and priorities up to ``d_max``."""
    rng = random.Random(seed)
    for i in range(count):
        n = rng.randint(1, n_max)
        d = rng.randint(0, d_max)
        yield random_game(n, d, (1, 3), seed=seed * 100_003 + i)


@st.composite
def games(draw, max_n=7, max_d=4):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(0, max_d))
    owner = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    prio = draw(st.lists(st.integers(0, d), min_size=n, max_size=n))
    succ = [
        sorted(draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=min(n, 3))))
        for _ in range(n)
    ]
    return ParityGame(tuple(Player(o) for o in owner), tuple(prio), tuple(tuple(s) for s in succ))


@pytest.fixture
def rng():
    return random.Random(1234)


def same_game(a, b):
    """Structural equality; games themselves compare by identity."""
    return (a.owner, a.priority, a.successors, a.names) == (b.owner, b.priority, b.successors, b.names)
