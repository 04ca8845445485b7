"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line with the measured counts and the
elapsed time against its budget.  Run just this file with

    pytest tests/test_acceptance.py -v
"""
import random
import time

import pytest

from conftest import suite
from uniparity.attractor import attract
from uniparity.decomposition import (
    DecompositionTrees,
    decomposition_tree,
    dominion_from_decomposition,
    validate,
)
from uniparity.game import Player, Subgame, is_trap, members, restrict, verify_dominion_strategy
from uniparity.generate import random_game
from uniparity.solvers import (
    PruningRule,
    brute_force_oracle,
    family_trees,
    mcnaughton_zielonka,
    mcnaughton_zielonka_enhanced,
    normalize_degree,
    separation_probe,
    tree_heights,
    universal_solve,
)
from uniparity.symbolic import Layout, per_frame_budget, succinct_budget, sym_universal_solve
from uniparity.trees import (
    Complete,
    Parys,
    Succinct,
    embeds,
    enumerate_small_trees,
    height,
    interleave,
    is_small,
    leaves,
    random_tree,
)

EVEN, ODD = Player.EVEN, Player.ODD


@pytest.fixture
def verdict(capsys):
    start = time.perf_counter()

    def finish(number, title, failures, detail, limit):
        elapsed = time.perf_counter() - start
        ok = not failures and elapsed < limit
        line = (f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {detail}; "
                f"{elapsed:.1f}s of {limit}s")
        if failures:
            line += f"; first failure: {failures[0]}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return finish


def test_criterion_1_oracle_equivalence(verdict):
    failures = []
    games = list(suite(1000, n_max=8, d_max=4, seed=1001))
    runs = 0
    for i, g in enumerate(games):
        want = brute_force_oracle(g)
        view = Player(i % 2)
        got = [mcnaughton_zielonka(g, view), mcnaughton_zielonka_enhanced(g, view)]
        for kind in ("c", "p", "s"):
            te, to = family_trees(kind, g, view)
            for rule in (PruningRule.NONE, PruningRule.EMPTY_SET):
                got.append(universal_solve(g, view, te, to, rule))
        te, to = family_trees("s", g, view)
        for layout in Layout:
            got.append(sym_universal_solve(g, view, te, to, layout))
        for r in got:
            runs += 1
            if (r.w_even, r.w_odd) != (want.w_even, want.w_odd):
                failures.append(f"game {i}: {r.solver} disagrees with the oracle")
            if r.w_even & r.w_odd or r.w_even | r.w_odd != g.all_vertices:
                failures.append(f"game {i}: {r.solver} does not partition the vertices")
    verdict(1, "oracle equivalence", failures, f"{len(games)} games, {runs} solver runs", 60)


def test_criterion_2_decomposition_validity(verdict):
    failures = []
    checked = 0
    for i, g in enumerate(suite(1000, n_max=8, d_max=4, seed=1002)):
        n = g.vertex_count
        for view in Player:
            r = mcnaughton_zielonka_enhanced(g, view)
            for dec, won in ((r.even_decomposition, r.w_even), (r.odd_decomposition, r.w_odd)):
                checked += 1
                verdict_ = validate(restrict(g, won), dec)
                if not verdict_:
                    failures.append(f"game {i}: {verdict_}")
                    continue
                sigma = dominion_from_decomposition(g, won, dec)
                if not verify_dominion_strategy(g, won, sigma):
                    failures.append(f"game {i}: strategy for {dec.player} does not win")
                # d here is the degree the decomposition was built for
                if not is_small(decomposition_tree(dec), n, (dec.degree + 1) // 2):
                    failures.append(f"game {i}: tree too large")
    verdict(2, "decomposition validity", failures, f"{checked} decompositions", 30)


def test_criterion_3_universality(verdict):
    failures = []
    checked = 0
    for n in range(1, 6):
        for h in range(0, 4):
            small = list(enumerate_small_trees(n, h))
            for fam in (Complete(n, h), Parys(n, h), Succinct(n, h)):
                big = fam.materialize()
                checked += len(small)
                missing = sum(1 for t in small if not embeds(big, t))
                if missing:
                    failures.append(f"{fam.name}({n},{h}) misses {missing} trees")
    verdict(3, "universality", failures, f"{checked} embeddings", 30)


def test_criterion_4_recursion_tree_law(verdict):
    failures = []
    rng = random.Random(1004)
    pairs = 0
    for i in range(300):
        g = random_game(rng.randint(1, 7), rng.randint(0, 4), seed=i)
        te, to = random_tree(rng, 3), random_tree(rng, 3)
        for view, expect in ((EVEN, interleave(to, te)), (ODD, interleave(te, to))):
            pairs += 1
            r = universal_solve(g, view, te, to, PruningRule.NONE)
            if r.stats.recursion_tree != expect:
                failures.append(f"case {i}: recursion tree differs from the interleaving")
            if height(expect) > height(te) + height(to) or leaves(expect) > leaves(te) * leaves(to):
                failures.append(f"case {i}: interleaving bounds fail")
    verdict(4, "recursion-tree law", failures, f"{pairs} (tree pair, game) runs", 30)


def test_criterion_5_mz_coincidence(verdict):
    failures = []
    runs = 0
    for i, g in enumerate(suite(500, n_max=8, d_max=4, seed=1005)):
        n = g.vertex_count + 1
        for view in Player:
            runs += 1
            he, ho = tree_heights(normalize_degree(g, view))
            mz = mcnaughton_zielonka(g, view, trace=True)
            u = universal_solve(g, view, Complete(n, he), Complete(n, ho),
                                PruningRule.EMPTY_SET, trace=True)
            if u.stats.trace != mz.stats.trace:
                failures.append(f"game {i} ({view}): traces differ")
    verdict(5, "MZ coincidence", failures, f"{runs} traced runs", 30)


def test_criterion_6_decomposition_trees_suffice(verdict):
    failures = []
    runs = 0
    for i, g in enumerate(suite(500, n_max=8, d_max=4, seed=1006)):
        want = brute_force_oracle(g)
        for view in Player:
            runs += 1
            r = mcnaughton_zielonka_enhanced(g, view)
            te = decomposition_tree(r.even_decomposition)
            to = decomposition_tree(r.odd_decomposition)
            u = universal_solve(g, view, te, to)
            if (u.w_even, u.w_odd) != (want.w_even, want.w_odd):
                failures.append(f"game {i} ({view}): wrong winning sets")
    verdict(6, "decomposition trees suffice", failures, f"{runs} runs", 30)


def _embedded_dominions(memo, g, player, degree, tree):
    out = []
    for m in range(1, 1 << g.vertex_count):
        if not is_trap(g, m, player.opponent):
            continue
        if any(embeds(tree, t) for t in memo.trees(m, player, degree)):
            out.append(m)
    return out


def _embeddable_pairs(g, memo, rng, failures, tag):
    pairs = 0
    for view in Player:
        r = mcnaughton_zielonka_enhanced(g, view)
        for dec in (r.even_decomposition, r.odd_decomposition):
            won = dec.vertices()
            if not won:
                continue
            big = decomposition_tree(dec)
            sub = Subgame(g, won)
            for _ in range(3):
                target = won & rng.getrandbits(g.vertex_count)
                trap = won & ~attract(sub, target, dec.player).attractor
                if not trap:
                    continue
                pairs += 1
                if not any(embeds(big, t) for t in memo.trees(trap, dec.player, dec.degree)):
                    failures.append(f"{tag}: no embeddable decomposition of trap {bin(trap)}")
    return pairs


def _separation(g, memo, rng, failures, tag):
    """Number of (dominion, G_{i+1}) containment or disjointness checks made."""
    checks = 0
    for view in Player:
        d = normalize_degree(g, view)
        h_even, h_odd = tree_heights(d)
        te = random_tree(rng, h_even) if rng.random() < 0.7 else family_trees("s", g, view)[0]
        to = random_tree(rng, h_odd) if rng.random() < 0.7 else family_trees("s", g, view)[1]
        te = te if isinstance(te, tuple) else te.materialize()
        to = to if isinstance(to, tuple) else to.materialize()
        # the caller's tree bounds its own dominia, the other tree's prefixes the opponent's
        own_tree, other_tree = (te, to) if view is EVEN else (to, te)
        other_degree = d + 1
        own = _embedded_dominions(memo, g, view, d, own_tree)
        for i, g_next in separation_probe(g, te, to, view):
            for m in own:
                checks += 1
                if m & ~g_next:
                    failures.append(f"{tag} ({view}): own dominion {bin(m)} leaves G_{i + 1}")
            prefix = tuple(other_tree[:i])
            for m in _embedded_dominions(memo, g, view.opponent, other_degree, prefix):
                checks += 1
                if m & g_next:
                    failures.append(f"{tag} ({view}): opponent dominion {bin(m)} meets G_{i + 1}")
    return checks


def test_criterion_7_embedding_and_separation(verdict):
    failures = []
    rng = random.Random(1007)
    pairs = 0
    separated = 0
    checks = 0
    for i, g in enumerate(suite(250, n_max=6, d_max=3, seed=1007)):
        memo = DecompositionTrees(g)
        pairs += _embeddable_pairs(g, memo, rng, failures, f"game {i}")
        checks += _separation(g, memo, rng, failures, f"game {i}")
        separated += 1
    if pairs < 200:
        failures.append(f"only {pairs} (game, trap) pairs sampled")
    verdict(7, "embeddable decomposition and dominion separation", failures,
            f"{pairs} (game, trap) pairs, {separated} games probed with {checks} dominion checks",
            300)


def test_criterion_8_symbolic_budgets(verdict):
    failures = []
    rng = random.Random(1008)
    updates = 0
    peaks = {lay: {} for lay in Layout}
    for d in (4, 8, 16):
        # without pruning the recursion tree for d = 16 is far too large to run
        rule = PruningRule.NONE if d <= 4 else PruningRule.EMPTY_SET
        for i in range(120):
            g = random_game(rng.randint(1, 8), d, seed=d * 1000 + i)
            te, to = family_trees("s", g)
            want = mcnaughton_zielonka(g)
            for layout in Layout:
                r = sym_universal_solve(g, EVEN, te, to, layout, rule,
                                        shadow=layout is Layout.SUCCINCT)
                deg = r.symbolic["degree"]
                peak = r.symbolic["peak_live_variables"]
                updates += r.symbolic["shadow_checks"]
                peaks[layout][deg] = max(peaks[layout].get(deg, 0), peak)
                budget = per_frame_budget(deg) if layout is Layout.PER_FRAME else succinct_budget(deg)
                if peak > budget:
                    failures.append(f"{layout.value} d={deg}: peak {peak} above {budget}")
                if (r.w_even, r.w_odd) != (want.w_even, want.w_odd):
                    failures.append(f"{layout.value} d={deg}: wrong winning sets")
    if updates < 10**4:
        failures.append(f"only {updates} checked stack updates")
    shown = ", ".join(f"{lay.value} {dict(sorted(p.items()))}" for lay, p in peaks.items())
    verdict(8, "symbolic budgets", failures, f"peaks {shown}; {updates} checked stack updates", 60)


def test_criterion_9_trap_and_attractor_properties(verdict):
    failures = []
    rng = random.Random(1009)

    def trap(sub, player):
        target = 0
        for v in members(sub.vertices):
            if rng.random() < 0.3:
                target |= 1 << v
        return sub.vertices & ~attract(sub, target, player).attractor

    trials = 0
    i = 0
    while trials < 10**4:
        g = random_game(rng.randint(1, 8), rng.randint(0, 4), seed=9000 + i)
        i += 1
        whole = g.whole()
        for _ in range(5):
            trials += 1
            # a trap for Odd disjoint from B avoids the Odd attractor of B
            t = trap(whole, ODD)
            b = g.all_vertices & ~t & rng.getrandbits(g.vertex_count)
            if t & attract(g, b, ODD).attractor:
                failures.append(f"game {i}: trap for Odd meets the Odd attractor")
            # a trap for Odd stays a trap for Odd inside a trap for Even
            r = trap(whole, EVEN)
            if r and not is_trap(Subgame(g, r), t & r, ODD):
                failures.append(f"game {i}: intersection is not a trap")
            # removing an attractor from a trap for Even leaves a trap for Even
            te = trap(whole, EVEN)
            b = rng.getrandbits(g.vertex_count)
            a = attract(g, b, EVEN).attractor
            if te and g.all_vertices & ~a:
                a2 = attract(Subgame(g, te), b & te, EVEN).attractor
                if not is_trap(Subgame(g, g.all_vertices & ~a), te & ~a2, EVEN):
                    failures.append(f"game {i}: difference is not a trap")
    verdict(9, "trap and attractor properties", failures, f"{trials} trials, {3 * trials} checks", 60)
