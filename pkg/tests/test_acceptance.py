"""Exit criteria, one test per criterion.

Each test records a one-line verdict that the terminal summary prints under
"acceptance criteria".
"""
from __future__ import annotations

import functools
import math
import random
import time
from fractions import Fraction

import pytest
from conftest import random_decomposition, random_graph, random_space

from gpgames.certify import (
    Family,
    certify_exhaustive,
    certify_sampled,
    sampled_tables,
)
from gpgames.decomposition import (
    NeighborOffsets,
    decompose,
    extract_offsets,
    local_size,
    reconstruct,
    synthesize_game,
    synthesize_with_offsets,
)
from gpgames.dynamics import (
    ExplicitMoves,
    RandomBetterResponse,
    corollary_bound,
    enumerate_all_paths,
    externality_decomposition,
    majority_decomposition,
    max_update_counts,
    potential_range_bound,
    run,
    update_bound,
    update_bound_envelope,
    wave_schedule,
)
from gpgames.game import Potential, exact_potential, normalize
from gpgames.graph import (
    amalgamate,
    binary_tree,
    clique_degree,
    color_edges,
    cycle,
    grid,
    growth_bounded_by,
    line,
    star,
)
from gpgames.mrf import (
    Distribution,
    amalgamate_field,
    gibbs,
    global_markov,
    is_positive,
    pairwise_markov,
    psi,
    psi_inverse,
)
from gpgames.rng import SplitMix64

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(record_property):
    def record(num, detail):
        record_property("criterion", num)
        record_property("detail", detail)

    return record


# -- shared certification runs (criteria 4, 5, 10) ------------------------------

SMALL = {"path2": line(2), "path3": line(3), "triangle": cycle(3)}
FOUR = {"path4": line(4), "cycle4": cycle(4), "star4": star(4)}
SAMPLES = 10**6


@functools.cache
def certification():
    reports = []
    for name, g in SMALL.items():
        reports.append(("exhaustive {-2..2}", certify_exhaustive(Family.build(name, g))))
    for name, g in FOUR.items():
        reports.append((f"{SAMPLES} sampled {{-2..2}}", certify_sampled(Family.build(name, g), SAMPLES, seed=2024)))
    for name in ("path4", "star4"):
        fam = Family.build(name, FOUR[name])
        reports.append(("exhaustive {-1..1}", certify_exhaustive(fam, values=range(-1, 2))))
    return reports


@functools.cache
def enumeration_crosscheck(per_family: int = 60):
    """Brute-force path enumeration against the recursion used by the batch runs."""
    mismatches, bound_violations, length_violations, paths = 0, 0, 0, 0
    for name, g in {**SMALL, **FOUR}.items():
        fam = Family.build(name, g)
        tables = sampled_tables(fam, range(-2, 3), per_family, seed=len(name))
        D = clique_degree(g)
        for row in tables:
            d = fam.decomposition(row)
            M = max(d.bound, 1)
            caps = [update_bound(g, k, D, M).bound_value for k in range(g.n)]
            game = synthesize_game(d)
            dp = max_update_counts(game)
            for init in game.space.profiles():
                best = [0] * g.n
                longest = 0
                for p in enumerate_all_paths(game, init, cap=10**6):
                    paths += 1
                    best = [max(b, c) for b, c in zip(best, p.per_player_updates)]
                    longest = max(longest, p.length)
                r = game.space.rank(init)
                mismatches += best != list(dp.per_start[r]) or longest != dp.longest[r]
                bound_violations += sum(b > c for b, c in zip(best, caps))
                length_violations += longest > 2 * potential_range_bound(g.n, D, M) - 2
    return mismatches, bound_violations, length_violations, paths


# -- criteria ------------------------------------------------------------------


def test_criterion_01_grid_envelope_bound(verdict):
    start = time.perf_counter()
    rep = update_bound_envelope("4*r", 4, 1)
    elapsed = time.perf_counter() - start
    verdict(1, f"bound={rep.bound_value} in {elapsed:.3f}s")
    assert rep.bound_value == 1792 and isinstance(rep.bound_value, (int, Fraction))
    assert elapsed < 1.0


def test_criterion_02_grid_simulation(verdict):
    start = time.perf_counter()
    worst, runs, over_1792, over_finite = 0, 0, 0, 0
    for n in (5, 10, 20):
        g = grid(n)
        caps = [update_bound(g, k, 4, 1).bound_value for k in range(g.n)]
        for seed in range(100):
            d = externality_decomposition(color_edges(g, seed))
            gen = SplitMix64(10_000 * n + seed)
            init = tuple(gen.below(2) for _ in range(g.n))
            path = run(d, init, RandomBetterResponse(seed))
            assert path.stop == "equilibrium"
            runs += 1
            worst = max(worst, max(path.per_player_updates))
            over_1792 += sum(c > 1792 for c in path.per_player_updates)
            over_finite += sum(c > b for c, b in zip(path.per_player_updates, caps))
    elapsed = time.perf_counter() - start
    verdict(2, f"{runs} runs, max per-player updates {worst}, violations {over_1792}+{over_finite}, {elapsed:.1f}s")
    assert over_1792 == 0 and over_finite == 0
    assert elapsed < 120


def test_criterion_03_binary_tree_divergence(verdict):
    start = time.perf_counter()
    counts = []
    for k in range(1, 11):
        init, moves = wave_schedule(k)
        path = run(majority_decomposition(binary_tree(k)), init, ExplicitMoves(moves))
        assert path.length == len(moves)
        counts.append(path.per_player_updates[0])
    elapsed = time.perf_counter() - start
    verdict(3, f"root updates {counts} in {elapsed:.1f}s")
    assert counts == list(range(1, 11))
    assert binary_tree(10).n == 2047 and math.log2((2047 + 1) / 2) == 10
    assert elapsed < 30


def test_criterion_04_update_bound_oracle(verdict):
    reports = certification()
    mismatches, bound_violations, _length_violations, paths = enumeration_crosscheck()
    games = sum(r.games for _, r in reports)
    violations = sum(r.bound_violations for _, r in reports) + bound_violations
    tight = max(r.tightest_ratio for _, r in reports)
    verdict(4, f"{games} games, {paths} enumerated paths, violations {violations}, "
               f"recursion/enumeration mismatches {mismatches}, tightest ratio {float(tight):.3f}")
    assert violations == 0 and mismatches == 0
    assert all(r.first_violation is None for _, r in reports)


def test_criterion_05_theta_monotone(verdict):
    reports = certification()
    mono = sum(r.theta_monotone_violations for _, r in reports)
    incr = sum(r.theta_increment_violations for _, r in reports)
    verdict(5, f"{sum(r.games for _, r in reports)} games scanned, monotonicity {mono}, increment {incr}")
    assert mono == 0 and incr == 0


def test_criterion_06_bijection(verdict):
    rng = random.Random(6)
    worst = 0.0
    for _ in range(200):
        n = rng.randint(1, 5)
        g = random_graph(rng, n)
        space = random_space(rng, n, max_m=3 if n <= 4 else 2)
        game = synthesize_game(random_decomposition(rng, g, space))
        phi = normalize(exact_potential(game))
        dist = psi(phi)
        assert pairwise_markov(dist, g) and global_markov(dist, g)
        back = psi_inverse(dist)
        worst = max(worst, max(abs(float(a) - b) for a, b in zip(phi.values, back.values)))
        again = psi(back)
        worst = max(worst, max(abs(a - b) for a, b in zip(dist.p, again.p)))
    fixtures = 0
    for _ in range(200):
        n = rng.randint(1, 5)
        g = random_graph(rng, n)
        space = random_space(rng, n, max_m=2)
        weights = {c: [rng.randint(1, 5) for _ in range(local_size(space, c))] for c in g.maximal_cliques}
        exact = gibbs(space, g, weights)
        assert is_positive(exact) and global_markov(exact, g)
        d = decompose(psi_inverse(Distribution(space, [float(v) for v in exact.p])), g, tol=1e-9)
        assert d.graph == g
        fixtures += 1
    verdict(6, f"200 games, {fixtures} Gibbs fixtures decomposed, worst round-trip error {worst:.2e}")
    assert worst <= 1e-12


def test_criterion_07_pairwise_implies_global(verdict):
    rng = random.Random(7)
    merged_ok = 0
    for _ in range(200):
        n = rng.randint(2, 5)
        g = random_graph(rng, n)
        space = random_space(rng, n, max_m=2 if n == 5 else 3)
        weights = {c: [rng.randint(1, 4) for _ in range(local_size(space, c))] for c in g.maximal_cliques}
        dist = gibbs(space, g, weights)
        assert is_positive(dist) and pairwise_markov(dist, g)
        assert global_markov(dist, g)
        i, j = rng.sample(range(n), 2)
        h, _ = amalgamate(g, i, j)
        merged = amalgamate_field(dist, i, j)
        assert is_positive(merged) and pairwise_markov(merged, h)
        merged_ok += 1
    verdict(7, f"200 Gibbs distributions global-Markov, {merged_ok} amalgamations positive and pairwise-Markov")


def test_criterion_08_round_trips(verdict):
    rng = random.Random(8)
    for _ in range(500):
        n = rng.randint(1, 5)
        g = random_graph(rng, n)
        space = random_space(rng, n, max_m=2 if n == 5 else 3)
        d = random_decomposition(rng, g, space)
        nbrs = tuple(tuple(sorted(g.neighbors(i))) for i in range(n))
        f = NeighborOffsets(nbrs, tuple(
            [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(local_size(space, nb))] for nb in nbrs
        ))
        game = synthesize_with_offsets(d, f)
        shift = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        phi = Potential(space, [v + shift for v in exact_potential(game).values])
        at_o = phi.values[space.rank(space.o)]
        assert reconstruct(decompose(phi, g)).values == [v - at_o for v in phi.values]
        assert extract_offsets(game, d) == f
    verdict(8, "500 instances, exact equality for both round trips")


def test_criterion_09_corollary(verdict):
    values = (corollary_bound(1, 3, 1), corollary_bound(2, 4, 1))
    cyc = all(growth_bounded_by(h, lambda r: 2) for h in (cycle(5), cycle(12), line(2), line(15)))
    envelopes = {"2": lambda r: 2, "r+1": lambda r: r + 1, "2r+1": lambda r: 2 * r + 1, "r^2+1": lambda r: r * r + 1}
    rejected = [name for name, f in envelopes.items() if not growth_bounded_by(binary_tree(4), f)]
    verdict(9, f"corollary values {tuple(str(v) for v in values)}, cycle/line growth 2: {cyc}, BT_4 rejected under {rejected}")
    assert values == (72, 256)
    assert cyc and len(rejected) == len(envelopes)


def test_criterion_10_potential_range(verdict):
    reports = certification()
    range_v = sum(r.range_violations for _, r in reports)
    length_v = sum(r.length_violations for _, r in reports)
    _, _, enum_length_v, _ = enumeration_crosscheck()
    # grid instances from the simulation criterion, exact |P| < nDM and path lengths
    grid_v = 0
    for n in (3, 4):
        g = grid(n)
        for seed in range(5):
            d = externality_decomposition(color_edges(g, seed))
            top = max(abs(v) for v in reconstruct(d).values)
            grid_v += top >= potential_range_bound(g.n, 4, 1)
            path = run(d, (0,) * g.n, RandomBetterResponse(seed))
            grid_v += path.length > 2 * potential_range_bound(g.n, 4, 1) - 2
    longest = max(r.max_length for _, r in reports)
    verdict(10, f"range violations {range_v + grid_v}, length violations {length_v + enum_length_v}, "
                f"longest path {longest}")
    assert range_v == 0 and length_v == 0 and enum_length_v == 0 and grid_v == 0
