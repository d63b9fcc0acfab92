"""Better-response dynamics and the per-player update bounds.

Games are "game-like": a dense :class:`~gpgames.game.Game` or a
:class:`~gpgames.decomposition.LocalDecomposition` (utilities are the sums of
the tables of a player's cliques). Both expose ``space`` and
``utility(i, a)``; the decomposition form never materializes the profile table
and is what large graphs use.
"""
from __future__ import annotations

import hashlib
import math
import re
from collections import deque
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import kernels
from . import rng as rng_mod
from ._check import CapExceeded, Check, RejectedMove
from .decomposition import LocalDecomposition, from_subclique_tables, synthesize_game
from .game import Game, Potential, StrategySpace, enumeration_cap
from .graph import (
    BLUE,
    Graph,
    bfs_distances,
    clique_degree,
    clique_distance,
    sphere_sizes,
    tree_level,
)

STOP_EQUILIBRIUM = "equilibrium"
STOP_MAX_STEPS = "max_steps"
STOP_EXHAUSTED = "exhausted"

PATH_ENUMERATION_MAX_PROFILES = 2**16


@dataclass(frozen=True)
class Step:
    t: int
    player: int
    old: int
    new: int
    gain: object


@dataclass
class PathRecord:
    initial: tuple
    steps: list
    final: tuple
    stop: str
    seed: int | None = None
    rng: str | None = None
    times: list | None = None
    per_player_updates: list = field(default_factory=list)

    def __post_init__(self):
        if not self.per_player_updates:
            counts = [0] * len(self.initial)
            for s in self.steps:
                counts[s.player] += 1
            self.per_player_updates = counts

    @property
    def length(self) -> int:
        return len(self.steps)

    def profiles(self) -> Iterator[tuple]:
        a = list(self.initial)
        yield tuple(a)
        for s in self.steps:
            a[s.player] = s.new
            yield tuple(a)


def _neighborhood(g, i: int):
    if isinstance(g, LocalDecomposition):
        return g.graph.neighbors(i)
    return range(g.space.n)


def _deviation_utils(g, a: list, i: int) -> list:
    keep = a[i]
    out = []
    for b in range(g.space.m[i]):
        a[i] = b
        out.append(g.utility(i, a))
    a[i] = keep
    return out


def step(g, a: Sequence[int], i: int, b: int) -> tuple:
    """Apply a strict better response; raises :class:`RejectedMove` otherwise."""
    if not 0 <= b < g.space.m[i]:
        raise ValueError(f"strategy {b} out of range for player {i}")
    a = list(a)
    gain = g.utility(i, a[:i] + [b] + a[i + 1:]) - g.utility(i, a)
    if gain <= 0:
        raise RejectedMove(i, b, gain)
    a[i] = b
    return tuple(a)


# -- schedulers --------------------------------------------------------------


class RoundRobinBestResponse:
    """Players in cyclic index order; a mover takes its lowest-index best response."""

    kind = "roundrobin"
    seed = None


class RandomBetterResponse:
    """Uniform unhappy player, then a uniform strictly improving strategy.

    Drawing among unhappy players only is the jump chain of drawing any player
    uniformly and discarding the draws that cannot improve.
    """

    kind = "random"

    def __init__(self, seed: int):
        self.seed = seed


class PoissonClock:
    """Independent rate-1 clocks; a ringing player best-responds if it can improve."""

    kind = "poisson"

    def __init__(self, seed: int):
        self.seed = seed


class ExplicitMoves:
    kind = "explicit"
    seed = None

    def __init__(self, moves: Sequence[tuple[int, int]]):
        self.moves = list(moves)


class _State:
    def __init__(self, g, a):
        self.g = g
        self.a = list(a)
        self.unhappy = {i for i in range(g.space.n) if self.better(i)}

    def better(self, i: int) -> list[int]:
        u = _deviation_utils(self.g, self.a, i)
        cur = u[self.a[i]]
        return [b for b, v in enumerate(u) if v > cur]

    def best(self, i: int) -> int:
        u = _deviation_utils(self.g, self.a, i)
        return u.index(max(u))

    def apply(self, i: int, b: int) -> object:
        u = _deviation_utils(self.g, self.a, i)
        gain = u[b] - u[self.a[i]]
        if gain <= 0:
            raise RejectedMove(i, b, gain)
        self.a[i] = b
        for v in [i, *_neighborhood(self.g, i)]:
            if self.better(v):
                self.unhappy.add(v)
            else:
                self.unhappy.discard(v)
        return gain


def _pairwise_arrays(d: LocalDecomposition):
    """CSR arrays for the compiled simulator, or None if some clique has 3+ players."""
    n = d.n
    m = d.space.m
    adj: list[list] = [[] for _ in range(n)]
    unary_off = [-1] * n
    unary: list[int] = []
    tables: list[int] = []
    for c, t in zip(d.cliques, d.tables):
        if len(c) == 1:
            unary_off[c[0]] = len(unary)
            unary.extend(int(v) for v in t)
        elif len(c) == 2:
            u, v = c
            fwd = [int(t[x + y * m[u]]) for x in range(m[u]) for y in range(m[v])]
            bwd = [int(t[x + y * m[u]]) for y in range(m[v]) for x in range(m[u])]
            adj[u].append((v, len(tables)))
            tables.extend(fwd)
            adj[v].append((u, len(tables)))
            tables.extend(bwd)
        else:
            return None
    indptr = [0]
    nbr, toff = [], []
    for i in range(n):
        for j, off in adj[i]:
            nbr.append(j)
            toff.append(off)
        indptr.append(len(nbr))
    arr = lambda x: np.array(x, dtype=np.int64)
    return arr(indptr), arr(nbr), arr(toff), arr(tables), arr(unary_off), arr(unary), arr(m)


def _kernel_eligible(g) -> bool:
    return isinstance(g, LocalDecomposition) and g.integral and all(len(c) <= 2 for c in g.cliques)


def run(g, init: Sequence[int], scheduler, max_steps: int = 10**7, use_kernel: bool = True) -> PathRecord:
    """Follow ``scheduler`` from ``init`` until equilibrium, exhaustion or ``max_steps``.

    Random better-response runs on decompositions whose cliques are edges or
    singletons with integer tables go through the kernel backend; the Python
    engine produces the identical path.
    """
    g.space.check_profile(init)
    init = tuple(init)
    if isinstance(scheduler, RandomBetterResponse) and use_kernel and _kernel_eligible(g):
        arrays = _pairwise_arrays(g)
        if arrays is not None:
            return _run_kernel(g, init, scheduler, max_steps, arrays)
    state = _State(g, init)
    steps: list[Step] = []
    times = None
    stop = STOP_MAX_STEPS
    n = g.space.n

    def record(i, b):
        old = state.a[i]
        gain = state.apply(i, b)
        steps.append(Step(len(steps), i, old, b, gain))

    if isinstance(scheduler, RandomBetterResponse):
        gen = rng_mod.SplitMix64(scheduler.seed)
        while len(steps) < max_steps:
            if not state.unhappy:
                break
            movers = sorted(state.unhappy)
            i = movers[gen.below(len(movers))]
            better = state.better(i)
            record(i, better[gen.below(len(better))])
    elif isinstance(scheduler, RoundRobinBestResponse):
        nxt = 0
        while len(steps) < max_steps and state.unhappy:
            i = min(state.unhappy, key=lambda v: (v - nxt) % n)
            record(i, state.best(i))
            nxt = (i + 1) % n
    elif isinstance(scheduler, PoissonClock):
        gen = rng_mod.SplitMix64(scheduler.seed)
        clock = 0.0
        times = []
        while len(steps) < max_steps and state.unhappy:
            clock += gen.exponential(n)
            i = gen.below(n)
            if i in state.unhappy:
                record(i, state.best(i))
                times.append(clock)
    elif isinstance(scheduler, ExplicitMoves):
        for i, b in scheduler.moves:
            if len(steps) >= max_steps:
                break
            record(i, b)
        else:
            stop = STOP_EXHAUSTED
    else:
        raise TypeError(f"unknown scheduler {scheduler!r}")
    if not state.unhappy:
        stop = STOP_EQUILIBRIUM
    return PathRecord(
        init, steps, tuple(state.a), stop, scheduler.seed,
        rng_mod.ALGORITHM if scheduler.seed is not None else None, times,
    )


def _run_kernel(g, init, scheduler, max_steps, arrays) -> PathRecord:
    indptr, nbr, toff, tables, unary_off, unary, m = arrays
    players, olds, news, gains, final, code = kernels.simulate_pairwise(
        indptr, nbr, toff, tables, unary_off, unary, m,
        np.array(init, dtype=np.int64), scheduler.seed & ((1 << 64) - 1), max_steps,
    )
    steps = [
        Step(t, int(i), int(o), int(b), int(gn))
        for t, (i, o, b, gn) in enumerate(zip(players.tolist(), olds.tolist(), news.tolist(), gains.tolist()))
    ]
    stop = STOP_EQUILIBRIUM if code == kernels.STOP_EQUILIBRIUM else STOP_MAX_STEPS
    return PathRecord(init, steps, tuple(int(x) for x in final), stop, scheduler.seed, rng_mod.ALGORITHM)


def is_equilibrium(g, a: Sequence[int]) -> bool:
    a = list(a)
    for i in range(g.space.n):
        u = _deviation_utils(g, a, i)
        if max(u) > u[a[i]]:
            return False
    return True


# -- the discounted potential and bounds ------------------------------------


def lambda_(D: int, M) -> Fraction:
    """Discount ``1 - 1/(2 D M)``."""
    if D < 1:
        raise ValueError("clique-degree must be at least 1")
    if M <= 0:
        raise ValueError("local bound must be positive")
    return 1 - Fraction(1) / (2 * D * Fraction(M))


def _bound_params(d: LocalDecomposition, D=None, M=None):
    D = clique_degree(d.graph) if D is None else D
    M = Fraction(d.bound) if M is None else Fraction(M)
    return D, M


def ordinal_theta(d: LocalDecomposition, k: int, D: int | None = None, M=None) -> Potential:
    """Tables discounted by ``lambda**dist(k, C)``; unreachable cliques drop out."""
    D, M = _bound_params(d, D, M)
    lam = lambda_(D, M)
    dist = bfs_distances(d.graph, k)
    weights = []
    for c in d.cliques:
        r = clique_distance(d.graph, k, c, dist)
        weights.append(Fraction(0) if r is None else lam**r)
    values = []
    for a in d.space.profiles():
        values.append(sum(w * d.clique_value(c, a) for c, w in enumerate(weights)))
    return Potential(d.space, values)


def theta_envelope(d: LocalDecomposition, k: int, D: int | None = None, M=None) -> Fraction:
    """``D M sum_r lambda**r S_r``, which dominates ``|theta|`` everywhere."""
    D, M = _bound_params(d, D, M)
    lam = lambda_(D, M)
    sizes = sphere_sizes(d.graph, k).sizes
    return D * M * sum(lam**r * s for r, s in enumerate(sizes))


@dataclass(frozen=True)
class BoundReport:
    player: int | None
    D: int
    M: Fraction
    lam: Fraction
    mode: str
    bound_value: Fraction
    sphere: tuple | None = None
    envelope: str | None = None
    corollary_inputs: tuple | None = None


def update_bound(graph: Graph, k: int, D: int | None = None, M=None,
                 decomposition: LocalDecomposition | None = None) -> BoundReport:
    """``2 D M sum_r lambda**r S_r(G, k)`` over the graph's actual spheres.

    ``D`` defaults to the clique-degree and ``M`` to the decomposition's bound;
    understated values are rejected.
    """
    actual_D = clique_degree(graph)
    D = actual_D if D is None else D
    if D < actual_D:
        raise ValueError(f"D={D} is below the clique-degree {actual_D}")
    if decomposition is not None:
        if decomposition.graph != graph:
            raise ValueError("decomposition lives on a different graph")
        if M is None:
            M = decomposition.bound
        elif Fraction(M) < Fraction(decomposition.bound):
            raise ValueError(f"M={M} is below the decomposition's bound {decomposition.bound}")
    if M is None:
        raise ValueError("M is required without a decomposition")
    M = Fraction(M)
    lam = lambda_(D, M)
    sizes = sphere_sizes(graph, k).sizes
    value = 2 * D * M * sum(lam**r * s for r, s in enumerate(sizes) if s)
    return BoundReport(k, D, M, lam, "finite", value, sphere=sizes)


_TERM = re.compile(r"^\s*(.*?)\s*$")


@dataclass(frozen=True)
class Envelope:
    """Sphere-size envelope ``sum_t c_t * r**p_t * q_t**r`` parsed from text.

    Terms are joined by ``+``; factors by ``*``. A factor is a number (``4``,
    ``3/2``), ``r``, ``r^p``, or ``q^r`` with ``q`` a number, optionally in
    parentheses. Example: ``"4*r"``, ``"2"``, ``"1*(9/8)^r"``.
    """

    terms: tuple  # (coef, power, base)
    text: str = ""

    @classmethod
    def parse(cls, text: str) -> Envelope:
        terms = []
        for raw in text.split("+"):
            coef, power, base = Fraction(1), 0, Fraction(1)
            factors = [f.strip() for f in raw.split("*")]
            if not raw.strip() or any(not f for f in factors):
                raise ValueError(f"malformed envelope {text!r}")
            for f in factors:
                if f == "r":
                    power += 1
                elif f.startswith("r^"):
                    power += int(f[2:])
                elif f.endswith("^r"):
                    base *= Fraction(f[:-2].strip().strip("()"))
                else:
                    coef *= Fraction(f.strip("()"))
            terms.append((coef, power, base))
        return cls(tuple(terms), text)

    @classmethod
    def geometric(cls, c, q) -> Envelope:
        return cls(((Fraction(c), 0, Fraction(q)),), f"{c}*({q})^r")

    def __call__(self, r: int) -> Fraction:
        return sum(c * Fraction(r) ** p * b**r for c, p, b in self.terms)

    def discounted_sum(self, lam: Fraction) -> Fraction:
        """Exact ``sum_{r>=0} lam**r * f(r)``; raises ValueError if it diverges."""
        total = Fraction(0)
        for c, p, b in self.terms:
            x = lam * b
            if x >= 1:
                raise ValueError(f"envelope term diverges under discount {lam}")
            total += c * polylog_neg(p, x)
        return total


def eulerian(p: int, k: int) -> int:
    return sum((-1) ** j * math.comb(p + 1, j) * (k + 1 - j) ** p for j in range(k + 1))


def polylog_neg(p: int, x: Fraction) -> Fraction:
    """``sum_{r>=0} r**p x**r`` for ``|x| < 1`` in closed form (Eulerian numbers)."""
    x = Fraction(x)
    if p == 0:
        return 1 / (1 - x)
    num = sum(eulerian(p, k) * x**k for k in range(p))
    return x * num / (1 - x) ** (p + 1)


def update_bound_envelope(envelope, D: int, M) -> BoundReport:
    """Update bound with the spheres replaced by an analytic envelope.

    The sum starts at ``r = 0`` with whatever the envelope gives there; ``"4*r"``
    gives 0 at the center, so the vertex itself is not counted.
    """
    env = Envelope.parse(envelope) if isinstance(envelope, str) else envelope
    M = Fraction(M)
    lam = lambda_(D, M)
    value = 2 * D * M * env.discounted_sum(lam)
    return BoundReport(None, D, M, lam, "envelope", value, envelope=env.text)


def corollary_bound(c, D: int, M) -> Fraction:
    c, M = Fraction(c), Fraction(M)
    if c <= 0 or D < 1 or M <= 0:
        raise ValueError("corollary inputs must be positive")
    return 8 * c * D * D * M * M


def growth_envelope(c, D: int, M) -> Envelope:
    """The admissible growth ``c (1 + 1/(4 D M))**r``."""
    return Envelope.geometric(Fraction(c), 1 + Fraction(1) / (4 * D * Fraction(M)))


def potential_range_bound(n: int, D: int, M) -> Fraction:
    return n * D * Fraction(M)


def check_potential_range(d: LocalDecomposition) -> Check:
    """``max |P| < n D M`` for the reconstructed potential. Witness: worst profile."""
    bound = potential_range_bound(d.n, clique_degree(d.graph), d.bound)
    worst, arg = -1, None
    for a in d.space.profiles():
        v = abs(d.value(a))
        if v > worst:
            worst, arg = v, a
    return Check(worst < bound, None if worst < bound else (arg, worst, bound), value=worst)


# -- example games -----------------------------------------------------------


def externality_decomposition(graph: Graph) -> LocalDecomposition:
    """Blue edges pay 1 on a match, red edges pay -1 on a match; two strategies."""
    missing = [e for e in graph.edges if e not in graph.colors]
    if missing:
        raise ValueError(f"uncolored edges: {sorted(missing)[:5]}")
    space = StrategySpace((2,) * graph.n)
    terms = {
        e: ([1, 0, 0, 1] if graph.colors[e] == BLUE else [-1, 0, 0, -1]) for e in graph.sorted_edges()
    }
    return from_subclique_tables(graph, space, terms)


def externality_game(graph: Graph) -> tuple[Game, LocalDecomposition]:
    """Utilities count matching blue neighbors minus matching red neighbors.

    On graphs with triangles this differs from the synthesized game of the
    decomposition by terms the player cannot affect, so both share the
    decomposition's potential.
    """
    d = externality_decomposition(graph)
    signs = [
        [(j, 1 if graph.colors[(min(i, j), max(i, j))] == BLUE else -1) for j in sorted(graph.neighbors(i))]
        for i in range(graph.n)
    ]
    game = Game.from_function(d.space, lambda i, a: sum(s for j, s in signs[i] if a[i] == a[j]))
    return game, d


def majority_decomposition(graph: Graph) -> LocalDecomposition:
    return externality_decomposition(Graph.from_edges(graph.n, graph.edges, {e: BLUE for e in graph.edges}))


def majority_game(graph: Graph) -> tuple[Game, LocalDecomposition]:
    """Each player earns one unit per neighbor playing the same strategy."""
    return externality_game(Graph.from_edges(graph.n, graph.edges, {e: BLUE for e in graph.edges}))


def wave_schedule(k: int) -> tuple[tuple, list[tuple[int, int]]]:
    """Initial profile and move list on the depth-``k`` binary tree.

    Levels start alternating (strategy 1 on even levels); wave ``l`` flips
    levels ``l-1, l-2, ..., 0`` in turn, each level in index order.
    """
    if k < 1:
        raise ValueError("depth must be at least 1")
    n = 2 ** (k + 1) - 1
    a = [1 - tree_level(v) % 2 for v in range(n)]
    init = tuple(a)
    moves = []
    for wave in range(1, k + 1):
        for j in range(1, wave + 1):
            level = wave - j
            for v in range(2**level - 1, 2 ** (level + 1) - 1):
                a[v] = 1 - a[v]
                moves.append((v, a[v]))
    return init, moves


# -- generalized games on infinite graphs ------------------------------------


class GeneralizedGameView:
    """A locally finite game given by rules rather than tables.

    Subclasses supply ``neighbors(v)`` and ``local_potentials(v)``; the latter
    yields ``(clique, fn)`` pairs for every maximal clique containing ``v``,
    where ``fn`` maps the members' strategies (in clique order) to a value.
    """

    def neighbors(self, v):
        raise NotImplementedError

    def local_potentials(self, v):
        raise NotImplementedError

    def strategies(self, v) -> int:
        return 2

    def distinguished(self, v) -> int:
        return 0


class InfiniteGridExternality(GeneralizedGameView):
    """Externality game on the integer lattice with hash-seeded edge colors."""

    def __init__(self, seed: int = 0, color: str | None = None):
        self.seed = seed
        self.color = color

    def neighbors(self, v):
        x, y = v
        return [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]

    def edge_color(self, u, v) -> str:
        if self.color is not None:
            return self.color
        e = tuple(sorted((u, v)))
        digest = hashlib.blake2b(f"{self.seed}:{e}".encode(), digest_size=8).digest()
        return BLUE if digest[0] & 1 == 0 else "red"

    def local_potentials(self, v):
        out = []
        for u in self.neighbors(v):
            e = tuple(sorted((u, v)))
            sign = 1 if self.edge_color(*e) == BLUE else -1
            out.append((e, lambda s, sign=sign: sign if s[0] == s[1] else 0))
        return out


class Truncation(NamedTuple):
    game: Game | None
    decomposition: LocalDecomposition
    labels: list


def truncate(view: GeneralizedGameView, center, radius: int, build_game: bool = True) -> Truncation:
    """Finite game on the ball of ``radius`` around ``center``.

    Players outside the ball are frozen at their distinguished strategies;
    cliques straddling the boundary contribute their restriction. Players are
    numbered in BFS order with the center first.
    """
    labels = [center]
    depth = {center: 0}
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if depth[v] == radius:
            continue
        for u in view.neighbors(v):
            if u not in depth:
                depth[u] = depth[v] + 1
                labels.append(u)
                queue.append(u)
    index = {v: i for i, v in enumerate(labels)}
    edges = {(index[v], index[u]) for v in labels for u in view.neighbors(v) if u in index and index[u] > index[v]}
    graph = Graph.from_edges(len(labels), edges)
    space = StrategySpace(tuple(view.strategies(v) for v in labels), tuple(view.distinguished(v) for v in labels))
    grouped: dict = {}
    seen = set()
    for v in labels:
        for clique, fn in view.local_potentials(v):
            key = frozenset(clique)
            if key in seen:
                continue
            seen.add(key)
            inside = sorted(index[u] for u in clique if u in index)
            grouped.setdefault(tuple(inside), []).append((tuple(clique), fn))
    terms = {}
    for inside, parts in grouped.items():
        def term(strats, inside=inside, parts=parts):
            local = {labels[i]: s for i, s in zip(inside, strats)}
            return sum(
                fn(tuple(local[u] if u in local else view.distinguished(u) for u in clique)) for clique, fn in parts
            )
        terms[inside] = term
    d = from_subclique_tables(graph, space, terms)
    game = synthesize_game(d) if build_game else None
    return Truncation(game, d, labels)


# -- exhaustive oracles ------------------------------------------------------


def enumerate_all_paths(g, init: Sequence[int], cap: int = 10**6) -> Iterator[PathRecord]:
    """Every maximal strict better-response path from ``init``, depth first.

    Deviations are explored by player then strategy index. Raises
    :class:`CapExceeded` once ``cap`` paths have been produced and another
    exists.
    """
    space = g.space
    if space.size > PATH_ENUMERATION_MAX_PROFILES:
        raise CapExceeded(f"path enumeration is limited to {PATH_ENUMERATION_MAX_PROFILES} profiles")
    space.check_profile(init)
    init = tuple(init)
    produced = 0

    def moves(a):
        a = list(a)
        out = []
        for i in range(space.n):
            u = _deviation_utils(g, a, i)
            cur = u[a[i]]
            out.extend((i, b, u[b] - cur) for b in range(space.m[i]) if u[b] > cur)
        return out

    a = list(init)
    path: list[Step] = []
    frames = [iter(moves(a))]
    while frames:
        nxt = next(frames[-1], None)
        if nxt is None:
            frames.pop()
            if path and len(frames) == len(path):
                last = path.pop()
                a[last.player] = last.old
            continue
        i, b, gain = nxt
        path.append(Step(len(path), i, a[i], b, gain))
        a[i] = b
        if len(path) > space.size:
            raise ValueError("better-response path revisits a profile; the game has an improvement cycle")
        options = moves(a)
        if options:
            frames.append(iter(options))
            continue
        if produced >= cap:
            raise CapExceeded(f"more than {cap} maximal paths")
        produced += 1
        yield PathRecord(init, list(path), tuple(a), STOP_EQUILIBRIUM)
        last = path.pop()
        a[last.player] = last.old
    if produced == 0:
        yield PathRecord(init, [], init, STOP_EQUILIBRIUM)


def integer_utilities(g: Game) -> np.ndarray:
    """Utility tables scaled to a common integer denominator, shape ``(n, P)``."""
    fr = [[Fraction(v) for v in t] for t in g.utilities]
    scale = math.lcm(*(v.denominator for t in fr for v in t)) if g.space.size else 1
    return np.array([[int(v * scale) for v in t] for t in fr], dtype=np.int64)


class UpdateMaxima(NamedTuple):
    per_start: np.ndarray  # (P, n): max updates of each player from each start
    longest: np.ndarray  # (P,): longest path from each start


def max_update_counts(g) -> UpdateMaxima:
    """Exact maxima over all better-response paths, by dynamic programming.

    The strict better-response graph of a potential game is acyclic, so the
    most updates player ``k`` can make from ``a`` is a longest-path recursion
    over successors. Raises ValueError on an improvement cycle.
    """
    if isinstance(g, LocalDecomposition):
        g = synthesize_game(g)
    if g.space.size > enumeration_cap():
        raise CapExceeded(f"{g.space.size} profiles exceeds enumeration cap")
    best, length = kernels.dag_max_updates(integer_utilities(g), np.array(g.space.m, dtype=np.int64))
    return UpdateMaxima(best, length)
