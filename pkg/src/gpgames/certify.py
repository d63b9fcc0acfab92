"""Batch certification of the update bounds on small integral games.

A :class:`Family` fixes a graph and strategy counts; a batch is an int64 array
of local tables, one row per game, laid out clique after clique. The kernels
then compute, per game, the exact maxima over every better-response path
(longest-path recursion over the acyclic improvement graph) and count
violations of the discounted-potential monotonicity.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .decomposition import LocalDecomposition, local_rank, local_size
from .dynamics import potential_range_bound, update_bound
from .game import StrategySpace
from .graph import Graph, bfs_distances, clique_degree, clique_distance


@dataclass(frozen=True)
class Family:
    name: str
    graph: Graph
    space: StrategySpace
    cliques: tuple
    toff: np.ndarray
    loc: np.ndarray  # (cliques, profiles) local rank of each profile
    width: int

    @classmethod
    def build(cls, name: str, graph: Graph, m: Iterable[int] | None = None) -> Family:
        space = StrategySpace(tuple(m) if m is not None else (2,) * graph.n)
        cliques = graph.maximal_cliques
        sizes = [local_size(space, c) for c in cliques]
        toff = np.cumsum([0] + sizes[:-1]).astype(np.int64)
        loc = np.array([[local_rank(space, c, a) for a in space.profiles()] for c in cliques], dtype=np.int64)
        return cls(name, graph, space, cliques, toff, loc.reshape(len(cliques), space.size), sum(sizes))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def D(self) -> int:
        return clique_degree(self.graph)

    def game_count(self, values: int) -> int:
        return values**self.width

    def decomposition(self, row) -> LocalDecomposition:
        tables = []
        for c, off in enumerate(self.toff.tolist()):
            size = local_size(self.space, self.cliques[c])
            tables.append([int(v) for v in row[off:off + size]])
        return LocalDecomposition(self.graph, self.space, tuple(tables))


def all_tables(fam: Family, values: Iterable[int], start: int = 0, stop: int | None = None) -> np.ndarray:
    """Games ``start..stop`` of the exhaustive enumeration, in mixed-radix order."""
    vals = np.array(list(values), dtype=np.int64)
    stop = fam.game_count(len(vals)) if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    digits = (idx[:, None] // (len(vals) ** np.arange(fam.width, dtype=np.int64))[None, :]) % len(vals)
    return vals[digits]


def batches(fam: Family, values: Iterable[int], size: int = 1 << 15) -> Iterator[np.ndarray]:
    values = list(values)
    total = fam.game_count(len(values))
    for start in range(0, total, size):
        yield all_tables(fam, values, start, min(total, start + size))


def sampled_tables(fam: Family, values: Iterable[int], count: int, seed: int) -> np.ndarray:
    vals = np.array(list(values), dtype=np.int64)
    gen = np.random.default_rng(seed)
    return vals[gen.integers(0, len(vals), size=(count, fam.width))]


def potentials(fam: Family, tables: np.ndarray) -> np.ndarray:
    """Reconstructed potential, shape ``(games, profiles)``."""
    phi = np.zeros((tables.shape[0], fam.space.size), dtype=np.int64)
    for c in range(len(fam.cliques)):
        phi += tables[:, fam.toff[c] + fam.loc[c]]
    return phi


def utilities(fam: Family, tables: np.ndarray) -> np.ndarray:
    """Per-player utilities, shape ``(games, n, profiles)``."""
    util = np.zeros((tables.shape[0], fam.n, fam.space.size), dtype=np.int64)
    for c, members in enumerate(fam.cliques):
        vals = tables[:, fam.toff[c] + fam.loc[c]]
        for i in members:
            util[:, i, :] += vals
    return util


def local_bounds(tables: np.ndarray) -> np.ndarray:
    """Per-game ``M``; all-zero games are treated as 1-bounded."""
    return np.maximum(np.abs(tables).max(axis=1), 1)


def _theta_inputs(fam: Family):
    g = fam.graph
    player_cliques = [[c for c, members in enumerate(fam.cliques) if i in members] for i in range(fam.n)]
    pc_indptr = np.cumsum([0] + [len(p) for p in player_cliques]).astype(np.int64)
    pc_idx = np.array([c for p in player_cliques for c in p], dtype=np.int64)
    dist = np.full((fam.n, len(fam.cliques)), -1, dtype=np.int64)
    for k in range(fam.n):
        dk = bfs_distances(g, k)
        for c, members in enumerate(fam.cliques):
            r = clique_distance(g, k, members, dk)
            if r is not None:
                dist[k, c] = r
    R = int(dist.max(initial=0))
    return pc_indptr, pc_idx, dist, R


@dataclass
class CertReport:
    family: str
    games: int = 0
    bound_violations: int = 0
    theta_monotone_violations: int = 0
    theta_increment_violations: int = 0
    range_violations: int = 0
    length_violations: int = 0
    max_updates: list = field(default_factory=list)
    max_length: int = 0
    max_abs_potential: int = 0
    tightest_ratio: Fraction = Fraction(0)
    first_violation: tuple | None = None

    @property
    def violations(self) -> int:
        return (self.bound_violations + self.theta_monotone_violations + self.theta_increment_violations
                + self.range_violations + self.length_violations)

    def merge(self, other: CertReport) -> None:
        self.games += other.games
        for name in ("bound_violations", "theta_monotone_violations", "theta_increment_violations",
                     "range_violations", "length_violations"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.max_updates = [max(a, b) for a, b in zip(self.max_updates, other.max_updates)] or other.max_updates
        self.max_length = max(self.max_length, other.max_length)
        self.max_abs_potential = max(self.max_abs_potential, other.max_abs_potential)
        self.tightest_ratio = max(self.tightest_ratio, other.tightest_ratio)
        self.first_violation = self.first_violation or other.first_violation


def certify(fam: Family, tables: np.ndarray, theta: bool = True) -> CertReport:
    """Check one batch against the per-player bound, the range claim and Θ."""
    n, D = fam.n, fam.D
    m = np.array(fam.space.m, dtype=np.int64)
    bounds_M = local_bounds(tables)
    maxk, maxlen = kernels.dag_max_updates_batch(utilities(fam, tables), m)
    phi_abs = np.abs(potentials(fam, tables)).max(axis=1)
    rep = CertReport(fam.name, games=tables.shape[0])
    rep.max_updates = maxk.max(axis=0).tolist()
    rep.max_length = int(maxlen.max(initial=0))
    rep.max_abs_potential = int(phi_abs.max(initial=0))
    for M in np.unique(bounds_M).tolist():
        sel = bounds_M == M
        per_player = [update_bound(fam.graph, k, D, M).bound_value for k in range(n)]
        caps = np.array([math.floor(b) for b in per_player], dtype=np.int64)
        over = maxk[sel] > caps[None, :]
        rep.bound_violations += int(over.sum())
        if over.any() and rep.first_violation is None:
            rep.first_violation = ("bound", int(np.nonzero(sel)[0][np.nonzero(over.any(axis=1))[0][0]]))
        rep.tightest_ratio = max(
            rep.tightest_ratio,
            max(Fraction(int(maxk[sel][:, k].max()), 1) / per_player[k] for k in range(n)),
        )
        nDM = int(potential_range_bound(n, D, M))
        rep.range_violations += int((phi_abs[sel] >= nDM).sum())
        rep.length_violations += int((maxlen[sel] > 2 * nDM - 2).sum())
    if theta:
        pc_indptr, pc_idx, dist, R = _theta_inputs(fam)
        mono, incr = kernels.theta_scan_batch(
            tables, fam.toff, fam.loc, pc_indptr, pc_idx, m, dist, bounds_M.astype(np.int64), D, R,
        )
        rep.theta_monotone_violations = int(mono.sum())
        rep.theta_increment_violations = int(incr.sum())
    return rep


def certify_exhaustive(fam: Family, values: Iterable[int] = range(-2, 3), batch: int = 1 << 15,
                       theta: bool = True) -> CertReport:
    total = CertReport(fam.name)
    for tables in batches(fam, values, batch):
        total.merge(certify(fam, tables, theta))
    return total


def certify_sampled(fam: Family, count: int, seed: int, values: Iterable[int] = range(-2, 3),
                    batch: int = 1 << 14, theta: bool = True) -> CertReport:
    values = list(values)
    total = CertReport(fam.name)
    done = 0
    while done < count:
        size = min(batch, count - done)
        total.merge(certify(fam, sampled_tables(fam, values, size, seed + done), theta))
        done += size
    return total
