"""Clique decompositions of graphical potentials.

A potential on a graph splits into one table per maximal clique. The split is
computed from the canonical interaction terms

    T_A(a) = sum over B subset of A of (-1)^{|A|-|B|} P(a_B, o_{-B}),

which vanish on every non-clique ``A`` exactly when the potential is local to
the graph. Each nonzero clique term is folded into the lexicographically
smallest maximal clique containing it; the constant term ``P(o)`` is reported
separately.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ._check import GPGError, NotGraphLocal
from .game import (
    Game,
    Potential,
    StrategySpace,
    hessian,
    is_graphical,
    satisfies_potential,
)
from .graph import Graph

FULL_METHOD_MAX_PLAYERS = 20


def local_strides(space: StrategySpace, members: Sequence[int]) -> list[int]:
    out, s = [], 1
    for v in members:
        out.append(s)
        s *= space.m[v]
    return out


def local_rank(space: StrategySpace, members: Sequence[int], a: Sequence[int]) -> int:
    return sum(a[v] * s for v, s in zip(members, local_strides(space, members)))


def local_size(space: StrategySpace, members: Sequence[int]) -> int:
    return math.prod(space.m[v] for v in members)


@dataclass(frozen=True)
class LocalDecomposition:
    graph: Graph
    space: StrategySpace
    tables: tuple[list, ...]
    constant: object = 0
    cliques: tuple = field(default=None)

    def __post_init__(self):
        if self.graph.n != self.space.n:
            raise ValueError("graph and strategy space disagree on the number of players")
        cliques = self.graph.maximal_cliques
        if self.cliques is not None and tuple(tuple(c) for c in self.cliques) != cliques:
            raise ValueError("cliques must be the graph's maximal cliques in sorted order")
        object.__setattr__(self, "cliques", cliques)
        tables = tuple(list(t) for t in self.tables)
        if len(tables) != len(cliques):
            raise ValueError(f"{len(tables)} tables for {len(cliques)} maximal cliques")
        for c, t in zip(cliques, tables):
            if len(t) != local_size(self.space, c):
                raise ValueError(f"table for clique {c} has {len(t)} entries")
        object.__setattr__(self, "tables", tables)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def m(self) -> tuple[int, ...]:
        return self.space.m

    @cached_property
    def cliques_of(self) -> tuple[tuple[int, ...], ...]:
        """Indices of the cliques containing each player."""
        out = [[] for _ in range(self.n)]
        for k, c in enumerate(self.cliques):
            for v in c:
                out[v].append(k)
        return tuple(tuple(x) for x in out)

    @cached_property
    def _strides(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(local_strides(self.space, c)) for c in self.cliques)

    def clique_value(self, k: int, a: Sequence[int]):
        c = self.cliques[k]
        return self.tables[k][sum(a[v] * s for v, s in zip(c, self._strides[k]))]

    def value(self, a: Sequence[int]):
        """Sum of the local tables at ``a`` (the constant term excluded)."""
        return sum(self.clique_value(k, a) for k in range(len(self.cliques)))

    def utility(self, i: int, a: Sequence[int]):
        """Payoff of player ``i`` in the game whose utilities sum its cliques' tables."""
        return sum(self.clique_value(k, a) for k in self.cliques_of[i])

    @property
    def bound(self):
        return max((abs(v) for t in self.tables for v in t), default=0)

    @property
    def integral(self) -> bool:
        return all(_is_integer(v) for t in self.tables for v in t)


def _is_integer(v) -> bool:
    if isinstance(v, int):
        return True
    if isinstance(v, Fraction):
        return v.denominator == 1
    return float(v).is_integer()


def bound_and_integrality(d: LocalDecomposition):
    """``(M, integral)``: largest absolute table entry, all entries integers."""
    return Fraction(d.bound) if not isinstance(d.bound, float) else d.bound, d.integral


def fold_target(graph: Graph, subset: Sequence[int]) -> int:
    """Index of the lexicographically smallest maximal clique containing ``subset``."""
    s = set(subset)
    for k, c in enumerate(graph.maximal_cliques):
        if s.issubset(c):
            return k
    raise ValueError(f"{tuple(subset)} is not contained in any clique")


def from_subclique_tables(graph: Graph, space: StrategySpace, terms: dict, constant=0) -> LocalDecomposition:
    """Build a decomposition from tables on arbitrary cliques of ``graph``.

    ``terms`` maps a sorted member tuple to either a table over its local ranks
    or a callable of the members' strategies. Each term is added into its fold
    target.
    """
    cliques = graph.maximal_cliques
    tables = [[0] * local_size(space, c) for c in cliques]
    for members, term in terms.items():
        members = tuple(sorted(members))
        if not graph.is_clique(members):
            raise ValueError(f"{members} is not a clique")
        k = fold_target(graph, members)
        target = cliques[k]
        pos = [target.index(v) for v in members]
        sub_strides = local_strides(space, members)
        for r in range(len(tables[k])):
            sub = []
            rr = r
            for v in target:
                rr, x = divmod(rr, space.m[v])
                sub.append(x)
            own = tuple(sub[p] for p in pos)
            if callable(term):
                val = term(own)
            else:
                val = term[sum(x * s for x, s in zip(own, sub_strides))]
            tables[k][r] += val
    return LocalDecomposition(graph, space, tuple(tables), constant)


# -- decomposition -----------------------------------------------------------


def interaction_table(p: Potential) -> list:
    """Canonical interaction term of every profile's support.

    Entry ``r`` is ``T_A(a)`` for ``a = profile(r)`` and ``A`` the set of
    players off their distinguished strategy. Computed in place with one
    difference pass per coordinate.
    """
    space = p.space
    h = list(p.values)
    size = space.size
    for i in range(space.n):
        stride, mi, oi = space.strides[i], space.m[i], space.o[i]
        block = stride * mi
        for start in range(0, size, block):
            base = start + oi * stride
            for x in range(mi):
                if x == oi:
                    continue
                off = start + x * stride
                for t in range(stride):
                    h[off + t] -= h[base + t]
    return h


def _zeta_local(space: StrategySpace, members: Sequence[int], table: list) -> None:
    """In place: each entry becomes the sum over entries on subsets of its support.

    Inverts the per-coordinate differences of :func:`interaction_table` inside
    one clique, turning terms stored at their own support into a function of
    the whole clique profile.
    """
    stride = 1
    size = len(table)
    for v in members:
        mi, ov = space.m[v], space.o[v]
        block = stride * mi
        for start in range(0, size, block):
            base = start + ov * stride
            for x in range(mi):
                if x == ov:
                    continue
                off = start + x * stride
                for t in range(stride):
                    table[off + t] += table[base + t]
        stride = block


def _support(space: StrategySpace, a: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, x in enumerate(a) if x != space.o[i])


def _nonzero(v, tol) -> bool:
    return abs(v) > tol if tol else v != 0


def decompose(p: Potential, graph: Graph, method: str = "auto", tol: float = 0) -> LocalDecomposition:
    """Split ``p - p(o)`` into maximal-clique tables of ``graph``.

    ``method`` is ``"full"`` (every interaction term, up to 20 players),
    ``"cliques"`` (check every non-edge hessian first, then compute terms only
    inside maximal cliques) or ``"auto"``. ``tol`` is the absolute threshold
    below which a term counts as zero; keep it 0 for exact values.

    Raises :class:`NotGraphLocal` with ``(subset, profile)`` if a non-clique
    carries a nonzero term.
    """
    space = p.space
    if graph.n != space.n:
        raise ValueError(f"graph has {graph.n} vertices but the potential has {space.n} players")
    if method == "auto":
        method = "full" if space.n <= FULL_METHOD_MAX_PLAYERS else "cliques"
    if method == "full":
        return _decompose_full(p, graph, tol)
    if method == "cliques":
        return _decompose_cliques(p, graph, tol)
    raise ValueError(f"unknown method {method!r}")


def _decompose_full(p: Potential, graph: Graph, tol) -> LocalDecomposition:
    space = p.space
    if space.n > FULL_METHOD_MAX_PLAYERS:
        from ._check import CapExceeded

        raise CapExceeded(f"full interaction method is limited to {FULL_METHOD_MAX_PLAYERS} players")
    h = interaction_table(p)
    cliques = graph.maximal_cliques
    tables = [[0] * local_size(space, c) for c in cliques]
    strides = [local_strides(space, c) for c in cliques]
    targets: dict = {}
    constant = h[space.rank(space.o)]
    for r, a in enumerate(space.profiles()):
        v = h[r]
        if not _nonzero(v, tol):
            continue
        supp = _support(space, a)
        if not supp:
            continue
        if supp not in targets:
            if not graph.is_clique(supp):
                raise NotGraphLocal(supp, a)
            targets[supp] = fold_target(graph, supp)
        k = targets[supp]
        tables[k][sum(a[u] * s for u, s in zip(cliques[k], strides[k]))] += v
    for c, t in zip(cliques, tables):
        _zeta_local(space, c, t)
    return LocalDecomposition(graph, space, tuple(tables), constant)


def _decompose_cliques(p: Potential, graph: Graph, tol) -> LocalDecomposition:
    space = p.space
    profiles = list(space.profiles())
    for i, j in graph.non_edges():
        for a in profiles:
            if a[i] != space.o[i] and a[j] != space.o[j] and _nonzero(hessian(p, i, j, a), tol):
                raise NotGraphLocal((i, j), a)
    cliques = graph.maximal_cliques
    tables = []
    o = space.o
    targets: dict = {}
    for k, c in enumerate(cliques):
        table = []
        for r in range(local_size(space, c)):
            a = list(o)
            rr = r
            for v in c:
                rr, a[v] = divmod(rr, space.m[v])
            supp = [v for v in c if a[v] != o[v]]
            if not supp:
                table.append(0)
                continue
            key = tuple(supp)
            if key not in targets:
                targets[key] = fold_target(graph, key)
            if targets[key] != k:
                table.append(0)
                continue
            term = 0
            for mask in range(1 << len(supp)):
                b = list(o)
                bits = 0
                for t, v in enumerate(supp):
                    if mask >> t & 1:
                        b[v] = a[v]
                        bits += 1
                sign = -1 if (len(supp) - bits) % 2 else 1
                term += sign * p(b)
            table.append(term if _nonzero(term, tol) else 0)
        _zeta_local(space, c, table)
        tables.append(table)
    return LocalDecomposition(graph, space, tuple(tables), p(o))


def reconstruct(d: LocalDecomposition) -> Potential:
    """Pointwise sum of the local tables over the full profile space."""
    return Potential(d.space, [d.value(a) for a in d.space.profiles()])


def synthesize_game(d: LocalDecomposition) -> Game:
    """Game in which each player collects the tables of the cliques containing it."""
    return Game.from_function(d.space, d.utility)


# -- neighbor offsets --------------------------------------------------------


@dataclass(frozen=True)
class NeighborOffsets:
    """Per-player tables ``f_i`` indexed by the local rank of ``a`` on ``N(i)``."""

    neighbors: tuple[tuple[int, ...], ...]
    tables: tuple[list, ...]

    def value(self, space: StrategySpace, i: int, a: Sequence[int]):
        return self.tables[i][local_rank(space, self.neighbors[i], a)]

    @classmethod
    def zeros(cls, d: LocalDecomposition) -> NeighborOffsets:
        nbrs = tuple(tuple(sorted(d.graph.neighbors(i))) for i in range(d.n))
        return cls(nbrs, tuple([0] * local_size(d.space, nb) for nb in nbrs))


def _check_offsets(d: LocalDecomposition, f: NeighborOffsets) -> None:
    for i in range(d.n):
        expected = tuple(sorted(d.graph.neighbors(i)))
        if tuple(f.neighbors[i]) != expected:
            raise ValueError(f"offsets for player {i} indexed by {f.neighbors[i]}, expected {expected}")
        if len(f.tables[i]) != local_size(d.space, expected):
            raise ValueError(f"offset table for player {i} has the wrong size")


def synthesize_with_offsets(d: LocalDecomposition, f: NeighborOffsets) -> Game:
    _check_offsets(d, f)
    return Game.from_function(d.space, lambda i, a: d.utility(i, a) + f.value(d.space, i, a))


class OffsetPreconditionError(GPGError):
    """The game is not a graphical potential game with the decomposition's potential."""

    def __init__(self, reason, witness):
        super().__init__(f"{reason}: {witness}")
        self.reason = reason
        self.witness = witness


class ResidualDependenceError(GPGError):
    """A residual ``u_i - w_i`` varies with a coordinate outside ``N(i)``."""

    def __init__(self, player, profile, coordinate):
        super().__init__(f"residual of player {player} depends on player {coordinate} at {profile}")
        self.player = player
        self.profile = profile
        self.coordinate = coordinate


def extract_offsets(g: Game, d: LocalDecomposition) -> NeighborOffsets:
    """Recover ``f_i`` with ``u_i = sum_{C containing i} P_C + f_i(a_{N(i)})``."""
    if g.space.m != d.space.m:
        raise OffsetPreconditionError("strategy spaces differ", (g.space.m, d.space.m))
    space = g.space.with_o(d.space.o)
    g = Game(space, g.utilities)
    graphical = is_graphical(g, d.graph)
    if not graphical:
        raise OffsetPreconditionError("not graphical on the decomposition's graph", graphical.witness)
    recon = reconstruct(d).values
    bad = satisfies_potential(g, recon)
    if bad is not None:
        raise OffsetPreconditionError("decomposition does not reconstruct the game's potential", bad)
    profiles = list(space.profiles())
    nbrs = tuple(tuple(sorted(d.graph.neighbors(i))) for i in range(d.n))
    tables = []
    for i in range(d.n):
        resid = [g.utilities[i][r] - d.utility(i, a) for r, a in enumerate(profiles)]
        outside = [j for j in range(d.n) if j not in d.graph.neighbors(i)]
        for j in outside:
            for r, a in enumerate(profiles):
                if a[j] != space.o[j] and resid[r] != resid[space.pinned_rank(r, j, a[j])]:
                    raise ResidualDependenceError(i, a, j)
        table = [0] * local_size(space, nbrs[i])
        for r, a in enumerate(profiles):
            if all(a[j] == space.o[j] for j in outside):
                table[local_rank(space, nbrs[i], a)] = resid[r]
        tables.append(table)
    return NeighborOffsets(nbrs, tuple(tables))
