"""Finite normal-form games over mixed-radix profile tables.

A profile ``a`` is a tuple of strategy indices; its rank is
``sum(a[i] * prod(m[:i]))`` so player 0 varies fastest. Utility and potential
tables are plain lists indexed by rank. Values are ints or Fractions wherever
exactness matters; normalized potentials are floats.
"""
from __future__ import annotations

import itertools
import math
import os
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from ._check import CapExceeded, Check, NotAPotentialGame

MAX_PROFILES = 2**26
DEFAULT_ENUMERATION_CAP = 2**20


def enumeration_cap() -> int:
    """Profile-count cap for exhaustive scans; ``GPG_MAX_PROFILES`` overrides it."""
    value = os.environ.get("GPG_MAX_PROFILES")
    return int(value) if value else DEFAULT_ENUMERATION_CAP


@dataclass(frozen=True)
class StrategySpace:
    m: tuple[int, ...]
    o: tuple[int, ...] | None = None

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        o = tuple(int(x) for x in self.o) if self.o is not None else (0,) * len(m)
        if len(o) != len(m):
            raise ValueError("one distinguished strategy per player required")
        for mi, oi in zip(m, o):
            if mi < 1:
                raise ValueError("every player needs at least one strategy")
            if not 0 <= oi < mi:
                raise ValueError(f"distinguished strategy {oi} outside range({mi})")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "o", o)

    @property
    def n(self) -> int:
        return len(self.m)

    @cached_property
    def size(self) -> int:
        return math.prod(self.m)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out, s = [], 1
        for mi in self.m:
            out.append(s)
            s *= mi
        return tuple(out)

    def rank(self, a: Sequence[int]) -> int:
        return sum(x * s for x, s in zip(a, self.strides))

    def profile(self, rank: int) -> tuple[int, ...]:
        out = []
        for mi in self.m:
            rank, x = divmod(rank, mi)
            out.append(x)
        return tuple(out)

    def profiles(self) -> Iterator[tuple[int, ...]]:
        """All profiles in rank order. Dense tables are capped at ``MAX_PROFILES``."""
        self.require_dense()
        for t in itertools.product(*(range(mi) for mi in reversed(self.m))):
            yield t[::-1]

    def require_dense(self) -> None:
        if self.size > MAX_PROFILES:
            raise CapExceeded(f"{self.size} profiles exceeds the table limit {MAX_PROFILES}")

    def with_o(self, o: Sequence[int]) -> StrategySpace:
        return StrategySpace(self.m, tuple(o))

    def pinned_rank(self, rank: int, i: int, a_i: int) -> int:
        """Rank of the profile with coordinate ``i`` replaced by ``o_i``."""
        return rank + (self.o[i] - a_i) * self.strides[i]

    def check_profile(self, a: Sequence[int]) -> None:
        if len(a) != self.n or any(not 0 <= x < mi for x, mi in zip(a, self.m)):
            raise ValueError(f"invalid profile {tuple(a)} for strategy counts {self.m}")


def pin(a: Sequence[int], i: int, o: Sequence[int]) -> tuple[int, ...]:
    """``a`` with player ``i`` moved to its distinguished strategy."""
    out = list(a)
    out[i] = o[i]
    return tuple(out)


def pin2(a: Sequence[int], i: int, j: int, o: Sequence[int]) -> tuple[int, ...]:
    return pin(pin(a, i, o), j, o)


@dataclass(frozen=True)
class Game:
    space: StrategySpace
    utilities: tuple[list, ...]

    def __post_init__(self):
        utilities = tuple(list(t) for t in self.utilities)
        if len(utilities) != self.space.n:
            raise ValueError("one utility table per player required")
        for t in utilities:
            if len(t) != self.space.size:
                raise ValueError(f"utility table has {len(t)} entries, expected {self.space.size}")
            for v in t:
                if isinstance(v, float) and not math.isfinite(v):
                    raise ValueError("utilities must be finite")
        object.__setattr__(self, "utilities", utilities)

    @classmethod
    def from_function(cls, space: StrategySpace, fn: Callable[[int, tuple], object]) -> Game:
        profiles = list(space.profiles())
        return cls(space, tuple([fn(i, a) for a in profiles] for i in range(space.n)))

    @property
    def n(self) -> int:
        return self.space.n

    def utility(self, i: int, a: Sequence[int]) -> object:
        return self.utilities[i][self.space.rank(a)]

    def with_o(self, o: Sequence[int]) -> Game:
        return Game(self.space.with_o(o), self.utilities)


@dataclass(frozen=True)
class Potential:
    space: StrategySpace
    values: list
    normalized: bool = False

    def __post_init__(self):
        values = list(self.values)
        if len(values) != self.space.size:
            raise ValueError(f"potential has {len(values)} entries, expected {self.space.size}")
        if any(isinstance(v, float) and not math.isfinite(v) for v in values):
            raise ValueError("potential values must be finite")
        object.__setattr__(self, "values", values)
        if self.normalized:
            total = math.fsum(math.exp(v) for v in values)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"flagged normalized but exp-sum is {total!r}")

    def __call__(self, a: Sequence[int]):
        return self.values[self.space.rank(a)]

    def shifted(self, c) -> Potential:
        return Potential(self.space, [v + c for v in self.values])

    def minus_base(self) -> Potential:
        """The potential shifted so that its value at ``o`` is zero."""
        return self.shifted(-self.values[self.space.rank(self.space.o)])


# -- graphical property ------------------------------------------------------


def is_graphical(g: Game, graph) -> Check:
    """Check that no player's utility depends on a non-neighbor.

    Witness ``(i, j, a)``: pinning non-neighbor ``j`` changes ``u_i(a)``.
    """
    space = g.space
    if graph.n != space.n:
        raise ValueError(f"graph has {graph.n} vertices but the game has {space.n} players")
    profiles = list(space.profiles())
    for i in range(space.n):
        table = g.utilities[i]
        for j in range(space.n):
            if j == i or graph.has_edge(i, j):
                continue
            for r, a in enumerate(profiles):
                if a[j] != space.o[j] and table[r] != table[space.pinned_rank(r, j, a[j])]:
                    return Check(False, (i, j, a))
    return Check(True)


# -- potentials --------------------------------------------------------------


def _telescoped_potential(g: Game) -> list:
    space = g.space
    o = space.o
    values = []
    for a in space.profiles():
        total = 0
        prev = list(o)
        prev_rank = space.rank(prev)
        for i in range(space.n):
            if a[i] == o[i]:
                continue
            cur = prev_rank + (a[i] - o[i]) * space.strides[i]
            total += g.utilities[i][cur] - g.utilities[i][prev_rank]
            prev_rank = cur
        values.append(total)
    return values


def satisfies_potential(g: Game, values: Sequence) -> tuple[int, tuple] | None:
    """First ``(i, a)`` violating ``u_i(a) - u_i(a^i) = P(a) - P(a^i)``, else None."""
    space = g.space
    for r, a in enumerate(space.profiles()):
        for i in range(space.n):
            if a[i] == space.o[i]:
                continue
            p = space.pinned_rank(r, i, a[i])
            if g.utilities[i][r] - g.utilities[i][p] != values[r] - values[p]:
                return (i, a)
    return None


def improvement_cycle(g: Game) -> list[tuple] | None:
    """A 4-cycle of unilateral deviations whose utility changes do not sum to zero."""
    space = g.space
    for a in space.profiles():
        for i in range(space.n):
            for j in range(i + 1, space.n):
                for bi in range(space.m[i]):
                    if bi == a[i]:
                        continue
                    for bj in range(space.m[j]):
                        if bj == a[j]:
                            continue
                        p0 = a
                        p1 = tuple(bi if k == i else x for k, x in enumerate(a))
                        p2 = tuple(bj if k == j else x for k, x in enumerate(p1))
                        p3 = tuple(bj if k == j else x for k, x in enumerate(a))
                        u = g.utility
                        total = (
                            (u(i, p1) - u(i, p0))
                            + (u(j, p2) - u(j, p1))
                            + (u(i, p3) - u(i, p2))
                            + (u(j, p0) - u(j, p3))
                        )
                        if total != 0:
                            return [p0, p1, p2, p3]
    return None


def exact_potential(g: Game) -> Potential:
    """Potential with value 0 at the distinguished profile.

    Built by telescoping unilateral deviations from ``o`` in player order, then
    verified against every unilateral pinning. Raises
    :class:`NotAPotentialGame` carrying a non-conservative 4-cycle otherwise.
    """
    values = _telescoped_potential(g)
    if satisfies_potential(g, values) is not None:
        raise NotAPotentialGame(improvement_cycle(g))
    return Potential(g.space, values)


def is_potential_game(g: Game) -> Check:
    try:
        return Check(True, value=exact_potential(g))
    except NotAPotentialGame as exc:
        return Check(False, exc.cycle)


def hessian(p: Potential, i: int, j: int, a: Sequence[int]):
    """Mixed difference ``P(a) - P(a^i) - P(a^j) + P(a^ij)``."""
    if i == j:
        raise ValueError("hessian needs two distinct players")
    o = p.space.o
    return p(a) - p(pin(a, i, o)) - p(pin(a, j, o)) + p(pin2(a, i, j, o))


def normalize(p: Potential) -> Potential:
    """Shift so that ``sum(exp(P)) == 1``, using a max-shifted log-sum-exp."""
    vals = [float(v) for v in p.values]
    top = max(vals)
    lse = top + math.log(math.fsum(math.exp(v - top) for v in vals))
    return Potential(p.space, [v - lse for v in vals], normalized=True)


# -- strategic equivalence ---------------------------------------------------


def strategically_equivalent(g1: Game, g2: Game) -> Check:
    """Check ``u_i = w_i + f_i(a_{-i})`` for every player.

    On success ``value`` is a list of dicts ``f_i[a_{-i}]``; on failure the
    witness is ``(i, a, b_i)`` where the difference moves with ``i``'s action.
    """
    if g1.space.m != g2.space.m:
        raise ValueError("games are over different strategy spaces")
    space = g1.space
    offsets = []
    for i in range(space.n):
        f: dict = {}
        first_at: dict = {}
        for r, a in enumerate(space.profiles()):
            rest = a[:i] + a[i + 1:]
            diff = g1.utilities[i][r] - g2.utilities[i][r]
            if rest not in f:
                f[rest] = diff
                first_at[rest] = a
            elif f[rest] != diff:
                return Check(False, (i, first_at[rest], a[i]))
        offsets.append(f)
    return Check(True, value=offsets)


# -- responses and equilibria ------------------------------------------------


def _deviation_utils(g: Game, a: Sequence[int], i: int) -> list:
    space = g.space
    base = space.rank(a) - a[i] * space.strides[i]
    table = g.utilities[i]
    return [table[base + b * space.strides[i]] for b in range(space.m[i])]


def better_responses(g: Game, a: Sequence[int], i: int) -> list[int]:
    utils = _deviation_utils(g, a, i)
    current = utils[a[i]]
    return [b for b, u in enumerate(utils) if u > current]


def best_response(g: Game, a: Sequence[int], i: int) -> list[int]:
    """Every maximizer of ``u_i(., a_{-i})``; ties are kept."""
    utils = _deviation_utils(g, a, i)
    top = max(utils)
    return [b for b, u in enumerate(utils) if u == top]


def pure_nash(g: Game, cap: int | None = None) -> list[tuple[int, ...]]:
    cap = enumeration_cap() if cap is None else cap
    if g.space.size > cap:
        raise CapExceeded(f"{g.space.size} profiles exceeds enumeration cap {cap}")
    return [a for a in g.space.profiles() if all(not better_responses(g, a, i) for i in range(g.n))]


def as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)
