"""Random fields over strategy profiles and their Markov properties.

Exact distributions (ints/Fractions) are tested exactly: the conditional
independence identity ``P(u,w,x) P(x) = P(u,x) P(w,x)`` is homogeneous, so the
table is scaled to integers first. Float distributions use a relative
tolerance of 1e-9.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._check import CapExceeded, Check
from .game import Potential, StrategySpace
from .graph import Graph, is_cut

REL_TOL = 1e-9
SUM_TOL = 1e-12
GLOBAL_MARKOV_MAX_PLAYERS = 10


@dataclass(frozen=True)
class Distribution:
    space: StrategySpace
    p: list

    def __post_init__(self):
        p = list(self.p)
        if len(p) != self.space.size:
            raise ValueError(f"distribution has {len(p)} entries, expected {self.space.size}")
        if any(v < 0 for v in p):
            raise ValueError("probabilities must be nonnegative")
        if self.exact:
            if sum(p) != 1:
                raise ValueError(f"probabilities sum to {sum(p)}, not 1")
        elif abs(math.fsum(p) - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(p)!r}")
        object.__setattr__(self, "p", p)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.p)

    @property
    def n(self) -> int:
        return self.space.n

    def array(self) -> np.ndarray:
        """Table as an n-dimensional array with axis ``i`` for player ``i``.

        Exact tables come back as integers proportional to the probabilities.
        """
        shape = tuple(reversed(self.space.m))
        if self.exact:
            fr = [Fraction(v) for v in self.p]
            scale = math.lcm(*(f.denominator for f in fr))
            ints = [int(f * scale) for f in fr]
            arr = np.array(ints, dtype=object if max(ints) ** 2 * len(ints) ** 2 >= 2**62 else np.int64)
        else:
            arr = np.array(self.p, dtype=float)
        return arr.reshape(shape).transpose(tuple(reversed(range(self.n))))

    @classmethod
    def from_weights(cls, space: StrategySpace, weights: Sequence) -> Distribution:
        total = sum(weights)
        if isinstance(total, float):
            return cls(space, [w / total for w in weights])
        return cls(space, [Fraction(w, 1) / total for w in weights])


def psi(p: Potential) -> Distribution:
    """Gibbs map ``a -> exp(P(a))`` on a normalized potential."""
    if not p.normalized:
        raise ValueError("psi needs a normalized potential")
    return Distribution(p.space, [math.exp(v) for v in p.values])


def psi_inverse(dist: Distribution) -> Potential:
    if any(v == 0 for v in dist.p):
        raise ValueError("psi is only invertible on strictly positive distributions")
    return Potential(dist.space, [math.log(v) for v in dist.p], normalized=True)


def marginals(dist: Distribution) -> list[list]:
    out = [[0] * mi for mi in dist.space.m]
    for a, v in zip(dist.space.profiles(), dist.p):
        for i, x in enumerate(a):
            out[i][x] += v
    return out


def is_positive(dist: Distribution) -> bool:
    """Every profile whose coordinates have positive marginals has positive mass."""
    marg = marginals(dist)
    return all(
        v > 0 or any(marg[i][x] == 0 for i, x in enumerate(a)) for a, v in zip(dist.space.profiles(), dist.p)
    )


def _close(lhs: np.ndarray, rhs: np.ndarray, exact: bool) -> np.ndarray:
    if exact:
        return lhs == rhs
    return np.abs(lhs - rhs) <= REL_TOL * np.maximum(np.abs(lhs), np.abs(rhs))


def _ci_array(arr: np.ndarray, u: list, w: list, a: list, exact: bool, m: Sequence[int]):
    n = arr.ndim
    keep = u + w + a
    others = tuple(i for i in range(n) if i not in keep)
    marg = arr.sum(axis=others) if others else arr
    # axes of marg are the kept players in increasing index order
    kept_sorted = sorted(keep)
    marg = np.transpose(marg, [kept_sorted.index(i) for i in keep]) if keep else marg
    su = math.prod(m[i] for i in u)
    sw = math.prod(m[i] for i in w)
    sa = math.prod(m[i] for i in a)
    joint = np.asarray(marg).reshape(su, sw, sa)
    pa = joint.sum(axis=(0, 1))
    pua = joint.sum(axis=1)
    pwa = joint.sum(axis=0)
    lhs = joint * pa[None, None, :]
    rhs = pua[:, None, :] * pwa[None, :, :]
    ok = _close(lhs, rhs, exact)
    # conditioning on a zero-probability x_A is vacuous
    ok |= (pa == 0)[None, None, :]
    if ok.all():
        return None
    xu, xw, xa = (int(t[0]) for t in np.nonzero(~ok))
    return _unflatten(xu, [m[i] for i in u]), _unflatten(xw, [m[i] for i in w]), _unflatten(xa, [m[i] for i in a])


def _unflatten(r: int, radices: list) -> tuple:
    # C-order reshape: the last listed player varies fastest
    out = []
    for mi in reversed(radices):
        r, x = divmod(r, mi)
        out.append(x)
    return tuple(reversed(out))


def _disjoint(*sets) -> bool:
    seen: set = set()
    for s in sets:
        if seen & set(s):
            return False
        seen |= set(s)
    return True


def conditionally_independent(dist: Distribution, u_set: Iterable[int], w_set: Iterable[int], a_set: Iterable[int]) -> Check:
    """Test ``X_U`` independent of ``X_W`` given ``X_A``; other players are summed out.

    Witness ``(x_U, x_W, x_A)`` with each part listed in the order the sets
    were given.
    """
    u, w, a = list(u_set), list(w_set), list(a_set)
    if not _disjoint(u, w, a):
        raise ValueError("U, W and A must be disjoint")
    for i in u + w + a:
        if not 0 <= i < dist.n:
            raise ValueError(f"player {i} out of range")
    bad = _ci_array(dist.array(), u, w, a, dist.exact, dist.space.m)
    return Check(bad is None, bad)


def pairwise_markov(dist: Distribution, graph: Graph) -> Check:
    """``X_i`` independent of ``X_j`` given the rest, for every non-edge. Witness ``(i, j, ci_witness)``."""
    if graph.n != dist.n:
        raise ValueError("graph and distribution sizes differ")
    arr = dist.array()
    for i, j in graph.non_edges():
        rest = [k for k in range(dist.n) if k not in (i, j)]
        bad = _ci_array(arr, [i], [j], rest, dist.exact, dist.space.m)
        if bad is not None:
            return Check(False, (i, j, bad))
    return Check(True)


def global_markov(dist: Distribution, graph: Graph, cap: int = GLOBAL_MARKOV_MAX_PLAYERS) -> Check:
    """Conditional independence across every cut.

    Enumerates disjoint ``(U, A, W)`` with ``U`` and ``W`` nonempty and ``A`` a
    ``(U, W)``-cut; players outside the three sets are marginalized. Only one of
    ``(U, W)`` and ``(W, U)`` is tested since the relation is symmetric.
    Witness ``(U, W, A, ci_witness)``.
    """
    n = dist.n
    if graph.n != n:
        raise ValueError("graph and distribution sizes differ")
    if n > cap:
        raise CapExceeded(f"global Markov check enumerates 4^n triples; n={n} exceeds cap {cap}")
    arr = dist.array()
    for labels in itertools.product(range(4), repeat=n):
        u = [i for i in range(n) if labels[i] == 1]
        w = [i for i in range(n) if labels[i] == 2]
        if not u or not w or u[0] > w[0]:
            continue
        a = [i for i in range(n) if labels[i] == 3]
        if not is_cut(graph, a, u, w):
            continue
        bad = _ci_array(arr, u, w, a, dist.exact, dist.space.m)
        if bad is not None:
            return Check(False, (tuple(u), tuple(w), tuple(a), bad))
    return Check(True)


def amalgamate_field(dist: Distribution, i: int, j: int) -> Distribution:
    """Merge coordinates ``i`` and ``j`` into one with ``m_i * m_j`` values.

    The merged coordinate sits at ``min(i, j)`` (matching
    :func:`gpgames.graph.amalgamate`) and takes the value ``a_i * m_j + a_j``.
    """
    if i == j:
        raise ValueError("cannot amalgamate a coordinate with itself")
    space = dist.space
    lo, hi = min(i, j), max(i, j)
    m = list(space.m)
    merged_m = m[i] * m[j]
    new_m = [merged_m if k == lo else m[k] for k in range(space.n) if k != hi]
    new_space = StrategySpace(tuple(new_m))
    p = [0] * new_space.size
    for a, v in zip(space.profiles(), dist.p):
        merged = a[i] * m[j] + a[j]
        b = [merged if k == lo else a[k] for k in range(space.n) if k != hi]
        p[new_space.rank(b)] += v
    return Distribution(new_space, p)


def gibbs(space: StrategySpace, graph: Graph, clique_weights: dict) -> Distribution:
    """Exact distribution proportional to the product of positive clique weights.

    ``clique_weights`` maps a clique (sorted tuple) to a table of positive ints
    or Fractions over its local ranks.
    """
    from .decomposition import local_rank

    for c in clique_weights:
        if not graph.is_clique(c):
            raise ValueError(f"{c} is not a clique")
    weights = []
    for a in space.profiles():
        w = Fraction(1)
        for c, table in clique_weights.items():
            w *= table[local_rank(space, c, a)]
        weights.append(w)
    return Distribution.from_weights(space, weights)
