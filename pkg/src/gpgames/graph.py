"""Simple undirected graphs and the metric/clique structure the games live on.

Vertices are the integers ``0..n-1``. Cliques are sorted tuples of vertices.
Graph distance between disconnected vertices is ``None`` (unreachable); it is
never encoded as a number.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import cached_property

from .rng import SplitMix64

BLUE = "blue"
RED = "red"

Clique = tuple  # sorted tuple of vertex indices


def _edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = frozenset()
    colors: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        edges = frozenset(_edge(i, j) for i, j in self.edges)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range")
        colors = {}
        for e, c in self.colors.items():
            e = _edge(*e)
            if e not in edges:
                raise ValueError(f"colored pair {e} is not an edge")
            if c not in (BLUE, RED):
                raise ValueError(f"unknown color {c!r}")
            colors[e] = c
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "colors", colors)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, colors: dict | None = None) -> Graph:
        return cls(n, frozenset(edges), dict(colors or {}))

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return tuple(frozenset(s) for s in adj)

    def neighbors(self, i: int) -> frozenset:
        return self.adjacency[i]

    def has_edge(self, i: int, j: int) -> bool:
        return _edge(i, j) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def non_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if (i, j) not in self.edges]

    def is_clique(self, members: Iterable[int]) -> bool:
        members = list(members)
        return all(
            self.has_edge(members[a], members[b])
            for a in range(len(members))
            for b in range(a + 1, len(members))
        )

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def induced(self, vertices: list[int]) -> tuple[Graph, dict[int, int]]:
        """Subgraph on ``vertices`` renumbered in the given order."""
        index = {v: k for k, v in enumerate(vertices)}
        edges = [(index[i], index[j]) for i, j in self.edges if i in index and j in index]
        colors = {(index[i], index[j]): c for (i, j), c in self.colors.items() if i in index and j in index}
        return Graph.from_edges(len(vertices), edges, colors), index

    @cached_property
    def maximal_cliques(self) -> tuple[Clique, ...]:
        return tuple(maximal_cliques(self))


def maximal_cliques(g: Graph) -> list[Clique]:
    """All maximal cliques, lexicographically sorted.

    Bron-Kerbosch with Tomita pivoting. Isolated vertices come back as singleton
    cliques.
    """
    adj = g.adjacency
    out: list[Clique] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: len(p & adj[u]))
        for v in sorted(p - adj[pivot]):
            expand(r + [v], p & adj[v], x & adj[v])
            p.discard(v)
            x.add(v)

    if g.n == 0:
        return []
    expand([], set(range(g.n)), set())
    return sorted(out)


def clique_degree(g: Graph) -> int:
    if g.n == 0:
        return 0
    counts = [0] * g.n
    for c in g.maximal_cliques:
        for v in c:
            counts[v] += 1
    return max(counts)


def bfs_distances(g: Graph, source: int) -> list[int | None]:
    dist: list[int | None] = [None] * g.n
    dist[source] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] is None:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def graph_distance(g: Graph, i: int, j: int) -> int | None:
    return bfs_distances(g, i)[j]


def clique_distance(g: Graph, k: int, clique: Iterable[int], dist: list | None = None) -> int | None:
    """Minimum distance from ``k`` to a member of ``clique``; ``None`` if unreachable."""
    clique = list(clique)
    if not clique:
        raise ValueError("empty clique")
    if dist is None:
        dist = bfs_distances(g, k)
    reachable = [dist[v] for v in clique if dist[v] is not None]
    return min(reachable) if reachable else None


@dataclass(frozen=True)
class SphereProfile:
    center: int
    sizes: tuple[int, ...]

    def __getitem__(self, r: int) -> int:
        return self.sizes[r] if 0 <= r < len(self.sizes) else 0


def sphere_sizes(g: Graph, k: int) -> SphereProfile:
    sizes: list[int] = []
    for d in bfs_distances(g, k):
        if d is None:
            continue
        while len(sizes) <= d:
            sizes.append(0)
        sizes[d] += 1
    return SphereProfile(k, tuple(sizes))


def growth_bounded_by(g: Graph, f: Callable[[int], float]):
    """Check ``S_r(G, i) <= f(r)`` for every vertex and radius.

    Radii beyond a vertex's eccentricity have ``S_r = 0``; they are checked up
    to ``n`` so that envelopes which go negative are still caught.
    Returns a :class:`Check` whose witness is ``(vertex, r)``.
    """
    from ._check import Check

    for i in range(g.n):
        sizes = sphere_sizes(g, i).sizes
        for r in range(max(g.n, 1)):
            s = sizes[r] if r < len(sizes) else 0
            if s > f(r):
                return Check(False, (i, r))
    return Check(True)


def is_cut(g: Graph, a_set: Iterable[int], u_set: Iterable[int], w_set: Iterable[int]) -> bool:
    """True iff every path from ``U`` to ``W`` passes through ``A``."""
    a = set(a_set)
    sources = set(u_set) - a
    targets = set(w_set) - a
    if sources & targets:
        return False
    seen = set(sources)
    queue = deque(sources)
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in a or v in seen:
                continue
            if v in targets:
                return False
            seen.add(v)
            queue.append(v)
    return True


def amalgamate(g: Graph, i: int, j: int) -> tuple[Graph, dict[int, int]]:
    """Merge ``i`` and ``j`` into one vertex placed at index ``min(i, j)``.

    The merged vertex is adjacent to ``(N(i) | N(j)) - {i, j}``; every other
    adjacency is kept and the remaining vertices keep their relative order.
    Edge colors survive only on edges not touching the merged pair.
    """
    if i == j:
        raise ValueError("cannot amalgamate a vertex with itself")
    lo, hi = min(i, j), max(i, j)
    relabel = {}
    for v in range(g.n):
        if v == hi:
            relabel[v] = lo
        elif v > hi:
            relabel[v] = v - 1
        else:
            relabel[v] = v
    edges = set()
    for a, b in g.edges:
        ra, rb = relabel[a], relabel[b]
        if ra != rb:
            edges.add(_edge(ra, rb))
    colors = {
        _edge(relabel[a], relabel[b]): c for (a, b), c in g.colors.items() if not ({a, b} & {i, j})
    }
    return Graph.from_edges(g.n - 1, edges, colors), relabel


# -- generators -------------------------------------------------------------


def grid(n: int) -> Graph:
    """``n x n`` grid, vertices numbered row-major."""
    edges = []
    for r in range(n):
        for c in range(n):
            v = r * n + c
            if c + 1 < n:
                edges.append((v, v + 1))
            if r + 1 < n:
                edges.append((v, v + n))
    return Graph.from_edges(n * n, edges)


def binary_tree(k: int) -> Graph:
    """Complete binary tree of depth ``k`` in level order; root is 0."""
    n = 2 ** (k + 1) - 1
    return Graph.from_edges(n, [(v, c) for v in range(n) for c in (2 * v + 1, 2 * v + 2) if c < n])


def tree_level(v: int) -> int:
    return (v + 1).bit_length() - 1


def cycle(n: int) -> Graph:
    if n < 3:
        return line(n)
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def line(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(n: int) -> Graph:
    """Vertex 0 joined to ``1..n-1``."""
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = SplitMix64(seed)
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def color_edges(g: Graph, rule) -> Graph:
    """Attach blue/red colors to every edge.

    ``rule`` is ``"blue"``, ``"red"``, ``"alternate"`` (by position in the
    sorted edge list), an ``int`` seed, or ``"seed:<int>"`` for a seeded uniform
    coloring.
    """
    edges = g.sorted_edges()
    if isinstance(rule, str) and rule.startswith("seed:"):
        rule = int(rule[5:])
    if isinstance(rule, bool):
        raise TypeError("coloring rule must not be a bool")
    if isinstance(rule, int):
        rng = SplitMix64(rule)
        colors = {e: BLUE if rng.below(2) == 0 else RED for e in edges}
    elif rule == BLUE or rule == RED:
        colors = {e: rule for e in edges}
    elif rule == "alternate":
        colors = {e: BLUE if k % 2 == 0 else RED for k, e in enumerate(edges)}
    else:
        raise ValueError(f"unknown coloring rule {rule!r}")
    return Graph.from_edges(g.n, g.edges, colors)


FAMILIES = {"grid": grid, "binary_tree": binary_tree, "cycle": cycle, "line": line, "star": star}


def generate(family: str, size: int, coloring=None) -> Graph:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(FAMILIES)}")
    if size < 0:
        raise ValueError("size must be nonnegative")
    g = FAMILIES[family](size)
    return g if coloring is None else color_edges(g, coloring)
