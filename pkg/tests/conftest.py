from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from gpgames.decomposition import LocalDecomposition, local_size
from gpgames.game import StrategySpace
from gpgames.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 6) -> Graph:
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def random_space(rng: random.Random, n: int, max_m: int = 3, random_o: bool = True) -> StrategySpace:
    m = tuple(rng.randint(1, max_m) for _ in range(n))
    o = tuple(rng.randrange(mi) for mi in m) if random_o else None
    return StrategySpace(m, o)


def random_value(rng: random.Random, lo: int = -3, hi: int = 3, rational: bool = True):
    v = rng.randint(lo, hi)
    if rational and rng.random() < 0.3:
        return Fraction(v, rng.randint(1, 4))
    return v


def random_decomposition(rng: random.Random, graph: Graph, space: StrategySpace, **kw) -> LocalDecomposition:
    tables = tuple(
        [random_value(rng, **kw) for _ in range(local_size(space, c))] for c in graph.maximal_cliques
    )
    return LocalDecomposition(graph, space, tables)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "error":
                continue
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" in props:
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL", props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, verdict, detail in sorted(lines):
            terminalreporter.write_line(f"criterion {num:>2}: {verdict}  {detail}")
