"""JSON encodings of graphs, games, decompositions, distributions and paths.

Exact values are written as integers or ``"p/q"`` strings; ``as_float=True``
turns rationals into decimals for reading by eye.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .decomposition import LocalDecomposition, NeighborOffsets
from .dynamics import BoundReport, PathRecord, Step
from .game import Game, Potential, StrategySpace
from .graph import Graph
from .mrf import Distribution


def num(v, as_float: bool = False):
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return v.numerator
        return float(v) if as_float else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return v
    if hasattr(v, "item"):  # numpy scalar
        return num(v.item(), as_float)
    raise TypeError(f"cannot encode {type(v).__name__}")


def parse_num(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, str):
        f = Fraction(v.strip())
        return f.numerator if f.denominator == 1 else f
    raise ValueError(f"not a number: {v!r}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


# -- graph -------------------------------------------------------------------


def graph_to_json(g: Graph) -> dict:
    out: dict = {"n": g.n, "edges": [list(e) for e in g.sorted_edges()]}
    if g.colors:
        out["colors"] = [[f"{i}-{j}", g.colors[(i, j)]] for i, j in g.sorted_edges() if (i, j) in g.colors]
    return out


def graph_from_json(d: dict) -> Graph:
    colors = {}
    for key, c in d.get("colors", []):
        i, j = (int(x) for x in key.split("-"))
        colors[(i, j)] = c
    return Graph.from_edges(int(d["n"]), [tuple(map(int, e)) for e in d["edges"]], colors)


# -- games and potentials -----------------------------------------------------


def space_from_json(d: dict) -> StrategySpace:
    return StrategySpace(tuple(d["m"]), tuple(d["o"]) if d.get("o") is not None else None)


def game_to_json(g: Game, as_float: bool = False) -> dict:
    return {
        "m": list(g.space.m),
        "o": list(g.space.o),
        "u": [[num(v, as_float) for v in t] for t in g.utilities],
    }


def game_from_json(d: dict) -> Game:
    return Game(space_from_json(d), tuple([parse_num(v) for v in t] for t in d["u"]))


def potential_to_json(p: Potential, as_float: bool = False) -> dict:
    return {
        "m": list(p.space.m),
        "o": list(p.space.o),
        "phi": [num(v, as_float) for v in p.values],
        "normalized": p.normalized,
    }


def potential_from_json(d: dict) -> Potential:
    return Potential(space_from_json(d), [parse_num(v) for v in d["phi"]], bool(d.get("normalized", False)))


# -- decompositions -----------------------------------------------------------


def decomposition_to_json(d: LocalDecomposition, as_float: bool = False) -> dict:
    return {
        "graph": graph_to_json(d.graph),
        "m": list(d.space.m),
        "o": list(d.space.o),
        "cliques": [list(c) for c in d.cliques],
        "tables": [[num(v, as_float) for v in t] for t in d.tables],
        "M": num(Fraction(d.bound), as_float) if not isinstance(d.bound, float) else d.bound,
        "integral": d.integral,
        "constant": num(d.constant, as_float),
    }


def decomposition_from_json(d: dict) -> LocalDecomposition:
    graph = graph_from_json(d["graph"])
    m = d.get("m", [2] * graph.n)
    space = StrategySpace(tuple(m), tuple(d["o"]) if d.get("o") is not None else None)
    cliques = [tuple(c) for c in d["cliques"]]
    if cliques != list(graph.maximal_cliques):
        raise ValueError("listed cliques are not the maximal cliques of the graph")
    tables = tuple([parse_num(v) for v in t] for t in d["tables"])
    return LocalDecomposition(graph, space, tables, parse_num(d.get("constant", 0)))


def offsets_to_json(f: NeighborOffsets, as_float: bool = False) -> dict:
    return {
        "neighbors": [list(nb) for nb in f.neighbors],
        "tables": [[num(v, as_float) for v in t] for t in f.tables],
    }


def offsets_from_json(d: dict) -> NeighborOffsets:
    return NeighborOffsets(
        tuple(tuple(nb) for nb in d["neighbors"]), tuple([parse_num(v) for v in t] for t in d["tables"])
    )


# -- distributions ------------------------------------------------------------


def distribution_to_json(dist: Distribution, as_float: bool = False) -> dict:
    return {"m": list(dist.space.m), "p": [num(v, as_float) for v in dist.p]}


def distribution_from_json(d: dict) -> Distribution:
    return Distribution(space_from_json(d), [parse_num(v) for v in d["p"]])


# -- paths and bounds ---------------------------------------------------------


def path_to_json(p: PathRecord, as_float: bool = False, include_steps: bool = True) -> dict:
    out: dict = {"init": list(p.initial)}
    if include_steps:
        out["steps"] = [[s.t, s.player, s.old, s.new, str(num(s.gain, as_float))] for s in p.steps]
    out["length"] = p.length
    out["counts"] = {str(i): c for i, c in enumerate(p.per_player_updates)}
    out["final"] = list(p.final)
    out["stop"] = p.stop
    out["seed"] = p.seed
    if p.rng is not None:
        out["rng"] = p.rng
    if p.times is not None and include_steps:
        out["times"] = p.times
    return out


def path_from_json(d: dict) -> PathRecord:
    steps = [Step(int(t), int(i), int(o), int(b), parse_num(g)) for t, i, o, b, g in d["steps"]]
    counts = [d["counts"][str(i)] for i in range(len(d["init"]))] if "counts" in d else []
    return PathRecord(tuple(d["init"]), steps, tuple(d["final"]), d["stop"], d.get("seed"), d.get("rng"),
                      d.get("times"), counts)


def bound_to_json(b: BoundReport, as_float: bool = False) -> dict:
    out: dict = {
        "player": b.player,
        "D": b.D,
        "M": num(b.M, as_float),
        "lambda": num(b.lam, as_float),
        "mode": b.mode,
        "bound_value": num(b.bound_value, as_float),
    }
    if b.sphere is not None:
        out["sphere"] = list(b.sphere)
    if b.envelope is not None:
        out["envelope"] = b.envelope
    if b.corollary_inputs is not None:
        c, value = b.corollary_inputs
        out["corollary"] = {"c": num(c, as_float), "bound": num(value, as_float)}
    return out
