"""Command-line front end.

Exit codes: 0 when the checked property holds, 1 on a property violation
(a machine-readable witness is printed), 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, kernels
from . import dynamics as dy
from . import jsonio as jio
from ._check import (
    CapExceeded,
    GPGError,
    NotAPotentialGame,
    NotGraphLocal,
    RejectedMove,
)
from .decomposition import (
    OffsetPreconditionError,
    ResidualDependenceError,
    bound_and_integrality,
    decompose,
    extract_offsets,
    synthesize_game,
    synthesize_with_offsets,
)
from .game import exact_potential, hessian, is_graphical, normalize
from .graph import FAMILIES, Graph, clique_degree, generate
from .mrf import (
    GLOBAL_MARKOV_MAX_PLAYERS,
    global_markov,
    is_positive,
    pairwise_markov,
    psi,
)
from .rng import SplitMix64

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Context:
    """Per-invocation state: input digests for the manifest and output options."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict = {}
        self.seed = getattr(args, "seed", None)

    def load(self, path: str) -> dict:
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        self.inputs[path] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise UsageError(f"{path}: malformed JSON ({exc})") from None

    def parse(self, path: str, decoder):
        data = self.load(path)
        try:
            return decoder(data)
        except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError, CapExceeded) as exc:
            raise UsageError(f"{path}: invalid contents ({type(exc).__name__}: {exc})") from None

    @property
    def fl(self) -> bool:
        return self.args.float


# -- commands ----------------------------------------------------------------


def _load_game(ctx: Context, path: str, with_decomposition: bool = False):
    """A game file, or a decomposition file standing for its synthesized game."""
    data = ctx.load(path)
    try:
        if "tables" in data:
            d = jio.decomposition_from_json(data)
            game = synthesize_game(d)
        else:
            d, game = None, jio.game_from_json(data)
        return (game, d) if with_decomposition else game
    except (KeyError, TypeError, ValueError, IndexError, CapExceeded) as exc:
        raise UsageError(f"{path}: invalid game ({type(exc).__name__}: {exc})") from None


def _check_sizes(game, graph: Graph):
    if game.space.n != graph.n:
        raise UsageError(f"game has {game.space.n} players but graph has {graph.n} vertices")


def cmd_verify(ctx: Context):
    game, given = _load_game(ctx, ctx.args.game, with_decomposition=True)
    graph = ctx.parse(ctx.args.graph, jio.graph_from_json)
    _check_sizes(game, graph)
    report: dict = {"players": game.space.n, "profiles": game.space.size, "D": clique_degree(graph)}
    graphical = is_graphical(game, graph)
    report["graphical"] = bool(graphical)
    if not graphical:
        i, j, a = graphical.witness
        report["graphical_witness"] = {"player": i, "non_neighbor": j, "profile": list(a)}
    try:
        pot = exact_potential(game)
    except NotAPotentialGame as exc:
        report["potential"] = False
        report["improvement_cycle"] = [list(a) for a in exc.cycle]
        return report, EXIT_VIOLATION
    report["potential"] = True
    matrix = []
    for i, j in graph.non_edges():
        zero = all(hessian(pot, i, j, a) == 0 for a in game.space.profiles())
        matrix.append([i, j, zero])
    report["hessian_non_edges"] = matrix
    if not graphical:
        return report, EXIT_VIOLATION
    # M belongs to a decomposition, not to the game: use the supplied one when
    # it lives on this graph, else the canonical one.
    d = given if given is not None and given.graph == graph else decompose(pot, graph)
    M, integral = bound_and_integrality(d)
    report["decomposition"] = "supplied" if d is given else "canonical"
    report["M"] = jio.num(M, ctx.fl)
    report["integral"] = integral
    return report, EXIT_OK


def cmd_decompose(ctx: Context):
    graph = ctx.parse(ctx.args.graph, jio.graph_from_json)
    data = ctx.load(ctx.args.input)
    try:
        pot = jio.potential_from_json(data) if "phi" in data else None
        game = None if pot is not None else jio.game_from_json(data)
    except (KeyError, TypeError, ValueError, IndexError, CapExceeded) as exc:
        raise UsageError(f"{ctx.args.input}: invalid contents ({exc})") from None
    if pot is None:
        try:
            pot = exact_potential(game)
        except NotAPotentialGame as exc:
            return {"error": "not a potential game", "improvement_cycle": [list(a) for a in exc.cycle]}, EXIT_VIOLATION
    _check_sizes(pot, graph)
    try:
        d = decompose(pot, graph, method=ctx.args.method)
    except NotGraphLocal as exc:
        return {"error": "not graph-local", "subset": list(exc.subset), "profile": list(exc.profile)}, EXIT_VIOLATION
    return jio.decomposition_to_json(d, ctx.fl), EXIT_OK


def cmd_synthesize(ctx: Context):
    d = ctx.parse(ctx.args.decomposition, jio.decomposition_from_json)
    if ctx.args.offsets:
        f = ctx.parse(ctx.args.offsets, jio.offsets_from_json)
        try:
            game = synthesize_with_offsets(d, f)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        game = synthesize_game(d)
    return jio.game_to_json(game, ctx.fl), EXIT_OK


def cmd_offsets(ctx: Context):
    game = _load_game(ctx, ctx.args.game)
    d = ctx.parse(ctx.args.decomposition, jio.decomposition_from_json)
    try:
        f = extract_offsets(game, d)
    except OffsetPreconditionError as exc:
        return {"error": "precondition", "reason": exc.reason, "witness": _plain(exc.witness)}, EXIT_VIOLATION
    except ResidualDependenceError as exc:
        return {"error": "residual dependence", "player": exc.player, "profile": list(exc.profile),
                "coordinate": exc.coordinate}, EXIT_VIOLATION
    return jio.offsets_to_json(f, ctx.fl), EXIT_OK


def _plain(x):
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (int, Fraction)):
        return jio.num(x)
    return x


def cmd_mrf_check(ctx: Context):
    graph = ctx.parse(ctx.args.graph, jio.graph_from_json)
    data = ctx.load(ctx.args.input)
    if "p" in data:
        dist = ctx.parse(ctx.args.input, jio.distribution_from_json)
    else:
        game = _load_game(ctx, ctx.args.input)
        try:
            dist = psi(normalize(exact_potential(game)))
        except NotAPotentialGame as exc:
            return {"error": "not a potential game", "improvement_cycle": [list(a) for a in exc.cycle]}, EXIT_VIOLATION
    if dist.n != graph.n:
        raise UsageError("distribution and graph sizes differ")
    report: dict = {"positive": is_positive(dist)}
    pw = pairwise_markov(dist, graph)
    report["pairwise_markov"] = bool(pw)
    if not pw:
        i, j, (xu, xw, xa) = pw.witness
        report["pairwise_witness"] = {"i": i, "j": j, "x_i": list(xu), "x_j": list(xw), "x_rest": list(xa)}
    ok = bool(pw)
    if dist.n <= ctx.args.global_cap:
        gm = global_markov(dist, graph, ctx.args.global_cap)
        report["global_markov"] = bool(gm)
        if not gm:
            u, w, a, (xu, xw, xa) = gm.witness
            report["global_witness"] = {"U": list(u), "W": list(w), "A": list(a),
                                        "x_U": list(xu), "x_W": list(xw), "x_A": list(xa)}
        ok = ok and bool(gm)
    else:
        report["global_markov"] = None
    return report, EXIT_OK if ok else EXIT_VIOLATION


def cmd_bound(ctx: Context):
    a = ctx.args
    M = Fraction(a.M) if a.M is not None else None
    if a.envelope:
        if a.D is None or M is None:
            raise UsageError("--envelope needs --D and --M")
        try:
            rep = dy.update_bound_envelope(a.envelope, a.D, M)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(str(exc)) from None
        out = jio.bound_to_json(rep, ctx.fl)
    else:
        if not a.graph:
            raise UsageError("either --graph or --envelope is required")
        graph = ctx.parse(a.graph, jio.graph_from_json)
        d = ctx.parse(a.decomposition, jio.decomposition_from_json) if a.decomposition else None
        players = [a.player] if a.player is not None else list(range(graph.n))
        try:
            reports = [dy.update_bound(graph, k, a.D, M, d) for k in players]
        except ValueError as exc:
            return {"error": str(exc)}, EXIT_VIOLATION
        out = [jio.bound_to_json(r, ctx.fl) for r in reports]
        out = out[0] if a.player is not None else out
    if a.corollary is not None:
        if a.D is None or M is None:
            raise UsageError("--corollary needs --D and --M")
        c = Fraction(a.corollary)
        value = dy.corollary_bound(c, a.D, M)
        env = dy.growth_envelope(c, a.D, M)
        extra = {"c": jio.num(c, ctx.fl), "bound": jio.num(value, ctx.fl), "growth_envelope": env.text}
        out = {"bound": out, "corollary": extra}
    return out, EXIT_OK


def _parse_init(spec: str | None, n: int, m, seed: int):
    if spec is None or spec == "zeros":
        return (0,) * n
    if spec == "random":
        gen = SplitMix64(seed ^ 0x5EED)
        return tuple(gen.below(mi) for mi in m)
    try:
        vals = tuple(int(x) for x in spec.split(","))
    except ValueError:
        raise UsageError(f"--init expects zeros, random or comma-separated ints, got {spec!r}") from None
    if len(vals) != n:
        raise UsageError(f"--init has {len(vals)} entries for {n} players")
    return vals


def cmd_simulate(ctx: Context):
    a = ctx.args
    if a.schedule == "wave":
        if a.depth is None:
            raise UsageError("--schedule wave needs --depth")
        graph = generate("binary_tree", a.depth)
        d = dy.majority_decomposition(graph)
    elif a.decomposition:
        d = ctx.parse(a.decomposition, jio.decomposition_from_json)
        graph = d.graph
    elif a.graph:
        graph = ctx.parse(a.graph, jio.graph_from_json)
        colored = len(graph.colors) == len(graph.edges)
        d = dy.externality_decomposition(graph) if colored and graph.edges else dy.majority_decomposition(graph)
    else:
        raise UsageError("one of --decomposition, --graph or --schedule wave is required")
    D = clique_degree(graph)
    M = max(Fraction(d.bound), Fraction(1))
    bounds = [dy.update_bound(graph, k, max(D, 1), M).bound_value for k in range(graph.n)] if d.integral else None
    seeds = [a.seed + s for s in range(a.seeds)]
    runs = []
    violations = []
    for seed in seeds:
        if a.schedule == "wave":
            init, moves = dy.wave_schedule(a.depth)
            sched = dy.ExplicitMoves(moves)
        else:
            init = _parse_init(a.init, graph.n, d.space.m, seed)
            if a.schedule == "roundrobin":
                sched = dy.RoundRobinBestResponse()
            elif a.schedule == "random":
                sched = dy.RandomBetterResponse(seed)
            elif a.schedule == "poisson":
                sched = dy.PoissonClock(seed)
            else:
                if not a.moves:
                    raise UsageError("--schedule file needs --moves")
                moves = ctx.parse(a.moves, lambda x: [(int(i), int(b)) for i, b in x])
                sched = dy.ExplicitMoves(moves)
        try:
            path = dy.run(d, init, sched, a.max_steps)
        except RejectedMove as exc:
            return {"error": "rejected move", "player": exc.player, "strategy": exc.strategy,
                    "gain": jio.num(exc.gain, ctx.fl)}, EXIT_VIOLATION
        rec = jio.path_to_json(path, ctx.fl, include_steps=not a.summary)
        if bounds is not None:
            over = [k for k, c in enumerate(path.per_player_updates) if c > bounds[k]]
            rec["compliant"] = not over
            for k in over:
                violations.append({"seed": seed, "player": k, "updates": path.per_player_updates[k],
                                   "bound": jio.num(bounds[k], ctx.fl)})
        else:
            rec["compliant"] = None
        if a.out_dir:
            os.makedirs(a.out_dir, exist_ok=True)
            name = os.path.join(a.out_dir, f"path-{seed}.json")
            with open(name, "w") as fh:
                fh.write(jio.dumps(rec))
            rec = {"seed": seed, "file": os.path.basename(name), "length": path.length, "stop": path.stop,
                   "max_updates": max(path.per_player_updates, default=0), "compliant": rec["compliant"]}
        runs.append(rec)
    out: dict = {
        "schedule": a.schedule,
        "players": graph.n,
        "D": D,
        "M": jio.num(M, ctx.fl),
        "runs": runs if len(seeds) > 1 or a.out_dir else None,
        "compliant": not violations if bounds is not None else None,
        "violations": violations,
    }
    if out["runs"] is None:
        out.update(path=runs[0])
        del out["runs"]
    if bounds is not None:
        out["max_bound"] = jio.num(max(bounds, default=0), ctx.fl)
    return out, EXIT_VIOLATION if violations else EXIT_OK


def cmd_generate(ctx: Context):
    a = ctx.args
    try:
        graph = generate(a.family, a.size, a.colors)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    if a.game is None:
        return jio.graph_to_json(graph), EXIT_OK
    if a.game == "externality":
        if a.colors is None:
            raise UsageError("--game externality needs --colors")
        d = dy.externality_decomposition(graph)
    else:
        d = dy.majority_decomposition(graph)
    return jio.decomposition_to_json(d, ctx.fl), EXIT_OK


# -- plumbing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--float", action="store_true", help="print rationals as decimals")
    common.add_argument("--manifest", help="write a run manifest (digests, seed, timing) to this file")

    parser = argparse.ArgumentParser(prog="gpgames", description="Graphical potential games toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check graphical and potential properties")
    p.add_argument("game", help="game or decomposition JSON")
    p.add_argument("graph", help="graph JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", parents=[common], help="split a potential into clique tables")
    p.add_argument("input", help="game or potential JSON")
    p.add_argument("graph", help="graph JSON")
    p.add_argument("--method", choices=["auto", "full", "cliques"], default="auto")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synthesize", parents=[common], help="build the game of a decomposition")
    p.add_argument("decomposition")
    p.add_argument("--offsets", help="neighbor-offset JSON to add to the utilities")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("offsets", parents=[common], help="recover neighbor offsets of a game")
    p.add_argument("game")
    p.add_argument("decomposition")
    p.set_defaults(func=cmd_offsets)

    p = sub.add_parser("mrf-check", parents=[common], help="Markov properties of a distribution")
    p.add_argument("input", help="distribution JSON, or a game JSON mapped through exp of its potential")
    p.add_argument("graph")
    p.add_argument("--global-cap", type=int, default=GLOBAL_MARKOV_MAX_PLAYERS,
                   help="largest player count for the exhaustive global check")
    p.set_defaults(func=cmd_mrf_check)

    p = sub.add_parser("bound", parents=[common], help="per-player update bounds")
    p.add_argument("--graph")
    p.add_argument("--player", type=int)
    p.add_argument("--decomposition")
    p.add_argument("--D", type=int)
    p.add_argument("--M")
    p.add_argument("--envelope", help='sphere-size envelope such as "4*r"')
    p.add_argument("--corollary", help="growth constant c; adds 8 c D^2 M^2")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", parents=[common], help="run better-response dynamics")
    p.add_argument("--graph", help="graph JSON; colored graphs give the externality game, else majority")
    p.add_argument("--decomposition")
    p.add_argument("--schedule", choices=["roundrobin", "random", "poisson", "wave", "file"], default="random")
    p.add_argument("--moves", help="JSON list of [player, strategy] for --schedule file")
    p.add_argument("--depth", type=int, help="tree depth for --schedule wave")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="run this many consecutive seeds")
    p.add_argument("--init", help="zeros (default), random, or comma-separated strategies")
    p.add_argument("--max-steps", type=int, default=10**7)
    p.add_argument("--summary", action="store_true", help="omit the step list")
    p.add_argument("--out-dir", help="write one file per seed plus an index")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", parents=[common], help="graph families and their games")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("size", type=int)
    p.add_argument("--colors", help="blue, red, alternate, or seed:N")
    p.add_argument("--game", choices=["externality", "majority"], help="emit the game's decomposition instead")
    p.set_defaults(func=cmd_generate)
    return parser


def _summary(result) -> dict:
    if isinstance(result, dict):
        return {k: v for k, v in result.items() if not isinstance(v, (list, dict)) or k == "violations"}
    return {"items": len(result)}


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ctx = Context(args)
    start = time.perf_counter()
    try:
        result, code = args.func(ctx)
    except UsageError as exc:
        print(f"gpgames: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"gpgames: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GPGError as exc:
        print(json.dumps({"error": str(exc)}))
        return EXIT_VIOLATION
    text = jio.dumps(result)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.manifest:
        manifest = {
            "command": args.command,
            "argv": list(argv) if argv is not None else sys.argv[1:],
            "inputs": ctx.inputs,
            "seed": ctx.seed,
            "version": __version__,
            "backend": kernels.BACKEND,
            "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
            "elapsed_seconds": round(time.perf_counter() - start, 6),
            "exit_code": code,
            "result": _summary(result),
        }
        with open(args.manifest, "w") as fh:
            fh.write(json.dumps(manifest, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
