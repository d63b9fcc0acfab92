from __future__ import annotations

import json

import pytest

from gpgames.cli import main


def call(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def grid_files(tmp_path, capsys):
    g, d = tmp_path / "g.json", tmp_path / "d.json"
    assert main(["generate", "grid", "3", "--colors", "seed:2", "-o", str(g)]) == 0
    assert main(["generate", "grid", "3", "--colors", "seed:2", "--game", "externality", "-o", str(d)]) == 0
    capsys.readouterr()
    return str(g), str(d)


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("gpgames ")


def test_no_command():
    assert main([]) == 2


class TestVerify:
    def test_generated_game(self, capsys, grid_files):
        g, d = grid_files
        code, rep = call(capsys, "verify", d, g)
        assert code == 0
        assert rep["graphical"] and rep["potential"] and rep["integral"] and rep["M"] == 1
        assert rep["D"] == 4 and all(z for _, _, z in rep["hessian_non_edges"])

    def test_plain_game_file(self, capsys, tmp_path, grid_files):
        g, d = grid_files
        game = tmp_path / "game.json"
        assert main(["synthesize", d, "-o", str(game)]) == 0
        code, rep = call(capsys, "verify", game, g)
        assert code == 0 and rep["decomposition"] == "canonical"

    def test_non_potential(self, capsys, tmp_path):
        game = write(tmp_path, "p.json", {"m": [2, 2], "o": [0, 0], "u": [[1, -1, -1, 1], [-1, 1, 1, -1]]})
        graph = write(tmp_path, "e.json", {"n": 2, "edges": [[0, 1]]})
        code, rep = call(capsys, "verify", game, graph)
        assert code == 1 and not rep["potential"]
        cycle = rep["improvement_cycle"]
        assert len(cycle) >= 4

    def test_not_graphical(self, capsys, tmp_path):
        game = write(tmp_path, "c.json", {"m": [2, 2], "o": [0, 0], "u": [[1, 0, 0, 1], [1, 0, 0, 1]]})
        graph = write(tmp_path, "e.json", {"n": 2, "edges": []})
        code, rep = call(capsys, "verify", game, graph)
        assert code == 1 and not rep["graphical"] and rep["graphical_witness"]["non_neighbor"] in (0, 1)

    def test_malformed(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["verify", str(bad), str(bad)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["verify", str(tmp_path / "nope.json"), str(tmp_path / "nope.json")]) == 2

    def test_size_mismatch(self, tmp_path, grid_files):
        _, d = grid_files
        graph = write(tmp_path, "e.json", {"n": 2, "edges": [[0, 1]]})
        assert main(["verify", d, graph]) == 2


class TestDecomposeSynthesize:
    def test_roundtrip(self, capsys, tmp_path, grid_files):
        g, d = grid_files
        game = tmp_path / "game.json"
        main(["synthesize", d, "-o", str(game)])
        code, dec = call(capsys, "decompose", game, g)
        assert code == 0 and dec["integral"] and len(dec["cliques"]) == 12

    def test_not_graph_local(self, capsys, tmp_path):
        pot = write(tmp_path, "phi.json", {"m": [2, 2], "o": [0, 0], "phi": [0, 0, 0, 1]})
        graph = write(tmp_path, "e.json", {"n": 2, "edges": []})
        code, rep = call(capsys, "decompose", pot, graph)
        assert code == 1 and rep["error"] == "not graph-local"

    def test_offsets(self, capsys, tmp_path):
        d = write(tmp_path, "d.json", {
            "graph": {"n": 2, "edges": [[0, 1]]}, "cliques": [[0, 1]], "tables": [[1, 0, 0, 1]],
        })
        off = write(tmp_path, "f.json", {"neighbors": [[1], [0]], "tables": [[0, 3], [0, 2]]})
        game = tmp_path / "game.json"
        assert main(["synthesize", d, "--offsets", off, "-o", str(game)]) == 0
        code, rec = call(capsys, "offsets", game, d)
        assert code == 0
        assert rec["tables"] == [[0, 3], [0, 2]]


class TestMrf:
    def test_game_through_psi(self, capsys, grid_files):
        g, d = grid_files
        code, rep = call(capsys, "mrf-check", d, g)
        assert code == 0 and rep["pairwise_markov"] and rep["positive"]

    def test_dependent_distribution(self, capsys, tmp_path):
        dist = write(tmp_path, "p.json", {"m": [2, 2], "p": ["1/3", "1/6", "1/6", "1/3"]})
        graph = write(tmp_path, "e.json", {"n": 2, "edges": []})
        code, rep = call(capsys, "mrf-check", dist, graph)
        assert code == 1 and not rep["pairwise_markov"]


class TestBound:
    def test_envelope(self, capsys):
        code, rep = call(capsys, "bound", "--envelope", "4*r", "--D", "4", "--M", "1")
        assert code == 0 and rep["bound_value"] == 1792 and rep["lambda"] == "7/8"

    def test_float(self, capsys):
        _, rep = call(capsys, "bound", "--envelope", "4*r", "--D", "4", "--M", "1", "--float")
        assert rep["lambda"] == 0.875

    def test_graph(self, capsys, tmp_path):
        graph = write(tmp_path, "c.json", {"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]]})
        code, rep = call(capsys, "bound", "--graph", graph, "--player", "0", "--D", "2", "--M", "1")
        assert code == 0 and rep["bound_value"] == "29/2" and rep["mode"] == "finite"

    def test_corollary(self, capsys):
        code, rep = call(capsys, "bound", "--envelope", "2", "--D", "3", "--M", "1", "--corollary", "1")
        assert code == 0 and rep["corollary"]["bound"] == 72

    def test_understated_D(self, capsys, grid_files):
        g, _ = grid_files
        code, rep = call(capsys, "bound", "--graph", g, "--D", "2", "--M", "1")
        assert code == 1 and "error" in rep

    def test_missing_inputs(self):
        assert main(["bound"]) == 2
        assert main(["bound", "--envelope", "4*r"]) == 2


class TestSimulate:
    def test_wave(self, capsys):
        code, rep = call(capsys, "simulate", "--schedule", "wave", "--depth", "8")
        assert code == 0 and rep["path"]["counts"]["0"] == 8 and rep["compliant"]

    def test_random_seeds(self, capsys, grid_files):
        g, _ = grid_files
        code, rep = call(capsys, "simulate", "--graph", g, "--seeds", "5", "--init", "random", "--summary")
        assert code == 0 and len(rep["runs"]) == 5 and all(r["compliant"] for r in rep["runs"])
        assert all("steps" not in r for r in rep["runs"])

    @pytest.mark.parametrize("schedule", ["roundrobin", "random", "poisson"])
    def test_schedules(self, capsys, grid_files, schedule):
        g, _ = grid_files
        code, rep = call(capsys, "simulate", "--graph", g, "--schedule", schedule, "--init", "0,1,0,1,0,1,0,1,0",
                         "--seed", "4")
        assert code == 0 and rep["path"]["stop"] == "equilibrium"

    def test_moves_file(self, capsys, tmp_path):
        graph = write(tmp_path, "e.json", {"n": 2, "edges": [[0, 1]]})
        good = write(tmp_path, "m.json", [[0, 1]])
        code, rep = call(capsys, "simulate", "--graph", graph, "--schedule", "file", "--moves", good,
                         "--init", "0,1")
        assert code == 0 and rep["path"]["final"] == [1, 1]
        bad = write(tmp_path, "b.json", [[0, 1]])
        code, rep = call(capsys, "simulate", "--graph", graph, "--schedule", "file", "--moves", bad, "--init", "0,0")
        assert code == 1 and rep["error"] == "rejected move" and rep["player"] == 0

    def test_out_dir(self, capsys, tmp_path, grid_files):
        g, _ = grid_files
        out = tmp_path / "runs"
        code, rep = call(capsys, "simulate", "--graph", g, "--seeds", "3", "--init", "random", "--out-dir", out)
        assert code == 0 and sorted(p.name for p in out.iterdir()) == ["path-0.json", "path-1.json", "path-2.json"]
        assert [r["file"] for r in rep["runs"]] == ["path-0.json", "path-1.json", "path-2.json"]

    def test_bad_init(self, grid_files):
        g, _ = grid_files
        assert main(["simulate", "--graph", g, "--init", "1,2"]) == 2
        assert main(["simulate", "--schedule", "wave"]) == 2


class TestDeterminism:
    def test_generate_stable(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["generate", "grid", "5", "--colors", "seed:7", "-o", str(a)])
        main(["generate", "grid", "5", "--colors", "seed:7", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()
        assert len(json.loads(a.read_bytes())["colors"]) == 40

    def test_simulate_double_run(self, tmp_path, grid_files):
        g, _ = grid_files
        outs = []
        for name in ("x.json", "y.json"):
            p = tmp_path / name
            main(["simulate", "--graph", g, "--seed", "11", "--init", "random", "-o", str(p)])
            outs.append(p.read_bytes())
        assert outs[0] == outs[1]

    def test_manifest(self, tmp_path, grid_files):
        g, d = grid_files
        out, man = tmp_path / "out.json", tmp_path / "man.json"
        assert main(["verify", d, g, "-o", str(out), "--manifest", str(man)]) == 0
        data = json.loads(man.read_text())
        assert data["command"] == "verify" and data["exit_code"] == 0
        assert set(data["inputs"]) == {d, g}
        import hashlib

        assert data["output_sha256"] == hashlib.sha256(out.read_bytes()).hexdigest()
        assert data["backend"] in ("cython", "python")

    def test_unknown_color_spec(self):
        assert main(["generate", "grid", "3", "--colors", "purple"]) == 2
