import json

import pytest

from uniparity.cli import atomic_write, main
from uniparity.trees import Complete, Parys, Succinct

SELF_LOOP = "parity 0;\n0 2 0 0;\n"


@pytest.fixture
def game_file(tmp_path):
    def make(text, name="g.pg"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return make


def test_trees_stats(capsys):
    assert main(["trees", "--family", "p", "-n", "2", "-H", "2", "--stats"]) == 0
    assert capsys.readouterr().out.split() == ["height=2", "leaves=5", "nodes=9"]


def test_trees_dump_and_node_limit(capsys):
    assert main(["trees", "--family", "s", "-n", "2", "-H", "1", "--dump"]) == 0
    assert capsys.readouterr().out.strip() == "[[][][]]"
    assert main(["trees", "--family", "c", "-n", "9", "-H", "6", "--dump"]) == 2


def test_trees_stats_for_huge_succinct_tree(capsys):
    assert main(["trees", "--family", "s", "-n", str(2**40), "-H", "6"]) == 0
    out = dict(kv.split("=") for kv in capsys.readouterr().out.split())
    assert int(out["height"]) == 6 and int(out["leaves"]) > 2**40


def test_solve_self_loop(game_file, capsys):
    path = game_file(SELF_LOOP)
    assert main(["solve", path, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["w_even"] == [0] and data["w_odd"] == []
    assert main(["solve", path]) == 0
    assert "w_even: 0" in capsys.readouterr().out


@pytest.mark.parametrize("extra", [
    ["--solver", "mz"], ["--solver", "mz-enhanced"], ["--tree", "parys", "--rule", "parys-blocks"],
    ["--tree", "complete", "--player", "odd"], ["--symbolic", "per-frame"],
    ["--symbolic", "succinct", "--rule", "empty-set"],
])
def test_solve_options_agree(game_file, capsys, extra):
    path = game_file("parity 3;\n0 1 1 1,2;\n1 2 0 0,3;\n2 3 1 2;\n3 0 0 1;\n")
    assert main(["solve", path, "--json"] + extra) == 0
    data = json.loads(capsys.readouterr().out)
    assert (data["w_even"], data["w_odd"]) == ([1, 3], [0, 2])


def test_solve_with_explicit_trees(game_file, tmp_path, capsys):
    path = game_file(SELF_LOOP)
    trees = tmp_path / "trees.txt"
    trees.write_text("[[]]\n[[][]]\n")
    assert main(["solve", path, "--tree", f"explicit:{trees}", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["w_even"] == [0]
    trees.write_text("[[\n")
    assert main(["solve", path, "--tree", f"explicit:{trees}"]) == 2


def test_usage_and_parse_errors_exit_two(game_file, capsys):
    assert main(["solve", game_file("0 x 0 0;\n")]) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["solve", game_file("0 0 0;\n")]) == 2
    assert main(["solve", game_file(SELF_LOOP), "--solver", "mz", "--rule", "empty-set"]) == 2
    assert main(["solve", "/nonexistent/game.pg"]) == 2
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
    assert main(["gen", "-n", "0"]) == 2


def test_output_file_is_written(game_file, tmp_path):
    out = tmp_path / "r.json"
    assert main(["solve", game_file(SELF_LOOP), "--json", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["w_even"] == [0]


def test_verify_round_trip_and_tampering(game_file, tmp_path, capsys):
    path = game_file("parity 1;\n0 2 0 0,1;\n1 1 1 1,0;\n")
    witness = tmp_path / "w.json"
    assert main(["verify", path, "--emit-witness", str(witness)]) == 0
    assert main(["verify", path, "--witness", str(witness)]) == 0
    assert "OK" in capsys.readouterr().out
    data = json.loads(witness.read_text())
    data["w_even"], data["w_odd"] = data["w_odd"], data["w_even"]
    witness.write_text(json.dumps(data))
    assert main(["verify", path, "--witness", str(witness)]) == 1
    assert "FAIL" in capsys.readouterr().out
    witness.write_text("not json")
    assert main(["verify", path, "--witness", str(witness)]) == 2
    assert main(["verify", path]) == 2


def test_gen_is_deterministic(capsys):
    args = ["gen", "--kind", "random", "-n", "12", "-d", "5", "--seed", "3"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert first.startswith("parity 11;\n")
    assert main(["gen", "--kind", "ladder", "--levels", "2"]) == 0
    assert main(["gen", "--kind", "cycle", "-n", "4", "-d", "1"]) == 0


def test_duplicate_edge_warning_and_quiet(game_file, caplog):
    path = game_file("0 0 0 0,0;\n")
    assert main(["solve", path]) == 0
    assert "duplicate" in caplog.text
    caplog.clear()
    assert main(["-q", "solve", path]) == 0
    assert "duplicate" not in caplog.text


def test_bench_is_deterministic_apart_from_time(tmp_path, capsys):
    suite = tmp_path / "suite"
    suite.mkdir()
    for seed in range(4):
        assert main(["gen", "-n", "7", "-d", "4", "--seed", str(seed), "-o", str(suite / f"g{seed}.pg")]) == 0
    (suite / "notes.txt").write_text("ignored")
    runs = []
    for _ in range(2):
        assert main(["bench", "--suite", str(suite), "--symbolic", "succinct", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        for row in data["games"]:
            assert row.pop("wall_time_s") >= 0
        runs.append(data)
    assert runs[0] == runs[1]
    assert [r["file"] for r in runs[0]["games"]] == ["g0.pg", "g1.pg", "g2.pg", "g3.pg"]
    assert all(r["peak_live_variables"] for r in runs[0]["games"])
    assert main(["bench", "--suite", str(tmp_path / "missing")]) == 2


def test_atomic_write_replaces_file(tmp_path):
    target = tmp_path / "x.txt"
    target.write_text("old")
    atomic_write(target, "new")
    assert target.read_text() == "new"
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]


def test_family_stats_match_materialized_trees():
    from uniparity.cli import family_stats
    from uniparity.trees import leaves, node_count
    for fam in (Complete(3, 3), Parys(3, 3), Parys(6, 2), Succinct(5, 3), Succinct(0, 2)):
        t = fam.materialize()
        assert family_stats(fam) == {"height": fam.height(), "leaves": leaves(t), "nodes": node_count(t)}
