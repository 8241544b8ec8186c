import json

from imtw.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_gen_and_solve_mwis_c5(tmp_path, capsys):
    graph_file = tmp_path / "c5.gr"
    td_file = tmp_path / "c5.td"
    code, report, _ = run_cli(capsys, "gen", "cycle", "5", "-o", str(graph_file))
    assert code == 0 and report["result"]["n"] == 5
    code, report, _ = run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    assert code == 0 and report["verification"]["valid"]
    code, report, _ = run_cli(capsys, "solve", "mwis", str(graph_file), str(td_file))
    assert code == 0
    assert report["result"]["optimum"] == "2"
    assert report["verification"] == {"independent": True, "weight_matches": True}


def test_solve_with_weight_file(tmp_path, capsys):
    graph_file = tmp_path / "g.gr"
    td_file = tmp_path / "g.td"
    weight_file = tmp_path / "w.txt"
    run_cli(capsys, "gen", "path", "3", "-o", str(graph_file))
    run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    weight_file.write_text("w 2 10\n")
    code, report, _ = run_cli(capsys, "solve", "mwis", str(graph_file), str(td_file), "-w", str(weight_file))
    assert code == 0 and report["result"]["optimum"] == "10"
    assert report["result"]["solution"] == [2]


def test_solve_forest_both_families(tmp_path, capsys):
    graph_file = tmp_path / "c5.gr"
    td_file = tmp_path / "c5.td"
    run_cli(capsys, "gen", "cycle", "5", "-o", str(graph_file))
    run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    for family in ("paper", "exhaustive"):
        code, report, _ = run_cli(
            capsys, "solve", "forest", str(graph_file), str(td_file), "--family", family
        )
        assert code == 0 and report["result"]["optimum"] == "4"


def test_recognize_c6_false(tmp_path, capsys):
    graph_file = tmp_path / "c6.gr"
    run_cli(capsys, "gen", "cycle", "6", "-o", str(graph_file))
    code, report, _ = run_cli(capsys, "recognize-imtw1", str(graph_file))
    assert code == 0
    assert report["result"] == {"imtw_at_most_1": False}


def test_exact_command(tmp_path, capsys):
    graph_file = tmp_path / "k33.gr"
    run_cli(capsys, "gen", "complete_bipartite", "3", "3", "-o", str(graph_file))
    code, report, _ = run_cli(capsys, "exact", str(graph_file))
    assert code == 0
    assert report["result"]["tree_alpha"] == 3
    assert report["result"]["tree_mu"] == 1


def test_transform_commands(tmp_path, capsys):
    graph_file = tmp_path / "p3.gr"
    run_cli(capsys, "gen", "path", "3", "-o", str(graph_file))
    code, report, _ = run_cli(capsys, "transform", "corona", str(graph_file))
    assert code == 0 and report["result"]["n"] == 6 and report["result"]["m"] == 5
    code, report, _ = run_cli(capsys, "transform", "l2", str(graph_file))
    assert code == 0 and report["result"]["n"] == 2 and report["result"]["m"] == 1
    code, report, _ = run_cli(capsys, "transform", "power", str(graph_file), "-k", "2")
    assert code == 0 and report["result"]["m"] == 3
    code, report, _ = run_cli(capsys, "transform", "forked", str(graph_file), "--marked", "1")
    assert code == 0 and report["result"]["n"] == 3 + 9 + 2


def test_solve_pack_with_family_file(tmp_path, capsys):
    graph_file = tmp_path / "p4.gr"
    td_file = tmp_path / "p4.td"
    family_file = tmp_path / "fam.json"
    run_cli(capsys, "gen", "path", "4", "-o", str(graph_file))
    run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    family_file.write_text(
        json.dumps(
            [
                {"id": 0, "vertices": [1], "weight": "2"},
                {"id": 1, "vertices": [3, 4], "weight": "3"},
                {"id": 2, "vertices": [2], "weight": "4"},
            ]
        )
    )
    # members 1 and 3,4 are non-adjacent, so they pack together for weight 5;
    # at distance 4 no two members are far enough apart and the best single wins
    code, report, _ = run_cli(capsys, "solve", "pack", str(graph_file), str(td_file), str(family_file))
    assert code == 0
    assert report["result"]["optimum"] == "5"
    code, report, _ = run_cli(
        capsys, "solve", "dpack", str(graph_file), str(td_file), str(family_file), "-d", "4"
    )
    assert code == 0 and report["result"]["optimum"] == "4"


def test_solve_ptas_and_generic(tmp_path, capsys):
    graph_file = tmp_path / "c5.gr"
    td_file = tmp_path / "c5.td"
    run_cli(capsys, "gen", "cycle", "5", "-o", str(graph_file))
    run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    code, report, _ = run_cli(
        capsys, "solve", "ptas", str(graph_file), str(td_file), "-r", "1", "--eps", "1/2"
    )
    assert code == 0 and report["result"]["size"] >= 2
    code, report, _ = run_cli(
        capsys,
        "solve",
        "generic",
        str(graph_file),
        str(td_file),
        "--property",
        "bipartite",
        "-r",
        "2",
    )
    assert code == 0 and report["result"]["optimum"] == "4"


def test_exit_code_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.gr"
    bad.write_text("p edge 2 1\ne 1 5\n")
    code, report, _ = run_cli(capsys, "recognize-imtw1", str(bad))
    assert code == 2
    assert report["error"]["type"] == "input"
    code, report, _ = run_cli(capsys, "recognize-imtw1", str(tmp_path / "missing.gr"))
    assert code == 2


def test_exit_code_resource_cap(tmp_path, capsys):
    graph_file = tmp_path / "g.gr"
    td_file = tmp_path / "g.td"
    run_cli(capsys, "gen", "complete_bipartite", "4", "4", "-o", str(graph_file))
    run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    code, report, _ = run_cli(
        capsys, "solve", "mwis", str(graph_file), str(td_file), "--budget", "2"
    )
    assert code == 4
    assert report["error"]["type"] == "resource"


def test_error_reports_are_complete_json(tmp_path, capsys):
    code, report, _ = run_cli(capsys, "gen", "cycle", "2")
    assert code == 2
    assert set(report) >= {"command", "inputs", "error"}
    code, report, _ = run_cli(capsys, "gen", "path")  # wrong arity
    assert code == 2 and report["error"]["type"] == "input"


def test_determinism_byte_identical(tmp_path, capsys):
    graph_file = tmp_path / "g.gr"
    td_file = tmp_path / "g.td"
    run_cli(capsys, "gen", "random", "8", "0.4", "--seed", "7", "-o", str(graph_file))
    run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    _, _, first = run_cli(capsys, "solve", "forest", str(graph_file), str(td_file))
    _, _, second = run_cli(capsys, "solve", "forest", str(graph_file), str(td_file))
    assert first == second
    _, _, v1 = run_cli(capsys, "verify", "--suite", "graphs", "--seed", "5", "--max-n", "6")
    _, _, v2 = run_cli(capsys, "verify", "--suite", "graphs", "--seed", "5", "--max-n", "6")
    assert v1 == v2


def test_gen_random_seed_changes_graph(tmp_path, capsys):
    a = tmp_path / "a.gr"
    b = tmp_path / "b.gr"
    run_cli(capsys, "gen", "random", "10", "0.5", "--seed", "1", "-o", str(a))
    run_cli(capsys, "gen", "random", "10", "0.5", "--seed", "2", "-o", str(b))
    assert a.read_text() != b.read_text()


def test_verify_suite_exit_zero(capsys):
    code, report, _ = run_cli(capsys, "verify", "--suite", "oracles", "--seed", "42", "--max-n", "6")
    assert code == 0
    assert report["result"]["all_ok"] is True


def test_verify_all_suites(capsys):
    code, report, _ = run_cli(capsys, "verify", "--suite", "all", "--seed", "42", "--max-n", "8")
    assert code == 0
    assert report["result"]["all_ok"] is True
    suites = {s["suite"] for s in report["result"]["suites"]}
    assert suites == {"graphs", "decomp", "traces", "forest", "packing", "boundaried", "oracles"}
    assert all(c["ok"] for s in report["result"]["suites"] for c in s["checks"])


def test_metrics_command(tmp_path, capsys):
    graph_file = tmp_path / "k33.gr"
    td_file = tmp_path / "k33.td"
    run_cli(capsys, "gen", "complete_bipartite", "3", "3", "-o", str(graph_file))
    run_cli(capsys, "decompose", str(graph_file), "-o", str(td_file))
    code, report, _ = run_cli(capsys, "metrics", str(graph_file), str(td_file))
    assert code == 0
    assert report["result"]["mu"] == 1
