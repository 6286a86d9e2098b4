import csv
import io
import json
import subprocess
import sys

import pytest

from cfcolor import cli
from cfcolor.complete import log_bound
from cfcolor.graph import complete_graph, path_graph, random_regular, read_graph, write_graph, Graph
from cfcolor.verify import read_coloring, verify


def run(*args):
    return cli.main([str(a) for a in args])


def test_gen_examples(tmp_path):
    assert run("gen", "complete", "--n", 9, "--out", tmp_path / "k9.g") == 0
    assert read_graph(tmp_path / "k9.g").m == 36
    assert run("gen", "gnp", "--n", 100, "--p", 0, "--out", tmp_path / "e.g") == 0
    assert read_graph(tmp_path / "e.g").m == 0
    assert run("gen", "regular", "--n", 6, "--d", 2, "--seed", 1, "--out", tmp_path / "r.g") == 0
    assert set(read_graph(tmp_path / "r.g").degrees.tolist()) == {2}


def test_gen_invalid_params(tmp_path):
    assert run("gen", "regular", "--n", 5, "--d", 3, "--out", tmp_path / "x.g") == 2
    assert run("gen", "gnp", "--n", 5, "--out", tmp_path / "x.g") == 2
    assert run("gen", "gnp", "--n", 5, "--p", 2, "--out", tmp_path / "x.g") == 2


def test_color_complete(tmp_path, capsys):
    write_graph(complete_graph(9), tmp_path / "k9.g")
    assert run("color", "complete", tmp_path / "k9.g", "--out", tmp_path / "k9.col") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["colors"]["total"] <= 4 and report["verified"]
    G = complete_graph(9)
    assert verify(G, read_coloring(G, tmp_path / "k9.col")).conflict_free


def test_color_complete_rejects_other_graphs(tmp_path, capsys):
    write_graph(path_graph(4), tmp_path / "p.g")
    assert run("color", "complete", tmp_path / "p.g", "--out", tmp_path / "p.col") == 2
    assert "complete graph" in capsys.readouterr().err


def test_color_nearly_regular(tmp_path):
    write_graph(random_regular(256, 40, seed=1), tmp_path / "g.g")
    rc = run("color", "nearly-regular", tmp_path / "g.g", "--seed", 3, "--restarts", 2,
             "--out", tmp_path / "g.col", "--report", tmp_path / "g.json")
    assert rc == 0
    report = json.loads((tmp_path / "g.json").read_text())
    assert report["verified"] and report["method"] == "nearly-regular"
    assert report["colors"]["total"] == report["colors"]["layers"] + report["colors"]["fallback"] + report["colors"]["final"]


def test_color_fallback(tmp_path, capsys):
    G = random_regular(50, 7, seed=2)
    write_graph(G, tmp_path / "g.g")
    assert run("color", "fallback", tmp_path / "g.g", "--out", tmp_path / "g.col") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["colors"]["total"] <= 8 and report["verified"]


def test_color_isolated_vertex(tmp_path):
    write_graph(Graph(3, [(0, 1)]), tmp_path / "g.g")
    for method in ("nearly-regular", "fallback"):
        assert run("color", method, tmp_path / "g.g", "--out", tmp_path / "g.col") == 2


def test_verify_exit_codes(tmp_path, capsys):
    write_graph(complete_graph(4), tmp_path / "k4.g")
    # perfect matchings of K4 in three colors: a proper, hence conflict-free, coloring
    (tmp_path / "good.col").write_text("0 1 0\n2 3 0\n0 2 1\n1 3 1\n0 3 2\n1 2 2\n")
    G = complete_graph(4)
    assert run("verify", tmp_path / "k4.g", tmp_path / "good.col") == 0
    capsys.readouterr()
    (tmp_path / "one.col").write_text("".join(f"{u} {v} 0\n" for u, v in G.edges.tolist()))
    assert run("verify", tmp_path / "k4.g", tmp_path / "one.col") == 1
    assert len(json.loads(capsys.readouterr().out)["unsatisfied"]) == 6
    write_graph(Graph(4, [(0, 1), (2, 3)]), tmp_path / "iso.g")
    (tmp_path / "iso.col").write_text("0 1 0\n2 3 0\n")
    assert run("verify", tmp_path / "iso.g", tmp_path / "iso.col", "--mode", "open") == 2
    assert run("verify", tmp_path / "iso.g", tmp_path / "missing.col") == 2


def test_verify_conflict_free_input(tmp_path):
    write_graph(complete_graph(6), tmp_path / "k6.g")
    assert run("color", "complete", tmp_path / "k6.g", "--out", tmp_path / "k6.col", "--report", tmp_path / "r") == 0
    assert run("verify", tmp_path / "k6.g", tmp_path / "k6.col") == 0


def test_exact(tmp_path, capsys):
    for n, q in ((2, 1), (3, 2)):
        write_graph(complete_graph(n), tmp_path / f"k{n}.g")
        assert run("exact", tmp_path / f"k{n}.g") == 0
        assert json.loads(capsys.readouterr().out)["index"] == q
    write_graph(complete_graph(8), tmp_path / "k8.g")
    assert run("exact", tmp_path / "k8.g") == 2
    assert "capped at 21" in capsys.readouterr().err
    write_graph(complete_graph(6), tmp_path / "k6.g")
    assert run("exact", tmp_path / "k6.g", "--budget", 5) == 1


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_complete(capsys):
    assert run("sweep", "complete", "--n", "2..64", "--method", "complete") == 0
    rows = _rows(capsys.readouterr().out)
    assert [int(r["n"]) for r in rows] == list(range(2, 65))
    for r in rows:
        assert int(r["colors_total"]) <= log_bound(int(r["n"])) + 1
        assert r["verified"] == "True"


def test_sweep_empty_range(capsys):
    assert run("sweep", "gnp", "--n", "", "--p", "0.1") == 0
    out = capsys.readouterr().out
    assert out.strip() == ",".join(cli.ExperimentRecord.header())


def test_sweep_is_deterministic_and_ordered(tmp_path, monkeypatch):
    args = ["sweep", "regular", "--n", "64,128", "--d", "8,16", "--seeds", "2", "--seed", "5"]
    assert run(*args, "--workers", 1, "--out", tmp_path / "a.csv") == 0
    monkeypatch.setenv(cli.WORKERS_ENV, "3")
    assert run(*args, "--out", tmp_path / "b.csv") == 0
    a = _rows((tmp_path / "a.csv").read_text())
    b = _rows((tmp_path / "b.csv").read_text())
    strip = lambda rows: [{k: v for k, v in r.items() if k != "runtime_ms"} for r in rows]
    assert strip(a) == strip(b)
    expected = [(n, d, i) for n in (64, 128) for d in (8.0, 16.0) for i in (0, 1)]
    assert [(int(r["n"]), float(r["param"]), int(r["seed_index"])) for r in a] == expected
    assert all(r["verified"] == "True" for r in a)
    assert len({r["trial_seed"] for r in a}) == 8


def test_sweep_failure_aborts():
    with pytest.raises(RuntimeError, match="seed_index=0"):
        cli.sweep("regular", [5], [3], 1, "fallback")


def test_bad_worker_env(monkeypatch):
    monkeypatch.setenv(cli.WORKERS_ENV, "many")
    assert run("sweep", "complete", "--n", "3", "--method", "complete") == 2


def test_usage_errors():
    assert run("bogus") == 2
    assert run() == 2


def test_module_entry_point(tmp_path):
    write_graph(complete_graph(5), tmp_path / "k5.g")
    proc = subprocess.run([sys.executable, "-m", "cfcolor", "exact", str(tmp_path / "k5.g")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["index"] <= 3
