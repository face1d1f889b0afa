import csv
import io
import json

import pytest

from expander_decomp.cli import BENCH_HEADER, main
from expander_decomp.graph_core import load_edge_list


@pytest.fixture
def two_triangles(tmp_path):
    path = tmp_path / "tri.txt"
    assert main(["gen", "dumbbell", "--s", "3", "--out", str(path)]) == 0
    return path


def test_decompose_two_triangles(tmp_path, two_triangles):
    out, rep = tmp_path / "p.tsv", tmp_path / "r.json"
    code = main(["decompose", str(two_triangles), "--phi", "0.4", "--out", str(out),
                 "--report", str(rep), "--threads", "1"])
    assert code == 0
    rows = [line.split("\t") for line in out.read_text().splitlines()]
    assert len({c for _, c in rows}) == 2
    report = json.loads(rep.read_text())
    assert report["error_edges"] == 1 and report["clusters"] == 2
    assert report["verified"] is True
    assert report["n"] == 6 and report["m"] == 7


def test_decompose_single_edge_keeps_labels(tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("# tiny\na b\n")
    out = tmp_path / "p.tsv"
    assert main(["decompose", str(g), "--phi", "0.3", "--out", str(out)]) == 0
    assert out.read_text() == "a\t0\nb\t0\n"


def test_decompose_bad_phi(two_triangles, capsys):
    assert main(["decompose", str(two_triangles), "--phi", "1.5"]) == 1
    assert "phi" in capsys.readouterr().err


def test_decompose_missing_file(tmp_path):
    assert main(["decompose", str(tmp_path / "nope.txt"), "--phi", "0.3"]) == 1


def test_decompose_malformed_file(tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("0 1\n2 2\n")
    assert main(["decompose", str(g), "--phi", "0.3"]) == 1


def test_gen_ring_counts(capsys):
    assert main(["gen", "ring-of-cliques", "--k", "3", "--s", "4"]) == 0
    G = load_edge_list(capsys.readouterr().out)
    assert (G.n, G.m) == (12, 21)


def test_gen_path(capsys):
    assert main(["gen", "path", "--n", "4"]) == 0
    assert load_edge_list(capsys.readouterr().out).m == 3


def test_gen_random_regular_deterministic(capsys):
    main(["gen", "random-regular", "--d", "3", "--n", "10", "--seed", "4"])
    first = capsys.readouterr().out
    main(["gen", "random-regular", "--d", "3", "--n", "10", "--seed", "4"])
    assert capsys.readouterr().out == first
    G = load_edge_list(first)
    assert set(G.deg) == {3}


def test_gen_invalid_params():
    assert main(["gen", "random-regular", "--d", "3", "--n", "5"]) == 1
    assert main(["gen", "ring-of-cliques", "--k", "3"]) == 1
    assert main(["gen", "bogus"]) == 1


def test_verify_roundtrip_and_tamper(tmp_path, two_triangles, capsys):
    out = tmp_path / "p.tsv"
    main(["decompose", str(two_triangles), "--phi", "0.4", "--out", str(out)])
    capsys.readouterr()
    assert main(["verify", str(out), str(two_triangles), "--phi", "0.4"]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["ok"] and verdict["error_edges"] == 1
    merged = tmp_path / "merged.tsv"
    merged.write_text("".join(f"{v}\t0\n" for v in range(6)))
    # the merged graph has expansion 1/7, above 0.4/6 but below 0.4
    assert main(["verify", str(merged), str(two_triangles), "--phi", "0.4"]) == 0
    capsys.readouterr()
    assert main(["verify", str(merged), str(two_triangles), "--phi", "0.4", "--strict"]) == 2


def test_verify_missing_vertex(tmp_path, two_triangles):
    part = tmp_path / "p.tsv"
    part.write_text("".join(f"{v}\t0\n" for v in range(5)))
    assert main(["verify", str(part), str(two_triangles), "--phi", "0.4"]) == 1


def test_bench_rows(tmp_path):
    path = tmp_path / "b.csv"
    assert main(["bench", "ring", "--phis", "0.01,0.05,0.2", "--sizes", "3x4",
                 "--csv", str(path)]) == 0
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0] == BENCH_HEADER
    assert len(rows) == 4


def test_bench_deterministic_errors(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["bench", "dumbbell", "--phis", "0.4", "--sizes", "3,5", "--csv", str(p)])
    col = lambda p: [r[4] for r in csv.reader(io.StringIO(p.read_text()))]
    assert col(a) == col(b)
    # the dumbbell family is cut exactly at its bridge
    assert col(a)[1:] == ["1", "1"]


def test_bench_unknown_suite():
    assert main(["bench", "nope"]) == 1


def test_tsv_byte_identical(tmp_path):
    g = tmp_path / "ring.txt"
    main(["gen", "ring-of-cliques", "--k", "4", "--s", "5", "--out", str(g)])
    outs = []
    for i in range(2):
        out = tmp_path / f"p{i}.tsv"
        main(["decompose", str(g), "--phi", "0.1", "--seed", "3", "--threads", "1",
              "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
