import json

import numpy as np
import pytest

from wlra import BipartiteGraph, FormatError, build_block_rank_r, build_md1d, build_w1d
from wlra import io


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_matrix_round_trip(tmp_path):
    A = np.array([[0.1, -2.5e-30], [1 / 3, 7.0]])
    p = tmp_path / "A.txt"
    io.write_matrix(p, A)
    np.testing.assert_array_equal(io.read_matrix(p), A)


def test_masked_read(tmp_path):
    p = write(tmp_path, "M.txt", "2 2\n1 ?\n0 1\n")
    mm = io.read_masked(p)
    np.testing.assert_array_equal(mm.known, [[True, False], [True, True]])
    with pytest.raises(FormatError, match="not allowed"):
        io.read_matrix(p)
    with pytest.raises(FormatError):
        io.read_weights(p)


@pytest.mark.parametrize("text,line", [
    ("2 2\n1 2\n3\n", 3),
    ("2 x\n1 2\n", 1),
    ("2 2\n1 2\n3 abc\n", 3),
    ("1 1\n1\n2\n", 3),
    ("1 1\nnan\n", 2),
])
def test_matrix_errors_name_file_and_line(tmp_path, text, line):
    p = write(tmp_path, "bad.txt", text)
    with pytest.raises(FormatError) as info:
        io.read_masked(p)
    assert info.value.line == line
    assert str(info.value).startswith(f"{p}:{line}: ")


def test_missing_rows(tmp_path):
    with pytest.raises(FormatError, match="expected 3 data rows"):
        io.read_masked(write(tmp_path, "m.txt", "3 1\n1\n2\n"))


def test_negative_weights(tmp_path):
    with pytest.raises(FormatError, match="nonnegative"):
        io.read_weights(write(tmp_path, "w.txt", "1 2\n1 -1\n"))


def test_graph_round_trip(tmp_path):
    G = BipartiteGraph([[1, 0, 1], [0, 1, 1]])
    p = tmp_path / "g.txt"
    io.write_graph(p, G)
    assert p.read_text() == "2 3\n1 1\n1 3\n2 2\n2 3\n"
    assert io.read_graph(p) == G


@pytest.mark.parametrize("text,msg", [
    ("2 2\n1 1\n1 1\n", "duplicate"),
    ("2 2\n3 1\n", "outside"),
    ("2 2\n0 1\n", "outside"),
    ("2 2\n1\n", "two integers"),
    ("", "empty"),
])
def test_graph_errors(tmp_path, text, msg):
    with pytest.raises(FormatError, match=msg):
        io.read_graph(write(tmp_path, "g.txt", text))


@pytest.mark.parametrize("builder", [
    lambda G: build_w1d(G, 123.5),
    lambda G: build_md1d(G, 10),
    lambda G: build_block_rank_r(G, 2, 50),
])
def test_instance_round_trip(tmp_path, g1, builder):
    inst = builder(g1)
    io.save_instance(inst, tmp_path / "inst")
    back = io.load_instance(tmp_path / "inst")
    assert back.kind == inst.kind and back.d == inst.d and back.rank == inst.rank
    np.testing.assert_array_equal(back.M, inst.M)
    np.testing.assert_array_equal(back.W.values, inst.W.values)
    assert back.source == g1
    assert back.zero_index == inst.zero_index


def test_md_instance_marks_unknowns(tmp_path, g1):
    io.save_instance(build_md1d(g1, 10), tmp_path)
    lines = (tmp_path / "M.txt").read_text().splitlines()
    assert lines[1] == "1 0 1 0 ?"
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["Z"] == 2 and meta["zero_order"] == [[1, 2], [2, 1]]


def test_load_instance_errors(tmp_path):
    with pytest.raises(FormatError, match="meta.json"):
        io.load_instance(tmp_path)
    (tmp_path / "meta.json").write_text("{")
    with pytest.raises(FormatError, match="invalid JSON"):
        io.load_instance(tmp_path)


def test_landscape_csv(tmp_path):
    p = tmp_path / "l.csv"
    io.write_landscape_csv(p, [(0.0, 0.5, 1 / 3)])
    assert p.read_text() == "x,y,objective\n0,0.5,0.333333333333\n"
