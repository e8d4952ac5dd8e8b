"""Text formats for matrices, graphs and reduction instances.

Matrix files: first line ``rows cols``, then one whitespace-separated line
per row; ``?`` marks an unknown entry and is only accepted when reading a
masked matrix.  Graph files: first line ``s t``, then one 1-indexed
``i j`` edge per line.  Instances are directories holding ``M.txt``,
``W.txt`` and ``meta.json``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .biclique import BipartiteGraph
from .core import MaskedMatrix, WeightMatrix, as_matrix
from .exceptions import FormatError
from .reductions import KINDS, MISSING_DATA, ReductionInstance


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _content_lines(path):
    """Yield ``(lineno, tokens)`` for non-blank lines, skipping ``#`` comments."""
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def _read_header(it, path, what):
    try:
        lineno, toks = next(it)
    except StopIteration:
        raise FormatError(f"empty {what} file", path) from None
    if len(toks) != 2:
        raise FormatError(f"header must be two integers, got {' '.join(toks)!r}", path, lineno)
    try:
        a, b = int(toks[0]), int(toks[1])
    except ValueError:
        raise FormatError(f"header must be two integers, got {' '.join(toks)!r}", path, lineno) from None
    if a < 1 or b < 1:
        raise FormatError("dimensions must be positive", path, lineno)
    return a, b


def read_masked(path) -> MaskedMatrix:
    """Read a matrix file that may contain ``?`` tokens."""
    it = _content_lines(path)
    rows, cols = _read_header(it, path, "matrix")
    vals = np.zeros((rows, cols))
    known = np.ones((rows, cols), dtype=bool)
    count = 0
    for lineno, toks in it:
        if count >= rows:
            raise FormatError(f"more than {rows} data rows", path, lineno)
        if len(toks) != cols:
            raise FormatError(f"expected {cols} entries, found {len(toks)}", path, lineno)
        for j, tok in enumerate(toks):
            if tok == "?":
                known[count, j] = False
                continue
            try:
                x = float(tok)
            except ValueError:
                raise FormatError(f"cannot parse entry {tok!r}", path, lineno) from None
            if not math.isfinite(x):
                raise FormatError(f"non-finite entry {tok!r}", path, lineno)
            vals[count, j] = x
        count += 1
    if count != rows:
        raise FormatError(f"expected {rows} data rows, found {count}", path)
    return MaskedMatrix(vals, known)


def read_matrix(path) -> np.ndarray:
    """Read a fully known matrix (``?`` rejected)."""
    mm = read_masked(path)
    if not mm.known.all():
        i, j = np.argwhere(~mm.known)[0]
        raise FormatError(f"unknown entry '?' at ({i + 1}, {j + 1}) not allowed here", path)
    return as_matrix(mm.values)


def read_weights(path) -> WeightMatrix:
    A = read_matrix(path)
    if np.any(A < 0):
        raise FormatError("weights must be nonnegative", path)
    return WeightMatrix(A)


def format_matrix(A, known=None) -> str:
    A = np.asarray(A, dtype=np.float64)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    for i in range(A.shape[0]):
        toks = ["?" if known is not None and not known[i, j] else _fmt(A[i, j]) for j in range(A.shape[1])]
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def write_matrix(path, A, known=None):
    Path(path).write_text(format_matrix(A, known))


def read_graph(path) -> BipartiteGraph:
    it = _content_lines(path)
    s, t = _read_header(it, path, "graph")
    edges = set()
    for lineno, toks in it:
        if len(toks) != 2:
            raise FormatError("edge lines must hold two integers 'i j'", path, lineno)
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            raise FormatError(f"cannot parse edge {' '.join(toks)!r}", path, lineno) from None
        if not (1 <= i <= s and 1 <= j <= t):
            raise FormatError(f"edge ({i}, {j}) outside a {s}x{t} graph", path, lineno)
        if (i, j) in edges:
            raise FormatError(f"duplicate edge ({i}, {j})", path, lineno)
        edges.add((i, j))
    return BipartiteGraph.from_edges(s, t, [(i - 1, j - 1) for i, j in sorted(edges)])


def format_graph(G: BipartiteGraph) -> str:
    lines = [f"{G.s} {G.t}"] + [f"{i + 1} {j + 1}" for i, j in G.edges()]
    return "\n".join(lines) + "\n"


def write_graph(path, G):
    Path(path).write_text(format_graph(G))


def save_instance(inst: ReductionInstance, directory) -> list:
    """Write ``M.txt``, ``W.txt`` and ``meta.json``; returns the written paths.

    For missing-data instances ``M.txt`` shows ``?`` wherever the weight is 0.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    known = inst.W.values > 0 if inst.kind == MISSING_DATA else None
    write_matrix(out / "M.txt", inst.M, known)
    write_matrix(out / "W.txt", inst.W.values)
    G = inst.source
    meta = {
        "kind": inst.kind,
        "d": inst.d,
        "s": G.s,
        "t": G.t,
        "Z": G.zero_count,
        "edges": G.edge_count,
        "rank": inst.rank,
        "rescaled": inst.rescaled,
        "zero_order": [[i + 1, j + 1] for i, j in inst.zero_index],
        "biadjacency": G.biadjacency.astype(int).tolist(),
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return [out / "M.txt", out / "W.txt", out / "meta.json"]


def load_instance(directory) -> ReductionInstance:
    d = Path(directory)
    meta_path = d / "meta.json"
    try:
        meta = json.loads(meta_path.read_text())
    except FileNotFoundError:
        raise FormatError("missing meta.json", meta_path) from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", meta_path) from None
    for key in ("kind", "d", "rank", "biadjacency"):
        if key not in meta:
            raise FormatError(f"meta.json lacks {key!r}", meta_path)
    if meta["kind"] not in KINDS:
        raise FormatError(f"unknown instance kind {meta['kind']!r}", meta_path)
    G = BipartiteGraph(np.array(meta["biadjacency"], dtype=float))
    mm = read_masked(d / "M.txt")
    W = read_weights(d / "W.txt")
    if W.shape != mm.shape:
        raise FormatError(f"W.txt shape {W.shape} differs from M.txt shape {mm.shape}", d / "W.txt")
    if np.any(~mm.known & (W.values > 0)):
        raise FormatError("'?' entries of M.txt must have zero weight", d / "M.txt")
    zero_index = tuple((i - 1, j - 1) for i, j in meta.get("zero_order", []))
    return ReductionInstance(as_matrix(mm.values), W, int(meta["rank"]), float(meta["d"]), meta["kind"], G,
                             zero_index, bool(meta.get("rescaled", False)))


def write_landscape_csv(path, points):
    """``x,y,objective`` rows with 12 significant digits."""
    lines = ["x,y,objective"] + [f"{x:.12g},{y:.12g},{f:.12g}" for x, y, f in points]
    Path(path).write_text("\n".join(lines) + "\n")
