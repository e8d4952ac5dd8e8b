"""Bipartite graphs, bicliques and exhaustive maximum-edge biclique oracles.

Vertices are 0-based internally; ``s1, s2, ...`` / ``t1, t2, ...`` labels
(1-based) are only used for display.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .exceptions import CapacityError, ConstraintError, ParameterError

MAX_ORACLE_SIDE = 25


class BipartiteGraph:
    """Bipartite graph given by its 0/1 biadjacency matrix (rows ``s_i``, columns ``t_j``)."""

    def __init__(self, biadjacency):
        B = np.array(biadjacency, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] < 1 or B.shape[1] < 1:
            raise ParameterError(f"biadjacency must be a non-empty 2-D array, got shape {B.shape}")
        if not np.all((B == 0) | (B == 1)):
            raise ParameterError("biadjacency entries must be exactly 0 or 1")
        B.flags.writeable = False
        self._B = B

    @classmethod
    def from_edges(cls, s, t, edges):
        """Build from 0-based ``(i, j)`` pairs; duplicates are rejected."""
        B = np.zeros((s, t))
        for i, j in edges:
            if not (0 <= i < s and 0 <= j < t):
                raise ParameterError(f"edge ({i}, {j}) outside a {s}x{t} graph")
            if B[i, j]:
                raise ParameterError(f"duplicate edge ({i}, {j})")
            B[i, j] = 1
        return cls(B)

    @classmethod
    def complete(cls, s, t):
        return cls(np.ones((s, t)))

    @property
    def biadjacency(self) -> np.ndarray:
        return self._B

    @property
    def s(self) -> int:
        return self._B.shape[0]

    @property
    def t(self) -> int:
        return self._B.shape[1]

    @property
    def edge_count(self) -> int:
        return int(self._B.sum())

    @property
    def zero_count(self) -> int:
        return self.s * self.t - self.edge_count

    def zero_entries(self):
        """Non-edges ``(i, j)`` in row-major order."""
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self._B == 0))]

    def edges(self):
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self._B))]

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return bool(np.array_equal(self._B, other._B))

    def __hash__(self):
        return hash((self._B.shape, self._B.tobytes()))

    def __repr__(self):
        return f"BipartiteGraph(s={self.s}, t={self.t}, |E|={self.edge_count})"


@dataclass(frozen=True, order=True)
class Biclique:
    """Vertex sets of a biclique, stored as sorted 0-based tuples."""

    rows: tuple = ()
    cols: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(sorted(int(i) for i in self.rows)))
        object.__setattr__(self, "cols", tuple(sorted(int(j) for j in self.cols)))
        if len(set(self.rows)) != len(self.rows) or len(set(self.cols)) != len(self.cols):
            raise ParameterError("biclique vertex sets contain duplicates")

    @property
    def edge_count(self) -> int:
        return len(self.rows) * len(self.cols)

    @property
    def is_empty(self) -> bool:
        return self.edge_count == 0

    def indicators(self, s, t):
        """Binary indicator vectors ``(u, v)`` of the row and column sets."""
        u = np.zeros(s)
        v = np.zeros(t)
        u[list(self.rows)] = 1.0
        v[list(self.cols)] = 1.0
        return u, v

    def is_valid(self, G: BipartiteGraph) -> bool:
        if any(i >= G.s for i in self.rows) or any(j >= G.t for j in self.cols):
            return False
        if not self.rows or not self.cols:
            return True
        return bool(np.all(G.biadjacency[np.ix_(self.rows, self.cols)] == 1))

    def label(self) -> str:
        rs = ",".join(f"s{i + 1}" for i in self.rows)
        cs = ",".join(f"t{j + 1}" for j in self.cols)
        return "{" + rs + "}x{" + cs + "}"

    def to_dict(self):
        return {"rows": [i + 1 for i in self.rows], "cols": [j + 1 for j in self.cols], "edges": self.edge_count}


def mbp_objective(G: BipartiteGraph, B: Biclique) -> int:
    """Number of edges of ``G`` left outside the biclique ``B``."""
    if not B.is_valid(G):
        raise ConstraintError(f"{B.label()} is not a biclique of the graph")
    return G.edge_count - B.edge_count


def _check_capacity(G):
    if min(G.s, G.t) > MAX_ORACLE_SIDE:
        raise CapacityError(
            f"exhaustive oracle limited to min(s, t) <= {MAX_ORACLE_SIDE}, got {G.s}x{G.t}")


def _closed_pairs(G):
    """Yield ``(rows, cols)`` = ``(S, N(S))`` for every subset S of the smaller side.

    Neighbourhoods are intersected as integer bitmasks.
    """
    B = G.biadjacency.astype(bool)
    transposed = G.t < G.s
    if transposed:
        B = B.T
    k, other = B.shape
    masks = [sum(1 << j for j in np.flatnonzero(B[i])) for i in range(k)]
    full = (1 << other) - 1

    def emit(side, nb):
        opp = tuple(j for j in range(other) if nb >> j & 1)
        return (opp, side) if transposed else (side, opp)

    # depth-first over subsets with a running intersection; supersets of a
    # subset with empty neighbourhood are pruned (they cannot carry edges)
    stack = [(0, (), full)]
    while stack:
        start, side, nb = stack.pop()
        yield emit(side, nb)
        if side and not nb:
            continue
        for i in range(k - 1, start - 1, -1):
            stack.append((i + 1, side + (i,), nb & masks[i]))


def max_edge_biclique(G: BipartiteGraph):
    """Exhaustive maximum-edge biclique.

    Returns
    -------
    best : Biclique
        A maximum-edge biclique; ties go to the lexicographically smallest
        row set, then column set.
    optimum : int
        ``|E| - |E*|``, the optimal value of the biclique problem.
    """
    _check_capacity(G)
    best = Biclique()
    for rows, cols in _closed_pairs(G):
        if not rows or not cols:
            continue
        cand = Biclique(rows, cols)
        if cand.edge_count > best.edge_count or (
                cand.edge_count == best.edge_count and (cand.rows, cand.cols) < (best.rows, best.cols)):
            best = cand
    return best, G.edge_count - best.edge_count


def maximal_bicliques(G: BipartiteGraph):
    """All inclusion-maximal bicliques with nonempty sides, sorted lexicographically."""
    _check_capacity(G)
    B = G.biadjacency.astype(bool)
    found = set()
    for rows, cols in _closed_pairs(G):
        if not rows or not cols:
            continue
        # maximal iff each side is exactly the common neighbourhood of the other
        row_nb = tuple(int(i) for i in np.flatnonzero(B[:, list(cols)].all(axis=1)))
        col_nb = tuple(int(j) for j in np.flatnonzero(B[list(rows), :].all(axis=0)))
        if row_nb == rows and col_nb == cols:
            found.add(Biclique(rows, cols))
    return sorted(found)


def brute_force_max_biclique(G: BipartiteGraph) -> int:
    """Largest ``|R| * |C|`` over all row/column subset pairs; slow reference oracle for tests."""
    B = G.biadjacency.astype(bool)
    best = 0
    for a in range(1, G.s + 1):
        for R in combinations(range(G.s), a):
            cols_ok = np.flatnonzero(B[list(R)].all(axis=0))
            best = max(best, a * len(cols_ok))
    return best
