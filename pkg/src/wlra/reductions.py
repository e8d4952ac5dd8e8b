"""Reduction instances from the maximum-edge biclique problem to rank-one WLRA.

Three constructions are provided:

* ``positive_weight`` -- the biadjacency matrix itself, weight 1 on edges
  and ``d`` on non-edges;
* ``missing_data`` -- a binary-weight instance of size ``(s+Z) x (t+Z)``
  with a ``d * I_Z`` block and selector blocks ``B1``/``B2``;
* ``block_rank_r`` -- ``r`` disconnected copies of the graph, for rank ``r``.

Plus the explicit witness factors that certify the upper bound of the
missing-data construction, the rank-one-weight reduction to unweighted
approximation, and the two objective rescalings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .biclique import Biclique, BipartiteGraph
from .core import FactorPair, WeightMatrix, as_factors, as_matrix
from .exceptions import CapacityError, DegenerateInputError, ParameterError

D_MAX = 1e150
MAX_BLOCK_ENTRIES = 10**7
WITNESS_SLACK = 1e-9

POSITIVE_WEIGHT = "positive_weight"
MISSING_DATA = "missing_data"
BLOCK_RANK_R = "block_rank_r"
KINDS = (POSITIVE_WEIGHT, MISSING_DATA, BLOCK_RANK_R)


@dataclass(frozen=True, eq=False)
class ReductionInstance:
    """A WLRA instance produced from a bipartite graph, with its provenance.

    ``zero_index`` lists the non-edges of the source graph in the order that
    defines the selector index (position ``k`` in the list is the 0-based
    ``k_ij``); it is empty except for the missing-data kind.
    """

    M: np.ndarray
    W: WeightMatrix
    rank: int
    d: float
    kind: str
    source: BipartiteGraph
    zero_index: tuple = ()
    rescaled: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.M.shape

    @property
    def Z(self) -> int:
        return self.source.zero_count

    @property
    def edge_count(self) -> int:
        return self.source.edge_count

    def split(self, u, v):
        """Split full factors of a missing-data instance into graph and ``d`` blocks."""
        s, t = self.source.s, self.source.t
        u = np.asarray(u, dtype=np.float64).reshape(-1)
        v = np.asarray(v, dtype=np.float64).reshape(-1)
        return u[:s], v[:t], u[s:], v[t:]


@dataclass(frozen=True)
class WitnessParams:
    """Exponent ``K`` and the binary factor that drives the witness (``use_v`` or ``use_u``)."""

    K: float
    side: str = "use_v"

    def __post_init__(self):
        if not (self.K >= 1):
            raise ParameterError(f"witness exponent K must be >= 1, got {self.K}")
        if self.side not in ("use_v", "use_u"):
            raise ParameterError(f"unknown witness side {self.side!r}")


def _check_d(d, strict=False):
    d = float(d)
    if not math.isfinite(d) or (d <= 1 if strict else d < 1):
        raise ParameterError(f"parameter d must be {'>' if strict else '>='} 1, got {d}")
    if d > D_MAX:
        raise CapacityError(f"parameter d = {d:g} exceeds {D_MAX:g}")
    return d


def build_w1d(G: BipartiteGraph, d) -> ReductionInstance:
    """Positive-weight instance: ``M = M_b``, weight 1 on edges and ``d`` on non-edges."""
    d = _check_d(d)
    M = G.biadjacency
    W = np.where(M == 1, 1.0, d)
    return ReductionInstance(as_matrix(M), WeightMatrix(W), 1, d, POSITIVE_WEIGHT, G)


def lemma3_d(E_count, eps) -> float:
    """Smallest ``d`` for which the positive-weight sandwich bound holds: ``2^6 |E|^6 / eps^4``."""
    if not (0 < eps <= 1):
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    if E_count < 1:
        raise ParameterError(f"edge count must be positive, got {E_count}")
    return 2.0**6 * float(E_count) ** 6 / float(eps) ** 4


def lemma6_d(E_count, eps) -> float:
    """Threshold ``8 |E|^{7/2} / eps^2 + |E|^{1/2}``; the missing-data bound needs ``d`` strictly above it."""
    if not (0 < eps <= 1):
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    if E_count < 1:
        raise ParameterError(f"edge count must be positive, got {E_count}")
    E = float(E_count)
    return 8.0 * E**3.5 / float(eps) ** 2 + math.sqrt(E)


def build_md1d(G: BipartiteGraph, d) -> ReductionInstance:
    """Missing-data instance.

    ``M = [[M_b, 0], [0, d I_Z]]`` and ``W = [[1, B1], [B2, I_Z]]`` where
    the k-th non-edge ``(i, j)`` (row-major order) puts a one at
    ``B1[i, k]`` and ``B2[k, j]``.
    """
    d = _check_d(d, strict=True)
    zeros = G.zero_entries()
    Z = len(zeros)
    if Z == 0:
        raise DegenerateInputError(
            "graph is complete bipartite (no zero entries); the biclique optimum is 0")
    s, t = G.s, G.t
    M = np.zeros((s + Z, t + Z))
    M[:s, :t] = G.biadjacency
    M[s:, t:] = d * np.eye(Z)
    W = np.zeros_like(M)
    W[:s, :t] = 1.0
    W[s:, t:] = np.eye(Z)
    for k, (i, j) in enumerate(zeros):
        W[i, t + k] = 1.0
        W[s + k, j] = 1.0
    return ReductionInstance(as_matrix(M), WeightMatrix(W), 1, d, MISSING_DATA, G, tuple(zeros))


def selector_blocks(inst: ReductionInstance):
    """Return ``(B1, B2)`` of a missing-data instance."""
    _require(inst, MISSING_DATA)
    s, t = inst.source.s, inst.source.t
    Wv = inst.W.values
    return Wv[:s, t:].copy(), Wv[s:, :t].copy()


def default_K(d, Z) -> float:
    """Witness exponent making the slack ``2 Z d^{2(1-K)}`` equal to ``1e-9``."""
    d = float(d)
    if d <= 1:
        raise ParameterError("default exponent needs d > 1")
    return 1.0 + (9.0 + math.log10(2 * Z)) / (2.0 * math.log10(d))


def witness_bound(inst: ReductionInstance, biclique_edges, K) -> float:
    """Upper bound ``(|E| - |E(B)|) + 2 Z d^{2(1-K)}`` certified by the witness."""
    return (inst.edge_count - biclique_edges) + 2.0 * inst.Z * inst.d ** (2.0 * (1.0 - K))


def md1d_witness(inst: ReductionInstance, B: Biclique, params: WitnessParams | None = None) -> FactorPair:
    """Explicit factors built from a biclique ``B`` of the source graph.

    With ``side='use_v'``, for the k-th non-edge ``(i, j)``: ``u_d[k] = d^K``
    and ``v_d[k] = d^{1-K}`` when ``t_j`` is outside ``B``, and the two are
    swapped when it is inside.  ``side='use_u'`` is the mirrored variant
    keyed on ``s_i``.
    """
    _require(inst, MISSING_DATA)
    G = inst.source
    if not B.is_valid(G):
        raise ParameterError(f"{B.label()} is not a biclique of the source graph")
    if params is None:
        params = WitnessParams(default_K(inst.d, inst.Z))
    d, K = inst.d, params.K
    ub, vb = B.indicators(G.s, G.t)
    big, small = d**K, d ** (1.0 - K)
    ud = np.empty(inst.Z)
    vd = np.empty(inst.Z)
    for k, (i, j) in enumerate(inst.zero_index):
        if params.side == "use_v":
            inside = vb[j] == 1
            ud[k], vd[k] = (small, big) if inside else (big, small)
        else:
            inside = ub[i] == 1
            ud[k], vd[k] = (big, small) if inside else (small, big)
    return FactorPair.rank_one(np.concatenate([ub, ud]), np.concatenate([vb, vd]))


def build_block_rank_r(G: BipartiteGraph, r, d) -> ReductionInstance:
    """``r`` disconnected copies of the graph with weights ``M' + d (1 - M')``."""
    if int(r) != r or r < 1:
        raise ParameterError(f"rank must be a positive integer, got {r}")
    r = int(r)
    d = _check_d(d)
    if (r * G.s) * (r * G.t) > MAX_BLOCK_ENTRIES:
        raise CapacityError(f"block instance {r * G.s}x{r * G.t} exceeds {MAX_BLOCK_ENTRIES} entries")
    Mp = np.kron(np.eye(r), G.biadjacency)
    Wp = Mp + d * (1.0 - Mp)
    return ReductionInstance(as_matrix(Mp), WeightMatrix(Wp), r, d, BLOCK_RANK_R, G, meta={"copies": r})


class RankOneReduction(NamedTuple):
    Mprime: np.ndarray
    back_map: Callable


def rank_one_weight_reduce(M, s, t) -> RankOneReduction:
    """Turn a WLRA problem with weights ``s t^T`` into an unweighted one.

    ``M'_ij = sqrt(s_i t_j) M_ij``; ``back_map(U', V')`` divides the rows of
    ``U'`` by ``sqrt(s_i)`` and those of ``V'`` by ``sqrt(t_j)``.
    """
    M = as_matrix(M)
    s = np.asarray(s, dtype=np.float64).reshape(-1)
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    if s.shape != (M.shape[0],) or t.shape != (M.shape[1],):
        raise ParameterError("weight vectors do not match the matrix shape")
    if np.any(s <= 0) or np.any(t <= 0):
        raise ParameterError("rank-one weight factors must be strictly positive")
    rs, rt = np.sqrt(s), np.sqrt(t)
    Mprime = np.outer(rs, rt) * M

    def back_map(Up, Vp=None):
        F = as_factors(Up if Vp is None else (Up, Vp))
        return FactorPair(F.U / rs[:, None], F.V / rt[:, None])

    return RankOneReduction(Mprime, back_map)


def rescale_theorem1(inst: ReductionInstance) -> ReductionInstance:
    """Divide the weights by ``d``; every objective value scales by ``1/d``."""
    _require(inst, POSITIVE_WEIGHT)
    return replace(inst, W=WeightMatrix(inst.W.values / inst.d), rescaled=True)


def rescale_theorem2(inst: ReductionInstance) -> ReductionInstance:
    """Divide the data by ``d``; ``(u, v)`` maps to ``(u, v/d)`` and objectives scale by ``1/d^2``."""
    _require(inst, MISSING_DATA)
    return replace(inst, M=as_matrix(inst.M / inst.d), rescaled=True)


def penalty_value(G: BipartiteGraph, d, u, v) -> float:
    """Quadratic-penalty form of the biclique problem.

    ``sum_{edges} (1 - u_i v_j)^2 + d * sum_{non-edges} (u_i v_j)^2``
    """
    X = np.outer(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64))
    E = G.biadjacency == 1
    return float(np.sum((1.0 - X[E]) ** 2) + d * np.sum(X[~E] ** 2))


def _require(inst, kind):
    if inst.kind != kind:
        raise ParameterError(f"operation needs a {kind} instance, got {inst.kind}")
