"""Certificates for the biclique reductions.

Every ``check_*`` function evaluates one bound of the reduction argument on
concrete factors and returns a :class:`BoundReport`.  Reports are oriented
so that the bound reads ``lhs <= rhs`` (or ``lhs < rhs`` for strict
bounds) and ``margin = rhs - lhs``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .biclique import Biclique, BipartiteGraph, max_edge_biclique
from .core import FactorPair, WeightMatrix, as_weights, wlra_objective
from .exceptions import HypothesisViolationError, InconsistencyError, ParameterError
from .reductions import (MISSING_DATA, POSITIVE_WEIGHT, ReductionInstance, WitnessParams,
                         default_K, lemma3_d, lemma6_d, md1d_witness, witness_bound)
from .solver import _closed_form

# relative slack for non-strict comparisons between computed floats
FLOAT_RTOL = 1e-12


@dataclass(frozen=True)
class BoundReport:
    name: str
    hypothesis_ok: bool
    lhs: float
    rhs: float
    satisfied: bool
    margin: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)

    @property
    def ok(self) -> bool:
        return self.hypothesis_ok and self.satisfied


def _leq(a, b):
    return a <= b + FLOAT_RTOL * (1.0 + abs(b))


def _vec(x):
    return np.asarray(x, dtype=np.float64).reshape(-1)


def extract_biclique(G: BipartiteGraph, u, v, c=0.5) -> Biclique:
    """Rows and columns touched by a product entry ``|u_i v_j| > c``.

    Raises :class:`HypothesisViolationError` when the resulting pair of
    vertex sets covers a non-edge (``c`` is too small for these factors).
    """
    if not (0 < c <= 1):
        raise ParameterError(f"threshold c must lie in (0, 1], got {c}")
    u, v = _vec(u), _vec(v)
    if u.size != G.s or v.size != G.t:
        raise ParameterError("factors must be restricted to the graph block")
    big = np.abs(np.outer(u, v)) > c
    B = Biclique(np.flatnonzero(big.any(axis=1)), np.flatnonzero(big.any(axis=0)))
    if not B.is_valid(G):
        raise HypothesisViolationError(f"extracted {B.label()} covers a non-edge at threshold c={c}")
    return B


def zero_entry_scores(G: BipartiteGraph, u, v, n_rows=None, n_cols=None):
    """``min(max_k |u_i v_k|, max_p |u_p v_j|)`` for every non-edge ``(i, j)``.

    ``n_rows``/``n_cols`` limit the maxima to the leading coordinates (the
    graph block of a larger instance); by default all coordinates are used.
    """
    u, v = _vec(u), _vec(v)
    uu = u if n_rows is None else u[:n_rows]
    vv = v if n_cols is None else v[:n_cols]
    row_max = np.abs(u[:G.s]) * np.max(np.abs(vv))
    col_max = np.abs(v[:G.t]) * np.max(np.abs(uu))
    return np.array([min(row_max[i], col_max[j]) for i, j in G.zero_entries()])


def _optimum(G):
    return max_edge_biclique(G)[1]


def check_lemma1(inst: ReductionInstance, u, v) -> BoundReport:
    """Row/column bound at non-edges for solutions with objective at most ``|E|``.

    For each non-edge, the smaller of its row and column maxima of
    ``|u v^T|`` must not exceed ``(4 |E|^2 / d)^{1/4}``.
    """
    if inst.kind != POSITIVE_WEIGHT:
        raise ParameterError("check_lemma1 needs a positive_weight instance")
    G, E = inst.source, inst.edge_count
    obj = wlra_objective(inst.M, inst.W, (u, v))
    hyp = obj <= E
    rhs = (4.0 * E**2 / inst.d) ** 0.25
    scores = zero_entry_scores(G, u, v)
    lhs = float(scores.max()) if scores.size else 0.0
    return BoundReport("lemma1", bool(hyp), lhs, rhs, bool(_leq(lhs, rhs)), rhs - lhs)


def check_lemma2(G: BipartiteGraph, W, u, v, c) -> BoundReport:
    """Lower bound ``||M_b - u v^T||_W^2 > p (1 - 2c)`` when every non-edge has a small row or column.

    The squared form is checked; ``p = |E| - |E*|`` comes from the exhaustive oracle.
    """
    if not (0 < c <= 1):
        raise ParameterError(f"threshold c must lie in (0, 1], got {c}")
    Wm = as_weights(W, (G.s, G.t))
    if np.any(Wm.values[G.biadjacency == 1] != 1):
        raise ParameterError("weights must equal 1 on every edge")
    scores = zero_entry_scores(G, u, v)
    hyp = bool(np.all(scores <= c))
    p = _optimum(G)
    obj = wlra_objective(G.biadjacency, Wm, (u, v))
    lhs = p * (1.0 - 2.0 * c)
    if p == 0:
        return BoundReport("lemma2", hyp, 0.0, obj, True, obj)
    return BoundReport("lemma2", hyp, lhs, obj, bool(obj > lhs), obj - lhs)


def check_lemma3_sandwich(inst: ReductionInstance, eps, p_best, candidate_objectives=()) -> BoundReport:
    """``|E| - |E*| - eps < objective`` for every candidate, and ``p_best <= |E| - |E*|``.

    ``lhs`` is ``|E| - |E*| - eps``; ``rhs`` the smallest objective seen.
    The hypothesis is ``d >= 2^6 |E|^6 / eps^4``.
    """
    if inst.kind != POSITIVE_WEIGHT:
        raise ParameterError("check_lemma3_sandwich needs a positive_weight instance")
    E = inst.edge_count
    p = _optimum(inst.source)
    hyp = E == 0 or inst.d >= lemma3_d(E, eps)
    objs = [float(p_best)] + [float(o) for o in candidate_objectives]
    low = min(objs)
    if p == 0:
        ok = _leq(p_best, 0.0)
        return BoundReport("lemma3", bool(hyp), 0.0 - eps, low, bool(ok), low + eps)
    lhs = p - eps
    ok = _leq(p_best, p) and low > lhs
    return BoundReport("lemma3", bool(hyp), lhs, low, bool(ok), low - lhs)


def recover_biclique_count(E_count, p_bar, eps) -> int:
    """``|E*| = |E| - ceil(p_bar + eps) + 1``.

    Valid when ``p* <= p_bar <= p* + 1 - eps``; that precondition involves
    the unknown optimum and is not checked here, but a result outside
    ``[0, |E|]`` proves it was violated.
    """
    if not (0 < eps <= 1):
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    out = int(E_count - math.ceil(p_bar + eps) + 1)
    if not (0 <= out <= E_count):
        raise InconsistencyError(
            f"recovered |E*| = {out} outside [0, {E_count}]: accuracy precondition violated")
    return out


def lemma5_beta(E_count, d) -> float:
    return math.sqrt(2.0) * E_count**0.75 / math.sqrt(d - math.sqrt(E_count))


def check_lemma5(inst: ReductionInstance, u, v, scope="graph") -> BoundReport:
    """Row/column bound at non-edges of the graph block of a missing-data instance.

    ``scope='graph'`` takes the row and column maxima over the graph block
    only (what the supporting argument bounds); ``scope='full'`` uses every
    coordinate of ``u`` and ``v``.
    """
    if inst.kind != MISSING_DATA:
        raise ParameterError("check_lemma5 needs a missing_data instance")
    if scope not in ("graph", "full"):
        raise ParameterError(f"unknown scope {scope!r}")
    G, E, d = inst.source, inst.edge_count, inst.d
    obj = wlra_objective(inst.M, inst.W, (u, v))
    hyp = d > math.sqrt(E) and obj <= E
    rhs = lemma5_beta(E, d) if d > math.sqrt(E) else math.inf
    if scope == "graph":
        scores = zero_entry_scores(G, u, v, G.s, G.t)
    else:
        scores = zero_entry_scores(G, u, v)
    lhs = float(scores.max()) if scores.size else 0.0
    return BoundReport("lemma5", bool(hyp), lhs, rhs, bool(_leq(lhs, rhs)), rhs - lhs)


def check_lemma4(inst: ReductionInstance, B: Biclique | None = None, params: WitnessParams | None = None) -> BoundReport:
    """Witness objective against ``(|E| - |E(B)|) + 2 Z d^{2(1-K)}`` (maximum biclique by default)."""
    if inst.kind != MISSING_DATA:
        raise ParameterError("check_lemma4 needs a missing_data instance")
    if B is None:
        B = max_edge_biclique(inst.source)[0]
    params = params or WitnessParams(default_K(inst.d, inst.Z))
    F = md1d_witness(inst, B, params)
    obj = wlra_objective(inst.M, inst.W, F)
    bound = witness_bound(inst, B.edge_count, params.K)
    return BoundReport("lemma4", inst.d > 1, obj, bound, bool(_leq(obj, bound)), bound - obj)


def check_lemma6(inst: ReductionInstance, eps, candidates=(), params: WitnessParams | None = None) -> BoundReport:
    """``|E| - |E*| - eps < objective`` for every candidate and for the witness.

    Also requires the witness to respect its upper bound.  ``lhs`` is
    ``|E| - |E*| - eps``, ``rhs`` the smallest objective among candidates
    and witness.  Hypothesis: ``d > 8 |E|^{7/2} / eps^2 + |E|^{1/2}``.
    """
    if inst.kind != MISSING_DATA:
        raise ParameterError("check_lemma6 needs a missing_data instance")
    E = inst.edge_count
    best, p = max_edge_biclique(inst.source)
    hyp = inst.d > lemma6_d(E, eps)
    upper = check_lemma4(inst, best, params)
    objs = [upper.lhs] + [wlra_objective(inst.M, inst.W, F) for F in candidates]
    low = min(objs)
    if p == 0:
        return BoundReport("lemma6", bool(hyp), -eps, low, upper.satisfied, low + eps)
    lhs = p - eps
    ok = upper.satisfied and low > lhs
    return BoundReport("lemma6", bool(hyp), lhs, low, bool(ok), low - lhs)


def indicator_factors(inst: ReductionInstance, B: Biclique) -> FactorPair:
    """Binary indicators of ``B`` (with the witness completion for missing-data instances)."""
    if inst.kind == MISSING_DATA:
        return md1d_witness(inst, B)
    G = inst.source
    u, v = B.indicators(G.s, G.t)
    if inst.rank == 1:
        return FactorPair.rank_one(u, v)
    r = inst.rank
    U = np.kron(np.eye(r), u[:, None])
    V = np.kron(np.eye(r), v[:, None])
    return FactorPair(U, V)


def _shrink_zeros(G, u, v, rng, floor):
    """Make every non-edge product tiny by shrinking its row or column factor."""
    for i, j in rng.permutation(G.zero_entries()):
        if abs(u[i] * v[j]) > floor:
            if rng.random() < 0.5:
                u[i] *= floor / max(abs(u[i] * v[j]), 1e-300) * rng.uniform(0.0, 1.0)
            else:
                v[j] *= floor / max(abs(u[i] * v[j]), 1e-300) * rng.uniform(0.0, 1.0)
    return u, v


def _complete_md(inst, ub, vb, rng, jitter):
    """Best ``d``-block for a given graph block, with multiplicative jitter.

    For the k-th non-edge ``(i, j)`` the block entries ``a = u_d[k]``,
    ``b = v_d[k]`` appear in ``(d - a b)^2 + (a v_j)^2 + (u_i b)^2``; the
    optimum has ``a b = d - |u_i v_j|`` split so that ``|a v_j| = |u_i b|``.
    """
    d = inst.d
    ud = np.empty(inst.Z)
    vd = np.empty(inst.Z)
    for k, (i, j) in enumerate(inst.zero_index):
        c = abs(ub[i] * vb[j])
        P = max(d - c, d * 1e-3)
        ratio = (abs(ub[i]) + 1e-12) / (abs(vb[j]) + 1e-12)
        a = math.sqrt(P * ratio) * math.exp(jitter * rng.standard_normal())
        b = P / a * math.exp(jitter * rng.standard_normal())
        ud[k], vd[k] = a, b
    return np.concatenate([ub, ud]), np.concatenate([vb, vd])


def sample_candidates(inst: ReductionInstance, n, seed=42, max_objective=None, polish_sweeps=20,
                      max_draws=None):
    """Random factor pairs with objective at most ``max_objective`` (default ``|E|``).

    Graph-block entries are drawn uniformly in ``[-2, 2]``; each non-edge
    product is then shrunk below ``sqrt(|E|/d)`` by scaling its row or
    column entry, missing-data instances get a jittered optimal ``d``
    block, every second draw is refined by a random number of exact
    alternating half-steps, and draws above the objective cap are
    discarded.

    Returns a list of ``FactorPair`` (possibly shorter than ``n`` if
    ``max_draws`` runs out).
    """
    rng = np.random.default_rng(seed)
    G, E = inst.source, inst.edge_count
    cap = E if max_objective is None else max_objective
    if inst.kind == MISSING_DATA:
        # each non-edge costs about 2 d |u_i v_j| once the d block is optimal
        floor = max(E, 1) / (2.0 * inst.d * max(inst.Z, 1))
    else:
        floor = math.sqrt(max(E, 1) / inst.d)
    max_draws = max_draws or 50 * n
    Wv = inst.W.values
    MW = inst.M * Wv
    out = []
    draws = 0
    while len(out) < n and draws < max_draws:
        draws += 1
        u = rng.uniform(-2.0, 2.0, G.s)
        v = rng.uniform(-2.0, 2.0, G.t)
        u, v = _shrink_zeros(G, u, v, rng, floor * rng.uniform(0.01, 1.0))
        if inst.kind == MISSING_DATA:
            u, v = _complete_md(inst, u, v, rng, jitter=rng.uniform(0.0, 0.1))
        if draws % 2 == 0:
            for _ in range(int(rng.integers(1, polish_sweeps + 1))):
                v_new = _closed_form(MW, Wv, u)
                if not np.any(v_new):
                    break
                v = v_new
                u_new = _closed_form(MW.T, Wv.T, v)
                if not np.any(u_new):
                    break
                u = u_new
        F = FactorPair.rank_one(u, v)
        if wlra_objective(inst.M, inst.W, F) <= cap:
            out.append(F)
    return out


def biclique_count_from_objective(inst: ReductionInstance, p_bar, eps) -> int:
    """Apply the recovery formula to an objective value of ``inst``."""
    return recover_biclique_count(inst.edge_count, p_bar, eps)


def lemma_battery(inst: ReductionInstance, eps, candidates, lemma5_scope="graph"):
    """Run every check applicable to ``inst`` on ``candidates`` (list of FactorPair).

    Returns ``(reports, best_objective)``.  Per-candidate checks whose
    hypothesis needs objective <= |E| are aggregated over the admissible
    candidates (worst case reported).
    """
    E = inst.edge_count
    objs = [wlra_objective(inst.M, inst.W, F) for F in candidates]
    admissible = [F for F, o in zip(candidates, objs) if o <= E]
    reports = []
    if inst.kind == POSITIVE_WEIGHT:
        reports.append(_worst([check_lemma1(inst, F.u, F.v) for F in admissible], "lemma1"))
        if E > 0:
            c = (4.0 * E**2 / inst.d) ** 0.25
            if c < 1:
                reports.append(_worst(
                    [check_lemma2(inst.source, inst.W, F.u, F.v, c) for F in admissible], "lemma2"))
        p_best = min(objs) if objs else math.inf
        reports.append(check_lemma3_sandwich(inst, eps, p_best, objs))
    elif inst.kind == MISSING_DATA:
        reports.append(check_lemma4(inst))
        reports.append(_worst([check_lemma5(inst, F.u, F.v, lemma5_scope) for F in admissible], "lemma5"))
        reports.append(check_lemma6(inst, eps, candidates))
    else:
        raise ParameterError(f"no lemma battery for {inst.kind} instances")
    best = min(objs) if objs else math.inf
    if inst.kind == MISSING_DATA:
        best = min(best, reports[0].lhs)
    return reports, best


def _worst(reports, name):
    if not reports:
        # no admissible candidate: vacuously satisfied
        return BoundReport(name, True, 0.0, 0.0, True, 0.0)
    bad = [r for r in reports if not r.satisfied]
    worst = min(bad or reports, key=lambda r: r.margin)
    return BoundReport(name, all(r.hypothesis_ok for r in reports), worst.lhs, worst.rhs,
                       all(r.satisfied for r in reports), worst.margin)
