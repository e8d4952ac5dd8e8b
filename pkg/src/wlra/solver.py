"""Alternating minimisation for weighted low-rank approximation.

Each sweep solves exactly for ``V`` with ``U`` fixed and then for ``U``
with ``V`` fixed (column-wise closed form in the rank-one case, small
weighted least-squares systems otherwise), rebalances the factor scales,
and tries an extrapolated step along the last sweep direction that is
kept only if it lowers the objective.  The objective is therefore
nonincreasing along every recorded trajectory.

When ``W`` has zero entries the infimum may be approached only by factors
whose product blows up on unobserved positions; such runs are flagged as
``diverged`` rather than ``converged``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .core import FactorPair, as_matrix, as_weights, wlra_objective
from .exceptions import DegenerateInputError, DimensionError, ParameterError

RIDGE = 1e-12


@dataclass(frozen=True)
class SolveConfig:
    """Stopping rules, multistart settings and options of the alternating solver."""

    max_sweeps: int = 2000
    rel_tol: float = 1e-12
    starts: int = 64
    seed: int = 0
    nonneg: bool = False
    divergence_threshold: float = 1e8
    extrapolate: bool = True

    def __post_init__(self):
        if self.max_sweeps < 1 or self.starts < 1:
            raise ParameterError("max_sweeps and starts must be >= 1")
        if not (self.rel_tol > 0 and self.divergence_threshold > 0):
            raise ParameterError("tolerances must be positive")


@dataclass(frozen=True, eq=False)
class SolveResult:
    factors: FactorPair
    objective: float
    sweeps_used: int
    converged: bool
    diverged: bool
    start_index: int
    history: tuple = field(default=(), repr=False)

    def to_dict(self, with_factors=True):
        out = {
            "start_index": self.start_index,
            "objective": self.objective,
            "sweeps_used": self.sweeps_used,
            "converged": self.converged,
            "diverged": self.diverged,
        }
        if with_factors:
            out["U"] = self.factors.U.tolist()
            out["V"] = self.factors.V.tolist()
        return out


def _check_problem(M, W):
    M = as_matrix(M, "data matrix")
    Wm = as_weights(W, M.shape)
    if not np.any(Wm.values > 0):
        raise ParameterError("weight matrix is identically zero")
    return M, Wm


def _closed_form(MW, W, u, nonneg=False):
    den = W.T @ (u * u)
    num = MW.T @ u
    out = np.zeros_like(num)
    on = den > 0
    out[on] = num[on] / den[on]
    if nonneg:
        np.maximum(out, 0.0, out=out)
    return out


def closed_form_v(M, W, u, nonneg=False) -> np.ndarray:
    """Optimal ``v`` for fixed ``u``: ``v_j = sum_i W_ij M_ij u_i / sum_i W_ij u_i^2``.

    Columns whose denominator vanishes (only possible when ``W`` has zeros)
    get ``v_j = 0``.  With ``nonneg=True`` each coordinate is clipped at 0,
    which is the exact minimiser of the one-variable problem on ``v_j >= 0``.
    """
    M, Wm = _check_problem(M, W)
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    if u.shape != (M.shape[0],):
        raise DimensionError(f"u has {u.size} entries, expected {M.shape[0]}")
    if not np.any(u) and Wm.is_positive:
        raise DegenerateInputError("u is zero: the objective does not depend on v")
    return _closed_form(M * Wm.values, Wm.values, u, nonneg)


def closed_form_u(M, W, v, nonneg=False) -> np.ndarray:
    """Optimal ``u`` for fixed ``v`` (the transposed problem)."""
    M = np.asarray(M, dtype=np.float64)
    return closed_form_v(M.T, np.asarray(as_weights(W).values).T, v, nonneg)


def _balance(U, V):
    nu = np.linalg.norm(U, axis=0)
    nv = np.linalg.norm(V, axis=0)
    ok = (nu > 0) & (nv > 0)
    alpha = np.ones_like(nu)
    alpha[ok] = np.sqrt(nv[ok] / nu[ok])
    return U * alpha, V / alpha


def _objective(M, Wv, U, V):
    with np.errstate(over="ignore", invalid="ignore"):
        X = U @ V.T
    R = np.where(Wv > 0, M - X, 0.0)
    return float(np.sum(Wv * R * R))


def _imbalance(Wv, U, V):
    """Largest unobserved product relative to the largest observed one."""
    zero = Wv == 0
    if not zero.any():
        return 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        X = np.abs(U @ V.T)
    return float(X[zero].max() / (1.0 + X[~zero].max()))


class _Problem:
    """Precomputed data and the two exact block updates for one (M, W, r)."""

    def __init__(self, M, W, r, nonneg, least_squares=False):
        self.least_squares = least_squares
        self.M = M
        self.W = W.values
        self.MW = M * self.W
        self.r = r
        self.nonneg = nonneg

    def update_V(self, U):
        return self._solve(self.M, self.W, self.MW, U)

    def update_U(self, V):
        return self._solve(self.M.T, self.W.T, self.MW.T, V)

    def _solve(self, M, W, MW, U):
        if self.r == 1 and not self.least_squares:
            return _closed_form(MW, W, U[:, 0], self.nonneg)[:, None]
        n = M.shape[1]
        V = np.zeros((n, self.r))
        for j in range(n):
            w = W[:, j]
            on = w > 0
            if not on.any():
                continue
            A = U[on]
            if self.nonneg:
                sw = np.sqrt(w[on])
                V[j] = nnls(A * sw[:, None], M[on, j] * sw)[0]
                continue
            G = A.T @ (w[on, None] * A)
            b = A.T @ MW[on, j]
            if np.linalg.cond(G) <= 1e12:
                V[j] = np.linalg.solve(G, b)
                continue
            # ridge relative to the diagonal: with weights near 1e11 an
            # absolute 1e-12 would vanish in rounding
            ridge = RIDGE * max(1.0, float(np.max(np.diag(G))))
            try:
                V[j] = np.linalg.solve(G + ridge * np.eye(self.r), b)
            except np.linalg.LinAlgError:
                V[j] = np.linalg.lstsq(G, b, rcond=None)[0]
        return V

    def objective(self, U, V):
        return _objective(self.M, self.W, U, V)


def solve_from(M, W, U0, V0=None, cfg: SolveConfig | None = None, start_index=0,
               least_squares=False) -> SolveResult:
    """Run the alternating scheme from one starting point.

    The first half-sweep updates ``V`` from ``U0``, so ``V0`` only matters
    through the initial balancing.
    """
    cfg = cfg or SolveConfig()
    M, Wm = _check_problem(M, W)
    U = np.array(U0, dtype=np.float64)
    if U.ndim == 1:
        U = U[:, None]
    r = U.shape[1]
    V = np.ones((M.shape[1], r)) if V0 is None else np.array(V0, dtype=np.float64).reshape(M.shape[1], r)
    if U.shape[0] != M.shape[0]:
        raise DimensionError(f"U0 has {U.shape[0]} rows, expected {M.shape[0]}")
    prob = _Problem(M, Wm, r, cfg.nonneg, least_squares)
    if cfg.nonneg:
        U, V = np.abs(U), np.abs(V)
    U, V = _balance(U, V)

    V = prob.update_V(U)
    obj = prob.objective(U, V)
    history = [obj]
    U, V = _balance(U, V)
    converged = diverged = False
    step = 1.0
    prev_U = None
    rho_trace = []
    sweeps = 0
    for sweeps in range(1, cfg.max_sweeps + 1):
        start_obj = obj
        if not np.any(U) or not np.any(V):
            converged = True  # zero product is a stationary point
            sweeps -= 1
            break
        U_before = U
        U = prob.update_U(V)
        obj = prob.objective(U, V)
        history.append(obj)
        if not np.any(U):
            converged = True
            break
        V = prob.update_V(U)
        obj = prob.objective(U, V)
        history.append(obj)
        U, V = _balance(U, V)

        if cfg.extrapolate and prev_U is not None:
            U_try = U + step * (U - U_before)
            if cfg.nonneg:
                np.maximum(U_try, 0.0, out=U_try)
            V_try = prob.update_V(U_try)
            obj_try = prob.objective(U_try, V_try)
            if obj_try < obj:
                U, V = _balance(U_try, V_try)
                obj = obj_try
                history.append(obj)
                step = min(step * 2.0, 1e15)
            else:
                step = max(1.0, step / 4.0)
        prev_U = U_before

        rho = _imbalance(prob.W, U, V)
        rho_trace.append(rho)
        if rho > cfg.divergence_threshold:
            diverged = True
            break
        if obj == 0.0 or (start_obj - obj) <= cfg.rel_tol * start_obj:
            converged = True
            break

    if not diverged and _stalled_divergence(Wm, rho_trace, cfg.divergence_threshold):
        diverged, converged = True, False

    F = FactorPair(U, V)
    return SolveResult(F, wlra_objective(M, Wm, F), sweeps, converged, diverged, start_index, tuple(history))


def _stalled_divergence(Wm, rho_trace, threshold, window=10):
    """A run that stops (stall or sweep cap) while the unobserved product is
    still large and growing is approaching an unattained infimum."""
    if not Wm.has_zeros or len(rho_trace) < 2:
        return False
    recent = rho_trace[-window:]
    return rho_trace[-1] > np.sqrt(threshold) and recent[-1] > recent[0]


def _starts(m, n, r, cfg):
    rng = np.random.default_rng(cfg.seed)
    out = [(np.ones((m, r)), np.ones((n, r)))]
    for _ in range(cfg.starts - 1):
        out.append((rng.uniform(-1.0, 1.0, (m, r)), rng.uniform(-1.0, 1.0, (n, r))))
    return out


def _n_threads():
    try:
        return max(1, int(os.environ.get("WLRA_THREADS", "1")))
    except ValueError:
        return 1


def _multistart(M, W, r, cfg, inits=None):
    M, Wm = _check_problem(M, W)
    inits = inits if inits is not None else _starts(M.shape[0], M.shape[1], r, cfg)

    def run(k):
        U0, V0 = inits[k]
        return solve_from(M, Wm, U0, V0, cfg, start_index=k)

    threads = min(_n_threads(), len(inits))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, range(len(inits))))
    else:
        results = [run(k) for k in range(len(inits))]
    best = min(results, key=lambda res: (res.objective, res.start_index))
    return best, results


def solve_rank_one(M, W, cfg: SolveConfig | None = None, inits=None):
    """Multistart rank-one solve.

    Returns
    -------
    best : SolveResult
        Lowest objective, ties broken by start index.
    runs : list of SolveResult
        One entry per start, in start order.
    """
    cfg = cfg or SolveConfig()
    return _multistart(M, W, 1, cfg, inits)


def solve_rank_r(M, W, r, cfg: SolveConfig | None = None, inits=None):
    """Multistart rank-``r`` solve with per-row weighted least squares; same return shape as :func:`solve_rank_one`."""
    cfg = cfg or SolveConfig()
    M = as_matrix(M, "data matrix")
    if int(r) != r or not (1 <= r <= min(M.shape)):
        raise ParameterError(f"rank must satisfy 1 <= r <= {min(M.shape)}, got {r}")
    r = int(r)
    M, Wm = _check_problem(M, W)
    inits = inits if inits is not None else _starts(M.shape[0], M.shape[1], r, cfg)

    def run(k):
        U0, V0 = inits[k]
        # r == 1 still goes through the normal equations here, so the two
        # solvers stay independent code paths
        return solve_from(M, Wm, U0, V0, cfg, start_index=k, least_squares=True)

    results = [run(k) for k in range(len(inits))]
    best = min(results, key=lambda res: (res.objective, res.start_index))
    return best, results


def landscape_grid(M, W, grid_n=201):
    """Rank-one objective over the positive octant of the unit sphere (3-row problems).

    ``u = (x, y, sqrt(1 - x^2 - y^2))`` for ``x, y`` on a ``grid_n`` grid of
    ``[0, 1]`` with ``x^2 + y^2 <= 1``; ``v`` is the optimal closed form for
    each ``u``.  Returns a list of ``(x, y, objective)`` in x-major order.
    """
    M, Wm = _check_problem(M, W)
    if M.shape[0] != 3:
        raise DimensionError(f"landscape needs a 3-row matrix, got {M.shape[0]} rows")
    if int(grid_n) != grid_n or grid_n < 2:
        raise ParameterError(f"grid size must be an integer >= 2, got {grid_n}")
    g = np.linspace(0.0, 1.0, int(grid_n))
    X, Y = np.meshgrid(g, g, indexing="ij")
    # tolerate rounding on the boundary circle
    keep = X * X + Y * Y <= 1.0 + 1e-12
    x, y = X[keep], Y[keep]
    z = np.sqrt(np.clip(1.0 - x * x - y * y, 0.0, None))
    U = np.stack([x, y, z])                     # 3 x P
    Wv = Wm.values
    MW = M * Wv
    den = Wv.T @ (U * U)                        # n x P
    num = MW.T @ U
    Vs = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    obj = np.empty(x.size)
    for p in range(x.size):
        R = M - np.outer(U[:, p], Vs[:, p])
        obj[p] = np.sum(Wv * R * R)
    return [(float(a), float(b), float(f)) for a, b, f in zip(x, y, obj)]


def grid_local_minima(points):
    """Strict grid minima under 8-neighbour comparison.

    Neighbouring points whose objectives agree to rounding (relative 1e-12)
    are merged into one plateau; a plateau is a minimum when every feasible
    neighbour outside it is strictly larger, and it is reported once, by its
    lowest point (ties to the smallest ``(x, y)``).  Exact ties do occur, e.g.
    on symmetric problems whose minimum falls between two grid points.

    ``points`` is the output of :func:`landscape_grid`; coordinates are
    snapped to grid indices by the grid spacing.
    """
    if not points:
        return []
    xs = sorted({p[0] for p in points})
    h = xs[1] - xs[0] if len(xs) > 1 else 1.0
    table = {(round(x / h), round(y / h)): (x, y, f) for x, y, f in points}
    steps = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if a or b]

    def tied(f, g):
        return abs(f - g) <= 1e-12 * (1.0 + abs(f))

    seen = set()
    out = []
    for key in sorted(table):
        if key in seen:
            continue
        f0 = table[key][2]
        group, stack = {key}, [key]
        is_min = True
        while stack:
            i, j = stack.pop()
            for a, b in steps:
                nb = (i + a, j + b)
                if nb not in table or nb in group:
                    continue
                g = table[nb][2]
                if tied(f0, g):
                    group.add(nb)
                    stack.append(nb)
                elif g < f0:
                    is_min = False
        seen |= group
        if is_min:
            out.append(min((table[k] for k in group), key=lambda p: (p[2], p[0], p[1])))
    return sorted(out, key=lambda p: (p[0], p[1]))
