"""Dense matrices, weight matrices, masked matrices and the weighted Frobenius norm.

Plain ``numpy.ndarray`` objects play the role of data matrices; the small
classes below add the structural information the solvers and reductions
need (weight flags, missing-entry masks, factor pairs).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DimensionError, ParameterError

RANK_ONE_RTOL = 1e-12


def as_matrix(A, name="matrix") -> np.ndarray:
    """Return ``A`` as a finite 2-D float64 array (read-only copy)."""
    arr = np.array(A, dtype=np.float64, copy=True)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def _as_vector(x, name):
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite entries")
    return arr


class WeightMatrix:
    """Nonnegative weight matrix with cached structural flags.

    Parameters
    ----------
    values : array-like, shape (m, n)
        Nonnegative finite weights.
    """

    def __init__(self, values):
        if isinstance(values, WeightMatrix):
            values = values.values
        arr = as_matrix(values, "weight matrix")
        if np.any(arr < 0):
            raise ParameterError("weight matrix has negative entries")
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def shape(self):
        return self._values.shape

    @classmethod
    def ones(cls, shape):
        return cls(np.ones(shape))

    @classmethod
    def from_mask(cls, known):
        return cls(np.asarray(known, dtype=bool).astype(np.float64))

    @cached_property
    def is_binary(self) -> bool:
        return bool(np.all((self._values == 0) | (self._values == 1)))

    @cached_property
    def is_positive(self) -> bool:
        return bool(np.all(self._values > 0))

    @cached_property
    def is_rank_one(self) -> bool:
        # every 2x2 minor W_ij W_kl - W_il W_kj must vanish
        W = self._values
        P = np.einsum("ij,kl->ijkl", W, W)
        Q = np.einsum("il,kj->ijkl", W, W)
        scale = np.maximum(np.abs(P), np.abs(Q))
        return bool(np.all(np.abs(P - Q) <= RANK_ONE_RTOL * scale))

    @cached_property
    def has_zeros(self) -> bool:
        return bool(np.any(self._values == 0))

    def __array__(self, dtype=None, copy=None):
        return self._values if dtype is None else self._values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._values, other._values))

    def __hash__(self):
        return hash((self.shape, self._values.tobytes()))

    def __repr__(self):
        return f"WeightMatrix(shape={self.shape}, binary={self.is_binary}, positive={self.is_positive})"


def as_weights(W, shape=None) -> WeightMatrix:
    """Coerce ``W`` into a :class:`WeightMatrix`, optionally checking its shape."""
    Wm = W if isinstance(W, WeightMatrix) else WeightMatrix(W)
    if shape is not None and Wm.shape != tuple(shape):
        raise DimensionError(f"weight matrix shape {Wm.shape} does not match {tuple(shape)}")
    return Wm


class MaskedMatrix:
    """Matrix with missing entries.

    Unknown positions are stored as 0 so that two masked matrices with the
    same known data compare equal.
    """

    def __init__(self, values, known):
        vals = np.array(values, dtype=np.float64, copy=True)
        mask = np.array(known, dtype=bool, copy=True)
        if vals.ndim != 2 or vals.shape != mask.shape:
            raise DimensionError(f"values {vals.shape} and mask {mask.shape} must be equal 2-D shapes")
        vals[~mask] = 0.0
        if not np.all(np.isfinite(vals)):
            raise ParameterError("known entries must be finite")
        vals.flags.writeable = False
        mask.flags.writeable = False
        self.values = vals
        self.known = mask

    @classmethod
    def from_nan(cls, A):
        """Build from an array that marks missing entries with NaN."""
        arr = np.asarray(A, dtype=np.float64)
        known = ~np.isnan(arr)
        return cls(np.where(known, arr, 0.0), known)

    @property
    def shape(self):
        return self.values.shape

    def weights(self) -> WeightMatrix:
        return WeightMatrix.from_mask(self.known)

    def __eq__(self, other):
        if not isinstance(other, MaskedMatrix):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values) and np.array_equal(self.known, other.known))

    def __hash__(self):
        return hash((self.shape, self.values.tobytes(), self.known.tobytes()))

    def __repr__(self):
        rows = []
        for i in range(self.shape[0]):
            rows.append(" ".join(f"{v:g}" if k else "?" for v, k in zip(self.values[i], self.known[i])))
        return "MaskedMatrix[" + "; ".join(rows) + "]"


@dataclass(frozen=True, eq=False)
class FactorPair:
    """Rank-r factors ``U`` (m x r) and ``V`` (n x r); the approximation is ``U @ V.T``."""

    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U = np.array(self.U, dtype=np.float64)
        V = np.array(self.V, dtype=np.float64)
        if U.ndim == 1:
            U = U.reshape(-1, 1)
        if V.ndim == 1:
            V = V.reshape(-1, 1)
        if U.ndim != 2 or V.ndim != 2 or U.shape[1] != V.shape[1] or U.shape[1] < 1:
            raise DimensionError(f"factor shapes {U.shape} and {V.shape} are incompatible")
        U.flags.writeable = False
        V.flags.writeable = False
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @classmethod
    def rank_one(cls, u, v):
        return cls(_as_vector(u, "u").reshape(-1, 1), _as_vector(v, "v").reshape(-1, 1))

    @property
    def rank(self) -> int:
        return self.U.shape[1]

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    @property
    def u(self) -> np.ndarray:
        """First column of ``U`` (the rank-one factor)."""
        return self.U[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.V[:, 0]

    def product(self) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return self.U @ self.V.T


def as_factors(F) -> FactorPair:
    if isinstance(F, FactorPair):
        return F
    U, V = F
    U = np.asarray(U, dtype=np.float64)
    if U.ndim == 1:
        return FactorPair.rank_one(U, V)
    return FactorPair(U, V)


def weighted_sq_norm(A, W) -> float:
    """Squared weighted Frobenius norm ``sum_ij W_ij A_ij**2``.

    Entries with zero weight are skipped entirely, so huge (or infinite)
    values at unobserved positions do not poison the sum.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    Wv = as_weights(W).values
    if A.shape != Wv.shape:
        raise DimensionError(f"matrix shape {A.shape} does not match weight shape {Wv.shape}")
    on = Wv > 0
    return float(np.sum(Wv[on] * A[on] ** 2))


def wlra_objective(M, W, F) -> float:
    """``||M - U V^T||_W^2`` for a factor pair ``F`` (a FactorPair or a ``(U, V)`` tuple)."""
    M = np.asarray(M, dtype=np.float64)
    F = as_factors(F)
    if F.shape != M.shape:
        raise DimensionError(f"factors produce shape {F.shape}, data matrix is {M.shape}")
    Wv = as_weights(W, M.shape).values
    on = Wv > 0
    # only observed products are formed, avoiding overflow at W == 0
    rows, cols = np.nonzero(on)
    approx = np.einsum("kr,kr->k", F.U[rows], F.V[cols])
    return float(np.sum(Wv[rows, cols] * (M[rows, cols] - approx) ** 2))


@dataclass(frozen=True)
class CompletionResult:
    feasible: bool
    witness: FactorPair | None


def _connected_components(entries, rows, cols):
    # union-find over row nodes (i) and column nodes (m + j)
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in rows:
        parent[("r", i)] = ("r", i)
    for j in cols:
        parent[("c", j)] = ("c", j)
    for i, j in entries:
        a, b = find(("r", i)), find(("c", j))
        if a != b:
            parent[a] = b
    groups = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)
    return list(groups.values())


def rank_one_completion_check(M: MaskedMatrix, rtol=1e-12) -> CompletionResult:
    """Decide whether the known entries of ``M`` admit an exact rank-<=1 completion.

    Rows (columns) holding a known nonzero must have a nonzero factor entry;
    a known zero shared by two such lines is therefore fatal.  Every other
    row/column factor entry is set to zero.  The nonzero known entries split
    into connected components, and inside each one ``u`` is propagated as a
    multiple of the pivot column and checked against every known value.
    """
    if not isinstance(M, MaskedMatrix):
        raise ParameterError("rank_one_completion_check expects a MaskedMatrix")
    if not M.known.any():
        raise ParameterError("masked matrix has no known entry")
    X, K = M.values, M.known
    m, n = X.shape
    nz = K & (X != 0)
    rows_nz = np.flatnonzero(nz.any(axis=1))
    cols_nz = np.flatnonzero(nz.any(axis=0))
    if np.any(K[np.ix_(rows_nz, cols_nz)] & (X[np.ix_(rows_nz, cols_nz)] == 0)):
        return CompletionResult(False, None)

    u = np.zeros(m)
    v = np.zeros(n)
    entries = list(zip(*np.nonzero(nz)))
    for comp in _connected_components(entries, rows_nz.tolist(), cols_nz.tolist()):
        comp_cols = sorted(j for kind, j in comp if kind == "c")
        counts = [int(nz[:, j].sum()) for j in comp_cols]
        pivot = comp_cols[int(np.argmax(counts))]  # argmax keeps the lowest index on ties
        v[pivot] = 1.0
        seen_c, seen_r = {pivot}, set()
        frontier = [("c", pivot)]
        while frontier:
            kind, idx = frontier.pop()
            if kind == "c":
                for i in np.flatnonzero(nz[:, idx]):
                    if i not in seen_r:
                        u[i] = X[i, idx] / v[idx]
                        seen_r.add(i)
                        frontier.append(("r", i))
            else:
                for j in np.flatnonzero(nz[idx, :]):
                    if j not in seen_c:
                        v[j] = X[idx, j] / u[idx]
                        seen_c.add(j)
                        frontier.append(("c", j))

    approx = np.outer(u, v)
    err = np.abs(approx - X)[K]
    if np.all(err <= rtol * np.maximum(np.abs(X[K]), 1e-300)):
        return CompletionResult(True, FactorPair.rank_one(u, v))
    return CompletionResult(False, None)
