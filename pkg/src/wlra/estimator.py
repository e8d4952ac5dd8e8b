"""scikit-learn style wrapper around the multistart alternating solver."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_data, check_positive_int, check_sample_weight, check_seed
from .exceptions import DimensionError
from .solver import SolveConfig, solve_rank_one, solve_rank_r


class WeightedLowRankApproximation(TransformerMixin, BaseEstimator):
    """Rank-``r`` approximation ``X ~ U V^T`` minimising ``sum W_ij (X - U V^T)_ij^2``.

    NaN entries of ``X`` are treated as missing (weight 0).

    Parameters
    ----------
    rank : int
    max_sweeps : int
        Cap on alternating sweeps per start.
    tol : float
        Stop when one sweep lowers the objective by less than ``tol`` relative.
    n_starts : int
        Number of starting points; the best run is kept.
    random_state : int, Generator or None
    nonneg : bool
        Constrain both factors to be nonnegative.
    divergence_threshold : float
        Imbalance level at which a run is declared divergent.

    Attributes
    ----------
    U_ : ndarray (n_samples, rank)
    V_ : ndarray (n_features, rank)
    components_ : ndarray (rank, n_features)
        ``V_.T``.
    objective_ : float
    converged_, diverged_ : bool
    runs_ : list of SolveResult
    """

    def __init__(self, rank=1, max_sweeps=2000, tol=1e-12, n_starts=64, random_state=None,
                 nonneg=False, divergence_threshold=1e8):
        self.rank = rank
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.n_starts = n_starts
        self.random_state = random_state
        self.nonneg = nonneg
        self.divergence_threshold = divergence_threshold

    def _config(self):
        return SolveConfig(max_sweeps=check_positive_int(self.max_sweeps, "max_sweeps"),
                           rel_tol=float(self.tol),
                           starts=check_positive_int(self.n_starts, "n_starts"),
                           seed=check_seed(self.random_state), nonneg=bool(self.nonneg),
                           divergence_threshold=float(self.divergence_threshold))

    def fit(self, X, y=None, weights=None):
        M, observed = check_data(X)
        W = check_sample_weight(weights, M.shape, observed)
        r = check_positive_int(self.rank, "rank", min(M.shape))
        cfg = self._config()
        if r == 1:
            best, runs = solve_rank_one(M, W, cfg)
        else:
            best, runs = solve_rank_r(M, W, r, cfg)
        self.U_ = best.factors.U
        self.V_ = best.factors.V
        self.components_ = self.V_.T
        self.objective_ = best.objective
        self.converged_ = best.converged
        self.diverged_ = best.diverged
        self.runs_ = runs
        self.n_features_in_ = M.shape[1]
        return self

    def transform(self, X, weights=None):
        """Row coordinates by weighted least squares against the fitted ``V_``."""
        check_is_fitted(self, "V_")
        M, observed = check_data(X)
        if M.shape[1] != self.n_features_in_:
            raise DimensionError(f"X has {M.shape[1]} columns, model was fitted with {self.n_features_in_}")
        W = check_sample_weight(weights, M.shape, observed).values
        V = self.V_
        out = np.zeros((M.shape[0], V.shape[1]))
        for i in range(M.shape[0]):
            w = W[i]
            on = w > 0
            if not on.any():
                continue
            A = V[on]
            G = A.T @ (w[on, None] * A)
            b = A.T @ (w[on] * M[i, on])
            out[i] = np.linalg.lstsq(G, b, rcond=None)[0]
        return out

    def inverse_transform(self, Z):
        check_is_fitted(self, "V_")
        return np.asarray(Z, dtype=np.float64) @ self.V_.T
