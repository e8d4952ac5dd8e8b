import numpy as np
import pytest
from sklearn.base import clone

from wlra import DimensionError, ParameterError, WeightedLowRankApproximation


def test_params_round_trip():
    est = WeightedLowRankApproximation(rank=2, n_starts=5, random_state=3)
    assert est.get_params()["rank"] == 2
    est2 = clone(est).set_params(tol=1e-8)
    assert est2.tol == 1e-8 and est2.n_starts == 5


def test_fit_exact_rank_two():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 5))
    est = WeightedLowRankApproximation(rank=2, n_starts=4, random_state=0).fit(X)
    assert est.objective_ < 1e-10
    assert est.components_.shape == (2, 5)
    np.testing.assert_allclose(est.inverse_transform(est.transform(X)), X, atol=1e-6)


def test_missing_entries_and_divergence():
    X = np.array([[1.0, np.nan], [0.0, 1.0]])
    est = WeightedLowRankApproximation(n_starts=8).fit(X)
    assert est.objective_ < 1e-6 and est.diverged_ and not est.converged_
    assert len(est.runs_) == 8


def test_weights_are_used():
    X = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
    W = np.array([[1.0, 100.0, 2.0], [100.0, 1.0, 2.0], [1.0, 1.0, 1.0]])
    est = WeightedLowRankApproximation(random_state=0).fit(X, weights=W)
    assert est.objective_ == pytest.approx(3.91964022296, abs=1e-9)


def test_fit_transform_matches_fit_then_transform():
    rng = np.random.default_rng(1)
    X = rng.uniform(0, 1, (5, 4))
    a = WeightedLowRankApproximation(n_starts=3, random_state=2)
    Z = a.fit_transform(X)
    np.testing.assert_allclose(Z, a.transform(X))


def test_validation_errors():
    with pytest.raises(ParameterError):
        WeightedLowRankApproximation(rank=0).fit(np.ones((2, 2)))
    with pytest.raises(ParameterError):
        WeightedLowRankApproximation(rank=3).fit(np.ones((2, 2)))
    with pytest.raises(DimensionError):
        WeightedLowRankApproximation().fit(np.ones(3))
    with pytest.raises(ParameterError):
        WeightedLowRankApproximation().fit([[1.0, np.inf]])
    est = WeightedLowRankApproximation(n_starts=2).fit(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        est.transform(np.ones((2, 2)))
    with pytest.raises(DimensionError):
        est.fit(np.ones((2, 3)), weights=np.ones((3, 2)))


def test_nonneg_factors():
    rng = np.random.default_rng(3)
    X = rng.uniform(0, 1, (4, 4))
    est = WeightedLowRankApproximation(nonneg=True, n_starts=4).fit(X)
    assert np.all(est.U_ >= 0) and np.all(est.V_ >= 0)
