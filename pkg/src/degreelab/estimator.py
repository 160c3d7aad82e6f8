"""Scikit-learn estimator facade over the minimum-degree interpolator.

The solver is a fit/predict-shaped algorithm: rows of sign-valued features
go in, an exact parity expansion comes out.  Wrapping it as an estimator
lets it sit inside pipelines, cross-validation, and grid search like any
other regressor.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .boolfn import DEFAULT_EPS, DegreeTolerance, degree
from .minsolve import DEFAULT_RESIDUAL_RTOL, MAX_SOLVE_DIM, min_degree_fit

__all__ = ["MinDegreeRegressor"]


def _rows_to_indices(X: np.ndarray) -> np.ndarray:
    if np.any(np.abs(X) != 1):
        raise ValueError("features must be +1/-1 valued")
    bits = (X < 0).astype(np.int64)
    return bits @ (1 << np.arange(X.shape[1], dtype=np.int64))


class MinDegreeRegressor(BaseEstimator, RegressorMixin):
    """Exact minimum-degree parity interpolation of sign-valued features.

    Parameters
    ----------
    residual_rtol : float
        A candidate degree is accepted once the least-squares residual
        drops below residual_rtol * (1 + ||y||).
    eps : float
        Relative zero threshold used when reading the fitted degree off
        the spectrum.

    Attributes
    ----------
    spectrum_ : FourierSpectrum
        Coefficients of the fitted parity expansion.
    degree_ : int
        The smallest consistent expansion degree.
    residual_by_degree_ : dict
        Least-squares residual of the best fit at each tried degree; the
        entry just below ``degree_`` certifies infeasibility.
    """

    def __init__(self, residual_rtol: float = DEFAULT_RESIDUAL_RTOL, eps: float = DEFAULT_EPS):
        self.residual_rtol = residual_rtol
        self.eps = eps

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        if X.shape[1] > MAX_SOLVE_DIM:
            raise ValueError(f"at most {MAX_SOLVE_DIM} features supported")
        solution = min_degree_fit(
            _rows_to_indices(X), y, X.shape[1], rtol=self.residual_rtol
        )
        self.n_features_in_ = X.shape[1]
        self.spectrum_ = solution.spectrum
        self.degree_ = degree(solution.spectrum, DegreeTolerance(self.eps))
        self.residual_by_degree_ = dict(solution.residual_by_degree)
        self._solution = solution
        return self

    def predict(self, X):
        check_is_fitted(self, "spectrum_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        return self._solution.evaluate_indices(_rows_to_indices(X))
