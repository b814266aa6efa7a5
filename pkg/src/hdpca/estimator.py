"""Scikit-learn compatible front end for the dual PCA."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dual import RANK_RTOL, DualDecomposition, dual_covariance, eigendecompose, recover_directions


class DualPCA(TransformerMixin, BaseEstimator):
    """Principal components computed through the n x n Gram matrix.

    Designed for wide data (n_samples much smaller than n_features): the
    eigensolve runs on X X'/n instead of the feature-space covariance, and the
    component directions are recovered by projecting the data onto the dual
    eigenvectors.  Unlike standard PCA the data are NOT mean-centered; the
    population mean is assumed to be zero.

    Parameters
    ----------
    n_components : int or None
        Number of components to retain.  None keeps every component above the
        numerical rank threshold.

    Attributes
    ----------
    eigenvalues_ : ndarray of shape (n_samples,)
        All dual eigenvalues (sample covariance eigenvalues), descending.
    components_ : ndarray of shape (n_components_, n_features)
        Orthonormal principal directions, one per row.
    dual_eigenvectors_ : ndarray of shape (n_samples, n_components_)
        Matching eigenvectors of the Gram matrix.
    n_components_ : int
        Number of retained components.
    """

    def __init__(self, n_components: int | None = None):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_min_samples=2)
        n, d = X.shape
        xt = X.T  # internal orientation: features x samples
        s = dual_covariance(xt)
        w, v = eigendecompose(s)
        dual = DualDecomposition(dual_matrix=s, eigenvalues=w, eigenvectors=v, c_d=np.nan)
        rank = dual.rank(RANK_RTOL)
        if self.n_components is None:
            r = rank
        else:
            r = int(self.n_components)
            if not 1 <= r <= min(n, d):
                raise ValueError(
                    f"n_components={self.n_components} must lie in 1..min(n_samples, n_features)"
                )
            r = min(r, rank)
        if r < 1:
            raise ValueError("input matrix has numerical rank zero")
        dirs = recover_directions(xt, dual, r)
        self.n_features_in_ = d
        self.eigenvalues_ = w
        self.dual_eigenvectors_ = v[:, :r].copy()
        self.components_ = dirs.directions.T.copy()
        self.n_components_ = r
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X @ self.components_.T

    def inverse_transform(self, scores):
        check_is_fitted(self, "components_")
        scores = check_array(scores, dtype=np.float64)
        return scores @ self.components_

    def get_covariance_eigenvalues(self) -> np.ndarray:
        """Sample covariance eigenvalues (the nonzero ones equal the dual's)."""
        check_is_fitted(self, "eigenvalues_")
        return self.eigenvalues_.copy()
