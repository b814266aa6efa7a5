"""Scikit-learn API surface of the dual PCA estimator."""

import numpy as np
import pytest
from sklearn.base import clone

from hdpca import DualPCA


@pytest.fixture
def wide_data():
    rng = np.random.default_rng(8)
    n, d = 6, 40
    return rng.normal(size=(n, d)) * np.sqrt(np.linspace(5.0, 0.5, d))


class TestFit:
    def test_attributes(self, wide_data):
        est = DualPCA().fit(wide_data)
        n, d = wide_data.shape
        assert est.n_features_in_ == d
        assert est.eigenvalues_.shape == (n,)
        assert np.all(np.diff(est.eigenvalues_) <= 0)
        assert est.components_.shape == (est.n_components_, d)
        assert est.dual_eigenvectors_.shape == (n, est.n_components_)

    def test_components_orthonormal(self, wide_data):
        est = DualPCA().fit(wide_data)
        gram = est.components_ @ est.components_.T
        np.testing.assert_allclose(gram, np.eye(est.n_components_), atol=1e-10)

    def test_matches_dense_uncentered_pca(self, wide_data):
        # dense oracle: eigensystem of X'X / n in feature space, no centering
        est = DualPCA(n_components=4).fit(wide_data)
        n = wide_data.shape[0]
        s = wide_data.T @ wide_data / n
        w, v = np.linalg.eigh(s)
        w, v = w[::-1], v[:, ::-1]
        np.testing.assert_allclose(est.eigenvalues_[:4], w[:4], rtol=1e-10)
        for i in range(4):
            cos = abs(est.components_[i] @ v[:, i])
            assert cos == pytest.approx(1.0, abs=1e-9)

    def test_no_centering(self):
        # a constant offset changes the components, unlike centered PCA
        rng = np.random.default_rng(0)
        x = rng.normal(size=(5, 20))
        shifted = x + 10.0
        top_plain = DualPCA(n_components=1).fit(x).components_[0]
        top_shifted = DualPCA(n_components=1).fit(shifted).components_[0]
        assert abs(top_plain @ top_shifted) < 0.99

    def test_n_components_bounds(self, wide_data):
        with pytest.raises(ValueError):
            DualPCA(n_components=0).fit(wide_data)
        with pytest.raises(ValueError):
            DualPCA(n_components=50).fit(wide_data)

    def test_rank_capped(self):
        x = np.zeros((4, 10))
        x[0, 0] = 1.0
        est = DualPCA().fit(x)
        assert est.n_components_ == 1


class TestTransform:
    def test_scores(self, wide_data):
        est = DualPCA(n_components=3).fit(wide_data)
        scores = est.transform(wide_data)
        np.testing.assert_allclose(scores, wide_data @ est.components_.T)
        assert scores.shape == (wide_data.shape[0], 3)

    def test_fit_transform_consistent(self, wide_data):
        est = DualPCA(n_components=2)
        np.testing.assert_allclose(
            est.fit_transform(wide_data), est.transform(wide_data)
        )

    def test_inverse_transform_round_trip_on_span(self, wide_data):
        est = DualPCA().fit(wide_data)
        # with full numerical rank the data lie in the component span
        back = est.inverse_transform(est.transform(wide_data))
        np.testing.assert_allclose(back, wide_data, atol=1e-8)

    def test_feature_count_checked(self, wide_data):
        est = DualPCA().fit(wide_data)
        with pytest.raises(ValueError):
            est.transform(wide_data[:, :10])


class TestSklearnProtocol:
    def test_get_set_params_and_clone(self):
        est = DualPCA(n_components=3)
        assert est.get_params() == {"n_components": 3}
        est.set_params(n_components=2)
        assert est.n_components == 2
        twin = clone(est)
        assert twin.get_params() == {"n_components": 2}

    def test_unfitted_transform_raises(self, wide_data):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            DualPCA().transform(wide_data)

    def test_works_in_pipeline(self, wide_data):
        from sklearn.pipeline import Pipeline

        pipe = Pipeline([("pca", DualPCA(n_components=2))])
        scores = pipe.fit_transform(wide_data)
        assert scores.shape == (wide_data.shape[0], 2)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
