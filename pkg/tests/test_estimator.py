import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from degreelab.boolfn import chi_values
from degreelab.estimator import MinDegreeRegressor


def cube_rows(n):
    indices = np.arange(1 << n)
    return 1.0 - 2.0 * ((indices[:, None] >> np.arange(n)[None, :]) & 1)


class TestFitPredict:
    def test_recovers_parity(self):
        X = cube_rows(4)
        y = chi_values(0b1010, 4).astype(float)
        model = MinDegreeRegressor().fit(X, y)
        assert model.degree_ == 2
        np.testing.assert_allclose(model.predict(X), y, atol=1e-8)

    def test_restricted_support_extrapolates_minimally(self):
        # labels of z1*z2 on the radius-1 ball admit the affine fit -1+z1+z2
        X = np.array([[1, 1, 1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]], dtype=float)
        y = np.array([1.0, -1.0, -1.0, 1.0])
        model = MinDegreeRegressor().fit(X, y)
        assert model.degree_ == 1
        full = cube_rows(3)
        np.testing.assert_allclose(
            model.predict(full), -1 + full[:, 0] + full[:, 1], atol=1e-8
        )

    def test_certificate_exposed(self):
        X = cube_rows(3)
        y = chi_values(0b111, 3).astype(float)
        model = MinDegreeRegressor().fit(X, y)
        assert model.degree_ == 3
        assert model.residual_by_degree_[2] > 1e-6

    def test_rejects_non_sign_features(self):
        with pytest.raises(ValueError):
            MinDegreeRegressor().fit(np.array([[0.5, 1.0]]), [1.0])

    def test_feature_count_mismatch_on_predict(self):
        model = MinDegreeRegressor().fit(cube_rows(2), np.ones(4))
        with pytest.raises(ValueError):
            model.predict(cube_rows(3))

    def test_unfitted_predict_raises(self):
        with pytest.raises(NotFittedError):
            MinDegreeRegressor().predict(cube_rows(2))


class TestSklearnProtocol:
    def test_get_set_params_and_clone(self):
        model = MinDegreeRegressor(residual_rtol=1e-9, eps=1e-10)
        assert model.get_params() == {"residual_rtol": 1e-9, "eps": 1e-10}
        twin = clone(model)
        assert twin.get_params() == model.get_params()

    def test_score_is_r2(self):
        X = cube_rows(3)
        y = chi_values(0b011, 3).astype(float)
        model = MinDegreeRegressor().fit(X, y)
        assert model.score(X, y) == pytest.approx(1.0)

    def test_pipeline_compose(self):
        pipe = Pipeline([("fit", MinDegreeRegressor())])
        X = cube_rows(3)
        y = chi_values(0b101, 3).astype(float)
        pipe.fit(X, y)
        np.testing.assert_allclose(pipe.predict(X), y, atol=1e-8)
