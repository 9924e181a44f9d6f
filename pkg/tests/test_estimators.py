"""Estimator-facade tests: array predictions, sklearn plumbing, and
model-name resolution."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from voipqoe import (
    ConfigError,
    DomainError,
    EnhancedEModel,
    NetworkCondition,
    SimplifiedEModel,
    SubjectiveMosModel,
    enhanced_estimate,
    resolve_models,
    simplified_estimate,
    subjective_mos,
)
from voipqoe.datasets import G729, SUBJECTIVE_SURFACE

CONDITIONS = np.array([[0.0, 0.0], [3.0, 400.0], [10.0, 400.0]])


class TestPredict:
    def test_simplified_matches_scalar_core(self):
        model = SimplifiedEModel()
        expected = [
            simplified_estimate(NetworkCondition(l, d), G729).mos for l, d in CONDITIONS
        ]
        np.testing.assert_array_equal(model.predict(CONDITIONS), expected)

    def test_enhanced_matches_scalar_core(self):
        model = EnhancedEModel()
        expected = [
            enhanced_estimate(NetworkCondition(l, d), G729).r_value for l, d in CONDITIONS
        ]
        np.testing.assert_array_equal(model.predict_r(CONDITIONS), expected)

    def test_subjective_matches_scalar_core(self):
        model = SubjectiveMosModel()
        expected = [
            subjective_mos(NetworkCondition(l, d), SUBJECTIVE_SURFACE)
            for l, d in CONDITIONS
        ]
        np.testing.assert_array_equal(model.predict(CONDITIONS), expected)

    def test_domain_policy_passes_through(self):
        with pytest.raises(DomainError):
            SimplifiedEModel().predict([[12.0, 0.0]])
        out = SimplifiedEModel(allow_extrapolation=True).predict([[12.0, 0.0]])
        assert out.shape == (1,)

    def test_column_count_checked(self):
        with pytest.raises(ValueError):
            SimplifiedEModel().predict([[1.0, 2.0, 3.0]])

    def test_enhanced_needs_bias(self):
        from voipqoe.model import CodecProfile

        bare = CodecProfile(name="bare", loss_a=10.0, loss_b=25.21, loss_c=20.20)
        with pytest.raises(ConfigError):
            EnhancedEModel(profile=bare).predict(CONDITIONS)


class TestSklearnPlumbing:
    def test_get_params_round_trip(self):
        model = EnhancedEModel(allow_extrapolation=True)
        params = model.get_params()
        assert params == {"profile": None, "allow_extrapolation": True}
        cloned = clone(model)
        assert cloned.allow_extrapolation is True

    def test_set_params(self):
        model = SimplifiedEModel().set_params(allow_extrapolation=True)
        assert model.allow_extrapolation is True

    def test_fit_is_noop_returning_self(self):
        model = SubjectiveMosModel()
        assert model.fit(CONDITIONS, np.zeros(3)) is model

    def test_composes_in_pipeline(self):
        pipeline = Pipeline([("mos", SimplifiedEModel())])
        pipeline.fit(CONDITIONS, np.zeros(3))
        out = pipeline.predict(CONDITIONS)
        assert out.shape == (3,)


class TestResolveModels:
    def test_names(self):
        models = resolve_models(["simplified", "enhanced", "subjective"])
        assert [m.model_name for m in models] == ["simplified", "enhanced", "subjective"]

    def test_unknown_name(self):
        with pytest.raises(ConfigError, match="unknown model"):
            resolve_models(["psychic"])

    def test_objects_pass_through(self):
        model = SimplifiedEModel()
        assert resolve_models([model]) == [model]

    def test_invalid_object(self):
        with pytest.raises(ConfigError):
            resolve_models([42])

    def test_custom_profile_used(self):
        from voipqoe.model import CodecProfile

        profile = CodecProfile(name="alt", ro=90.0, loss_a=10.0, loss_b=25.21,
                               loss_c=20.20)
        (model,) = resolve_models(["simplified"], profile=profile)
        delta = SimplifiedEModel().predict_r([[0.0, 0.0]])[0] - model.predict_r([[0.0, 0.0]])[0]
        assert delta == pytest.approx(3.2, abs=1e-9)
