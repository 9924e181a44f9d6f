"""Scikit-learn-compatible faces of the quality models.

Each estimator is a frozen predictor: ``fit`` is a no-op that returns
self (the models carry published constants, nothing is learned from X),
``predict`` maps an (n, 2) array of (loss_percent, delay_ms) conditions
to MOS, and ``predict_r`` to the R scale. ``get_params``/``set_params``
come from ``BaseEstimator`` so the models clone and compose with
pipelines, grid search and the evaluation harness alike.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array

from . import datasets
from .errors import ConfigError
from .model import (
    CodecProfile,
    NetworkCondition,
    QualityEstimate,
    SubjectiveSurface,
    enhanced_estimate,
    simplified_estimate,
    subjective_estimate,
)


def _check_conditions(X) -> np.ndarray:
    X = check_array(X, dtype=float)
    if X.shape[1] != 2:
        raise ValueError(
            f"X must have two columns (loss_percent, delay_ms), got {X.shape[1]}"
        )
    return X


class _ConditionPredictor(BaseEstimator):
    """Shared plumbing: validation, vectorization over rows."""

    model_name = ""

    def fit(self, X=None, y=None):
        """No-op; present so the estimator drops into sklearn tooling."""
        return self

    def __sklearn_is_fitted__(self) -> bool:
        # Frozen predictors carry published constants; always ready.
        return True

    def estimate(self, loss_percent: float, delay_ms: float) -> QualityEstimate:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        """MOS for each (loss_percent, delay_ms) row of X."""
        X = _check_conditions(X)
        return np.array([self.estimate(loss, delay).mos for loss, delay in X])

    def predict_r(self, X) -> np.ndarray:
        """R rating for each (loss_percent, delay_ms) row of X."""
        X = _check_conditions(X)
        return np.array([self.estimate(loss, delay).r_value for loss, delay in X])


class SimplifiedEModel(_ConditionPredictor):
    """Additive R model: codec constants minus delay and loss penalties."""

    model_name = "simplified"

    def __init__(self, profile: CodecProfile | None = None, allow_extrapolation: bool = False):
        self.profile = profile
        self.allow_extrapolation = allow_extrapolation

    def _profile(self) -> CodecProfile:
        return self.profile if self.profile is not None else datasets.G729

    def estimate(self, loss_percent: float, delay_ms: float) -> QualityEstimate:
        return simplified_estimate(
            NetworkCondition(loss_percent, delay_ms),
            self._profile(),
            self.allow_extrapolation,
        )


class EnhancedEModel(_ConditionPredictor):
    """Additive R model plus the profile's bias correction surface."""

    model_name = "enhanced"

    def __init__(self, profile: CodecProfile | None = None, allow_extrapolation: bool = False):
        self.profile = profile
        self.allow_extrapolation = allow_extrapolation

    def _profile(self) -> CodecProfile:
        profile = self.profile if self.profile is not None else datasets.G729
        if profile.bias is None:
            raise ConfigError(
                f"profile {profile.name} has no bias polynomial; "
                "the enhanced model requires one"
            )
        return profile

    def estimate(self, loss_percent: float, delay_ms: float) -> QualityEstimate:
        return enhanced_estimate(
            NetworkCondition(loss_percent, delay_ms),
            self._profile(),
            self.allow_extrapolation,
        )


class SubjectiveMosModel(_ConditionPredictor):
    """Subjective regression surface; MOS is primary, R derived."""

    model_name = "subjective"

    def __init__(self, surface: SubjectiveSurface | None = None, allow_extrapolation: bool = False):
        self.surface = surface
        self.allow_extrapolation = allow_extrapolation

    def _surface(self) -> SubjectiveSurface:
        return self.surface if self.surface is not None else datasets.SUBJECTIVE_SURFACE

    def estimate(self, loss_percent: float, delay_ms: float) -> QualityEstimate:
        return subjective_estimate(
            NetworkCondition(loss_percent, delay_ms),
            self._surface(),
            self.allow_extrapolation,
        )


MODEL_CLASSES = {
    SimplifiedEModel.model_name: SimplifiedEModel,
    EnhancedEModel.model_name: EnhancedEModel,
    SubjectiveMosModel.model_name: SubjectiveMosModel,
}


def resolve_models(
    models,
    profile: CodecProfile | None = None,
    surface: SubjectiveSurface | None = None,
    allow_extrapolation: bool = False,
) -> list:
    """Turn a mix of model names and estimator objects into estimators.

    Names draw on ``profile`` (additive models) and ``surface``
    (subjective model), falling back to the built-in G.729 data.
    """
    resolved = []
    for spec in models:
        if isinstance(spec, str):
            name = spec.strip().lower()
            if name not in MODEL_CLASSES:
                raise ConfigError(
                    f"unknown model {spec!r}; choose from {sorted(MODEL_CLASSES)}"
                )
            if name == SubjectiveMosModel.model_name:
                resolved.append(SubjectiveMosModel(surface, allow_extrapolation))
            else:
                resolved.append(MODEL_CLASSES[name](profile, allow_extrapolation))
        elif hasattr(spec, "predict") and hasattr(spec, "model_name"):
            resolved.append(spec)
        else:
            raise ConfigError(
                f"model {spec!r} is neither a known name nor a predictor"
            )
    return resolved
