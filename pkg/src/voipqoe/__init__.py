"""VoIP quality estimation for G.729.

An additive R-factor model over packet loss and one-way delay, a
subjectively derived bias correction on top of it, the surface-fitting
pipeline that produces the correction, and a MAPE harness that scores
both models against the shipped reference test sets. See the ``voipqoe``
command line for the operational entry points.
"""

from .errors import (
    ConfigError,
    DataValidationError,
    DomainError,
    FitError,
    VoipQoeError,
)
from .model import (
    BiasPolynomial,
    CodecProfile,
    NetworkCondition,
    QualityEstimate,
    SubjectiveSurface,
    bias_value,
    delay_impairment,
    enhanced_estimate,
    mos_to_r,
    packet_loss_impairment,
    r_to_mos,
    simplified_estimate,
    subjective_estimate,
    subjective_mos,
)
from .surface import (
    POLY23,
    POLY31,
    POLY32,
    POLY33,
    FitResult,
    GridSpec,
    Sample,
    SurfaceRegression,
    TermSet,
    derive_bias,
    evaluate_surface,
    fit_surface,
    select_termset,
)
from .estimators import (
    EnhancedEModel,
    SimplifiedEModel,
    SubjectiveMosModel,
    resolve_models,
)
from .evaluation import (
    EvaluationReport,
    ScenarioAggregate,
    SubjectiveRecord,
    TestSet,
    error_reduction,
    evaluate_models,
    mape,
    mape_band,
    reconstruct_score_multisets,
)
from . import datasets

__version__ = "0.1.0"

__all__ = [
    "BiasPolynomial",
    "CodecProfile",
    "ConfigError",
    "DataValidationError",
    "DomainError",
    "EnhancedEModel",
    "EvaluationReport",
    "FitError",
    "FitResult",
    "GridSpec",
    "NetworkCondition",
    "POLY23",
    "POLY31",
    "POLY32",
    "POLY33",
    "QualityEstimate",
    "Sample",
    "ScenarioAggregate",
    "SimplifiedEModel",
    "SubjectiveMosModel",
    "SubjectiveRecord",
    "SubjectiveSurface",
    "SurfaceRegression",
    "TermSet",
    "TestSet",
    "VoipQoeError",
    "bias_value",
    "datasets",
    "delay_impairment",
    "derive_bias",
    "enhanced_estimate",
    "error_reduction",
    "evaluate_models",
    "evaluate_surface",
    "fit_surface",
    "mape",
    "mape_band",
    "mos_to_r",
    "packet_loss_impairment",
    "r_to_mos",
    "reconstruct_score_multisets",
    "resolve_models",
    "select_termset",
    "simplified_estimate",
    "subjective_estimate",
    "subjective_mos",
    "__version__",
]
