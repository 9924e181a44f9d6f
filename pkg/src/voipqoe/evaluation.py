"""Forecast-accuracy assessment for the quality models.

MAPE is the yardstick: per test set and per model, predictions are
compared either against scenario mean scores weighted by participant
counts (``scenario-mean``), against individual votes (``per-record``),
or against every integer score multiset compatible with a published
mean/SD/count aggregate (``per-record-bounds``), which brackets the
unobservable per-record MAPE from below and above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .errors import DataValidationError, DomainError
from .model import CodecProfile, NetworkCondition, SubjectiveSurface

MODE_SCENARIO_MEAN = "scenario-mean"
MODE_PER_RECORD = "per-record"
MODE_PER_RECORD_BOUNDS = "per-record-bounds"
EVALUATION_MODES = (MODE_SCENARIO_MEAN, MODE_PER_RECORD, MODE_PER_RECORD_BOUNDS)

# Widening steps used when an aggregate admits no integer multiset at
# the exact tolerance (published aggregates are occasionally rounded
# inconsistently with their stated participant count).
RECONSTRUCTION_TOLERANCES = (0.005, 0.01, 0.02, 0.03, 0.05, 0.08)

SCORE_MIN, SCORE_MAX = 1, 5


@dataclass(frozen=True)
class SubjectiveRecord:
    """One participant's vote under one test scenario."""

    scenario_id: str
    loss_percent: float
    delay_ms: float
    score: float
    test_set: str
    participant_id: str | None = None

    def __post_init__(self):
        for name in ("loss_percent", "delay_ms", "score"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DataValidationError(f"{name} must be finite, got {value!r}")
        if self.loss_percent < 0 or self.delay_ms < 0:
            raise DataValidationError(
                f"scenario {self.scenario_id}: loss/delay must be non-negative"
            )
        if not SCORE_MIN <= self.score <= SCORE_MAX:
            raise DataValidationError(
                f"scenario {self.scenario_id}: score {self.score:g} outside "
                f"[{SCORE_MIN}, {SCORE_MAX}]"
            )


@dataclass(frozen=True)
class ScenarioAggregate:
    """Published per-scenario summary: mean score, sample SD, and count."""

    scenario_id: str
    loss_percent: float
    delay_ms: float
    mean: float
    sd: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DataValidationError(f"scenario {self.scenario_id}: n must be >= 1")
        if self.sd < 0:
            raise DataValidationError(f"scenario {self.scenario_id}: sd must be >= 0")
        if not SCORE_MIN <= self.mean <= SCORE_MAX:
            raise DataValidationError(
                f"scenario {self.scenario_id}: mean {self.mean:g} outside score scale"
            )


@dataclass(frozen=True)
class TestSet:
    """A named group of votes, as raw records or scenario aggregates."""

    __test__ = False  # not a pytest class, despite the name

    id: str
    aggregates: tuple[ScenarioAggregate, ...] = ()
    records: tuple[SubjectiveRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "aggregates", tuple(self.aggregates))
        object.__setattr__(self, "records", tuple(self.records))
        if not self.aggregates and not self.records:
            raise DataValidationError(f"test set {self.id} is empty")

    def scenario_aggregates(self) -> tuple[ScenarioAggregate, ...]:
        """Aggregates as given, or computed from the raw records."""
        if self.aggregates:
            return self.aggregates
        grouped: dict[str, list[SubjectiveRecord]] = {}
        for record in self.records:
            grouped.setdefault(record.scenario_id, []).append(record)
        result = []
        for scenario_id, group in grouped.items():
            scores = np.array([r.score for r in group])
            sd = float(scores.std(ddof=1)) if scores.size > 1 else 0.0
            result.append(
                ScenarioAggregate(
                    scenario_id=scenario_id,
                    loss_percent=group[0].loss_percent,
                    delay_ms=group[0].delay_ms,
                    mean=float(scores.mean()),
                    sd=sd,
                    n=scores.size,
                )
            )
        return tuple(result)


def mape(predicted, observed) -> float:
    """Mean absolute percentage error, in percent."""
    pred = np.asarray(predicted, dtype=float)
    obs = np.asarray(observed, dtype=float)
    if pred.ndim != 1 or obs.ndim != 1 or pred.size != obs.size:
        raise ValueError(
            f"predicted and observed must be equal-length vectors, "
            f"got {pred.shape} and {obs.shape}"
        )
    if pred.size == 0:
        raise ValueError("predicted and observed must be non-empty")
    zeros = np.flatnonzero(obs == 0.0)
    if zeros.size:
        raise ZeroDivisionError(f"observed value at index {zeros[0]} is zero")
    return float(100.0 * np.mean(np.abs(pred - obs) / np.abs(obs)))


def mape_band(value: float) -> str:
    """Qualitative forecast band for a MAPE value."""
    if value == 0.0:
        return "perfect forecast"
    if value < 10.0:
        return "highly accurate forecast"
    if value < 20.0:
        return "good forecast"
    if value < 50.0:
        return "reasonable forecast"
    return "inaccurate forecast"


def error_reduction(baseline_mape: float, enhanced_mape: float) -> float:
    """Relative error reduction of ``enhanced`` vs ``baseline``, percent."""
    if baseline_mape <= 0:
        raise DomainError(f"baseline MAPE must be > 0, got {baseline_mape}")
    return (baseline_mape - enhanced_mape) / baseline_mape * 100.0


def reconstruct_score_multisets(
    mean: float,
    sd: float,
    n: int,
    mean_tol: float = 0.005,
    sd_tol: float = 0.005,
) -> list[tuple[int, ...]]:
    """All multisets of n integer scores matching a mean/SD aggregate.

    The sample standard deviation (n - 1 denominator) is used; a single
    score has SD 0 by convention. Matching is to ±tol with a hair of
    slack for float rounding. Returns the multisets in lexicographic
    order (empty when the aggregate is not reproducible).
    """
    if not 1 <= n <= 10:
        raise DomainError(f"n must be in [1, 10] for exhaustive enumeration, got {n}")
    if not SCORE_MIN <= mean <= SCORE_MAX:
        raise DomainError(f"mean must be in [{SCORE_MIN}, {SCORE_MAX}], got {mean}")
    if sd < 0:
        raise DomainError(f"sd must be >= 0, got {sd}")
    eps = 1e-9
    matches = []
    for scores in combinations_with_replacement(range(SCORE_MIN, SCORE_MAX + 1), n):
        m = sum(scores) / n
        if abs(m - mean) > mean_tol + eps:
            continue
        if n > 1:
            s = math.sqrt(sum((v - m) ** 2 for v in scores) / (n - 1))
        else:
            s = 0.0
        if abs(s - sd) > sd_tol + eps:
            continue
        matches.append(scores)
    return matches


def reconstruct_with_fallback(
    mean: float,
    sd: float,
    n: int,
    tolerances: tuple[float, ...] = RECONSTRUCTION_TOLERANCES,
) -> tuple[list[tuple[int, ...]], float]:
    """Reconstruct at the tightest tolerance that yields any multiset.

    Returns (multisets, tolerance used). Raises DataValidationError when
    even the loosest tolerance finds nothing.
    """
    for tol in tolerances:
        multisets = reconstruct_score_multisets(mean, sd, n, mean_tol=tol, sd_tol=tol)
        if multisets:
            return multisets, tol
    raise DataValidationError(
        f"no integer score multiset matches mean={mean:g} sd={sd:g} n={n} "
        f"within ±{tolerances[-1]:g}"
    )


def _record_error_sum(prediction: float, scores) -> float:
    return sum(abs(prediction - v) / v for v in scores)


@dataclass(frozen=True)
class EvaluationReport:
    """Per-testset and average MAPE per model, plus error reduction.

    In bounds mode every MAPE entry is a (low, high) pair; otherwise a
    float. ``error_reduction_percent`` compares each non-baseline model
    against the baseline (the first model evaluated).
    """

    mode: str
    model_names: tuple[str, ...]
    baseline_model: str
    per_testset: dict
    averages: dict
    error_reduction_percent: dict
    record_counts: dict
    notes: tuple[str, ...] = ()

    @staticmethod
    def _entry_dict(entry) -> dict:
        if isinstance(entry, tuple):
            low, high = entry
            return {
                "mape_low": low,
                "mape_high": high,
                "band_low": mape_band(low),
                "band_high": mape_band(high),
            }
        return {"mape": entry, "band": mape_band(entry)}

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "models": list(self.model_names),
            "baseline_model": self.baseline_model,
            "per_testset": {
                ts: {name: self._entry_dict(entry) for name, entry in cells.items()}
                for ts, cells in self.per_testset.items()
            },
            "averages": {
                name: self._entry_dict(entry) for name, entry in self.averages.items()
            },
            "error_reduction_percent": {
                name: (
                    {"low": entry[0], "high": entry[1]}
                    if isinstance(entry, tuple)
                    else entry
                )
                for name, entry in self.error_reduction_percent.items()
            },
            "record_counts": dict(self.record_counts),
            "notes": list(self.notes),
        }


def _resolve(models, profile, surface):
    from .estimators import resolve_models

    return resolve_models(models, profile=profile, surface=surface)


def _check_conditions(testset: TestSet, aggregates) -> None:
    for agg in aggregates:
        cond = NetworkCondition(agg.loss_percent, agg.delay_ms)
        violation = cond.domain_violation()
        if violation is not None:
            raise DomainError(
                f"test set {testset.id} scenario {agg.scenario_id}: {violation}"
            )


def _bounds_for_model(aggregates, predictions, notes, testset_id):
    low_sum = high_sum = 0.0
    total = 0
    for agg, pred in zip(aggregates, predictions):
        multisets, tol = reconstruct_with_fallback(agg.mean, agg.sd, agg.n)
        if tol > RECONSTRUCTION_TOLERANCES[0]:
            note = (
                f"{testset_id}/{agg.scenario_id}: aggregate reconstructed at "
                f"relaxed tolerance ±{tol:g}"
            )
            if note not in notes:
                notes.append(note)
        sums = [_record_error_sum(pred, m) for m in multisets]
        low_sum += min(sums)
        high_sum += max(sums)
        total += agg.n
    return 100.0 * low_sum / total, 100.0 * high_sum / total, total


def evaluate_models(
    testsets,
    models,
    profile: CodecProfile | None = None,
    surface: SubjectiveSurface | None = None,
    mode: str = MODE_SCENARIO_MEAN,
) -> EvaluationReport:
    """Score each model against each test set and assemble a report.

    ``models`` may be model names ("simplified", "enhanced",
    "subjective") or estimator objects with ``predict`` and
    ``model_name``. Out-of-domain scenario conditions are an error;
    evaluation never extrapolates silently.
    """
    if mode not in EVALUATION_MODES:
        raise ValueError(f"mode must be one of {EVALUATION_MODES}, got {mode!r}")
    resolved = _resolve(models, profile, surface)
    if not resolved:
        raise ValueError("no models to evaluate")
    names = tuple(m.model_name for m in resolved)
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate model names: {names}")
    ordered = sorted(testsets, key=lambda ts: ts.id)
    if not ordered:
        raise DataValidationError("no test sets to evaluate")

    notes: list[str] = []
    per_testset: dict = {}
    record_counts: dict = {}
    for testset in ordered:
        aggregates = testset.scenario_aggregates()
        _check_conditions(testset, aggregates)
        cells: dict = {}
        if mode == MODE_PER_RECORD:
            if not testset.records:
                raise DataValidationError(
                    f"test set {testset.id} has no raw records for per-record mode"
                )
            X = np.array([[r.loss_percent, r.delay_ms] for r in testset.records])
            scores = np.array([r.score for r in testset.records])
            for model in resolved:
                cells[model.model_name] = mape(model.predict(X), scores)
            record_counts[testset.id] = len(testset.records)
        else:
            X = np.array([[a.loss_percent, a.delay_ms] for a in aggregates])
            counts = np.array([a.n for a in aggregates])
            means = np.array([a.mean for a in aggregates])
            for model in resolved:
                predictions = np.asarray(model.predict(X), dtype=float)
                if mode == MODE_SCENARIO_MEAN:
                    # Weighting by participant count == repeating each
                    # scenario mean n times.
                    cells[model.model_name] = mape(
                        np.repeat(predictions, counts), np.repeat(means, counts)
                    )
                else:
                    low, high, total = _bounds_for_model(
                        aggregates, predictions, notes, testset.id
                    )
                    cells[model.model_name] = (low, high)
            record_counts[testset.id] = int(counts.sum())
        per_testset[testset.id] = cells

    averages: dict = {}
    for name in names:
        entries = [per_testset[ts.id][name] for ts in ordered]
        if mode == MODE_PER_RECORD_BOUNDS:
            averages[name] = (
                float(np.mean([e[0] for e in entries])),
                float(np.mean([e[1] for e in entries])),
            )
        else:
            averages[name] = float(np.mean(entries))

    baseline = names[0]
    reductions: dict = {}
    for name in names[1:]:
        if mode == MODE_PER_RECORD_BOUNDS:
            base_low, base_high = averages[baseline]
            low, high = averages[name]
            reductions[name] = (
                error_reduction(base_low, high),
                error_reduction(base_high, low),
            )
        else:
            reductions[name] = error_reduction(averages[baseline], averages[name])

    return EvaluationReport(
        mode=mode,
        model_names=names,
        baseline_model=baseline,
        per_testset=per_testset,
        averages=averages,
        error_reduction_percent=reductions,
        record_counts=record_counts,
        notes=tuple(notes),
    )
