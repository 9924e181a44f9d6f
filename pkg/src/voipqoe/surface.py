"""Bivariate polynomial surface fitting by ordinary least squares.

A :class:`TermSet` names which monomials ``x^i * y^j`` enter the model;
the solver works on column-scaled design matrices via the normal
equations with a Cholesky factorization, which is plenty for the small
term counts involved while taming the wildly different magnitudes of
the monomial columns (delay reaches 400, so y^3 reaches 6.4e7).

:class:`SurfaceRegression` exposes the same fit through the
scikit-learn estimator API so it composes with pipelines and
cross-validation; :func:`fit_surface` is the plain-function face of the
same computation. :func:`derive_bias` builds the correction surface for
the enhanced quality model from the gap between the subjective surface
and the additive model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import DomainError, FitError
from .model import (
    BiasPolynomial,
    CodecProfile,
    NetworkCondition,
    SubjectiveSurface,
    mos_to_r,
    simplified_estimate,
    subjective_mos,
)

# Ranking treats rmse values below this as exact fits (ties broken by
# parsimony, then r-squared).
_RMSE_TIE_FLOOR = 1e-8


@dataclass(frozen=True)
class TermSet:
    """An ordered set of exponent pairs (i, j), one per term x^i * y^j."""

    name: str
    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        terms = tuple((int(i), int(j)) for i, j in self.terms)
        if len(set(terms)) != len(terms):
            raise FitError(f"term set {self.name}: duplicate exponent pairs")
        if any(i < 0 or j < 0 for i, j in terms):
            raise FitError(f"term set {self.name}: exponents must be non-negative")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def has_intercept(self) -> bool:
        return (0, 0) in self.terms

    def term_label(self, index: int) -> str:
        i, j = self.terms[index]
        parts = []
        if i:
            parts.append("x" if i == 1 else f"x^{i}")
        if j:
            parts.append("y" if j == 1 else f"y^{j}")
        return "*".join(parts) if parts else "1"

    def design_matrix(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.column_stack([x**i * y**j for i, j in self.terms])


# Named presets. polyIJ means x-degree up to I, y-degree up to J, total
# degree capped at max(I, J), matching the usual surface-fitting tools.
POLY31 = TermSet("poly31", ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0), (2, 1)))
POLY23 = TermSet(
    "poly23",
    ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2), (0, 3)),
)
POLY32 = TermSet(
    "poly32",
    ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2)),
)
POLY33 = TermSet(
    "poly33",
    ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)),
)

PRESET_TERMSETS = {t.name: t for t in (POLY31, POLY23, POLY32, POLY33)}


@dataclass(frozen=True)
class Sample:
    """One observation of the surface being fitted."""

    x: float
    y: float
    value: float

    def __post_init__(self):
        for name in ("x", "y", "value"):
            if not np.isfinite(getattr(self, name)):
                raise FitError(f"sample field {name} must be finite")


@dataclass(frozen=True)
class FitResult:
    """Coefficients and goodness-of-fit of one least-squares surface."""

    termset: TermSet
    coefficients: tuple[float, ...]
    r_squared: float
    rmse: float
    n_samples: int

    def evaluate(self, x, y):
        return evaluate_surface(self.termset, self.coefficients, x, y)

    def to_bias_polynomial(self) -> BiasPolynomial:
        if self.termset.terms != POLY23.terms:
            raise FitError(
                f"only {POLY23.name} fits convert to a bias polynomial, "
                f"got {self.termset.name}"
            )
        return BiasPolynomial(self.coefficients)


@dataclass(frozen=True)
class GridSpec:
    """Loss/delay grid on which the bias surface is derived.

    Defaults to loss 0..10 % in 1 % steps crossed with delay 0..400 ms
    in 50 ms steps (99 points). Values must stay inside the calibrated
    model domain.
    """

    loss_values: tuple[float, ...] = tuple(float(v) for v in range(0, 11))
    delay_values: tuple[float, ...] = tuple(float(v) for v in range(0, 401, 50))

    def __post_init__(self):
        for name, values, upper in (
            ("loss_values", self.loss_values, 10.0),
            ("delay_values", self.delay_values, 400.0),
        ):
            values = tuple(float(v) for v in values)
            object.__setattr__(self, name, values)
            if not values:
                raise DomainError(f"{name} must be non-empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise DomainError(f"{name} must be strictly increasing")
            if values[0] < 0 or values[-1] > upper:
                raise DomainError(f"{name} must lie within [0, {upper:g}]")

    def points(self) -> list[tuple[float, float]]:
        return [(loss, delay) for loss in self.loss_values for delay in self.delay_values]


def evaluate_surface(termset: TermSet, coefficients, x, y):
    """Evaluate ``sum c_k * x^i_k * y^j_k`` at scalar or array points."""
    coeffs = np.asarray(coefficients, dtype=float)
    if coeffs.shape != (len(termset),):
        raise FitError(
            f"term set {termset.name} has {len(termset)} terms, "
            f"got {coeffs.size} coefficients"
        )
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    result = np.zeros(np.broadcast(x_arr, y_arr).shape)
    for c, (i, j) in zip(coeffs, termset.terms):
        result += c * x_arr**i * y_arr**j
    if np.isscalar(x) and np.isscalar(y):
        return float(result)
    return result


def _dependent_term_labels(termset: TermSet, scaled: np.ndarray, rank: int) -> list[str]:
    # Pivoted QR orders columns by how much new information each adds;
    # everything past the numerical rank is linearly dependent.
    _, _, pivots = scipy.linalg.qr(scaled, mode="economic", pivoting=True)
    return sorted(termset.term_label(k) for k in pivots[rank:])

def _solve_scaled_normal_equations(design: np.ndarray, values: np.ndarray, termset: TermSet) -> np.ndarray:
    n, p = design.shape
    scale = np.max(np.abs(design), axis=0)
    degenerate = scale == 0.0
    if degenerate.any():
        labels = sorted(termset.term_label(k) for k in np.flatnonzero(degenerate))
        raise FitError(
            f"design matrix is rank-deficient; dependent terms: {', '.join(labels)}"
        )
    scaled = design / scale
    rank = np.linalg.matrix_rank(scaled)
    if rank < p:
        labels = _dependent_term_labels(termset, scaled, rank)
        raise FitError(
            f"design matrix is rank-deficient; dependent terms: {', '.join(labels)}"
        )
    gram = scaled.T @ scaled
    try:
        factor = scipy.linalg.cho_factor(gram)
    except scipy.linalg.LinAlgError as exc:
        raise FitError(f"normal equations not positive definite: {exc}") from exc
    coeffs = scipy.linalg.cho_solve(factor, scaled.T @ values)
    # Iteratively refine against the data-space residual: the plain
    # normal-equation solve squares the conditioning, and refinement
    # claws the lost digits back (and makes the answer independent of
    # sample order to well below the documented 1e-10).
    for _ in range(4):
        correction = scipy.linalg.cho_solve(factor, scaled.T @ (values - scaled @ coeffs))
        coeffs += correction
        if np.max(np.abs(correction)) <= 1e-14 * max(1.0, np.max(np.abs(coeffs))):
            break
    return coeffs / scale


def _fit_arrays(
    x: np.ndarray,
    y: np.ndarray,
    values: np.ndarray,
    termset: TermSet,
    rmse_denominator: str,
) -> FitResult:
    if rmse_denominator not in ("n-p", "n"):
        raise FitError(f"rmse_denominator must be 'n-p' or 'n', got {rmse_denominator!r}")
    n, p = values.size, len(termset)
    if n < p:
        raise FitError(f"need at least {p} samples for {termset.name}, got {n}")
    design = termset.design_matrix(x, y)
    coeffs = _solve_scaled_normal_equations(design, values, termset)
    residuals = values - design @ coeffs
    ss_res = float(residuals @ residuals)
    centered = values - values.mean()
    ss_tot = float(centered @ centered)
    if ss_tot > 0.0:
        r_squared = 1.0 - ss_res / ss_tot
    else:
        r_squared = 1.0 if ss_res <= 1e-24 else 0.0
    dof = n - p if rmse_denominator == "n-p" else n
    rmse = float(np.sqrt(ss_res / dof)) if dof > 0 else 0.0
    return FitResult(
        termset=termset,
        coefficients=tuple(float(c) for c in coeffs),
        r_squared=r_squared,
        rmse=rmse,
        n_samples=int(n),
    )


def fit_surface(
    samples: list[Sample],
    termset: TermSet,
    rmse_denominator: str = "n-p",
) -> FitResult:
    """Ordinary least-squares fit of ``termset`` over the samples.

    ``rmse_denominator`` selects between the degrees-of-freedom
    convention (n - p, the default) and plain n.
    """
    if not samples:
        raise FitError("no samples to fit")
    x = np.array([s.x for s in samples])
    y = np.array([s.y for s in samples])
    values = np.array([s.value for s in samples])
    return _fit_arrays(x, y, values, termset, rmse_denominator)


class SurfaceRegression(RegressorMixin, BaseEstimator):
    """Scikit-learn face of the polynomial surface fit.

    X is an (n, 2) array of (x, y) points. After ``fit`` the
    coefficients and fit diagnostics are available as ``coefficients_``,
    ``r_squared_``, ``rmse_`` and ``result_``.
    """

    def __init__(self, termset: TermSet = POLY23, rmse_denominator: str = "n-p"):
        self.termset = termset
        self.rmse_denominator = rmse_denominator

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"X must have two columns (x, y), got {X.shape[1]}")
        y = np.asarray(y, dtype=float).ravel()
        if y.size != X.shape[0]:
            raise ValueError("X and y disagree on the number of samples")
        result = _fit_arrays(X[:, 0], X[:, 1], y, self.termset, self.rmse_denominator)
        self.result_ = result
        self.coefficients_ = np.asarray(result.coefficients)
        self.r_squared_ = result.r_squared
        self.rmse_ = result.rmse
        self.n_samples_ = result.n_samples
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"X must have two columns (x, y), got {X.shape[1]}")
        return evaluate_surface(self.termset, self.coefficients_, X[:, 0], X[:, 1])


def derive_bias(
    surface: SubjectiveSurface,
    profile: CodecProfile,
    grid: GridSpec = GridSpec(),
    termset: TermSet = POLY23,
    rmse_denominator: str = "n-p",
) -> FitResult:
    """Fit the correction surface the enhanced model adds to the
    additive one.

    At every grid point the subjective surface's MOS is converted to the
    R scale and the additive model's R is subtracted; the requested term
    set is then fitted over (loss percent, delay ms) to those gaps. The
    result converts to a :class:`~voipqoe.model.BiasPolynomial` when the
    default term set is used.
    """
    samples = []
    for loss, delay in grid.points():
        cond = NetworkCondition(loss, delay)
        mos = subjective_mos(cond, surface)
        gap = mos_to_r(mos) - simplified_estimate(cond, profile).r_value
        samples.append(Sample(loss, delay, gap))
    return fit_surface(samples, termset, rmse_denominator)


def select_termset(samples: list[Sample], candidates: list[TermSet]) -> list[FitResult]:
    """Fit every candidate and rank the results.

    Ascending rmse decides; rmse values below 1e-8 count as exact and
    tie, in which case fewer terms win, then higher r-squared.
    """
    if not candidates:
        raise FitError("no candidate term sets")
    results = [fit_surface(samples, termset) for termset in candidates]

    def key(result: FitResult):
        rmse = 0.0 if result.rmse < _RMSE_TIE_FLOOR else result.rmse
        return (rmse, len(result.termset), -result.r_squared)

    return sorted(results, key=key)
