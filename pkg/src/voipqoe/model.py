"""Core quality model: impairment factors, R/MOS conversions, and the
per-condition quality estimators.

Everything here is a pure function of immutable inputs. Units are fixed
package-wide: packet loss in percent (3.0 means 3 %) and one-way delay
in milliseconds. The subjective surface is calibrated on (loss fraction,
delay seconds); its evaluator converts internally so callers never deal
with mixed units.

Array-oriented wrappers that compose with scikit-learn live in
:mod:`voipqoe.estimators`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError

# Calibrated domain of the models.
LOSS_MAX_PERCENT = 10.0
DELAY_MAX_MS = 400.0

# MOS scale limits of the objective conversion.
MOS_FLOOR = 1.0
MOS_CEIL = 4.5

# One-way delay (ms) above which the steep penalty term kicks in.
DELAY_KNEE_MS = 177.3

MODEL_SIMPLIFIED = "simplified"
MODEL_ENHANCED = "enhanced"
MODEL_SUBJECTIVE = "subjective"


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class NetworkCondition:
    """A single (packet loss, one-way delay) measurement point.

    ``loss_percent`` is in percent units, ``delay_ms`` in milliseconds.
    Values must be finite and non-negative; the calibrated domain is
    checked separately via :meth:`in_domain`.
    """

    loss_percent: float
    delay_ms: float

    def __post_init__(self):
        _require_finite("loss_percent", self.loss_percent)
        _require_finite("delay_ms", self.delay_ms)
        if self.loss_percent < 0:
            raise DomainError(f"loss_percent must be >= 0, got {self.loss_percent}")
        if self.delay_ms < 0:
            raise DomainError(f"delay_ms must be >= 0, got {self.delay_ms}")

    def in_domain(self) -> bool:
        """True when the condition lies inside the calibrated domain
        (loss 0-10 %, delay 0-400 ms)."""
        return self.loss_percent <= LOSS_MAX_PERCENT and self.delay_ms <= DELAY_MAX_MS

    def domain_violation(self) -> str | None:
        """Human-readable description of the violated bound, or None."""
        if self.loss_percent > LOSS_MAX_PERCENT:
            return (
                f"loss_percent {self.loss_percent:g} outside [0, {LOSS_MAX_PERCENT:g}]"
            )
        if self.delay_ms > DELAY_MAX_MS:
            return f"delay_ms {self.delay_ms:g} outside [0, {DELAY_MAX_MS:g}]"
        return None


@dataclass(frozen=True)
class BiasPolynomial:
    """Nine-term cubic correction surface added to the additive R model.

    Term order: 1, x, y, x^2, x*y, y^2, x^2*y, x*y^2, y^3 with x = loss
    in percent and y = delay in milliseconds. Evaluation at (0, 0)
    returns the leading coefficient.
    """

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) != 9:
            raise ConfigError(f"bias polynomial needs 9 coefficients, got {len(coeffs)}")
        for c in coeffs:
            _require_finite("bias coefficient", c)
        object.__setattr__(self, "coefficients", coeffs)

    def evaluate(self, loss_percent: float, delay_ms: float) -> float:
        x, y = loss_percent, delay_ms
        a1, a2, a3, a4, a5, a6, a7, a8, a9 = self.coefficients
        return (
            a1
            + a2 * x
            + a3 * y
            + a4 * x * x
            + a5 * x * y
            + a6 * y * y
            + a7 * x * x * y
            + a8 * x * y * y
            + a9 * y * y * y
        )


@dataclass(frozen=True)
class SubjectiveSurface:
    """Regression surface mapping network conditions to voted MOS.

    Term order: 1, x, y, x^2, x*y, x^3, x^2*y with x = loss as a
    fraction (0.03 means 3 %) and y = delay in seconds. Evaluation at
    (0, 0) returns the leading coefficient.
    """

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) != 7:
            raise ConfigError(
                f"subjective surface needs 7 coefficients, got {len(coeffs)}"
            )
        for c in coeffs:
            _require_finite("surface coefficient", c)
        object.__setattr__(self, "coefficients", coeffs)

    def evaluate(self, loss_fraction: float, delay_s: float) -> float:
        x, y = loss_fraction, delay_s
        c0, cx, cy, cx2, cxy, cx3, cx2y = self.coefficients
        return (
            c0
            + cx * x
            + cy * y
            + cx2 * x * x
            + cxy * x * y
            + cx3 * x * x * x
            + cx2y * x * x * y
        )


@dataclass(frozen=True)
class CodecProfile:
    """Per-codec constants of the additive R model.

    ``loss_a`` doubles as the codec's intrinsic equipment impairment:
    at zero loss the loss term reduces to ``loss_a``, so no separate
    codec impairment is subtracted. ``loss_scale`` divides ``loss_c``
    before it multiplies the loss rate; 100 is the reading consistent
    with the published reference outputs, and keeping it a field leaves
    alternate scalings expressible.
    """

    name: str
    ro: float = 93.2
    advantage: float = 0.0
    loss_a: float = 10.0
    loss_b: float = 25.21
    loss_c: float = 20.20
    loss_scale: float = 100.0
    bias: BiasPolynomial | None = None

    def __post_init__(self):
        if not self.name:
            raise ConfigError("profile name must be non-empty")
        for field_name in ("ro", "advantage", "loss_a", "loss_b", "loss_c", "loss_scale"):
            value = getattr(self, field_name)
            if not math.isfinite(value):
                raise ConfigError(f"profile {self.name}: {field_name} must be finite")
        if not 0 < self.ro <= 100:
            raise ConfigError(f"profile {self.name}: ro must be in (0, 100], got {self.ro}")
        if self.loss_b <= 0:
            raise ConfigError(f"profile {self.name}: loss_b must be > 0, got {self.loss_b}")
        if self.loss_c <= 0:
            raise ConfigError(f"profile {self.name}: loss_c must be > 0, got {self.loss_c}")
        if self.loss_scale <= 0:
            raise ConfigError(
                f"profile {self.name}: loss_scale must be > 0, got {self.loss_scale}"
            )


@dataclass(frozen=True)
class QualityEstimate:
    """One scored condition: transmission rating plus its breakdown.

    ``r_value`` is on the hundred-point R scale and may leave [0, 100]
    before the MOS conversion clamps. ``delay_impairment`` and
    ``loss_impairment`` apply to the additive models and are zero for
    the subjective surface; ``bias`` is non-zero only for the enhanced
    model. ``extrapolated`` marks conditions outside the calibrated
    domain that were scored anyway.
    """

    r_value: float
    mos: float
    delay_impairment: float
    loss_impairment: float
    model: str
    extrapolated: bool
    bias: float = 0.0

    def as_dict(self) -> dict:
        return {
            "r_value": self.r_value,
            "mos": self.mos,
            "delay_impairment": self.delay_impairment,
            "loss_impairment": self.loss_impairment,
            "bias": self.bias,
            "model": self.model,
            "extrapolated": self.extrapolated,
        }


def check_domain(cond: NetworkCondition, allow_extrapolation: bool = False) -> bool:
    """Return the extrapolation flag for ``cond``.

    Raises DomainError naming the violated bound when the condition is
    out of domain and extrapolation was not requested.
    """
    violation = cond.domain_violation()
    if violation is None:
        return False
    if not allow_extrapolation:
        raise DomainError(violation)
    return True


def delay_impairment(delay_ms: float) -> float:
    """Delay impairment on the R scale.

    Linear in delay, with an extra penalty above the knee at 177.3 ms.
    The knee itself is included in the penalty branch (the step function
    is 1 at zero), which only matters for derivative checks since the
    extra term vanishes there.
    """
    if delay_ms < 0:
        raise DomainError(f"delay_ms must be >= 0, got {delay_ms}")
    value = 0.024 * delay_ms
    past_knee = delay_ms - DELAY_KNEE_MS
    if past_knee >= 0:
        value += 0.11 * past_knee
    return value


def packet_loss_impairment(loss_percent: float, profile: CodecProfile) -> float:
    """Combined codec and packet-loss impairment on the R scale.

    ``a + b * ln(1 + (c / scale) * P)`` with P in percent; at P = 0 this
    is exactly ``loss_a``, the codec's intrinsic impairment.
    """
    if loss_percent < 0:
        raise DomainError(f"loss_percent must be >= 0, got {loss_percent}")
    return profile.loss_a + profile.loss_b * math.log1p(
        profile.loss_c / profile.loss_scale * loss_percent
    )


def r_to_mos(r: float) -> float:
    """Convert an R rating to estimated MOS, clamped to [1, 4.5].

    The conversion polynomial dips slightly below 1 for R under ~6.5,
    but the MOS scale has no values below 1, so the result is floored
    there; this also keeps the conversion monotone.
    """
    if r > 100.0:
        return MOS_CEIL
    if r < 0.0:
        return MOS_FLOOR
    return max(MOS_FLOOR, 1.0 + 0.035 * r + 7e-6 * r * (r - 60.0) * (100.0 - r))


def mos_to_r(mos: float) -> float:
    """Convert MOS to an R rating via the cubic approximate inverse.

    Only defined on [1, 4.5]; the inverse is approximate, with errors up
    to about one R unit in the interior of the scale.
    """
    if not MOS_FLOOR <= mos <= MOS_CEIL:
        raise DomainError(f"mos must be in [{MOS_FLOOR}, {MOS_CEIL}], got {mos}")
    return ((3.026 * mos - 25.314) * mos + 87.060) * mos - 57.336


def simplified_estimate(
    cond: NetworkCondition,
    profile: CodecProfile,
    allow_extrapolation: bool = False,
) -> QualityEstimate:
    """Score a condition with the additive R model ``ro - Id - Ipl + A``."""
    extrapolated = check_domain(cond, allow_extrapolation)
    idelay = delay_impairment(cond.delay_ms)
    iloss = packet_loss_impairment(cond.loss_percent, profile)
    r = profile.ro - idelay - iloss + profile.advantage
    return QualityEstimate(
        r_value=r,
        mos=r_to_mos(r),
        delay_impairment=idelay,
        loss_impairment=iloss,
        model=MODEL_SIMPLIFIED,
        extrapolated=extrapolated,
    )


def subjective_mos(
    cond: NetworkCondition,
    surface: SubjectiveSurface,
    allow_extrapolation: bool = False,
) -> float:
    """Predicted voted MOS for a condition, straight off the surface.

    No clamping is applied; within the calibrated domain the surface
    stays inside the MOS scale on its own.
    """
    check_domain(cond, allow_extrapolation)
    return surface.evaluate(cond.loss_percent / 100.0, cond.delay_ms / 1000.0)


def bias_value(cond: NetworkCondition, bias: BiasPolynomial) -> float:
    """Correction (R units) the enhanced model adds for a condition."""
    return bias.evaluate(cond.loss_percent, cond.delay_ms)


def subjective_estimate(
    cond: NetworkCondition,
    surface: SubjectiveSurface,
    allow_extrapolation: bool = False,
) -> QualityEstimate:
    """Score a condition with the subjective surface.

    MOS comes from the surface; the R value is the cubic conversion of
    that MOS, so unlike the additive models the MOS is primary here.
    """
    extrapolated = check_domain(cond, allow_extrapolation)
    mos = subjective_mos(cond, surface, allow_extrapolation)
    return QualityEstimate(
        r_value=mos_to_r(mos),
        mos=mos,
        delay_impairment=0.0,
        loss_impairment=0.0,
        model=MODEL_SUBJECTIVE,
        extrapolated=extrapolated,
    )


def enhanced_estimate(
    cond: NetworkCondition,
    profile: CodecProfile,
    allow_extrapolation: bool = False,
) -> QualityEstimate:
    """Score a condition with the bias-corrected additive model.

    The R value is exactly the additive model's R plus the profile's
    bias polynomial, so the two models differ by ``bias_value`` alone.
    """
    if profile.bias is None:
        raise ConfigError(
            f"profile {profile.name} has no bias polynomial; "
            "the enhanced model requires one"
        )
    base = simplified_estimate(cond, profile, allow_extrapolation)
    bias = bias_value(cond, profile.bias)
    r = base.r_value + bias
    return QualityEstimate(
        r_value=r,
        mos=r_to_mos(r),
        delay_impairment=base.delay_impairment,
        loss_impairment=base.loss_impairment,
        model=MODEL_ENHANCED,
        extrapolated=base.extrapolated,
        bias=bias,
    )
