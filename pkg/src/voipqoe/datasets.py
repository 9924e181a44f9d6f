"""Reference data shipped with the package.

The ``TABLE*`` constants are the package's golden baselines, numbered
the way the ``voipqoe reproduce`` targets name them:

* table2 — the nine conditions of the underlying conversation tests,
  with participant counts (250 voters total).
* table3 — published goodness-of-fit of the three candidate term sets
  for the bias surface, with the selected one marked.
* table4 — the nine bias-polynomial constants for G.729.
* table5 — four test sets of ten scenario aggregates (mean score ±
  sample SD, participant count); 67 votes per test set.
* table6 — golden model outputs (R and MOS, plain and bias-corrected)
  for the ten evaluation scenarios.
* table7 — golden MAPE per test set and model, with the headline error
  reduction.

The subjective surface and bias constants are published to four
significant figures; downstream tolerances absorb that rounding. A few
table5 aggregates are inconsistent with their stated participant count
(see ``TABLE5_IRREPRODUCIBLE``); the canonical vote expansion falls
back to a relaxed matching tolerance for those cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .evaluation import (
    ScenarioAggregate,
    SubjectiveRecord,
    TestSet,
    reconstruct_with_fallback,
)
from .model import BiasPolynomial, CodecProfile, SubjectiveSurface

TABLE4_BIAS = BiasPolynomial(
    (
        0.4327,  # 1
        0.6654,  # x
        -0.03461,  # y
        0.03563,  # x^2
        0.004689,  # x*y
        0.000379,  # y^2
        -0.0004205,  # x^2*y
        -3.98e-08,  # x*y^2
        -2.52e-07,  # y^3
    )
)

# MOS over (loss fraction, delay seconds); leading term is the MOS at a
# clean line.
SUBJECTIVE_SURFACE = SubjectiveSurface(
    (4.113, -13.960, -0.2849, 92.16, 18.030, -225.9, -165.7)
)

G729 = CodecProfile(
    name="g729",
    ro=93.2,
    advantage=0.0,
    loss_a=10.0,
    loss_b=25.21,
    loss_c=20.20,
    loss_scale=100.0,
    bias=TABLE4_BIAS,
)


def builtin_profiles() -> dict[str, CodecProfile]:
    """Profiles available without any configuration file."""
    return {G729.name: G729}


@dataclass(frozen=True)
class ScenarioDefinition:
    """One condition of the original conversation tests."""

    scenario_id: str
    loss_percent: float
    delay_ms: float
    participants: int


TABLE2_SCENARIOS = (
    ScenarioDefinition("S01", 0.0, 0.0, 24),
    ScenarioDefinition("S02", 2.0, 0.0, 30),
    ScenarioDefinition("S03", 4.0, 0.0, 24),
    ScenarioDefinition("S04", 6.0, 0.0, 30),
    ScenarioDefinition("S05", 10.0, 0.0, 24),
    ScenarioDefinition("S06", 0.0, 400.0, 28),
    ScenarioDefinition("S07", 3.0, 400.0, 32),
    ScenarioDefinition("S08", 5.0, 400.0, 30),
    ScenarioDefinition("S09", 10.0, 400.0, 28),
)


@dataclass(frozen=True)
class CandidateGoodnessOfFit:
    """Published fit quality of one bias-surface candidate."""

    termset_name: str
    r_squared: float
    rmse: float
    selected: bool


TABLE3_CANDIDATES = (
    CandidateGoodnessOfFit("poly32", 0.9953, 0.8872, False),
    CandidateGoodnessOfFit("poly23", 0.9964, 0.7843, True),
    CandidateGoodnessOfFit("poly33", 0.9964, 0.7879, False),
)

# Scenario conditions and participant counts shared by all four test
# sets (67 votes per set).
_TABLE5_CONDITIONS = (
    ("S1", 0.0, 0.0, 6),
    ("S2", 0.0, 400.0, 7),
    ("S3", 1.0, 200.0, 7),
    ("S4", 2.0, 0.0, 7),
    ("S5", 3.0, 400.0, 7),
    ("S6", 4.0, 0.0, 6),
    ("S7", 5.0, 400.0, 7),
    ("S8", 6.0, 0.0, 7),
    ("S9", 10.0, 0.0, 6),
    ("S10", 10.0, 400.0, 7),
)

# (mean, sample SD) per scenario, one column per test set.
_TABLE5_STATS = {
    "TS1": (
        (4.00, 0.63), (4.00, 0.82), (4.14, 0.38), (3.71, 0.49), (3.88, 0.64),
        (4.17, 0.75), (3.57, 0.53), (3.43, 0.53), (3.17, 0.41), (3.43, 0.53),
    ),
    "TS2": (
        (4.17, 0.41), (3.86, 0.38), (4.00, 0.58), (3.86, 0.38), (4.25, 0.71),
        (3.67, 0.82), (3.71, 0.49), (4.00, 0.00), (3.83, 0.41), (3.43, 0.53),
    ),
    "TS3": (
        (3.86, 0.38), (3.86, 0.38), (3.86, 0.69), (3.86, 0.38), (3.50, 0.53),
        (3.67, 0.52), (3.71, 0.49), (3.57, 0.79), (3.33, 0.52), (3.43, 0.79),
    ),
    "TS4": (
        (4.29, 0.76), (4.29, 0.76), (4.00, 0.58), (3.86, 0.38), (3.63, 0.52),
        (3.50, 0.57), (3.71, 0.49), (3.29, 0.49), (3.33, 0.82), (3.14, 0.38),
    ),
}

TABLE5_TESTSETS = tuple(
    TestSet(
        id=ts_id,
        aggregates=tuple(
            ScenarioAggregate(
                scenario_id=scenario_id,
                loss_percent=loss,
                delay_ms=delay,
                mean=mean,
                sd=sd,
                n=n,
            )
            for (scenario_id, loss, delay, n), (mean, sd) in zip(
                _TABLE5_CONDITIONS, _TABLE5_STATS[ts_id]
            )
        ),
    )
    for ts_id in ("TS1", "TS2", "TS3", "TS4")
)

# Aggregates that admit no integer score multiset at the exact ±0.005
# matching tolerance: their published mean or SD is inconsistent with
# the stated participant count (most look like they were computed over
# a different count before rounding).
TABLE5_IRREPRODUCIBLE = (
    ("S1", "TS3"),
    ("S1", "TS4"),
    ("S5", "TS1"),
    ("S5", "TS2"),
    ("S5", "TS3"),
    ("S5", "TS4"),
    ("S6", "TS4"),
)


@dataclass(frozen=True)
class GoldenModelOutputs:
    """Published R/MOS for one scenario, plain and bias-corrected."""

    scenario_id: str
    loss_percent: float
    delay_ms: float
    simplified_r: float
    simplified_mos: float
    enhanced_r: float
    enhanced_mos: float


TABLE6_GOLDEN = (
    GoldenModelOutputs("S1", 0.0, 0.0, 83.200, 4.139, 83.633, 4.149),
    GoldenModelOutputs("S2", 0.0, 400.0, 49.103, 2.528, 80.191, 4.033),
    GoldenModelOutputs("S3", 1.0, 200.0, 71.265, 3.656, 79.471, 4.004),
    GoldenModelOutputs("S4", 2.0, 0.0, 74.646, 3.807, 76.552, 3.889),
    GoldenModelOutputs("S5", 3.0, 400.0, 37.160, 1.927, 74.659, 3.807),
    GoldenModelOutputs("S6", 4.0, 0.0, 68.270, 3.515, 71.934, 3.690),
    GoldenModelOutputs("S7", 5.0, 400.0, 31.503, 1.672, 71.950, 3.685),
    GoldenModelOutputs("S8", 6.0, 0.0, 63.186, 3.263, 68.894, 3.548),
    GoldenModelOutputs("S9", 10.0, 0.0, 55.336, 2.856, 65.986, 3.403),
    GoldenModelOutputs("S10", 10.0, 400.0, 21.238, 1.290, 64.417, 3.326),
)

# Golden per-record MAPE (percent) per test set: (simplified, enhanced).
TABLE7_GOLDEN = {
    "TS1": (27.85, 12.12),
    "TS2": (29.23, 10.28),
    "TS3": (28.50, 11.96),
    "TS4": (28.32, 12.49),
}
TABLE7_AVERAGES = {"simplified": 28.47, "enhanced": 11.71}
TABLE7_ERROR_REDUCTION = 58.87
# The source's running text gives 29.30 for TS2/simplified where its
# results table says 29.23; the table value is authoritative here.
TABLE7_TS2_SIMPLIFIED_PROSE = 29.30


@lru_cache(maxsize=1)
def expand_reference_votes() -> tuple[SubjectiveRecord, ...]:
    """Canonical synthetic per-record expansion of the table5 aggregates.

    Every aggregate is replaced by the lexicographically smallest
    integer score multiset that reproduces it (at the tightest matching
    tolerance that yields any). The result is deterministic: 67 records
    per test set, 268 in total. Synthetic votes, not the original ones,
    which were never published.
    """
    records = []
    for testset in TABLE5_TESTSETS:
        for agg in testset.aggregates:
            multisets, _ = reconstruct_with_fallback(agg.mean, agg.sd, agg.n)
            for k, score in enumerate(multisets[0], start=1):
                records.append(
                    SubjectiveRecord(
                        scenario_id=agg.scenario_id,
                        loss_percent=agg.loss_percent,
                        delay_ms=agg.delay_ms,
                        score=float(score),
                        test_set=testset.id,
                        participant_id=f"{testset.id}-{agg.scenario_id}-{k}",
                    )
                )
    return tuple(records)


def reference_testsets_with_votes() -> tuple[TestSet, ...]:
    """table5 test sets carrying both aggregates and canonical votes."""
    by_testset: dict[str, list[SubjectiveRecord]] = {}
    for record in expand_reference_votes():
        by_testset.setdefault(record.test_set, []).append(record)
    return tuple(
        TestSet(id=ts.id, aggregates=ts.aggregates, records=tuple(by_testset[ts.id]))
        for ts in TABLE5_TESTSETS
    )
