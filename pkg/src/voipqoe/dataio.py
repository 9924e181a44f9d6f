"""Loading and serialization: vote records (CSV), codec profiles
(JSON config), and line-delimited JSON metric streams.

Numeric parsing is plain decimal-point parsing, no locale handling.
Loaders accept either text content or an open text file; everything
round-trips through the matching ``*_to_*`` serializer.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone

from . import datasets
from .errors import ConfigError, DataValidationError
from .evaluation import SubjectiveRecord, TestSet
from .model import BiasPolynomial, CodecProfile

RECORD_COLUMNS = ("scenario_id", "loss_percent", "delay_ms", "score", "test_set")
OPTIONAL_RECORD_COLUMNS = ("participant_id",)

PROFILE_KEYS = (
    "name",
    "ro",
    "advantage",
    "loss_a",
    "loss_b",
    "loss_c",
    "loss_scale",
    "bias",
)


def _as_text(source) -> str:
    if isinstance(source, str):
        return source
    if isinstance(source, bytes):
        return source.decode("utf-8")
    return source.read()


def load_subjective_records(source, format: str = "csv") -> list[SubjectiveRecord]:
    """Parse and validate vote records.

    The header row is required. All malformed rows are reported at
    once, with their line numbers, rather than failing on the first.
    """
    if format != "csv":
        raise DataValidationError(f"unsupported record format {format!r}")
    reader = csv.DictReader(io.StringIO(_as_text(source)))
    if reader.fieldnames is None:
        raise DataValidationError("record source is empty; header row required")
    missing = [c for c in RECORD_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise DataValidationError(f"missing columns: {', '.join(missing)}")

    records: list[SubjectiveRecord] = []
    problems: list[tuple[int, str]] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            participant = row.get("participant_id") or None
            records.append(
                SubjectiveRecord(
                    scenario_id=row["scenario_id"],
                    loss_percent=float(row["loss_percent"]),
                    delay_ms=float(row["delay_ms"]),
                    score=float(row["score"]),
                    test_set=row["test_set"],
                    participant_id=participant,
                )
            )
        except (DataValidationError, TypeError, ValueError) as exc:
            problems.append((line_no, str(exc)))
    if problems:
        detail = "; ".join(f"line {n}: {msg}" for n, msg in problems)
        raise DataValidationError(f"invalid records: {detail}", lines=problems)
    return records


def records_to_csv(records) -> str:
    """Serialize records to canonical CSV (all six columns, header first)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS + OPTIONAL_RECORD_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.scenario_id,
                repr(float(r.loss_percent)),
                repr(float(r.delay_ms)),
                repr(float(r.score)),
                r.test_set,
                r.participant_id or "",
            ]
        )
    return out.getvalue()


def testsets_from_records(records) -> list[TestSet]:
    """Group records into test sets, ordered by test-set id."""
    grouped: dict[str, list[SubjectiveRecord]] = {}
    for record in records:
        grouped.setdefault(record.test_set, []).append(record)
    return [
        TestSet(id=ts_id, records=tuple(grouped[ts_id])) for ts_id in sorted(grouped)
    ]


def _profile_from_dict(entry: dict) -> CodecProfile:
    if not isinstance(entry, dict):
        raise ConfigError(f"profile entry must be an object, got {type(entry).__name__}")
    unknown = set(entry) - set(PROFILE_KEYS)
    if unknown:
        raise ConfigError(f"unknown profile keys: {', '.join(sorted(unknown))}")
    if "name" not in entry:
        raise ConfigError("profile entry missing 'name'")
    bias = entry.get("bias")
    kwargs = {k: entry[k] for k in PROFILE_KEYS[1:-1] if k in entry}
    return CodecProfile(
        name=entry["name"],
        bias=BiasPolynomial(tuple(bias)) if bias is not None else None,
        **kwargs,
    )


def load_codec_profiles(source) -> dict[str, CodecProfile]:
    """Read a JSON profile config and merge it over the built-ins.

    An empty config yields just the built-in profiles. A config entry
    may deliberately shadow a built-in by reusing its name; duplicate
    names within one config are an error.
    """
    text = _as_text(source).strip()
    profiles = datasets.builtin_profiles()
    if not text:
        return profiles
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"profile config is not valid JSON: {exc}") from exc
    entries = doc.get("profiles") if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise ConfigError("profile config must be a list or {'profiles': [...]}")
    seen = set()
    for entry in entries:
        profile = _profile_from_dict(entry)
        if profile.name in seen:
            raise ConfigError(f"duplicate profile name {profile.name!r}")
        seen.add(profile.name)
        profiles[profile.name] = profile
    return profiles


def profiles_to_config(profiles) -> str:
    """Serialize profiles to the JSON config format."""
    if isinstance(profiles, dict):
        profiles = profiles.values()
    entries = []
    for p in profiles:
        entry = {
            "name": p.name,
            "ro": p.ro,
            "advantage": p.advantage,
            "loss_a": p.loss_a,
            "loss_b": p.loss_b,
            "loss_c": p.loss_c,
            "loss_scale": p.loss_scale,
        }
        if p.bias is not None:
            entry["bias"] = list(p.bias.coefficients)
        entries.append(entry)
    return json.dumps({"profiles": entries}, indent=2) + "\n"


@dataclass(frozen=True)
class MetricRecord:
    """One pre-extracted measurement from a monitored stream."""

    ts: datetime
    loss_percent: float
    delay_ms: float
    stream_id: str | None = None


@dataclass(frozen=True)
class MetricParseError:
    """A stream line that failed to parse, kept so consumers can count
    or log it without losing their place."""

    line_no: int
    message: str
    raw: str


def _parse_ts(value) -> datetime:
    if isinstance(value, (int, float)):
        return datetime.fromtimestamp(float(value), tz=timezone.utc)
    if isinstance(value, str):
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    raise ValueError(f"ts must be a number or ISO-8601 string, got {value!r}")


def _parse_metric_line(line: str) -> MetricRecord:
    doc = json.loads(line)
    if not isinstance(doc, dict):
        raise ValueError("line must be a JSON object")
    for key in ("ts", "loss_percent", "delay_ms"):
        if key not in doc:
            raise ValueError(f"missing key {key!r}")
    loss = float(doc["loss_percent"])
    delay = float(doc["delay_ms"])
    if not (math.isfinite(loss) and math.isfinite(delay)):
        raise ValueError("loss_percent and delay_ms must be finite")
    if loss < 0 or delay < 0:
        raise ValueError("loss_percent and delay_ms must be non-negative")
    return MetricRecord(
        ts=_parse_ts(doc["ts"]),
        loss_percent=loss,
        delay_ms=delay,
        stream_id=doc.get("stream_id"),
    )


def read_metric_stream(source, on_error: str = "continue"):
    """Lazily yield validated metric records from NDJSON lines.

    Input order is preserved. Malformed lines yield a
    :class:`MetricParseError` under the default continue policy;
    ``on_error="abort"`` raises instead.
    """
    if on_error not in ("continue", "abort"):
        raise DataValidationError(f"on_error must be 'continue' or 'abort', got {on_error!r}")
    lines = io.StringIO(source) if isinstance(source, str) else source
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield _parse_metric_line(line)
        except (ValueError, TypeError) as exc:
            if on_error == "abort":
                raise DataValidationError(f"line {line_no}: {exc}") from exc
            yield MetricParseError(line_no=line_no, message=str(exc), raw=line)
