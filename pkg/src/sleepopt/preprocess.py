"""Survey ingestion and encoding into the fixed 15-feature numeric space.

Pipeline order: parse -> encode per field -> cap numeric outliers (IQR) ->
engineer composite features -> derive the sleep-quality label. Every stage
is a pure function; the combined `preprocess_survey` drives them in order.
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import psqi
from .errors import (
    EmptyColumn,
    EmptyFile,
    MalformedRow,
    MissingColumn,
    MissingRequired,
    NonPositiveHeight,
    NonPositiveWeight,
    RatioSum,
    TargetTooSmall,
    TooFewSamples,
    UnknownAnswer,
)
from .schema import FieldSpec, SurveySchema

GOOD_LABEL = 1  # good sleep is the positive class
POOR_LABEL = 0

_BINARY_DEFAULT = {"No": 0, "Yes": 1}


@dataclass(frozen=True)
class SurveyRecord:
    id: int
    answers: dict[str, str]


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    label: int | None = None
    record_id: int | None = None


@dataclass(frozen=True)
class DatasetSplit:
    train: list[FeatureVector]
    validation: list[FeatureVector]
    test: list[FeatureVector]
    seed: int


# --- ingestion -------------------------------------------------------------

def parse_survey_csv(path: str | Path, schema: SurveySchema) -> list[SurveyRecord]:
    """Read a raw survey CSV; answers are preserved verbatim as strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: no header row") from None
        header = [h.strip() for h in header]
        present = set(header)
        for name in schema.survey_columns():
            if name not in present:
                raise MissingColumn(name)
        records = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if len(row) != len(header):
                raise MalformedRow(line_no, f"expected {len(header)} cells, got {len(row)}")
            answers = dict(zip(header, (cell.strip() for cell in row)))
            records.append(SurveyRecord(id=len(records), answers=answers))
    return records


# --- field-level encoding ---------------------------------------------------

def encode_value(field: FieldSpec, raw) -> float:
    """Encode one raw answer according to the field's kind."""
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        raise MissingRequired(field.name)
    text = str(raw).strip()

    if field.kind == "numeric":
        try:
            value = float(text)
        except ValueError:
            raise UnknownAnswer(field.name, raw) from None
        if not field.lower_bound <= value <= field.upper_bound:
            raise UnknownAnswer(field.name, raw)
        return value

    if field.kind == "text":
        raise UnknownAnswer(field.name, raw)  # text fields are never encoded

    mapping = field.mapping if field.mapping is not None else (
        _BINARY_DEFAULT if field.kind == "binary" else None
    )
    if mapping and text in mapping:
        return float(mapping[text])
    # Pre-encoded files carry bare integers; accept them when in range.
    try:
        level = int(text)
    except ValueError:
        raise UnknownAnswer(field.name, raw) from None
    if not field.lower_bound <= level <= field.upper_bound:
        raise UnknownAnswer(field.name, raw)
    return float(level)


def decode_value(field: FieldSpec, level: float) -> str:
    """Inverse of encode_value for mapped fields (round-trips ordinal answers)."""
    mapping = field.mapping if field.mapping is not None else (
        _BINARY_DEFAULT if field.kind == "binary" else None
    )
    if mapping is None:
        return str(level)
    inverse = {v: k for k, v in mapping.items()}
    key = int(level)
    if key not in inverse:
        raise UnknownAnswer(field.name, level)
    return inverse[key]


# --- outlier treatment -------------------------------------------------------

def cap_outliers_iqr(column: list[float]) -> list[float]:
    """Cap values outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR] to the fences.

    Quartiles are order statistics (the "lower" method), not interpolated:
    capped values then never cross the ranks that define Q1/Q3, which makes
    the operation idempotent. Interpolated quartiles break idempotence on
    small samples (capping shifts the quartiles on re-application). Order
    and length are preserved.
    """
    if len(column) == 0:
        raise EmptyColumn("cannot cap an empty column")
    arr = np.asarray(column, dtype=float)
    q1, q3 = np.quantile(arr, [0.25, 0.75], method="lower")
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return [float(v) for v in np.clip(arr, lo, hi)]


# --- feature engineering ------------------------------------------------------

_HEIGHT_RE = re.compile(r"^\s*(\d+)\s*(?:'|ft|feet)\s*(\d+(?:\.\d+)?)?\s*(?:\"|''|in|inches)?\s*$")


def parse_height_m(text: str) -> float:
    """Parse feet+inches text (5'9", 5 ft 9 in) or plain meters (1.75)."""
    s = str(text).strip()
    m = _HEIGHT_RE.match(s)
    if m:
        feet = int(m.group(1))
        inches = float(m.group(2) or 0.0)
        return (feet * 12 + inches) * 0.0254
    try:
        meters = float(s)
    except ValueError:
        raise UnknownAnswer("height", text) from None
    return meters


def bmi_category(bmi: float) -> int:
    """WHO bands: underweight 0, normal 1, overweight 2, obese 3."""
    if bmi < 18.5:
        return 0
    if bmi < 25.0:
        return 1
    if bmi < 30.0:
        return 2
    return 3


def age_band(age: float) -> int:
    """Cohort bands for the under-30 survey population."""
    if age < 18:
        return 0
    if age < 22:
        return 1
    if age < 26:
        return 2
    return 3


def engineer_features(intermediate: dict[str, float]) -> dict[str, float]:
    """Compute composite fields from an encoded intermediate record.

    Expects encoded levels for the environment ratings, activity and screen
    levels, stress ratings, habit fields, plus numeric age, weight_kg and
    height_m.
    """
    def need(key: str) -> float:
        if key not in intermediate:
            raise MissingRequired(key)
        return intermediate[key]

    weight = need("weight_kg")
    height_m = need("height_m")
    if height_m <= 0:
        raise NonPositiveHeight(f"height {height_m} m")
    if weight <= 0:
        raise NonPositiveWeight(f"weight {weight} kg")
    bmi = weight / (height_m * height_m)

    env_score = (
        need("bed_comfort")
        + need("lighting_condition")
        + need("nighttime_quietness")
        + need("room_ventilation")
    )
    # Lower screen exposure counts toward a healthier lifestyle.
    lifestyle = need("physical_activity") + (4 - need("screen_time_daily"))
    stress = 1.0 if (need("financial_stress") >= 4 or need("headache_neck_pain") >= 4) else 0.0
    poor_habits = float(
        (need("caffeine_intake_timing") == 0)
        + (need("heavy_meals") >= 4)
        + (need("screen_use_before_sleep") == 0)
        + (need("sleep_schedule_consistency") <= 2)
    )
    return {
        "bmi": bmi,
        "bmi_category": float(bmi_category(bmi)),
        "sleep_env_score": env_score,
        "lifestyle_score": lifestyle,
        "stress_flag": stress,
        "poor_habits_score": poor_habits,
        "age_band": float(age_band(need("age"))),
    }


# --- record-level encoding ----------------------------------------------------

def encode_intermediate(record: SurveyRecord, schema: SurveySchema) -> dict[str, float]:
    """Encode every non-derived model field and raw field of one record."""
    out: dict[str, float] = {}
    for f in list(schema.fields) + list(schema.raw_fields):
        if f.derived:
            continue
        if f.kind == "text":
            continue
        if f.name not in record.answers:
            raise MissingRequired(f.name)
        out[f.name] = encode_value(f, record.answers[f.name])
    if "height" in record.answers:
        height_m = parse_height_m(record.answers["height"])
        if height_m <= 0:
            raise NonPositiveHeight(record.answers["height"])
        out["height_m"] = height_m
    return out


def assemble_features(
    intermediate: dict[str, float], schema: SurveySchema, label: int | None = None,
    record_id: int | None = None,
) -> FeatureVector:
    """Project an intermediate dict onto the schema's 15 ordered features."""
    values = []
    for f in schema.fields:
        if f.name not in intermediate:
            raise MissingRequired(f.name)
        v = intermediate[f.name]
        if f.kind in ("ordinal", "binary", "nominal") and not (
            f.lower_bound <= v <= f.upper_bound
        ):
            raise UnknownAnswer(f.name, v)
        values.append(float(v))
    return FeatureVector(values=tuple(values), label=label, record_id=record_id)


def encode_record(record: SurveyRecord, schema: SurveySchema) -> FeatureVector:
    """Encode one record into the model's feature space (no outlier capping)."""
    inter = encode_intermediate(record, schema)
    inter.update(engineer_features(inter))
    return assemble_features(inter, schema, record_id=record.id)


def preprocess_survey(
    path: str | Path,
    schema: SurveySchema,
    psqi_cutoff: int = psqi.POOR_SLEEP_CUTOFF,
) -> list[FeatureVector]:
    """Full pipeline: parse, encode, cap outliers, engineer, label."""
    records = parse_survey_csv(path, schema)
    intermediates = [encode_intermediate(r, schema) for r in records]

    # Cap the continuous survey measurements before banding.
    for col in ("age", "weight_kg", "height_m"):
        present = [i for i, inter in enumerate(intermediates) if col in inter]
        if not present:
            continue
        capped = cap_outliers_iqr([intermediates[i][col] for i in present])
        for i, v in zip(present, capped):
            intermediates[i][col] = v

    features = []
    for record, inter in zip(records, intermediates):
        inter.update(engineer_features(inter))
        resp = psqi.response_from_answers(record.answers)
        label = GOOD_LABEL if psqi.score_psqi(resp, cutoff=psqi_cutoff)["label"] == psqi.GOOD else POOR_LABEL
        features.append(assemble_features(inter, schema, label=label, record_id=record.id))
    return features


# --- dataset handling -----------------------------------------------------------

def split_dataset(
    data: list[FeatureVector], ratios: tuple[float, float, float], seed: int
) -> DatasetSplit:
    """Stratified train/validation/test split, deterministic per seed."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise RatioSum(f"ratios {ratios} must be positive and sum to 1")
    rng = np.random.default_rng(seed)
    by_label: dict = {}
    for i, fv in enumerate(data):
        by_label.setdefault(fv.label, []).append(i)

    buckets: tuple[list[int], ...] = ([], [], [])
    for label in sorted(by_label, key=lambda x: (x is None, x)):
        idx = np.array(by_label[label])
        rng.shuffle(idx)
        n = len(idx)
        targets = [n * r for r in ratios]
        counts = [int(t) for t in targets]
        # Largest-remainder rounding keeps each class within one sample per split.
        remainders = sorted(
            range(3), key=lambda j: (targets[j] - counts[j], -j), reverse=True
        )
        for j in remainders[: n - sum(counts)]:
            counts[j] += 1
        if any(c < 1 for c in counts):
            raise TooFewSamples(
                f"class {label!r} has {n} samples, too few for ratios {ratios}"
            )
        start = 0
        for j, c in enumerate(counts):
            buckets[j].extend(int(k) for k in idx[start : start + c])
            start += c

    train, val, test = ([data[i] for i in sorted(b)] for b in buckets)
    return DatasetSplit(train=train, validation=val, test=test, seed=seed)


def augment_dataset(
    data: list[FeatureVector], target_size: int, schema: SurveySchema, seed: int
) -> list[FeatureVector]:
    """Grow a dataset to target_size by minority-biased jitter resampling.

    New samples copy a seeded random base row (minority classes drawn more
    often) and jitter each ordinal field by -1/0/+1, clamped to its bounds.
    Labels are never modified.
    """
    if target_size < len(data):
        raise TargetTooSmall(f"target {target_size} < dataset size {len(data)}")
    if target_size == len(data):
        return list(data)
    rng = np.random.default_rng(seed)
    counts: dict = {}
    for fv in data:
        counts[fv.label] = counts.get(fv.label, 0) + 1
    weights = np.array([1.0 / counts[fv.label] for fv in data])
    weights /= weights.sum()

    ordinal_idx = [
        i for i, f in enumerate(schema.fields) if f.kind == "ordinal"
    ]
    bounds = [(schema.fields[i].lower_bound, schema.fields[i].upper_bound) for i in ordinal_idx]

    out = list(data)
    base_rows = rng.choice(len(data), size=target_size - len(data), p=weights)
    for row in base_rows:
        base = data[int(row)]
        values = list(base.values)
        jitter = rng.integers(-1, 2, size=len(ordinal_idx))
        for (i, (lo, hi)), dj in zip(zip(ordinal_idx, bounds), jitter):
            values[i] = float(min(hi, max(lo, int(values[i]) + int(dj))))
        out.append(FeatureVector(values=tuple(values), label=base.label, record_id=len(out)))
    return out


def dataset_to_arrays(data: list[FeatureVector]) -> tuple[np.ndarray, np.ndarray]:
    """Stack feature vectors into (X, y) arrays; unlabeled rows get y = -1."""
    X = np.array([fv.values for fv in data], dtype=float)
    y = np.array([fv.label if fv.label is not None else -1 for fv in data], dtype=int)
    return X, y


# --- encoded dataset files --------------------------------------------------------

def write_encoded_csv(data: list[FeatureVector], schema: SurveySchema, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(schema.field_names + ["label"])
        for fv in data:
            row = [f"{v:.10g}" for v in fv.values]
            row.append("" if fv.label is None else str(fv.label))
            writer.writerow(row)


def read_encoded_csv(path: str | Path, schema: SurveySchema) -> list[FeatureVector]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: no header row") from None
        expected = schema.field_names + ["label"]
        if [h.strip() for h in header] != expected:
            for name in expected:
                if name not in header:
                    raise MissingColumn(name)
            raise MalformedRow(1, "column order does not match schema")
        out = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != len(expected):
                raise MalformedRow(line_no)
            try:
                values = tuple(float(c) for c in row[:-1])
            except ValueError:
                raise MalformedRow(line_no, "non-numeric feature value") from None
            label = None if row[-1].strip() == "" else int(float(row[-1]))
            out.append(FeatureVector(values=values, label=label, record_id=len(out)))
    return out


def with_label(fv: FeatureVector, label: int) -> FeatureVector:
    return replace(fv, label=label)
