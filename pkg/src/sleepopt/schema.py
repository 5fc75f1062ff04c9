"""Survey schema: the declarative map from survey answers to the model's
15-feature numeric space.

A schema document has three sections:

* ``fields``: the 15 model features, in order. Each carries a kind
  (binary / ordinal / nominal / numeric), integer bounds, an actionability
  flag, and for ordinal fields an ``ordinal_map`` from answer string to
  level. Nominal fields carry a frozen ``label_map`` so encoding is stable
  across dataset versions. Fields marked ``derived`` are not read from the
  survey file; they are computed by feature engineering.
* ``raw_fields``: survey columns that feed feature engineering but are not
  themselves model features (weight, height, bed comfort, ...).
* ``psqi_fields``: the column names of the sleep-quality instrument used
  for labeling.

Exactly seven fields are actionable; they are the decision variables of
the intervention optimizer and their bounds double as the optimizer's
feasible ranges.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError

# "text" is valid only for raw (non-model) fields, e.g. free-form height.
KINDS = ("binary", "ordinal", "nominal", "numeric", "text")

# Canonical names of the seven behavioral/environmental decision variables.
ACTIONABLE_FIELDS = (
    "room_ventilation",
    "nighttime_quietness",
    "caffeine_intake_timing",
    "lighting_condition",
    "sleeping_posture",
    "screen_use_before_sleep",
    "sleep_schedule_consistency",
)


@dataclass(frozen=True)
class FieldSpec:
    name: str
    kind: str
    lower_bound: int
    upper_bound: int
    actionable: bool = False
    mapping: dict[str, int] | None = None  # ordinal_map / label_map
    derived: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"field {self.name!r}: unknown kind {self.kind!r}")
        if self.lower_bound > self.upper_bound:
            raise SchemaError(f"field {self.name!r}: empty bound range")
        if self.kind == "ordinal":
            if not self.mapping and not self.derived:
                raise SchemaError(f"ordinal field {self.name!r} needs an ordinal_map")
            if self.mapping:
                levels = sorted(self.mapping.values())
                expected = list(range(self.lower_bound, self.upper_bound + 1))
                if levels != expected:
                    raise SchemaError(
                        f"field {self.name!r}: ordinal_map values {levels} do not form "
                        f"the contiguous range {expected}"
                    )

    @property
    def inverse_mapping(self) -> dict[int, str]:
        return {v: k for k, v in (self.mapping or {}).items()}


@dataclass(frozen=True)
class SurveySchema:
    fields: tuple[FieldSpec, ...]
    raw_fields: tuple[FieldSpec, ...] = ()
    psqi_fields: tuple[str, ...] = ()

    def __post_init__(self):
        names = [f.name for f in self.fields] + [f.name for f in self.raw_fields]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate field names: {dupes}")
        actionable = [f.name for f in self.fields if f.actionable]
        if sorted(actionable) != sorted(ACTIONABLE_FIELDS):
            raise SchemaError(
                f"actionable set must be exactly {sorted(ACTIONABLE_FIELDS)}, "
                f"got {sorted(actionable)}"
            )

    @property
    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]

    @property
    def actionable_fields(self) -> list[FieldSpec]:
        return [f for f in self.fields if f.actionable]

    @property
    def feature_count(self) -> int:
        return len(self.fields)

    def field(self, name: str) -> FieldSpec:
        for f in self.fields:
            if f.name == name:
                return f
        for f in self.raw_fields:
            if f.name == name:
                return f
        raise KeyError(name)

    def index_of(self, name: str) -> int:
        for i, f in enumerate(self.fields):
            if f.name == name:
                return i
        raise KeyError(name)

    def survey_columns(self) -> list[str]:
        """Columns a raw survey file must provide (derived fields excluded)."""
        cols = [f.name for f in self.fields if not f.derived]
        cols += [f.name for f in self.raw_fields]
        cols += list(self.psqi_fields)
        return cols

    def to_dict(self) -> dict:
        def field_doc(f: FieldSpec) -> dict:
            doc: dict = {
                "name": f.name,
                "kind": f.kind,
                "lower_bound": f.lower_bound,
                "upper_bound": f.upper_bound,
                "actionable": f.actionable,
            }
            if f.derived:
                doc["derived"] = True
            if f.mapping is not None:
                key = "label_map" if f.kind == "nominal" else "ordinal_map"
                doc[key] = f.mapping
            return doc

        return {
            "fields": [field_doc(f) for f in self.fields],
            "raw_fields": [field_doc(f) for f in self.raw_fields],
            "psqi_fields": list(self.psqi_fields),
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _field_from_doc(doc: dict) -> FieldSpec:
    mapping = doc.get("ordinal_map") or doc.get("label_map")
    return FieldSpec(
        name=doc["name"],
        kind=doc["kind"],
        lower_bound=int(doc["lower_bound"]),
        upper_bound=int(doc["upper_bound"]),
        actionable=bool(doc.get("actionable", False)),
        mapping=dict(mapping) if mapping else None,
        derived=bool(doc.get("derived", False)),
    )


def schema_from_dict(doc: dict) -> SurveySchema:
    try:
        return SurveySchema(
            fields=tuple(_field_from_doc(d) for d in doc["fields"]),
            raw_fields=tuple(_field_from_doc(d) for d in doc.get("raw_fields", [])),
            psqi_fields=tuple(doc.get("psqi_fields", [])),
        )
    except KeyError as exc:
        raise SchemaError(f"schema document missing key: {exc}") from exc


def load_schema(path: str | Path) -> SurveySchema:
    with open(path, encoding="utf-8") as fh:
        return schema_from_dict(json.load(fh))


def save_schema(schema: SurveySchema, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schema.to_dict(), indent=2) + "\n", encoding="utf-8")


def default_schema() -> SurveySchema:
    """The shipped 15-feature schema (7 actionable + 8 context features)."""
    here = Path(__file__).parent / "data" / "default_schema.json"
    return load_schema(here)
