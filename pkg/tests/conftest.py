import csv

import numpy as np
import pytest

from sleepopt.schema import default_schema

# Reference importance fixture used across the optimizer tests: raw
# mean-absolute attribution weights for the seven actionable fields.
REFERENCE_ACTIONABLE_WEIGHTS = {
    "room_ventilation": 0.490,
    "nighttime_quietness": 0.364,
    "caffeine_intake_timing": 0.363,
    "lighting_condition": 0.354,
    "sleeping_posture": 0.285,
    "screen_use_before_sleep": 0.259,
    "sleep_schedule_consistency": 0.118,
}

DEFAULT_SURVEY_ROW = {
    "room_ventilation": "4",
    "nighttime_quietness": "3",
    "caffeine_intake_timing": "8 PM - 10 PM",
    "lighting_condition": "4",
    "sleeping_posture": "Left facing",
    "screen_use_before_sleep": "30 minutes before bed",
    "sleep_schedule_consistency": "3",
    "gender": "Male",
    "academic_workload": "2-4 hours",
    "physical_activity": "30-60 minutes",
    "financial_stress": "2",
    "headache_neck_pain": "2",
    "age": "22",
    "weight_kg": "70",
    "height": "5'9\"",
    "bed_comfort": "4",
    "heavy_meals": "2",
    "screen_time_daily": "2-4 hours",
    "psqi_bedtime": "23:30",
    "psqi_sleep_latency_min": "20",
    "psqi_waketime": "7:30",
    "psqi_sleep_hours": "7",
    "psqi_disturb_late_sleep": "Less than once a week",
    "psqi_disturb_wake_night": "Not during the past month",
    "psqi_disturb_bathroom": "Less than once a week",
    "psqi_disturb_breathe": "Not during the past month",
    "psqi_disturb_snore": "Not during the past month",
    "psqi_disturb_cold": "Not during the past month",
    "psqi_disturb_hot": "Less than once a week",
    "psqi_disturb_dreams": "Not during the past month",
    "psqi_disturb_pain": "Not during the past month",
    "psqi_subjective_quality": "Fairly good",
    "psqi_medication": "Not during the past month",
    "psqi_dysfunction_awake": "Not during the past month",
    "psqi_dysfunction_enthusiasm": "Only a very slight problem",
}


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def reference_weights(schema):
    return [(f.name, REFERENCE_ACTIONABLE_WEIGHTS[f.name]) for f in schema.actionable_fields]


def survey_row(**overrides) -> dict:
    row = dict(DEFAULT_SURVEY_ROW)
    row.update({k: str(v) for k, v in overrides.items()})
    return row


def write_survey_csv(path, rows, columns=None):
    columns = columns or list(DEFAULT_SURVEY_ROW.keys())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def full_headroom_record(schema):
    """A record with every actionable variable one step below its upper bound
    and in-bounds context values."""
    from sleepopt.preprocess import FeatureVector

    values = []
    for f in schema.fields:
        if f.actionable:
            values.append(float(f.upper_bound - 1))
        else:
            values.append(float(f.lower_bound))
    return FeatureVector(values=tuple(values), label=None, record_id=0)


def random_cohort(schema, n, seed):
    """Random in-bounds records (uniform levels), unlabeled."""
    from sleepopt.preprocess import FeatureVector

    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        values = tuple(
            float(rng.integers(f.lower_bound, f.upper_bound + 1)) for f in schema.fields
        )
        out.append(FeatureVector(values=values, label=None, record_id=i))
    return out
