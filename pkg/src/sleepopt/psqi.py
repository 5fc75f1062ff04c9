"""Pittsburgh Sleep Quality Index scoring.

Implements the standard seven-component scoring rules. Each component is an
integer 0..3, the global score is their sum (0..21), and the binary label is
poor sleep when the global score exceeds a configurable cutoff (default 5,
the instrument's conventional clinical threshold).

Component boundaries follow the common published conventions:

* duration:  >= 7 h -> 0, >= 6 -> 1, >= 5 -> 2, else 3
* efficiency (sleep / time in bed * 100): >= 85 -> 0, >= 75 -> 1,
  >= 65 -> 2, else 3
* latency: minutes mapped (<= 15 -> 0, <= 30 -> 1, <= 60 -> 2, else 3)
* disturbances: sum of the nine frequency codes remapped
  (0 -> 0, 1-9 -> 1, 10-18 -> 2, 19-27 -> 3)
* daytime dysfunction: sum of the two codes remapped (0 -> 0, 1-2 -> 1,
  3-4 -> 2, 5-6 -> 3)
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentTimes, MalformedRow, UnknownAnswer

POOR_SLEEP_CUTOFF = 5  # poor iff global > cutoff

GOOD, POOR = "good", "poor"

# Answer -> frequency code for the disturbance / medication / dysfunction items.
FREQUENCY_CODES = {
    "Not during the past month": 0,
    "Less than once a week": 1,
    "Once or twice a week": 2,
    "Three or more times a week": 3,
}

QUALITY_CODES = {
    "Very good": 0,
    "Fairly good": 1,
    "Fairly bad": 2,
    "Very bad": 3,
}

ENTHUSIASM_CODES = {
    "No problem at all": 0,
    "Only a very slight problem": 1,
    "Somewhat of a problem": 2,
    "A very big problem": 3,
}


@dataclass(frozen=True)
class PsqiResponse:
    bedtime: float  # clock hours, 0 <= t < 24
    sleep_latency_min: float
    waketime: float
    sleep_hours: float
    disturbance_items: tuple[int, ...]  # 9 frequency codes 0..3
    subjective_quality: int
    medication_use: int
    daytime_dysfunction_items: tuple[int, int]

    def __post_init__(self):
        if len(self.disturbance_items) != 9:
            raise MalformedRow(0, "expected 9 disturbance items")
        codes = (
            list(self.disturbance_items)
            + [self.subjective_quality, self.medication_use]
            + list(self.daytime_dysfunction_items)
        )
        for c in codes:
            if c not in (0, 1, 2, 3):
                raise MalformedRow(0, f"component code {c} outside 0..3")
        if self.sleep_hours < 0:
            raise MalformedRow(0, "negative sleep hours")
        if self.sleep_latency_min < 0:
            raise MalformedRow(0, "negative sleep latency")


def _band(value: float, cuts: tuple[float, float, float]) -> int:
    """Score 0..3 by descending quality: value <= cuts[i] picks score i."""
    for score, cut in enumerate(cuts):
        if value <= cut:
            return score
    return 3


def time_in_bed_hours(bedtime: float, waketime: float) -> float:
    """Hours from bedtime to waketime, wrapping past midnight.

    Equal times produce a zero span (ambiguous between 0 and 24 hours),
    which the scorer rejects as inconsistent.
    """
    span = waketime - bedtime
    if span < 0:
        span += 24.0
    return span


def score_psqi(resp: PsqiResponse, cutoff: int = POOR_SLEEP_CUTOFF) -> dict:
    """Score one response. Returns global score, the 7 components, and label."""
    c_quality = resp.subjective_quality

    c_latency = _band(resp.sleep_latency_min, (15, 30, 60))

    if resp.sleep_hours >= 7:
        c_duration = 0
    elif resp.sleep_hours >= 6:
        c_duration = 1
    elif resp.sleep_hours >= 5:
        c_duration = 2
    else:
        c_duration = 3

    in_bed = time_in_bed_hours(resp.bedtime, resp.waketime)
    if in_bed <= 0:
        raise InconsistentTimes(
            f"nonpositive time in bed ({in_bed:.2f} h) for bedtime "
            f"{resp.bedtime} / waketime {resp.waketime}"
        )
    # Self-reports occasionally exceed the window; treat as full efficiency.
    efficiency = min(100.0, 100.0 * resp.sleep_hours / in_bed)
    if efficiency >= 85:
        c_efficiency = 0
    elif efficiency >= 75:
        c_efficiency = 1
    elif efficiency >= 65:
        c_efficiency = 2
    else:
        c_efficiency = 3

    disturbance_sum = sum(resp.disturbance_items)
    c_disturbance = _band(disturbance_sum, (0, 9, 18))

    c_medication = resp.medication_use

    dysfunction_sum = sum(resp.daytime_dysfunction_items)
    c_dysfunction = _band(dysfunction_sum, (0, 2, 4))

    components = (
        c_quality,
        c_latency,
        c_duration,
        c_efficiency,
        c_disturbance,
        c_medication,
        c_dysfunction,
    )
    global_score = sum(components)
    return {
        "global": global_score,
        "components": components,
        "label": POOR if global_score > cutoff else GOOD,
    }


def parse_clock_time(text: str) -> float:
    """'23:30' or '11:30 PM' -> clock hours (23.5)."""
    s = text.strip().upper()
    meridian = None
    for suffix in ("AM", "PM"):
        if s.endswith(suffix):
            meridian = suffix
            s = s[: -len(suffix)].strip()
    try:
        if ":" in s:
            hh, mm = s.split(":")
            hours = int(hh) + int(mm) / 60.0
        else:
            hours = float(s)
    except ValueError as exc:
        raise UnknownAnswer("clock time", text) from exc
    if meridian == "PM" and hours < 12:
        hours += 12
    if meridian == "AM" and hours >= 12:
        hours -= 12
    if not 0 <= hours < 24:
        raise UnknownAnswer("clock time", text)
    return hours


def _code(answers: dict, column: str, table: dict[str, int]) -> int:
    raw = str(answers[column]).strip()
    if raw in table:
        return table[raw]
    try:
        value = int(raw)
    except ValueError:
        raise UnknownAnswer(column, raw) from None
    if value not in (0, 1, 2, 3):
        raise UnknownAnswer(column, raw)
    return value


DISTURBANCE_COLUMNS = (
    "psqi_disturb_late_sleep",
    "psqi_disturb_wake_night",
    "psqi_disturb_bathroom",
    "psqi_disturb_breathe",
    "psqi_disturb_snore",
    "psqi_disturb_cold",
    "psqi_disturb_hot",
    "psqi_disturb_dreams",
    "psqi_disturb_pain",
)


def response_from_answers(answers: dict) -> PsqiResponse:
    """Build a PsqiResponse from raw survey columns (see schema psqi_fields)."""
    return PsqiResponse(
        bedtime=parse_clock_time(str(answers["psqi_bedtime"])),
        sleep_latency_min=float(answers["psqi_sleep_latency_min"]),
        waketime=parse_clock_time(str(answers["psqi_waketime"])),
        sleep_hours=float(answers["psqi_sleep_hours"]),
        disturbance_items=tuple(
            _code(answers, col, FREQUENCY_CODES) for col in DISTURBANCE_COLUMNS
        ),
        subjective_quality=_code(answers, "psqi_subjective_quality", QUALITY_CODES),
        medication_use=_code(answers, "psqi_medication", FREQUENCY_CODES),
        daytime_dysfunction_items=(
            _code(answers, "psqi_dysfunction_awake", FREQUENCY_CODES),
            _code(answers, "psqi_dysfunction_enthusiasm", ENTHUSIASM_CODES),
        ),
    )
