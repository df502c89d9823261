"""Typed medical temporal constraints (MTCs) and their canonical surface grammar.

An MTC is one of seven constraint forms, optionally negated:

    1. definitive dependency   ``30 minute before eating``
    2. frequency               ``3 times day``
    3. interval                ``6 hour apart``
    4. imprecise dependency    ``before sleep``
    5. time dependency         ``before 9 am``
    6. consistency             ``at the same time each day``
    7. time of day             ``in morning``

Every form has exactly one canonical surface string (digits, singular
units, lowercase; negation as a leading ``not``). :func:`parse_mtc` accepts
the canonical form plus a small set of lenient rewrites (plural units,
number words one..twelve, count articles such as "3 times a day",
"times daily", mixed case); :func:`serialize` always emits the canonical
form, so ``parse_mtc(serialize(m)) == m`` for every well-formed value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Union


class NonvalidMtcError(ValueError):
    """A string does not parse as a single MTC under the grammar."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class TimeUnit(str, Enum):
    MINUTE = "minute"
    HOUR = "hour"
    DAY = "day"
    WEEK = "week"


class DependencyPrep(str, Enum):
    BEFORE = "before"
    AFTER = "after"


class IntervalPrep(str, Enum):
    WITHIN = "within"
    FOR = "for"
    APART = "apart"


class OccurrencePrep(str, Enum):
    AT = "at"
    IN = "in"


class DayPart(str, Enum):
    MORNING = "morning"
    EVENING = "evening"
    NOON = "noon"


@dataclass(frozen=True)
class SameTime:
    """The recurring anchor written ``the same time`` (consistency only)."""

    def __str__(self) -> str:
        return "the same time"


SAME_TIME = SameTime()


@dataclass(frozen=True)
class ClockTime:
    """A 12-hour clock time such as ``9 am`` or ``10.30 pm``."""

    hour: int
    minute: int = 0
    meridiem: str = "am"

    def __post_init__(self) -> None:
        if not 1 <= self.hour <= 12:
            raise ValueError(f"clock hour must be 1..12, got {self.hour}")
        if not 0 <= self.minute <= 59:
            raise ValueError(f"clock minute must be 0..59, got {self.minute}")
        if self.meridiem not in ("am", "pm"):
            raise ValueError(f"meridiem must be 'am' or 'pm', got {self.meridiem!r}")

    def minutes_into_day(self) -> int:
        """Minutes after midnight (0..1439), for time comparisons."""
        hour = self.hour % 12
        if self.meridiem == "pm":
            hour += 12
        return hour * 60 + self.minute

    def __str__(self) -> str:
        if self.minute:
            return f"{self.hour}.{self.minute:02d} {self.meridiem}"
        return f"{self.hour} {self.meridiem}"


TimeStamp = Union[SameTime, ClockTime]


def _check_count(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"count must be a positive integer, got {n!r}")


def _check_activity(name: str) -> None:
    if not name or name != " ".join(name.split()):
        raise ValueError(f"activity must be a nonempty single-spaced phrase, got {name!r}")
    if name != name.lower():
        raise ValueError(f"activity must be lowercase, got {name!r}")
    # Keep dependency forms unambiguous: a phrase that reads as a clock
    # time belongs to the time-dependency form, never to an activity slot.
    if _parse_clock(name) is not None:
        raise ValueError(f"activity must not be a clock time, got {name!r}")


@dataclass(frozen=True)
class DefinitiveDependency:
    """Intake a fixed offset before/after another activity (type 1)."""

    n: int
    unit: TimeUnit
    dp: DependencyPrep
    activity: str
    negated: bool = False

    def __post_init__(self) -> None:
        _check_count(self.n)
        _check_activity(self.activity)


@dataclass(frozen=True)
class Frequency:
    """Number of intakes per time unit (type 2)."""

    n: int
    unit: TimeUnit
    negated: bool = False

    def __post_init__(self) -> None:
        _check_count(self.n)


@dataclass(frozen=True)
class Interval:
    """Spacing between consecutive intakes (type 3)."""

    n: int
    unit: TimeUnit
    ip: IntervalPrep
    negated: bool = False

    def __post_init__(self) -> None:
        _check_count(self.n)


@dataclass(frozen=True)
class ImpreciseDependency:
    """Intake before/after another activity, no offset given (type 4)."""

    dp: DependencyPrep
    activity: str
    negated: bool = False

    def __post_init__(self) -> None:
        _check_activity(self.activity)


@dataclass(frozen=True)
class TimeDependency:
    """Intake before/after a concrete clock time (type 5)."""

    dp: DependencyPrep
    time: ClockTime
    negated: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.time, ClockTime):
            raise ValueError("time dependency requires a concrete clock time")


@dataclass(frozen=True)
class Consistency:
    """Intake at a recurring time each period (type 6)."""

    p: OccurrencePrep
    time: TimeStamp
    unit: TimeUnit
    negated: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.time, (SameTime, ClockTime)):
            raise ValueError("consistency timestamp must be 'the same time' or a clock time")


@dataclass(frozen=True)
class TimeOfDay:
    """Intake within a named part of the day (type 7)."""

    p: OccurrencePrep
    day_part: DayPart
    negated: bool = False


Mtc = Union[
    DefinitiveDependency,
    Frequency,
    Interval,
    ImpreciseDependency,
    TimeDependency,
    Consistency,
    TimeOfDay,
]

_TYPE_BY_CLASS = {
    DefinitiveDependency: 1,
    Frequency: 2,
    Interval: 3,
    ImpreciseDependency: 4,
    TimeDependency: 5,
    Consistency: 6,
    TimeOfDay: 7,
}

MTC_TYPE_NAMES = {
    1: "definitive dependency",
    2: "frequency",
    3: "interval",
    4: "imprecise dependency",
    5: "time dependency",
    6: "consistency",
    7: "time of day",
}

#: Canonical shape of each constraint form, used by prompt builders and docs.
CANONICAL_FORMS = {
    1: ("{n} {unit} {before|after} {activity}", "30 minute before eating"),
    2: ("{n} times {unit}", "3 times day"),
    3: ("{n} {unit} {within|for|apart}", "6 hour apart"),
    4: ("{before|after} {activity}", "before eating"),
    5: ("{before|after} {clock time}", "before 9 am"),
    6: ("{at|in} {time} each {unit}", "at the same time each day"),
    7: ("{at|in} {morning|evening|noon}", "in morning"),
}

#: Terminal vocabularies of the constraint grammar, for prompt builders and docs.
TERMINALS = [
    ("natural number", "1 | 2 | 3 | ..."),
    ("activity", "sleeping | eating | taking medication | ... (open vocabulary)"),
    ("dependency preposition", " | ".join(v.value for v in DependencyPrep)),
    ("interval preposition", " | ".join(v.value for v in IntervalPrep)),
    ("occurrence preposition", " | ".join(v.value for v in OccurrencePrep)),
    ("time unit", " | ".join(v.value for v in TimeUnit)),
    ("time stamp", "the same time | 9 am | 10.30 pm | ..."),
    ("day part", " | ".join(v.value for v in DayPart)),
]


def mtc_type(mtc: Mtc) -> int:
    """Constraint type 1..7 of ``mtc``, ignoring negation."""
    try:
        return _TYPE_BY_CLASS[type(mtc)]
    except KeyError:
        raise TypeError(f"not an MTC value: {mtc!r}") from None


def with_negated(mtc: Mtc, negated: bool = True) -> Mtc:
    """Copy of ``mtc`` with its negation flag set to ``negated``."""
    return replace(mtc, negated=negated)


def serialize(mtc: Mtc) -> str:
    """Canonical surface string for ``mtc`` (deterministic, re-parses to ``mtc``)."""
    if isinstance(mtc, DefinitiveDependency):
        body = f"{mtc.n} {mtc.unit.value} {mtc.dp.value} {mtc.activity}"
    elif isinstance(mtc, Frequency):
        body = f"{mtc.n} times {mtc.unit.value}"
    elif isinstance(mtc, Interval):
        body = f"{mtc.n} {mtc.unit.value} {mtc.ip.value}"
    elif isinstance(mtc, ImpreciseDependency):
        body = f"{mtc.dp.value} {mtc.activity}"
    elif isinstance(mtc, TimeDependency):
        body = f"{mtc.dp.value} {mtc.time}"
    elif isinstance(mtc, Consistency):
        body = f"{mtc.p.value} {mtc.time} each {mtc.unit.value}"
    elif isinstance(mtc, TimeOfDay):
        body = f"{mtc.p.value} {mtc.day_part.value}"
    else:
        raise TypeError(f"not an MTC value: {mtc!r}")
    return f"not {body}" if mtc.negated else body


_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
}

_UNIT_ALIASES = {}
for _u in TimeUnit:
    _UNIT_ALIASES[_u.value] = _u
    _UNIT_ALIASES[_u.value + "s"] = _u

_DP_WORDS = {v.value: v for v in DependencyPrep}
_IP_WORDS = {v.value: v for v in IntervalPrep}
_P_WORDS = {v.value: v for v in OccurrencePrep}
_DAY_PARTS = {v.value: v for v in DayPart}

_RANGE_RE = re.compile(r"^\d+\s*-\s*\d+$")
_CLOCK_RE = re.compile(
    r"^(?P<hour>\d{1,2}|[a-z]+)(?:[.:](?P<minute>\d{1,2}))?\s*(?P<mer>am|pm|a\.m\.?|p\.m\.?)$"
)


def _parse_clock(text: str) -> ClockTime | None:
    """Clock time from a phrase like ``9 am`` / ``10.30 pm`` / ``9:30pm``, else None."""
    m = _CLOCK_RE.match(text.strip())
    if not m:
        return None
    raw_hour = m.group("hour")
    if raw_hour.isdigit():
        hour = int(raw_hour)
    elif raw_hour in _NUMBER_WORDS:
        hour = _NUMBER_WORDS[raw_hour]
    else:
        return None
    minute = int(m.group("minute")) if m.group("minute") else 0
    meridiem = "am" if m.group("mer").startswith("a") else "pm"
    if not 1 <= hour <= 12 or not 0 <= minute <= 59:
        return None
    return ClockTime(hour, minute, meridiem)


def _parse_count(token: str) -> int:
    if _RANGE_RE.match(token):
        raise NonvalidMtcError(f"numeric range not allowed as a count: {token!r}")
    if token.isdigit():
        n = int(token)
    elif token in _NUMBER_WORDS:
        n = _NUMBER_WORDS[token]
    else:
        raise NonvalidMtcError(f"expected a number, got {token!r}")
    if n < 1:
        raise NonvalidMtcError(f"count must be at least 1, got {n}")
    return n


def _parse_unit(token: str) -> TimeUnit:
    unit = _UNIT_ALIASES.get(token)
    if unit is None:
        raise NonvalidMtcError(f"unknown time unit {token!r}")
    return unit


def _skip_article(tokens: list[str]) -> list[str]:
    # Count articles: "3 times (a|an|per|each|in a) day".
    if tokens and tokens[0] in ("a", "an", "per", "each"):
        return tokens[1:]
    if len(tokens) >= 2 and tokens[0] == "in" and tokens[1] == "a":
        return tokens[2:]
    return tokens


def _parse_numeric_family(tokens: list[str]) -> Mtc:
    n = _parse_count(tokens[0])
    rest = tokens[1:]
    if not rest:
        raise NonvalidMtcError("a number alone is not a constraint")
    if rest[0] == "times":
        unit_tokens = _skip_article(rest[1:])
        if len(unit_tokens) != 1:
            raise NonvalidMtcError("frequency must end with a single time unit")
        if unit_tokens[0] == "daily":
            return Frequency(n, TimeUnit.DAY)
        return Frequency(n, _parse_unit(unit_tokens[0]))
    if rest == ["daily"]:
        return Frequency(n, TimeUnit.DAY)
    unit = _parse_unit(rest[0])
    rest = rest[1:]
    if not rest:
        raise NonvalidMtcError("number and unit need a preposition (before/after/within/for/apart)")
    prep = rest[0]
    if prep in _DP_WORDS:
        activity = " ".join(rest[1:])
        if not activity:
            raise NonvalidMtcError(f"missing activity after {prep!r}")
        try:
            return DefinitiveDependency(n, unit, _DP_WORDS[prep], activity)
        except ValueError as exc:
            raise NonvalidMtcError(str(exc)) from None
    if prep in _IP_WORDS:
        if rest[1:]:
            raise NonvalidMtcError(f"unexpected text after interval preposition: {' '.join(rest[1:])!r}")
        return Interval(n, unit, _IP_WORDS[prep])
    raise NonvalidMtcError(f"expected a dependency or interval preposition, got {prep!r}")


def _parse_dependency_family(tokens: list[str]) -> Mtc:
    dp = _DP_WORDS[tokens[0]]
    tail = " ".join(tokens[1:])
    if not tail:
        raise NonvalidMtcError(f"{tokens[0]!r} needs an activity or clock time after it")
    clock = _parse_clock(tail)
    if clock is not None:
        return TimeDependency(dp, clock)
    try:
        return ImpreciseDependency(dp, tail)
    except ValueError as exc:
        raise NonvalidMtcError(str(exc)) from None


def _parse_occurrence_family(tokens: list[str]) -> Mtc:
    p = _P_WORDS[tokens[0]]
    rest = tokens[1:]
    if not rest:
        raise NonvalidMtcError(f"{tokens[0]!r} needs a time or day part after it")
    timestamp: TimeStamp | None = None
    if rest[:3] == ["the", "same", "time"]:
        timestamp = SAME_TIME
        rest = rest[3:]
    elif len(rest) >= 2 and _parse_clock(" ".join(rest[:2])) is not None:
        timestamp = _parse_clock(" ".join(rest[:2]))
        rest = rest[2:]
    elif _parse_clock(rest[0]) is not None:
        timestamp = _parse_clock(rest[0])
        rest = rest[1:]
    if timestamp is not None:
        if len(rest) != 2 or rest[0] != "each":
            raise NonvalidMtcError("consistency needs 'each <unit>' after the time")
        return Consistency(p, timestamp, _parse_unit(rest[1]))
    if rest and rest[0] == "the":
        rest = rest[1:]
    if len(rest) == 1 and rest[0] in _DAY_PARTS:
        return TimeOfDay(p, _DAY_PARTS[rest[0]])
    raise NonvalidMtcError(f"expected a day part or 'time each unit', got {' '.join(rest)!r}")


def parse_mtc(text: str) -> Mtc:
    """Parse a single candidate string into a typed MTC.

    Accepts canonical strings and the lenient variants listed in the module
    docstring. Raises :class:`NonvalidMtcError` when no constraint form
    matches the whole string, when a numeric range stands where a count
    belongs, or when the input is empty.
    """
    if text is None or not text.strip():
        raise NonvalidMtcError("empty string")
    tokens = text.lower().split()
    negated = False
    while tokens and tokens[0] == "not":
        negated = True
        tokens = tokens[1:]
    if not tokens:
        raise NonvalidMtcError("nothing after 'not'")
    head = tokens[0]
    if head in _DP_WORDS:
        mtc = _parse_dependency_family(tokens)
    elif head in _P_WORDS:
        mtc = _parse_occurrence_family(tokens)
    else:
        mtc = _parse_numeric_family(tokens)
    return with_negated(mtc, True) if negated else mtc


def is_valid(text: str) -> bool:
    """True iff ``text`` parses as a single MTC."""
    try:
        parse_mtc(text)
        return True
    except NonvalidMtcError:
        return False


@dataclass(frozen=True)
class InvalidSegment:
    """A list segment that failed to parse, with the parser's reason."""

    segment: str
    reason: str


@dataclass(frozen=True)
class MtcListResult:
    """Valid constraints of a compound string plus its rejected segments."""

    mtcs: tuple[Mtc, ...]
    invalid: tuple[InvalidSegment, ...] = ()


def dedup_mtcs(items: list[Mtc]) -> tuple[Mtc, ...]:
    """Drop duplicates under canonical-string equality, keeping first occurrence."""
    seen: set[str] = set()
    out: list[Mtc] = []
    for item in items:
        key = serialize(item)
        if key not in seen:
            seen.add(key)
            out.append(item)
    return tuple(out)


def parse_mtc_list(text: str) -> MtcListResult:
    """Parse a compound string (segments separated by ``;`` or newlines).

    Each segment is parsed independently; valid ones are deduplicated in
    first-occurrence order, invalid ones are reported alongside.
    Whitespace-only segments (e.g. from a trailing separator) are ignored.
    """
    mtcs: list[Mtc] = []
    invalid: list[InvalidSegment] = []
    for segment in re.split(r"[;\n]", text or ""):
        stripped = segment.strip()
        if not stripped:
            continue
        try:
            mtcs.append(parse_mtc(stripped))
        except NonvalidMtcError as exc:
            invalid.append(InvalidSegment(stripped, exc.reason))
    return MtcListResult(dedup_mtcs(mtcs), tuple(invalid))


def mtc_to_dict(mtc: Mtc) -> dict:
    """Flat JSON-friendly view of an MTC (type number, fields, canonical string)."""
    out: dict = {"type": mtc_type(mtc), "canonical": serialize(mtc)}
    for f in fields(mtc):
        value = getattr(mtc, f.name)
        if isinstance(value, Enum):
            value = value.value
        elif isinstance(value, (SameTime, ClockTime)):
            value = str(value)
        out[f.name] = value
    return out
