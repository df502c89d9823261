"""Verdict semantics for constraints over event timelines."""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone

import pytest

from mtckit.adherence import (
    Timeline,
    TimelineEvent,
    ToleranceConfig,
    VerdictStatus,
    check,
    load_timeline,
)
from mtckit.grammar import parse_mtc, with_negated

from conftest import BASE_TS, random_mtc, random_timeline

UTC = timezone.utc
DAY0 = datetime(2026, 3, 2, tzinfo=UTC)


def ts(day: int, hour: int, minute: int = 0) -> datetime:
    return DAY0 + timedelta(days=day, hours=hour, minutes=minute)


def intake(day: int, hour: int, minute: int = 0) -> TimelineEvent:
    return TimelineEvent("intake", "medication", ts(day, hour, minute))


def activity(name: str, day: int, hour: int, minute: int = 0) -> TimelineEvent:
    return TimelineEvent("activity", name, ts(day, hour, minute))


def timeline(events, start=None, end=None) -> Timeline:
    return Timeline.build(events, (start, end))


# ------------------------------------------------------- worked examples


def test_frequency_two_per_day_satisfied():
    line = timeline([intake(0, 8), intake(0, 20)], start=ts(0, 0), end=ts(1, 0))
    verdict = check(parse_mtc("2 times day"), line)
    assert verdict.status is VerdictStatus.SATISFIED


def test_interval_six_hours_apart_violated():
    line = timeline([intake(0, 8), intake(0, 12)], start=ts(0, 0), end=ts(1, 0))
    verdict = check(parse_mtc("6 hour apart"), line)
    assert verdict.status is VerdictStatus.VIOLATED
    assert "4:00:00" in verdict.explanation  # the observed gap


def test_consistency_spread_of_150_minutes():
    events = [intake(0, 8, 0), intake(1, 8, 30), intake(2, 10, 30)]
    # brute-force pairwise spread of the intake clock times
    minutes = [e.minutes_into_day() for e in events]
    spread = max(abs(a - b) for a in minutes for b in minutes)
    assert spread == 150

    line = timeline(events, start=ts(0, 0), end=ts(3, 0))
    mtc = parse_mtc("at the same time each day")
    tight = ToleranceConfig(consistency_tolerance=timedelta(minutes=60))
    loose = ToleranceConfig(consistency_tolerance=timedelta(minutes=180))
    assert check(mtc, line, tight).status is VerdictStatus.VIOLATED
    assert check(mtc, line, loose).status is VerdictStatus.SATISFIED


# -------------------------------------------------------- per-variant


def test_frequency_counts_every_complete_period():
    events = [intake(0, 8), intake(0, 20), intake(1, 9)]
    line = timeline(events, start=ts(0, 0), end=ts(2, 0))
    verdict = check(parse_mtc("2 times day"), line)
    assert verdict.status is VerdictStatus.VIOLATED
    assert "1 intake(s)" in verdict.explanation


def test_frequency_short_window_indeterminate():
    line = timeline([intake(0, 8)], start=ts(0, 0), end=ts(0, 12))
    assert check(parse_mtc("1 times day"), line).status is VerdictStatus.INDETERMINATE


def test_frequency_partial_trailing_period_ignored():
    events = [intake(0, 8), intake(0, 20), intake(1, 9)]  # day 2 partial
    line = timeline(events, start=ts(0, 0), end=ts(1, 12))
    assert check(parse_mtc("2 times day"), line).status is VerdictStatus.SATISFIED


def test_interval_apart_satisfied_and_within():
    line = timeline([intake(0, 8), intake(0, 16)], start=ts(0, 0), end=ts(1, 0))
    assert check(parse_mtc("6 hour apart"), line).status is VerdictStatus.SATISFIED
    assert check(parse_mtc("12 hour within"), line).status is VerdictStatus.SATISFIED
    assert check(parse_mtc("4 hour within"), line).status is VerdictStatus.VIOLATED


def test_interval_for_and_single_intake_indeterminate():
    line = timeline([intake(0, 8), intake(0, 16)], start=ts(0, 0), end=ts(1, 0))
    assert check(parse_mtc("3 day for"), line).status is VerdictStatus.INDETERMINATE
    solo = timeline([intake(0, 8)], start=ts(0, 0), end=ts(1, 0))
    assert check(parse_mtc("6 hour apart"), solo).status is VerdictStatus.INDETERMINATE


def test_no_intakes_is_indeterminate():
    line = timeline([activity("eating", 0, 12)], start=ts(0, 0), end=ts(1, 0))
    assert check(parse_mtc("3 times day"), line).status is VerdictStatus.INDETERMINATE


def test_definitive_dependency_before():
    mtc = parse_mtc("30 minute before eating")
    ok = timeline([intake(0, 8), activity("eating", 0, 8, 30)], start=ts(0, 0), end=ts(1, 0))
    assert check(mtc, ok).status is VerdictStatus.SATISFIED
    late = timeline([intake(0, 8), activity("eating", 0, 8, 45)], start=ts(0, 0), end=ts(1, 0))
    assert check(mtc, late).status is VerdictStatus.VIOLATED
    unseen = timeline([intake(0, 8), activity("exercise", 0, 8, 30)], start=ts(0, 0), end=ts(1, 0))
    assert check(mtc, unseen).status is VerdictStatus.INDETERMINATE


def test_definitive_dependency_after():
    mtc = parse_mtc("2 hour after eating")
    ok = timeline([activity("eating", 0, 7), intake(0, 9)], start=ts(0, 0), end=ts(1, 0))
    assert check(mtc, ok).status is VerdictStatus.SATISFIED
    bad = timeline([activity("eating", 0, 7), intake(0, 10)], start=ts(0, 0), end=ts(1, 0))
    assert check(mtc, bad).status is VerdictStatus.VIOLATED


def test_definitive_dependency_tolerance_is_configurable():
    mtc = parse_mtc("30 minute before eating")
    line = timeline([intake(0, 8), activity("eating", 0, 8, 45)], start=ts(0, 0), end=ts(1, 0))
    wide = ToleranceConfig(dependency_tolerance=timedelta(minutes=20))
    assert check(mtc, line, wide).status is VerdictStatus.SATISFIED


def test_imprecise_dependency_directions():
    before_sleep = parse_mtc("before sleep")
    ok = timeline([intake(0, 21), activity("sleep", 0, 22)], start=ts(0, 0), end=ts(1, 0))
    assert check(before_sleep, ok).status is VerdictStatus.SATISFIED
    far = timeline([intake(0, 18), activity("sleep", 0, 23)], start=ts(0, 0), end=ts(1, 0))
    assert check(before_sleep, far).status is VerdictStatus.VIOLATED  # beyond 2 h horizon
    after_eating = parse_mtc("after eating")
    ok2 = timeline([activity("eating", 0, 12), intake(0, 12, 30)], start=ts(0, 0), end=ts(1, 0))
    assert check(after_eating, ok2).status is VerdictStatus.SATISFIED
    none_seen = timeline([intake(0, 12)], start=ts(0, 0), end=ts(1, 0))
    assert check(after_eating, none_seen).status is VerdictStatus.INDETERMINATE


def test_time_dependency_strict():
    mtc = parse_mtc("before 9 am")
    early = timeline([intake(0, 8, 59)], start=ts(0, 0), end=ts(1, 0))
    assert check(mtc, early).status is VerdictStatus.SATISFIED
    exact = timeline([intake(0, 9, 0)], start=ts(0, 0), end=ts(1, 0))
    assert check(mtc, exact).status is VerdictStatus.VIOLATED  # strictly before


def test_consistency_single_intake_is_trivially_consistent():
    line = timeline([intake(0, 8)], start=ts(0, 0), end=ts(1, 0))
    assert check(parse_mtc("at the same time each day"), line).status is VerdictStatus.SATISFIED


def test_time_of_day_windows():
    morning = parse_mtc("in morning")
    assert check(morning, timeline([intake(0, 8)], start=ts(0, 0), end=ts(1, 0))).status is VerdictStatus.SATISFIED
    assert check(morning, timeline([intake(0, 13)], start=ts(0, 0), end=ts(1, 0))).status is VerdictStatus.VIOLATED
    evening = parse_mtc("in evening")
    assert check(evening, timeline([intake(0, 21, 59)], start=ts(0, 0), end=ts(1, 0))).status is VerdictStatus.SATISFIED
    assert check(evening, timeline([intake(0, 22, 0)], start=ts(0, 0), end=ts(1, 0))).status is VerdictStatus.VIOLATED
    noon = parse_mtc("at noon")
    assert check(noon, timeline([intake(0, 12, 30)], start=ts(0, 0), end=ts(1, 0))).status is VerdictStatus.SATISFIED


# ------------------------------------------------------------- properties


def test_negation_inverts_determinate_verdicts():
    line = timeline([intake(0, 8), intake(0, 12)], start=ts(0, 0), end=ts(1, 0))
    mtc = parse_mtc("6 hour apart")
    assert check(mtc, line).status is VerdictStatus.VIOLATED
    assert check(with_negated(mtc), line).status is VerdictStatus.SATISFIED


def test_negation_inversion_random_pairs():
    rng = random.Random(4242)
    determinate = 0
    attempts = 0
    while determinate < 250 and attempts < 8000:
        attempts += 1
        mtc = with_negated(random_mtc(rng), False)
        line = random_timeline(rng)
        verdict = check(mtc, line)
        if verdict.status is VerdictStatus.INDETERMINATE:
            assert check(with_negated(mtc), line).status is VerdictStatus.INDETERMINATE
            continue
        determinate += 1
        flipped = check(with_negated(mtc), line)
        assert {verdict.status, flipped.status} == {
            VerdictStatus.SATISFIED,
            VerdictStatus.VIOLATED,
        }
    assert determinate == 250


def test_window_monotonicity_for_apart():
    inside = [intake(0, 8), intake(0, 16)]
    line = timeline(inside, start=ts(0, 0), end=ts(1, 0))
    extended = timeline(inside + [intake(5, 8)], start=ts(0, 0), end=ts(1, 0))
    mtc = parse_mtc("6 hour apart")
    assert check(mtc, line) == check(mtc, extended)


def test_determinism():
    line = timeline([intake(0, 8), intake(0, 20)], start=ts(0, 0), end=ts(1, 0))
    mtc = parse_mtc("2 times day")
    assert check(mtc, line) == check(mtc, line)


def test_explanations_are_nonempty():
    rng = random.Random(7)
    for _ in range(100):
        verdict = check(random_mtc(rng), random_timeline(rng))
        assert verdict.explanation.strip()


# ------------------------------------------------------------ timeline io


def test_event_validation_and_name_normalization():
    event = TimelineEvent("activity", "Sleeping", ts(0, 22))
    assert event.name == "sleep"
    with pytest.raises(ValueError):
        TimelineEvent("nap", "sleep", ts(0, 22))


def test_timeline_clips_and_sorts():
    events = [intake(2, 8), intake(0, 8), intake(9, 8)]
    line = Timeline.build(events, (ts(0, 0), ts(3, 0)))
    assert [e.timestamp for e in line.events] == [ts(0, 8), ts(2, 8)]


def test_empty_timeline_needs_window():
    with pytest.raises(ValueError):
        Timeline.build([])
    line = Timeline.build([], (ts(0, 0), ts(1, 0)))
    assert line.events == ()


def test_load_timeline(tmp_path):
    path = tmp_path / "events.jsonl"
    rows = [
        {"kind": "intake", "name": "metformin", "timestamp": "2026-03-02T08:00:00+00:00"},
        {"kind": "activity", "name": "eating", "timestamp": "2026-03-02T08:30:00Z"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
    line = load_timeline(path)
    assert len(line.events) == 2
    assert line.events[1].timestamp == datetime(2026, 3, 2, 8, 30, tzinfo=UTC)


def test_load_timeline_requires_timezone(tmp_path):
    path = tmp_path / "events.jsonl"
    path.write_text(
        json.dumps({"kind": "intake", "name": "x", "timestamp": "2026-03-02T08:00:00"}),
        encoding="utf-8",
    )
    with pytest.raises(ValueError, match="timezone"):
        load_timeline(path)


def test_random_timeline_generator_respects_window():
    rng = random.Random(1)
    line = random_timeline(rng)
    start, end = line.window
    assert start == BASE_TS
    assert all(start <= e.timestamp <= end for e in line.events)
