"""Check parsed constraints against a patient's intake/activity timeline.

Verdicts are satisfied / violated / indeterminate with an explanation
naming the evidence. All thresholds are explicit configuration; anything
the timeline cannot decide stays indeterminate instead of being guessed.
"""

from datetime import datetime, timedelta, timezone

from mtckit.adherence import Timeline, TimelineEvent, ToleranceConfig, check
from mtckit.grammar import parse_mtc, with_negated

UTC = timezone.utc
DAY = datetime(2026, 3, 2, tzinfo=UTC)


def at(day, hour, minute=0):
    return DAY + timedelta(days=day, hours=hour, minutes=minute)


timeline = Timeline.build(
    [
        TimelineEvent("intake", "metformin", at(0, 8, 0)),
        TimelineEvent("activity", "eating", at(0, 8, 30)),
        TimelineEvent("intake", "metformin", at(0, 20, 0)),
        TimelineEvent("intake", "metformin", at(1, 8, 30)),
        TimelineEvent("activity", "eating", at(1, 9, 0)),
        TimelineEvent("intake", "metformin", at(1, 20, 15)),
        TimelineEvent("intake", "metformin", at(2, 10, 30)),
        TimelineEvent("activity", "sleeping", at(2, 22, 0)),  # normalized to "sleep"
        TimelineEvent("intake", "metformin", at(2, 20, 0)),
    ],
    window=(at(0, 0), at(3, 0)),
)

CONSTRAINTS = [
    "2 times day",
    "6 hour apart",
    "30 minute before eating",
    "before sleep",
    "before 9 am",
    "at the same time each day",
    "in morning",
    "3 day for",            # duration is not decidable from a timeline
]

print(f"timeline: {len(timeline.events)} events over 3 days\n")
for text in CONSTRAINTS:
    verdict = check(parse_mtc(text), timeline)
    print(f"{text!r:28} -> {verdict.status.value}")
    print(f"    {verdict.explanation}")

print("\nnegation flips determinate verdicts:")
mtc = parse_mtc("6 hour apart")
print(f"  {'6 hour apart':20} -> {check(mtc, timeline).status.value}")
print(f"  {'not 6 hour apart':20} -> {check(with_negated(mtc), timeline).status.value}")

print("\ntolerances are configuration (morning-only regimen, spread 150 min):")
mornings = Timeline.build(
    [
        TimelineEvent("intake", "prednisone", at(0, 8, 0)),
        TimelineEvent("intake", "prednisone", at(1, 8, 30)),
        TimelineEvent("intake", "prednisone", at(2, 10, 30)),
    ],
    window=(at(0, 0), at(3, 0)),
)
loose = ToleranceConfig(consistency_tolerance=timedelta(minutes=180))
mtc = parse_mtc("at the same time each day")
print(f"  60 min tolerance:  {check(mtc, mornings).status.value}")
print(f"  180 min tolerance: {check(mtc, mornings, loose).status.value}")
