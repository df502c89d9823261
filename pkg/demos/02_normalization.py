"""Clean raw completion output into candidate constraint strings.

The pipeline is intentionally minimal: surface noise is removed, semantics
are never repaired. An "OR"-joined alternative survives in one piece so
the grammar can reject it downstream.
"""

from mtckit import grammar
from mtckit.normalize import normalize_activity, normalize_raw_output

RAW_OUTPUTS = [
    "Three times daily",
    '"2 times day; 6 hours apart."',
    "before bedtime",
    "Take 30 minutes before a meal",
    "Do not take before exercising",
    "NONE",
    "2 times day OR 3 times day",
]

for raw in RAW_OUTPUTS:
    result = normalize_raw_output(raw)
    verdicts = [f"{c!r} (valid={grammar.is_valid(c)})" for c in result.candidates]
    print(f"raw {raw!r}")
    print(f"  candidates: {', '.join(verdicts) if verdicts else '(none)'}")
    for dropped in result.dropped:
        print(f"  dropped:    {dropped.segment!r} ({dropped.reason})")

print("\nactivity aliases:")
for phrase in ["sleeping", "bedtime", "each main meal", "taking Sucralfate"]:
    print(f"  {phrase!r} -> {normalize_activity(phrase)!r}")
