"""Score extractions as multilabel classification, plus annotation agreement.

The label space is the union of gold constraint strings plus a reserved
"undefined" label that absorbs nonvalid and out-of-space predictions.
Both label-macro and example-averaged metrics are reported, along with
positive-class metrics (empty-gold guidelines excluded) and the validity
rate of the raw candidates.
"""

from mtckit.dataset import Dug
from mtckit.evaluation import build_label_space, evaluate, krippendorff_alpha, map_to_label
from mtckit.grammar import parse_mtc


def dug(i, labels):
    return Dug(f"g{i}", "fda", f"guideline number {i}", tuple(parse_mtc(s) for s in labels))


GOLD = [
    dug(1, ["2 times day"]),
    dug(2, ["6 hour apart", "3 times day"]),
    dug(3, ["before eating"]),
    dug(4, []),
    dug(5, ["in morning"]),
]

PREDICTIONS = [
    {"dug_id": "g1", "candidates": ["2 times day"]},                       # exact
    {"dug_id": "g2", "candidates": ["six hours apart", "3 times day"]},    # lenient variant
    {"dug_id": "g3", "candidates": ["2 times day OR 3 times day"]},        # nonvalid
    {"dug_id": "g4", "candidates": []},                                    # correct empty
    {"dug_id": "g5", "candidates": ["in morning", "9 times week"]},        # out-of-space extra
]

space = build_label_space(GOLD)
print(f"label space ({len(space)} labels): {space}")
for candidate in ["six hours apart", "2 times day OR 3 times day", "9 times week"]:
    print(f"  {candidate!r} maps to {map_to_label(candidate, space)!r}")

report = evaluate(GOLD, PREDICTIONS, space)
print()
print(report.format_table())

print("\nannotation agreement (nominal, missing entries allowed):")
matrix = [
    ["2 times day", "2 times day", None],
    ["before eating", "before eating", "before eating"],
    ["6 hour apart", None, "6 hour apart"],
    ["in morning", "at noon", "in morning"],
]
print(f"  alpha = {krippendorff_alpha(matrix):.3f}")
