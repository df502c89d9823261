"""Parse, inspect, and serialize medical temporal constraints.

Every constraint has exactly one canonical surface string; the parser also
accepts the lenient variants that show up in real guideline text (plural
units, number words, count articles, mixed case).
"""

from mtckit import grammar

EXAMPLES = [
    "30 minute before taking Sucralfate",
    "three times daily",
    "6 hours apart",
    "before meal",            # open-vocabulary activity
    "before 9 AM",
    "at the same time each day",
    "in morning",
    "not before exercise",    # a prohibited constraint
]

print("== single constraints ==")
for text in EXAMPLES:
    mtc = grammar.parse_mtc(text)
    print(f"{text!r:42} -> type {grammar.mtc_type(mtc)} "
          f"({grammar.MTC_TYPE_NAMES[grammar.mtc_type(mtc)]}), canonical {grammar.serialize(mtc)!r}")

print("\n== compound statements split on ';' or newlines ==")
compound = "2 hour before eating; 3 times day; 4 hour apart; 3 times day"
result = grammar.parse_mtc_list(compound)
print(f"input:  {compound!r}")
print(f"parsed: {[grammar.serialize(m) for m in result.mtcs]}  (duplicates removed)")

print("\n== validity is a yes/no question ==")
for text in ["6 hours apart", "2 times day OR 3 times day", "1-30 minutes before eating", "banana"]:
    print(f"{text!r:38} valid={grammar.is_valid(text)}")

print("\n== values round-trip through their canonical form ==")
mtc = grammar.Frequency(3, grammar.TimeUnit.DAY)
assert grammar.parse_mtc(grammar.serialize(mtc)) == mtc
print(f"{mtc} <-> {grammar.serialize(mtc)!r}")
