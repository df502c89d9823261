"""Mine labeled guideline statements out of free-text medical reports.

Eight dotted sig abbreviations map one-to-one onto constraints; any
sentence of reasonable length containing one becomes a labeled statement.
Sentence splitting knows not to break inside the dotted abbreviations.
"""

from mtckit.dataset import DEFAULT_ABBREVIATION_RULES, dataset_stats, extract_ehr_statements

REPORT = """\
The patient has a history of lupus, currently on Plaquenil 200-mg b.i.d.
She was finally put on Effexor 25 mg two tablets h.s. for mood.
Omeprazole was continued a.c. before each meal as needed for reflux.
Vital signs were stable throughout the visit today.
Amoxicillin 500 mg t.i.d. for ten days was prescribed for the infection.
"""

print("abbreviation rules:")
for rule in DEFAULT_ABBREVIATION_RULES:
    print(f"  {rule.abbrev:8} -> {rule.label!r} (type {rule.mtc_type})")

statements = extract_ehr_statements(REPORT)
print(f"\nmined {len(statements)} statements:")
for dug in statements:
    print(f"  [{dug.id}] {dug.text}")
    print(f"          labels: {list(dug.label_strings)}")

stats = dataset_stats(statements)
print(f"\nstatistics: {stats.n_dugs} statements, {stats.n_mtcs} constraint instances")
for source, dist in stats.type_distribution.items():
    shares = ", ".join(f"type {t}: {pct:.1f}%" for t, pct in sorted(dist.items()))
    print(f"  {source}: {shares}")
