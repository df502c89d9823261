"""Phrase-pattern baseline that tags which constraint types a guideline mentions.

This is deliberately the weak baseline: it does not extract constraint
strings, it only detects which of the seven constraint types (1..7) occur
in a statement, using case-insensitive phrase patterns. Patterns live in a
plain-text table (``type<TAB>pattern``, ``#`` comments) so the rule base
can be edited without touching code. Pattern syntax is a literal phrase
with two placeholders: ``{num}`` matches an integer and ``{clock}`` a
12-hour clock time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .dataset import Dug
from .evaluation import MismatchedIdsError, _mean, _prf
from .grammar import mtc_type

_NUM_RE = (
    r"(?:\d+|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve)"
)
_CLOCK_RE = r"\d{1,2}(?:[.:]\d{2})?\s*(?:a\.?m\.?|p\.?m\.?)"


def compile_pattern(pattern: str) -> re.Pattern:
    """Compile a rule pattern to a word-bounded case-insensitive regex."""
    parts = re.split(r"(\{num\}|\{clock\})", pattern)
    regex = "".join(
        _NUM_RE if part == "{num}" else _CLOCK_RE if part == "{clock}" else re.escape(part)
        for part in parts
    )
    return re.compile(r"(?<![A-Za-z0-9])" + regex + r"(?![A-Za-z0-9])", re.IGNORECASE)


@dataclass(frozen=True)
class TypeRule:
    """One phrase pattern voting for one constraint type."""

    mtc_type: int
    pattern: str

    def __post_init__(self) -> None:
        if self.mtc_type not in range(1, 8):
            raise ValueError(f"type must be 1..7, got {self.mtc_type}")
        if not self.pattern.strip():
            raise ValueError("pattern must be nonempty")
        object.__setattr__(self, "_regex", compile_pattern(self.pattern))

    def matches(self, text: str) -> bool:
        return self._regex.search(text) is not None


def load_type_rules(path: str | Path) -> list[TypeRule]:
    """Read a ``type<TAB>pattern`` rule table (UTF-8, ``#`` comments)."""
    rules: list[TypeRule] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t", 1)
        if len(parts) != 2 or not parts[0].strip().isdigit():
            raise ValueError(f"{path}:{lineno}: expected 'type<TAB>pattern', got {line!r}")
        rules.append(TypeRule(int(parts[0]), parts[1].strip()))
    return rules


_DEFAULT_RULES: list[TypeRule] | None = None


def default_type_rules() -> list[TypeRule]:
    """Rule table shipped with the package."""
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        ref = resources.files("mtckit.data").joinpath("type_rules.tsv")
        with resources.as_file(ref) as path:
            _DEFAULT_RULES = load_type_rules(path)
    return list(_DEFAULT_RULES)


def classify_types(text: str, rules: Sequence[TypeRule] | None = None) -> frozenset[int]:
    """Constraint types whose any pattern matches ``text``."""
    if rules is None:
        rules = default_type_rules()
    return frozenset(rule.mtc_type for rule in rules if rule.matches(text))


@dataclass(frozen=True)
class TypePrediction:
    """Predicted constraint types for one guideline."""

    dug_id: str
    types: frozenset[int]

    def __post_init__(self) -> None:
        if not set(self.types) <= set(range(1, 8)):
            raise ValueError(f"types must be within 1..7, got {sorted(self.types)}")


@dataclass(frozen=True)
class TypeMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class TypeClassifierReport:
    per_type: dict[int, TypeMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "per_type": {
                str(t): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for t, m in sorted(self.per_type.items())
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
        }


def classify_corpus(dugs: Iterable[Dug], rules: Sequence[TypeRule] | None = None) -> list[TypePrediction]:
    """Run the pattern classifier over a corpus."""
    if rules is None:
        rules = default_type_rules()
    return [TypePrediction(dug.id, classify_types(dug.text, rules)) for dug in dugs]


def evaluate_type_classifier(
    gold: Sequence[Dug], preds: Sequence[TypePrediction]
) -> TypeClassifierReport:
    """Per-type binary metrics against type sets derived from gold labels.

    Macro averages run over types occurring in gold or in predictions;
    with nothing of either, the vacuous macro is 1.0.
    """
    pred_by_id: dict[str, frozenset[int]] = {}
    for pred in preds:
        if pred.dug_id in pred_by_id:
            raise MismatchedIdsError(f"duplicate prediction for {pred.dug_id!r}")
        pred_by_id[pred.dug_id] = pred.types
    gold_ids = {dug.id for dug in gold}
    if gold_ids != set(pred_by_id):
        raise MismatchedIdsError("prediction ids do not match gold ids")

    gold_types = {dug.id: {mtc_type(m) for m in dug.labels} for dug in gold}
    relevant = sorted(
        set().union(*gold_types.values(), *pred_by_id.values()) if gold else set()
    )
    per_type: dict[int, TypeMetrics] = {}
    for t in relevant:
        tp = sum(1 for d in gold if t in gold_types[d.id] and t in pred_by_id[d.id])
        fp = sum(1 for d in gold if t not in gold_types[d.id] and t in pred_by_id[d.id])
        fn = sum(1 for d in gold if t in gold_types[d.id] and t not in pred_by_id[d.id])
        precision, recall, f1 = _prf(tp, fp, fn)
        per_type[t] = TypeMetrics(precision, recall, f1, sum(1 for d in gold if t in gold_types[d.id]))
    return TypeClassifierReport(
        per_type=per_type,
        macro_precision=_mean([m.precision for m in per_type.values()]),
        macro_recall=_mean([m.recall for m in per_type.values()]),
        macro_f1=_mean([m.f1 for m in per_type.values()]),
    )
