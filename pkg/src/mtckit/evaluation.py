"""Multilabel evaluation of constraint extraction, plus annotation agreement.

Extraction is scored as multilabel classification over a label space built
from gold corpora: the sorted union of canonical gold constraint strings
plus one reserved ``undefined`` label. A predicted candidate maps to
``undefined`` when it does not parse under the grammar or parses to a
constraint absent from the space.

Reported metric families (all in [0, 1]):

* per-label precision / recall / F1 with support,
* label-macro averages (labels with gold support, plus ``undefined``
  whenever it was predicted),
* example-averaged metrics (scored per guideline, then averaged),
* positive-class example-averaged metrics (guidelines with empty gold
  excluded),
* validity rate: the fraction of extracted candidate strings that parse.

Zero-division conventions, declared once and used everywhere: a label with
no predicted positives has precision 0 and one with no gold positives has
recall 0; a guideline where both gold and prediction are empty scores 1.0
on example metrics; an average over an empty collection is 1.0 (there was
nothing to get wrong).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from . import grammar
from .dataset import Dug

UNDEFINED_LABEL = "undefined"

LabelSpace = tuple[str, ...]


class MismatchedIdsError(ValueError):
    """Gold ids and prediction ids do not line up one-to-one."""


def build_label_space(gold: Sequence[Dug]) -> LabelSpace:
    """Sorted unique canonical gold labels plus the reserved ``undefined``."""
    labels = sorted({label for dug in gold for label in dug.label_strings})
    return tuple(labels) + (UNDEFINED_LABEL,)


def map_to_label(candidate: str, space: LabelSpace) -> str:
    """Label-space member for a normalized candidate string.

    Nonvalid candidates and valid constraints missing from the space both
    map to ``undefined``.
    """
    try:
        canonical = grammar.serialize(grammar.parse_mtc(candidate))
    except grammar.NonvalidMtcError:
        return UNDEFINED_LABEL
    return canonical if canonical in space and canonical != UNDEFINED_LABEL else UNDEFINED_LABEL


@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    predicted: int


@dataclass(frozen=True)
class EvalReport:
    """All metric families for one evaluation run."""

    n_dugs: int
    n_candidates: int
    validity_rate: float
    undefined_predictions: int
    per_label: dict[str, LabelMetrics]
    macro_labels: tuple[str, ...]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    example_precision: float
    example_recall: float
    example_f1: float
    positive_precision: float
    positive_recall: float
    positive_f1: float
    positive_n_dugs: int = 0

    def to_dict(self) -> dict:
        """Flat machine-readable view; key names are stable."""
        return {
            "n_dugs": self.n_dugs,
            "n_candidates": self.n_candidates,
            "validity_rate": self.validity_rate,
            "undefined_predictions": self.undefined_predictions,
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
                "labels": list(self.macro_labels),
            },
            "example_averaged": {
                "precision": self.example_precision,
                "recall": self.example_recall,
                "f1": self.example_f1,
            },
            "positive_class": {
                "precision": self.positive_precision,
                "recall": self.positive_recall,
                "f1": self.positive_f1,
                "n_dugs": self.positive_n_dugs,
            },
            "per_label": {
                label: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                    "predicted": m.predicted,
                }
                for label, m in self.per_label.items()
            },
        }

    def format_table(self) -> str:
        """Human-readable aligned table of the report."""
        width = max(
            [len(label) for label in self.per_label]
            + [len("label"), len("example-averaged"), len("positive-class")]
        )
        lines = [
            f"{'label':<{width}}  {'prec':>6}  {'rec':>6}  {'f1':>6}  {'supp':>5}  {'pred':>5}",
        ]
        for label, m in self.per_label.items():
            lines.append(
                f"{label:<{width}}  {m.precision:>6.3f}  {m.recall:>6.3f}  "
                f"{m.f1:>6.3f}  {m.support:>5d}  {m.predicted:>5d}"
            )
        lines.append("")
        lines.append(
            f"{'label-macro':<{width}}  {self.macro_precision:>6.3f}  "
            f"{self.macro_recall:>6.3f}  {self.macro_f1:>6.3f}"
        )
        lines.append(
            f"{'example-averaged':<{width}}  {self.example_precision:>6.3f}  "
            f"{self.example_recall:>6.3f}  {self.example_f1:>6.3f}"
        )
        lines.append(
            f"{'positive-class':<{width}}  {self.positive_precision:>6.3f}  "
            f"{self.positive_recall:>6.3f}  {self.positive_f1:>6.3f}  "
            f"({self.positive_n_dugs} guidelines)"
        )
        lines.append(f"validity rate: {self.validity_rate:.4f}")
        lines.append(f"undefined predictions: {self.undefined_predictions}")
        return "\n".join(lines)


def _mean(values: Sequence[float], empty: float = 1.0) -> float:
    return sum(values) / len(values) if values else empty


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def _candidate_text(entry) -> str:
    # extraction records serialize candidates as {"text", "valid", "reason"}
    if isinstance(entry, Mapping):
        return str(entry.get("text", ""))
    text = getattr(entry, "text", None)
    return str(text) if text is not None else str(entry)


def _prediction_fields(record) -> tuple[str, list[str], list[str]]:
    """(dug_id, forwarded predictions, all extracted candidates) of a record.

    Accepts extraction records, plain mappings, or anything exposing
    ``dug_id`` plus ``predictions`` and/or ``candidates``.
    """
    if isinstance(record, Mapping):
        dug_id = record.get("dug_id")
        raw_candidates = record.get("candidates", [])
        raw_predictions = record.get("predictions", None)
    else:
        dug_id = getattr(record, "dug_id", None)
        raw_candidates = getattr(record, "candidates", [])
        raw_predictions = getattr(record, "predictions", None)
    if dug_id is None:
        raise ValueError(f"prediction record without dug_id: {record!r}")
    candidates = [_candidate_text(c) for c in raw_candidates]
    if raw_predictions is None:
        predictions = list(candidates)
    else:
        predictions = [str(p) for p in raw_predictions]
    if not candidates and predictions:
        candidates = list(predictions)
    return str(dug_id), predictions, candidates


def evaluate(gold: Sequence[Dug], records: Sequence, space: LabelSpace | None = None) -> EvalReport:
    """Score extraction records against gold guidelines.

    ``records`` must align one-to-one with ``gold`` by ``dug_id``. When
    ``space`` is omitted it is built from ``gold``.
    """
    if space is None:
        space = build_label_space(gold)
    by_id = {}
    for record in records:
        dug_id, predictions, candidates = _prediction_fields(record)
        if dug_id in by_id:
            raise MismatchedIdsError(f"duplicate prediction for {dug_id!r}")
        by_id[dug_id] = (predictions, candidates)
    gold_ids = {dug.id for dug in gold}
    if gold_ids != set(by_id):
        missing = sorted(gold_ids - set(by_id))
        extra = sorted(set(by_id) - gold_ids)
        raise MismatchedIdsError(f"missing predictions for {missing}, unmatched predictions {extra}")

    space_set = set(space)
    gold_sets: list[set[str]] = []
    pred_sets: list[set[str]] = []
    n_candidates = 0
    n_valid = 0
    undefined_predictions = 0
    for dug in gold:
        predictions, candidates = by_id[dug.id]
        n_candidates += len(candidates)
        n_valid += sum(1 for c in candidates if grammar.is_valid(c))
        mapped = [map_to_label(p, space) for p in predictions]
        undefined_predictions += sum(1 for m in mapped if m == UNDEFINED_LABEL)
        gold_set = set(dug.label_strings)
        if not gold_set <= space_set - {UNDEFINED_LABEL}:
            raise ValueError(f"gold labels of {dug.id!r} missing from label space")
        gold_sets.append(gold_set)
        pred_sets.append(set(mapped))

    per_label: dict[str, LabelMetrics] = {}
    for label in space:
        tp = sum(1 for g, p in zip(gold_sets, pred_sets) if label in g and label in p)
        fp = sum(1 for g, p in zip(gold_sets, pred_sets) if label not in g and label in p)
        fn = sum(1 for g, p in zip(gold_sets, pred_sets) if label in g and label not in p)
        support = sum(1 for g in gold_sets if label in g)
        predicted = sum(1 for p in pred_sets if label in p)
        precision, recall, f1 = _prf(tp, fp, fn)
        per_label[label] = LabelMetrics(precision, recall, f1, support, predicted)

    macro_labels = tuple(
        label
        for label in space
        if per_label[label].support > 0
        or (label == UNDEFINED_LABEL and per_label[label].predicted > 0)
    )
    macro_precision = _mean([per_label[l].precision for l in macro_labels])
    macro_recall = _mean([per_label[l].recall for l in macro_labels])
    macro_f1 = _mean([per_label[l].f1 for l in macro_labels])

    def example_scores(pairs: Sequence[tuple[set, set]]) -> tuple[float, float, float]:
        ps, rs, fs = [], [], []
        for g, p in pairs:
            if not g and not p:
                ps.append(1.0)
                rs.append(1.0)
                fs.append(1.0)
                continue
            hit = len(g & p)
            prec = hit / len(p) if p else 0.0
            rec = hit / len(g) if g else 0.0
            ps.append(prec)
            rs.append(rec)
            fs.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
        return _mean(ps), _mean(rs), _mean(fs)

    pairs = list(zip(gold_sets, pred_sets))
    example_precision, example_recall, example_f1 = example_scores(pairs)
    positive_pairs = [(g, p) for g, p in pairs if g]
    positive_precision, positive_recall, positive_f1 = example_scores(positive_pairs)

    return EvalReport(
        n_dugs=len(gold),
        n_candidates=n_candidates,
        validity_rate=(n_valid / n_candidates) if n_candidates else 1.0,
        undefined_predictions=undefined_predictions,
        per_label=per_label,
        macro_labels=macro_labels,
        macro_precision=macro_precision,
        macro_recall=macro_recall,
        macro_f1=macro_f1,
        example_precision=example_precision,
        example_recall=example_recall,
        example_f1=example_f1,
        positive_precision=positive_precision,
        positive_recall=positive_recall,
        positive_f1=positive_f1,
        positive_n_dugs=len(positive_pairs),
    )


def krippendorff_alpha(matrix: Sequence[Sequence[object]]) -> float:
    """Krippendorff's alpha for nominal data with missing entries.

    ``matrix`` is units x coders; ``None`` marks a missing judgment. Uses
    the pairable-values formulation: only units with at least two coded
    values contribute. When every pairable value is identical the expected
    disagreement is zero and 1.0 is returned by convention.
    """
    if not matrix:
        raise ValueError("empty annotation matrix")
    n_coders = {len(row) for row in matrix}
    if len(n_coders) != 1:
        raise ValueError("annotation matrix rows must all have the same number of coders")
    if n_coders.pop() < 2:
        raise ValueError("need at least two coders")

    units = [[v for v in row if v is not None] for row in matrix]
    pairable = [u for u in units if len(u) >= 2]
    if not pairable:
        raise ValueError("no unit has two or more coded values")

    n = sum(len(u) for u in pairable)
    observed = 0.0
    totals: dict[object, int] = {}
    for unit in pairable:
        m_u = len(unit)
        counts: dict[object, int] = {}
        for value in unit:
            counts[value] = counts.get(value, 0) + 1
            totals[value] = totals.get(value, 0) + 1
        agreeing = sum(c * (c - 1) for c in counts.values())
        observed += (m_u * (m_u - 1) - agreeing) / (m_u - 1)
    observed /= n

    agreeing_global = sum(c * (c - 1) for c in totals.values())
    expected = (n * (n - 1) - agreeing_global) / (n * (n - 1))
    if expected == 0.0:
        return 1.0
    return 1.0 - observed / expected
