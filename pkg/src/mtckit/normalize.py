"""Post-processing that aligns raw completion output with the constraint grammar.

Model completions arrive as free text: quoted, multi-line, mixed case, with
number words and instruction stubs. This module reduces them to candidate
constraint strings that the grammar can judge. The pipeline is deliberately
minimal: it never repairs semantics (an ``OR``-joined alternative is left
intact so it fails validity downstream), it only canonicalizes surface noise.

Activity aliases live in a plain-text table (``alias<TAB>canonical``, ``#``
comments) shipped with the package and overridable per call, so corpora with
new activity vocabulary can extend them without code changes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class NotANumberError(ValueError):
    """A token is neither a digit string nor a known number word."""


_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
}

_PLURAL_UNITS = {"minutes": "minute", "hours": "hour", "days": "day", "weeks": "week"}

# Fixed prefix list; longer instruction repair is out of scope.
_INSTRUCTION_STUBS = ("take ", "taken ", "taking ", "use ")

_QUOTE_PAIRS = [('"', '"'), ("'", "'"), ("`", "`")]


def load_alias_table(path: str | Path) -> dict[str, str]:
    """Read an ``alias<TAB>canonical`` table (UTF-8, ``#`` comments)."""
    table: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"{path}:{lineno}: expected 'alias<TAB>canonical', got {line!r}")
        table[" ".join(parts[0].lower().split())] = " ".join(parts[1].lower().split())
    return table


def default_activity_aliases() -> dict[str, str]:
    """Alias table shipped with the package."""
    ref = resources.files("mtckit.data").joinpath("activity_aliases.txt")
    with resources.as_file(ref) as path:
        return load_alias_table(path)


_DEFAULT_ALIASES: dict[str, str] | None = None


def _aliases(table: dict[str, str] | None) -> dict[str, str]:
    global _DEFAULT_ALIASES
    if table is not None:
        return table
    if _DEFAULT_ALIASES is None:
        _DEFAULT_ALIASES = default_activity_aliases()
    return _DEFAULT_ALIASES


def normalize_number(token: str) -> int:
    """Positive integer from a digit string or a number word one..twelve."""
    token = token.strip().lower()
    if not token:
        raise NotANumberError("empty token")
    if token.isdigit():
        value = int(token)
        if value < 1:
            raise NotANumberError(f"not a positive count: {token!r}")
        return value
    if token in _NUMBER_WORDS:
        return _NUMBER_WORDS[token]
    raise NotANumberError(f"not a number: {token!r}")


def normalize_activity(activity: str, aliases: dict[str, str] | None = None) -> str:
    """Canonical activity phrase: alias table applied, else lowercased and collapsed."""
    folded = " ".join(activity.lower().split())
    return _aliases(aliases).get(folded, folded)


@dataclass(frozen=True)
class DroppedSegment:
    """A raw-output segment removed by the pipeline, with the reason."""

    segment: str
    reason: str


@dataclass(frozen=True)
class NormalizationResult:
    """Candidate constraint strings recovered from one raw output."""

    candidates: tuple[str, ...]
    dropped: tuple[DroppedSegment, ...] = ()


def _strip_wrapping(text: str) -> str:
    """Trim whitespace, surrounding quote pairs, and terminal punctuation."""
    previous = None
    while previous != text:
        previous = text
        text = text.strip()
        for opening, closing in _QUOTE_PAIRS:
            if len(text) >= 2 and text.startswith(opening) and text.endswith(closing):
                text = text[1:-1].strip()
        text = re.sub(r"[.!?]+$", "", text).strip()
    return text


def _strip_instruction_stub(segment: str) -> str:
    for head in ("do not ", "don't "):
        if segment.startswith(head):
            segment = "not " + segment[len(head):]
            break
    negated = segment.startswith("not ")
    if negated:
        segment = segment[len("not "):]
    for stub in _INSTRUCTION_STUBS:
        if segment.startswith(stub):
            segment = segment[len(stub):]
            break
    return ("not " + segment) if negated else segment


def _apply_activity_alias(tokens: list[str], aliases: dict[str, str]) -> list[str]:
    # The activity slot is whatever follows the first dependency preposition.
    for i, token in enumerate(tokens):
        if token in ("before", "after"):
            tail = " ".join(tokens[i + 1:])
            if tail and tail in aliases:
                return tokens[: i + 1] + aliases[tail].split(" ")
            return tokens
    return tokens


def normalize_raw_output(raw: str, aliases: dict[str, str] | None = None) -> NormalizationResult:
    """Reduce one raw completion to candidate constraint strings.

    Pipeline: trim and unwrap the raw text; map a bare ``NONE`` answer to
    zero candidates; split on newlines and ``;``; per segment lowercase,
    rewrite number words to digits, singularize time units, rewrite
    ``times daily`` to ``times day``, strip a leading instruction stub
    (``take``/``taken``/``taking``/``use``, with ``do not`` folding into
    ``not``), and apply activity aliases after ``before``/``after``.
    Segments are never split on ``OR``: an alternative-joined answer stays
    one candidate and fails validity downstream.
    """
    table = _aliases(aliases)
    text = _strip_wrapping(raw or "")
    if " ".join(text.lower().split()) == "none":
        return NormalizationResult(())

    candidates: list[str] = []
    dropped: list[DroppedSegment] = []
    for segment in re.split(r"[;\n]", text):
        original = segment.strip()
        if not original:
            continue
        cleaned = _strip_wrapping(original).lower()
        cleaned = " ".join(cleaned.split())
        if cleaned == "none":
            dropped.append(DroppedSegment(original, "empty answer token"))
            continue
        cleaned = _strip_instruction_stub(cleaned)
        tokens = cleaned.split()
        tokens = [str(_NUMBER_WORDS[t]) if t in _NUMBER_WORDS else t for t in tokens]
        tokens = [_PLURAL_UNITS.get(t, t) for t in tokens]
        for i in range(1, len(tokens)):
            if tokens[i] == "daily" and tokens[i - 1] == "times":
                tokens[i] = "day"
        tokens = _apply_activity_alias(tokens, table)
        candidate = " ".join(tokens)
        if candidate:
            candidates.append(candidate)
        else:
            dropped.append(DroppedSegment(original, "nothing left after cleanup"))
    return NormalizationResult(tuple(candidates), tuple(dropped))
