"""The six traditional readability formulas, computed on a TextUnit.

All six are ratio formulas over word/sentence/syllable/character counts, so
they are invariant under verbatim duplication of a unit. Sentence-level
application uses the unit's own sentence_count (1 for plain sentences).
Characters follow the ARI convention: alphanumerics only, digits included,
punctuation never counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import TextUnit

FORMULA_METHODS = (
    "flesch_re", "dale_chall", "gunning_fog", "ari", "coleman_liau", "flesch_kincaid",
)


class FormulaError(ValueError):
    """Unit without words/sentences, or a missing easy-word set."""


@dataclass(frozen=True)
class FormulaScore:
    method: str
    value: float
    unit_id: str


def _counts(unit: TextUnit) -> tuple[int, int, int, int]:
    words = unit.words
    n_words = len(words)
    n_sents = unit.sentence_count
    if n_words < 1 or n_sents < 1:
        raise FormulaError(f"unit {unit.unit_id} needs >=1 word and >=1 sentence")
    n_syll = sum(t.syllables for t in words)
    n_chars = sum(t.letters for t in words)
    return n_words, n_sents, n_syll, n_chars


def flesch_reading_ease(unit: TextUnit) -> FormulaScore:
    n_words, n_sents, n_syll, _ = _counts(unit)
    value = 206.836 - 84.6 * (n_syll / n_words) - 1.015 * (n_words / n_sents)
    return FormulaScore("flesch_re", value, unit.unit_id)


def load_easy_words(path: str | Path | None = None) -> frozenset[str]:
    """Easy-word list: UTF-8, one word per line, '#' comments."""
    if path is None:
        text = resources.files("readease").joinpath("data/easy_words.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


def _strip_punct(surface: str) -> str:
    return "".join(c for c in surface if c.isalnum() or c in "-'").strip("-'")


def dale_chall(unit: TextUnit, easy_words: frozenset[str]) -> FormulaScore:
    if not easy_words:
        raise FormulaError("empty easy-word set")
    n_words, n_sents, _, _ = _counts(unit)
    difficult = sum(1 for t in unit.words if _strip_punct(t.surface).lower() not in easy_words)
    value = 0.1579 * (difficult / n_words * 100) + 0.0496 * (n_words / n_sents) + 3.6365
    return FormulaScore("dale_chall", value, unit.unit_id)


def gunning_fog(unit: TextUnit) -> FormulaScore:
    n_words, n_sents, _, _ = _counts(unit)
    complex_words = sum(1 for t in unit.words if t.syllables >= 3)
    value = 0.4 * (n_words / n_sents + 100 * complex_words / n_words)
    return FormulaScore("gunning_fog", value, unit.unit_id)


def ari(unit: TextUnit) -> FormulaScore:
    n_words, n_sents, _, n_chars = _counts(unit)
    value = 4.71 * (n_chars / n_words) + 0.5 * (n_words / n_sents) - 21.43
    return FormulaScore("ari", value, unit.unit_id)


def coleman_liau(unit: TextUnit) -> FormulaScore:
    n_words, n_sents, _, n_chars = _counts(unit)
    letters_per_100 = 100 * n_chars / n_words
    sents_per_100 = 100 * n_sents / n_words
    value = 0.0588 * letters_per_100 - 0.296 * sents_per_100 - 15.8
    return FormulaScore("coleman_liau", value, unit.unit_id)


def flesch_kincaid(unit: TextUnit) -> FormulaScore:
    n_words, n_sents, n_syll, _ = _counts(unit)
    value = 0.39 * (n_words / n_sents) + 11.8 * (n_syll / n_words) - 15.59
    return FormulaScore("flesch_kincaid", value, unit.unit_id)


def compute_formula(method: str, unit: TextUnit,
                    easy_words: frozenset[str] | None = None) -> FormulaScore:
    if method == "dale_chall":
        if easy_words is None:
            easy_words = load_easy_words()
        return dale_chall(unit, easy_words)
    fn = {
        "flesch_re": flesch_reading_ease,
        "gunning_fog": gunning_fog,
        "ari": ari,
        "coleman_liau": coleman_liau,
        "flesch_kincaid": flesch_kincaid,
    }.get(method)
    if fn is None:
        raise FormulaError(f"unknown formula {method!r}; known: {', '.join(FORMULA_METHODS)}")
    return fn(unit)
