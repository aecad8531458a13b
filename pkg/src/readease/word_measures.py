"""Per-word psycholinguistic measures: native length/frequency plus ingested values.

Native measures are word length (alphanumeric characters) and word frequency
coded as unigram surprisal, -log2 p(w). Surprisal, entropy, PLL and embedding
depth are produced externally and ingested from a TSV keyed by (unit_id,
word_index); idea density, integration cost and external system scores enter
as per-unit CSVs.

Word-measures TSV: header columns unit_id, word_index, surface, then any of
surprisal_bits, entropy_bits, pll, embedding_depth. Unit-scores CSV:
unit_id,value. Frequency table TSV: word<TAB>probability.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import Corpus, TextUnit, Token

INGESTED_WORD_COLUMNS = ("surprisal_bits", "entropy_bits", "pll", "embedding_depth")
WORD_MEASURES = ("word_length", "word_frequency", "surprisal", "entropy", "pll", "embedding_depth")

_COLUMN_FOR_MEASURE = {
    "surprisal": "surprisal_bits",
    "entropy": "entropy_bits",
    "pll": "pll",
    "embedding_depth": "embedding_depth",
}


class MeasureError(ValueError):
    """Ingestion mismatch, unknown unit, or incomplete per-word coverage."""


@dataclass(frozen=True)
class UnitScore:
    unit_id: str
    method: str
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise MeasureError(f"non-finite score for {self.method}@{self.unit_id}")


@dataclass
class FrequencyTable:
    """word -> probability in (0, 1]; OOV words fall back to the floor."""

    probabilities: dict[str, float]
    oov_floor: float = 1e-9

    @classmethod
    def load(cls, path: str | Path, oov_floor: float = 1e-9) -> "FrequencyTable":
        probs: dict[str, float] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise MeasureError(f"{path}:{lineno}: expected word<TAB>probability")
                word, p = parts[0], float(parts[1])
                if not 0.0 < p <= 1.0:
                    raise MeasureError(f"{path}:{lineno}: probability {p} outside (0,1]")
                probs[word.lower()] = p
        return cls(probs, oov_floor)

    def probability(self, word: str) -> float:
        return self.probabilities.get(word.lower(), self.oov_floor)


def word_length(token: Token) -> int:
    """Characters excluding punctuation (alphanumerics only)."""
    if not token.is_word:
        raise MeasureError(f"punctuation-only token {token.surface!r} has no length")
    return token.letters


def frequency_surprisal(token: Token, table: FrequencyTable) -> float:
    """Unigram surprisal -log2 p of the lowercased surface, OOV floored."""
    return -math.log2(table.probability(token.surface))


class MeasureStore:
    """Per-word measure rows plus per-unit scores; sealed before evaluation reads."""

    def __init__(self, corpus: Corpus):
        self._corpus = corpus
        # unit_id -> column -> list of per-word values (index = word position)
        self._word_values: dict[str, dict[str, list[float]]] = {}
        self._unit_scores: dict[tuple[str, str], UnitScore] = {}
        self._sealed = False

    def _check_open(self):
        if self._sealed:
            raise MeasureError("measure store is sealed")

    def seal(self):
        self._sealed = True

    # -- native per-word measures ------------------------------------------

    def compute_native(self, table: FrequencyTable | None = None):
        """Populate word_length (and word_frequency when a table is given)."""
        self._check_open()
        for unit in self._corpus.units.values():
            cols = self._word_values.setdefault(unit.unit_id, {})
            cols["word_length"] = [float(word_length(t)) for t in unit.words]
            if table is not None:
                cols["word_frequency"] = [frequency_surprisal(t, table) for t in unit.words]

    # -- ingestion ----------------------------------------------------------

    def ingest_word_measures(self, path: str | Path):
        """Merge an externally produced word-measures TSV into the store."""
        self._check_open()
        with open(path, encoding="utf-8") as fh:
            reader = csv.DictReader(fh, delimiter="\t")
            fields = reader.fieldnames or []
            for required in ("unit_id", "word_index", "surface"):
                if required not in fields:
                    raise MeasureError(f"{path}: missing column {required}")
            value_cols = [c for c in INGESTED_WORD_COLUMNS if c in fields]
            if not value_cols:
                raise MeasureError(f"{path}: no measure columns present")
            staged: dict[str, dict[str, dict[int, float]]] = {}
            for row in reader:
                unit_id = row["unit_id"]
                unit = self._corpus.units.get(unit_id)
                if unit is None:
                    raise MeasureError(f"{path}: unknown unit_id {unit_id}")
                idx = int(row["word_index"])
                if not 0 <= idx < unit.word_count:
                    raise MeasureError(
                        f"{path}: word_index {idx} out of range for {unit_id} "
                        f"({unit.word_count} words)")
                per_unit = staged.setdefault(unit_id, {c: {} for c in value_cols})
                for col in value_cols:
                    cell = row.get(col, "")
                    if cell is None or cell == "":
                        continue
                    if idx in per_unit[col]:
                        raise MeasureError(f"{path}: duplicate row for {unit_id}:{idx}")
                    per_unit[col][idx] = float(cell)
        for unit_id, cols in staged.items():
            unit = self._corpus.units[unit_id]
            store_cols = self._word_values.setdefault(unit_id, {})
            for col, values in cols.items():
                if not values:
                    continue
                if len(values) != unit.word_count:
                    raise MeasureError(
                        f"word-count mismatch for {unit_id}: file has {len(values)} "
                        f"{col} rows, corpus has {unit.word_count} words")
                store_cols[_measure_for_column(col)] = [
                    values[i] for i in range(unit.word_count)
                ]

    def ingest_unit_scores(self, path: str | Path, method: str) -> list[UnitScore]:
        """Load a per-unit score CSV for one method; duplicates rejected."""
        self._check_open()
        scores: list[UnitScore] = []
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            for lineno, row in enumerate(reader, 1):
                if not row or row[0].startswith("#"):
                    continue
                if lineno == 1 and row[0] == "unit_id":
                    continue
                if len(row) != 2:
                    raise MeasureError(f"{path}:{lineno}: expected unit_id,value")
                unit_id, raw = row
                if unit_id not in self._corpus.units:
                    raise MeasureError(f"{path}:{lineno}: unknown unit_id {unit_id}")
                try:
                    value = float(raw)
                except ValueError:
                    raise MeasureError(f"{path}:{lineno}: non-numeric value {raw!r}") from None
                if not math.isfinite(value):
                    raise MeasureError(f"{path}:{lineno}: non-finite value {raw!r}")
                key = (unit_id, method)
                if key in self._unit_scores:
                    raise MeasureError(f"{path}:{lineno}: duplicate unit_id {unit_id}")
                score = UnitScore(unit_id, method, value)
                self._unit_scores[key] = score
                scores.append(score)
        return scores

    # -- aggregation and reads ----------------------------------------------

    def word_values(self, unit_id: str, measure: str) -> list[float] | None:
        cols = self._word_values.get(unit_id)
        return None if cols is None else cols.get(measure)

    def aggregate_unit(self, measure: str, unit: TextUnit) -> UnitScore:
        """Arithmetic mean of a per-word measure over the unit's word tokens."""
        values = self.word_values(unit.unit_id, measure)
        if unit.word_count == 0:
            raise MeasureError(f"unit {unit.unit_id} has no words")
        if values is None:
            raise MeasureError(
                f"{measure} missing for all {unit.word_count} words of {unit.unit_id}: "
                f"indices {list(range(unit.word_count))}")
        if len(values) != unit.word_count:
            missing = sorted(set(range(unit.word_count)) - set(range(len(values))))
            raise MeasureError(f"{measure} missing for {unit.unit_id} at indices {missing}")
        return UnitScore(unit.unit_id, measure, sum(values) / len(values))

    def unit_score(self, unit_id: str, method: str) -> UnitScore | None:
        return self._unit_scores.get((unit_id, method))

    def ingested_methods(self) -> list[str]:
        return sorted({m for (_, m) in self._unit_scores})

    def audit(self, units: Iterable[TextUnit], measures: Iterable[str]) -> list[str]:
        """Completeness audit: every word of every unit has one value per measure."""
        problems: list[str] = []
        for unit in units:
            for measure in measures:
                values = self.word_values(unit.unit_id, measure)
                if values is None:
                    problems.append(f"{unit.unit_id}: no {measure} values")
                elif len(values) != unit.word_count:
                    problems.append(
                        f"{unit.unit_id}: {measure} covers {len(values)} of "
                        f"{unit.word_count} words")
        return problems


def _measure_for_column(column: str) -> str:
    for measure, col in _COLUMN_FOR_MEASURE.items():
        if col == column:
            return measure
    raise MeasureError(f"unknown measure column {column}")
