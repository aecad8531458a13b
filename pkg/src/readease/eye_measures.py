"""Reading-ease measures computed from raw per-fixation reports.

Twelve per-trial measures, then unweighted means across participants per
(unit, level):

    TF    mean over non-skipped words of summed fixation durations
    SR    fraction of words never fixated
    RR    backward inter-word saccades per word (all words in the denominator)
    FF    mean first-fixation duration over non-skipped words
    FD    mean duration over all fixations
    NF    fixations per word
    fpGD  mean first-pass gaze duration over words with a first pass
    fpSR  fraction of words with no first-pass fixation
    fpRR  regressions launched from a first-pass fixation, per word
    GD    mean over non-skipped words of first-entry-to-first-exit durations
    hpFD  mean over all words of summed second-and-later-pass durations
    RS    words per second from total trial time

A fixation on word w is first-pass iff no earlier fixation in the trial
landed right of w and w has not been exited since its first entry, i.e. the
contiguous run from first entry to first exit, provided the first entry
precedes any fixation on a later word. A regression is a saccade whose
destination word index is strictly smaller than its origin; within-word
refixations are not regressions. Words after the last fixation count as
skipped. Per-trial values undefined on a fully skipped trial (the duration
measures) propagate as missing, never as zero.

Fixation file: CSV with header participant_id, unit_id, level, regime, group,
order, word_index, duration_ms, total_time_ms (trial total repeated per row).
A row with empty order/word_index/duration_ms declares a fully skipped trial.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

MEASURES = ("TF", "SR", "RR", "FF", "FD", "NF", "fpGD", "fpSR", "fpRR", "GD", "hpFD", "RS")

LEVELS = ("original", "simplified")
REGIMES = ("ordinary", "info_seeking")
GROUPS = ("L1", "L2")


class FixationError(ValueError):
    """Malformed fixation report: order, range, or metadata problems."""


@dataclass(frozen=True)
class FixationEvent:
    participant_id: str
    unit_id: str
    word_index: int
    order: int
    duration: float  # milliseconds

    def __post_init__(self):
        if self.duration <= 0:
            raise FixationError(f"non-positive duration {self.duration}")
        if self.word_index < 0:
            raise FixationError(f"negative word_index {self.word_index}")


@dataclass
class Trial:
    participant_id: str
    unit_id: str
    level: str
    regime: str
    group: str
    word_count: int
    fixations: tuple[FixationEvent, ...]
    total_time: float  # milliseconds


def ingest_fixations(path: str | Path, word_counts: Mapping[str, int]) -> list[Trial]:
    """Assemble trials from a fixation CSV, validating order density and ranges."""
    trials: dict[tuple[str, str], Trial] = {}
    rows_by_trial: dict[tuple[str, str], list[dict]] = {}
    meta: dict[tuple[str, str], tuple[str, str, str, float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"participant_id", "unit_id", "level", "regime", "group",
                    "order", "word_index", "duration_ms", "total_time_ms"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise FixationError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, 2):
            unit_id = row["unit_id"]
            if unit_id not in word_counts:
                raise FixationError(f"{path}:{lineno}: unknown unit {unit_id}")
            if row["level"] not in LEVELS:
                raise FixationError(f"{path}:{lineno}: bad level {row['level']!r}")
            if row["regime"] not in REGIMES:
                raise FixationError(f"{path}:{lineno}: bad regime {row['regime']!r}")
            if row["group"] not in GROUPS:
                raise FixationError(f"{path}:{lineno}: bad group {row['group']!r}")
            key = (row["participant_id"], unit_id)
            this_meta = (row["level"], row["regime"], row["group"],
                         float(row["total_time_ms"]))
            if key in meta and meta[key] != this_meta:
                raise FixationError(f"{path}:{lineno}: inconsistent trial metadata for {key}")
            meta[key] = this_meta
            rows_by_trial.setdefault(key, []).append({**row, "lineno": lineno})

    out: list[Trial] = []
    for key, rows in rows_by_trial.items():
        participant_id, unit_id = key
        level, regime, group, total_time = meta[key]
        n_words = word_counts[unit_id]
        empty = [r for r in rows if r["order"] == "" and r["word_index"] == ""
                 and r["duration_ms"] == ""]
        if empty:
            if len(rows) > 1:
                raise FixationError(
                    f"{path}: trial {key} mixes empty-trial marker with fixations")
            fixations: tuple[FixationEvent, ...] = ()
        else:
            events = []
            last_order = -1
            for r in rows:
                order = int(r["order"])
                if order <= last_order:
                    raise FixationError(
                        f"{path}:{r['lineno']}: non-monotone order {order} in trial {key}")
                last_order = order
                word_index = int(r["word_index"])
                if word_index >= n_words:
                    raise FixationError(
                        f"{path}:{r['lineno']}: word_index {word_index} out of range "
                        f"for {unit_id} ({n_words} words)")
                events.append(FixationEvent(participant_id, unit_id, word_index,
                                            order, float(r["duration_ms"])))
            orders = [e.order for e in events]
            if orders != list(range(len(orders))):
                raise FixationError(f"{path}: order gap in trial {key}: {orders}")
            fixations = tuple(events)
        out.append(Trial(participant_id, unit_id, level, regime, group,
                         n_words, fixations, total_time))
    out.sort(key=lambda t: (t.unit_id, t.participant_id))
    return out


def segment_passes(trial: Trial) -> list[bool]:
    """Label each fixation first-pass (True) or higher-pass (False).

    First pass for word w: the contiguous run from w's first entry until w is
    first exited, provided no word right of w was fixated before that entry.
    """
    labels: list[bool] = []
    max_seen = -1  # rightmost word fixated strictly before the current fixation
    first_entry_ok: dict[int, bool] = {}
    exited: set[int] = set()
    prev_word: int | None = None
    for fx in trial.fixations:
        w = fx.word_index
        if prev_word is not None and prev_word != w:
            exited.add(prev_word)
        if w not in first_entry_ok:
            first_entry_ok[w] = max_seen <= w  # no earlier fixation right of w
        labels.append(first_entry_ok[w] and w not in exited)
        max_seen = max(max_seen, w)
        prev_word = w
    return labels


def trial_measures(trial: Trial) -> dict[str, float | None]:
    """All twelve per-trial measures; undefined duration measures map to None."""
    n_words = trial.word_count
    fixations = trial.fixations
    out: dict[str, float | None] = {}

    by_word: dict[int, list[FixationEvent]] = {}
    for fx in fixations:
        by_word.setdefault(fx.word_index, []).append(fx)
    fixated = sorted(by_word)
    skipped = n_words - len(fixated)

    out["SR"] = skipped / n_words
    out["NF"] = len(fixations) / n_words
    out["RS"] = 1000.0 * n_words / trial.total_time if trial.total_time > 0 else None

    regressions = sum(
        1 for a, b in zip(fixations, fixations[1:]) if b.word_index < a.word_index)
    out["RR"] = regressions / n_words

    labels = segment_passes(trial)
    out["fpRR"] = sum(
        1 for i, (a, b) in enumerate(zip(fixations, fixations[1:]))
        if b.word_index < a.word_index and labels[i]) / n_words

    fp_durations: dict[int, float] = {}
    hp_durations: dict[int, float] = {}
    for fx, is_fp in zip(fixations, labels):
        bucket = fp_durations if is_fp else hp_durations
        bucket[fx.word_index] = bucket.get(fx.word_index, 0.0) + fx.duration
    out["fpSR"] = (n_words - len(fp_durations)) / n_words

    # Gaze duration: contiguous run from first entry to first exit, any pass.
    gaze: dict[int, float] = {}
    entered: set[int] = set()
    open_run: int | None = None
    for fx in fixations:
        w = fx.word_index
        if w not in entered:
            entered.add(w)
            gaze[w] = fx.duration
            open_run = w
        elif open_run == w:
            gaze[w] += fx.duration
        else:
            open_run = None

    if not fixations:
        out.update({m: None for m in ("TF", "FF", "FD", "fpGD", "GD", "hpFD")})
        return out

    out["TF"] = sum(sum(f.duration for f in by_word[w]) for w in fixated) / len(fixated)
    out["FF"] = sum(by_word[w][0].duration for w in fixated) / len(fixated)
    out["FD"] = sum(f.duration for f in fixations) / len(fixations)
    out["GD"] = sum(gaze[w] for w in fixated) / len(fixated)
    out["fpGD"] = (sum(fp_durations.values()) / len(fp_durations)
                   if fp_durations else None)
    out["hpFD"] = sum(hp_durations.get(w, 0.0) for w in range(n_words)) / n_words
    return out


@dataclass(frozen=True)
class ReadingEaseValue:
    measure: str
    unit_id: str
    level: str
    value: float
    n_participants: int


def average_over_participants(trials: Iterable[Trial], measure: str, unit_id: str,
                              level: str, group: str | None = None,
                              regime: str | None = None) -> ReadingEaseValue:
    """Unweighted mean of per-trial values, skipping trials missing the measure."""
    if measure not in MEASURES:
        raise FixationError(f"unknown measure {measure!r}; known: {', '.join(MEASURES)}")
    selected = [t for t in trials
                if t.unit_id == unit_id and t.level == level
                and (group is None or t.group == group)
                and (regime is None or t.regime == regime)]
    if not selected:
        raise FixationError(
            f"no trials for {unit_id}/{level}"
            + (f" group={group}" if group else "")
            + (f" regime={regime}" if regime else ""))
    values = [v for t in selected if (v := trial_measures(t)[measure]) is not None]
    if not values:
        raise FixationError(f"{measure} undefined for every trial of {unit_id}/{level}")
    return ReadingEaseValue(measure, unit_id, level,
                            sum(values) / len(values), len(values))


class EaseTable:
    """Precomputed per-trial measures, indexed by (unit, level) for averaging."""

    def __init__(self, trials: Sequence[Trial]):
        self._trials = list(trials)
        self._index: dict[tuple[str, str], list[tuple[Trial, dict]]] = {}
        for trial in self._trials:
            self._index.setdefault((trial.unit_id, trial.level), []).append(
                (trial, trial_measures(trial)))

    def value(self, measure: str, unit_id: str, level: str,
              group: str | None = None, regime: str | None = None) -> ReadingEaseValue | None:
        values = [m[measure] for t, m in self._index.get((unit_id, level), [])
                  if (group is None or t.group == group)
                  and (regime is None or t.regime == regime)
                  and m[measure] is not None]
        if not values:
            return None
        return ReadingEaseValue(measure, unit_id, level,
                                sum(values) / len(values), len(values))

    @property
    def trials(self) -> list[Trial]:
        return list(self._trials)
