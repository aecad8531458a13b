"""Parallel original/simplified corpus: loading, tokenization, alignment, statistics.

Corpus file format (JSON):

    {"articles": [
        {"article_id": "a1",
         "paragraphs": [
            {"original":   ["First sentence.", "Second sentence."],
             "simplified": ["First simple.", "Second simple."],
             "alignment":  [[0, 0], [1, 1]]}
         ]}
    ]}

Sentence segmentation of the packaged corpus is taken from the file, never
recomputed. Unit ids are derived as article/paragraph/level[/sentence], e.g.
"a1/0/original" for a passage and "a1/0/original/2" for its third sentence.
Alignment entries are (original_sentence_index, simplified_sentence_index)
pairs; one-to-many links are allowed and are grouped into a single pair whose
members are merged sentence-group units (id joins indices with '+').

Word tokens are whitespace chunks with punctuation left attached; a chunk with
no alphanumeric character is a punctuation token (is_word=False). `letters`
counts alphanumeric characters only, so an attached comma or period never
contributes to word length.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from scipy import stats as _scipy_stats

VOWELS = set("aeiouy")

# Trailing-abbreviation stoplist for free-text sentence splitting only; the
# packaged corpus always carries its own segmentation.
_ABBREVIATIONS = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt",
    "vs", "etc", "e.g", "i.e", "no", "fig", "vol", "inc", "ltd", "co",
}

_SENTENCE_BREAK = re.compile(r"([.!?]+['\")\]]*)\s+(?=[\"'(\[]?[A-Z0-9])")


class CorpusError(ValueError):
    """Malformed corpus file, dangling alignment, or duplicate ids."""


@dataclass(frozen=True)
class Token:
    surface: str
    letters: int
    syllables: int
    is_word: bool

    def __post_init__(self):
        if not self.surface:
            raise CorpusError("token surface must be non-empty")
        if self.is_word and self.syllables < 1:
            raise CorpusError(f"word token {self.surface!r} needs >=1 syllable")


@dataclass(frozen=True)
class TextUnit:
    unit_id: str
    granularity: str  # "sentence" | "passage"
    level: str  # "original" | "simplified"
    article_id: str
    tokens: tuple[Token, ...]
    sentence_count: int

    @property
    def words(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.is_word)

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_word)

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class ParallelPair:
    pair_id: str
    original: TextUnit
    simplified: TextUnit
    granularity: str

    def __post_init__(self):
        if self.original.article_id != self.simplified.article_id:
            raise CorpusError(f"pair {self.pair_id}: article mismatch")
        if self.original.level != "original" or self.simplified.level != "simplified":
            raise CorpusError(f"pair {self.pair_id}: levels must differ")


@dataclass
class Corpus:
    units: dict[str, TextUnit]
    pairs: list[ParallelPair]

    def units_at(self, granularity: str, level: str | None = None) -> list[TextUnit]:
        out = [u for u in self.units.values() if u.granularity == granularity]
        if level is not None:
            out = [u for u in out if u.level == level]
        return out

    def pairs_at(self, granularity: str) -> list[ParallelPair]:
        return [p for p in self.pairs if p.granularity == granularity]


def count_syllables(word: str) -> int:
    """Vowel-group syllable count.

    Counts maximal runs of a/e/i/o/u/y in the word's alphabetic characters;
    a word-final silent 'e' (one that forms its own group) is subtracted
    unless it is the only group; minimum 1.
    """
    letters = [c for c in word.lower() if c.isalpha()]
    if not letters:
        raise ValueError(f"no letters in {word!r}")
    # Non-alphabetic characters (hyphens, apostrophes) break vowel groups.
    groups = 0
    prev_vowel = False
    stripped = word.lower()
    for ch in stripped:
        if not ch.isalpha():
            prev_vowel = False
            continue
        is_vowel = ch in VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if groups > 1 and letters[-1] == "e" and len(letters) >= 2 and letters[-2] not in VOWELS:
        groups -= 1
    return max(1, groups)


def _make_token(chunk: str) -> Token:
    letters = sum(1 for c in chunk if c.isalnum())
    is_word = letters > 0
    if is_word and any(c.isalpha() for c in chunk):
        syllables = count_syllables(chunk)
    elif is_word:
        syllables = 1  # digit-only words carry no vowels
    else:
        syllables = 0
    return Token(surface=chunk, letters=letters, syllables=syllables, is_word=is_word)


def tokenize(text: str) -> list[Token]:
    """Split text into whitespace-delimited tokens with letter/syllable counts."""
    return [_make_token(chunk) for chunk in text.split()]


def segment_sentences(text: str) -> list[str]:
    """Heuristic splitter for free text: break on .!? + space + capital.

    Not used for the packaged corpus, whose segmentation is authored.
    """
    parts: list[str] = []
    start = 0
    for m in _SENTENCE_BREAK.finditer(text):
        candidate = text[start:m.end(1)].strip()
        last_word = candidate.rsplit(None, 1)[-1] if candidate else ""
        if last_word.rstrip(".").lower() in _ABBREVIATIONS:
            continue
        if candidate:
            parts.append(candidate)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        parts.append(tail)
    return parts


def _sentence_unit(article_id: str, para_idx: int, level: str, idx: int, text: str) -> TextUnit:
    return TextUnit(
        unit_id=f"{article_id}/{para_idx}/{level}/{idx}",
        granularity="sentence",
        level=level,
        article_id=article_id,
        tokens=tuple(tokenize(text)),
        sentence_count=1,
    )


def _merge_sentence_units(members: Sequence[TextUnit], article_id: str,
                          para_idx: int, level: str, indices: Sequence[int]) -> TextUnit:
    label = "+".join(str(i) for i in indices)
    return TextUnit(
        unit_id=f"{article_id}/{para_idx}/{level}/{label}",
        granularity="sentence",
        level=level,
        article_id=article_id,
        tokens=tuple(tok for u in members for tok in u.tokens),
        sentence_count=len(members),
    )


def _alignment_groups(links: Sequence[Sequence[int]], n_orig: int,
                      n_simp: int, where: str) -> list[tuple[list[int], list[int]]]:
    """Connected components of the sentence-alignment bipartite graph."""
    for link in links:
        if len(link) != 2:
            raise CorpusError(f"{where}: alignment entry {link!r} is not a pair")
        o, s = link
        if not (0 <= o < n_orig):
            raise CorpusError(f"{where}: original sentence index {o} out of range")
        if not (0 <= s < n_simp):
            raise CorpusError(f"{where}: simplified sentence index {s} out of range")
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for o, s in links:
        ra, rb = find(("o", o)), find(("s", s))
        if ra != rb:
            parent[ra] = rb
    comps: dict[tuple[str, int], tuple[list[int], list[int]]] = {}
    for o, s in links:
        root = find(("o", o))
        group = comps.setdefault(root, ([], []))
        if o not in group[0]:
            group[0].append(o)
        if s not in group[1]:
            group[1].append(s)
    groups = [(sorted(o_idx), sorted(s_idx)) for o_idx, s_idx in comps.values()]
    groups.sort(key=lambda g: g[0][0])
    return groups


def load_corpus(path: str | Path) -> Corpus:
    """Load the parallel corpus, building sentence and passage units plus pairs."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed corpus file {path}: {exc}") from exc
    articles = raw.get("articles")
    if not isinstance(articles, list) or not articles:
        raise CorpusError("no units: corpus has an empty article list")

    units: dict[str, TextUnit] = {}
    pairs: list[ParallelPair] = []

    def add_unit(unit: TextUnit) -> TextUnit:
        if unit.unit_id in units:
            raise CorpusError(f"duplicate unit_id {unit.unit_id}")
        units[unit.unit_id] = unit
        return unit

    for article in articles:
        article_id = article.get("article_id")
        if not article_id:
            raise CorpusError("article missing article_id")
        paragraphs = article.get("paragraphs") or []
        if not paragraphs:
            raise CorpusError(f"article {article_id} has no paragraphs")
        for para_idx, para in enumerate(paragraphs):
            where = f"{article_id}/{para_idx}"
            sent_units: dict[str, list[TextUnit]] = {}
            for level in ("original", "simplified"):
                sentences = para.get(level)
                if not isinstance(sentences, list) or not sentences:
                    raise CorpusError(f"{where}: missing {level} sentences")
                sent_units[level] = [
                    add_unit(_sentence_unit(article_id, para_idx, level, i, s))
                    for i, s in enumerate(sentences)
                ]
                passage = TextUnit(
                    unit_id=f"{article_id}/{para_idx}/{level}",
                    granularity="passage",
                    level=level,
                    article_id=article_id,
                    tokens=tuple(t for u in sent_units[level] for t in u.tokens),
                    sentence_count=len(sentences),
                )
                add_unit(passage)
            pairs.append(ParallelPair(
                pair_id=where,
                original=units[f"{where}/original"],
                simplified=units[f"{where}/simplified"],
                granularity="passage",
            ))
            links = para.get("alignment") or []
            for o_idx, s_idx in _alignment_groups(
                    links, len(sent_units["original"]), len(sent_units["simplified"]), where):
                members_o = [sent_units["original"][i] for i in o_idx]
                members_s = [sent_units["simplified"][i] for i in s_idx]
                orig = (members_o[0] if len(members_o) == 1 else
                        add_unit(_merge_sentence_units(members_o, article_id, para_idx,
                                                       "original", o_idx)))
                simp = (members_s[0] if len(members_s) == 1 else
                        add_unit(_merge_sentence_units(members_s, article_id, para_idx,
                                                       "simplified", s_idx)))
                pairs.append(ParallelPair(
                    pair_id=f"{where}#{'+'.join(map(str, o_idx))}",
                    original=orig,
                    simplified=simp,
                    granularity="sentence",
                ))
    return Corpus(units=units, pairs=pairs)


@dataclass
class StatRow:
    name: str
    original_mean: float
    original_ci: float  # 95% half-width
    simplified_mean: float
    simplified_ci: float
    t_statistic: float
    p_value: float


@dataclass
class CorpusStats:
    passage_count: dict[str, int]
    rows: list[StatRow] = field(default_factory=list)


def _mean_ci(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    half = _scipy_stats.t.ppf(0.975, n - 1) * math.sqrt(var / n)
    return mean, half


def _welch_row(name: str, orig: Sequence[float], simp: Sequence[float]) -> StatRow:
    om, oc = _mean_ci(orig)
    sm, sc = _mean_ci(simp)
    if all(v == orig[0] for v in orig) and all(v == simp[0] for v in simp) and orig[0] == simp[0]:
        t, p = 0.0, 1.0
    else:
        t, p = _scipy_stats.ttest_ind(orig, simp, equal_var=False)
    return StatRow(name, om, oc, sm, sc, float(t), float(p))


def corpus_stats(corpus: Corpus,
                 word_values: Mapping[str, Mapping[int, float]] | None = None,
                 value_names: Iterable[str] = ()) -> CorpusStats:
    """Per-level descriptive statistics over passages, with Welch t-tests.

    Each row's unit of analysis is the passage (one value per passage per
    level): word count, sentence count, mean sentence length, mean word
    length, and optionally per-passage means of externally supplied per-word
    values (`word_values` maps unit_id -> word_index -> value, one mapping
    name per entry of `value_names`, e.g. frequency or surprisal bits).
    """
    per_level: dict[str, list[TextUnit]] = {
        level: sorted(corpus.units_at("passage", level), key=lambda u: u.unit_id)
        for level in ("original", "simplified")
    }
    for level, passages in per_level.items():
        if not passages:
            raise CorpusError(f"level {level} missing from corpus")

    def collect(fn) -> dict[str, list[float]]:
        return {lvl: [fn(u) for u in ps] for lvl, ps in per_level.items()}

    stats = CorpusStats(passage_count={lvl: len(ps) for lvl, ps in per_level.items()})
    words = collect(lambda u: float(u.word_count))
    sents = collect(lambda u: float(u.sentence_count))
    sent_len = collect(lambda u: u.word_count / u.sentence_count)
    word_len = collect(lambda u: sum(t.letters for t in u.words) / u.word_count)
    stats.rows.append(_welch_row("words_per_passage", words["original"], words["simplified"]))
    stats.rows.append(_welch_row("sentences_per_passage", sents["original"], sents["simplified"]))
    stats.rows.append(_welch_row("sentence_length_words", sent_len["original"], sent_len["simplified"]))
    stats.rows.append(_welch_row("mean_word_length", word_len["original"], word_len["simplified"]))
    if word_values:
        for name in value_names:
            table = word_values.get(name)
            if table is None:
                continue

            def passage_mean(u: TextUnit, table=table, name=name) -> float:
                vals = table.get(u.unit_id)
                if vals is None or len(vals) != u.word_count:
                    raise CorpusError(f"{name}: missing per-word values for {u.unit_id}")
                return sum(vals[i] for i in range(u.word_count)) / u.word_count

            per = collect(passage_mean)
            row_name = "mean_word_" + name.removeprefix("word_")
            stats.rows.append(_welch_row(row_name, per["original"], per["simplified"]))
    return stats
