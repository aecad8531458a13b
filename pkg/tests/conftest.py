import csv
import json
from pathlib import Path

import numpy as np
import pytest

from readease.corpus import load_corpus

CORPUS_DOC = {
    "articles": [
        {
            "article_id": "a1",
            "paragraphs": [
                {
                    "original": [
                        "The committee approved the controversial proposal yesterday.",
                        "Many residents expressed strong opposition during the consultation.",
                        "Officials nevertheless promised additional hearings before implementation.",
                    ],
                    "simplified": [
                        "The committee agreed yesterday.",
                        "Many people did not like it.",
                        "They spoke at the meeting.",
                        "Officials promised more talks.",
                    ],
                    "alignment": [[0, 0], [1, 1], [1, 2], [2, 3]],
                },
                {
                    "original": [
                        "Economic indicators deteriorated throughout the quarter.",
                        "Analysts anticipate further turbulence ahead.",
                    ],
                    "simplified": [
                        "The economy got worse.",
                        "Experts expect more trouble.",
                    ],
                    "alignment": [[0, 0], [1, 1]],
                },
            ],
        },
        {
            "article_id": "a2",
            "paragraphs": [
                {
                    "original": [
                        "Researchers documented unprecedented migration patterns this spring.",
                        "Several species arrived weeks earlier than historical records indicate.",
                    ],
                    "simplified": [
                        "Scientists saw new travel patterns.",
                        "Some birds came weeks early.",
                    ],
                    "alignment": [[0, 0], [1, 1]],
                },
                {
                    "original": [
                        "The exhibition celebrates contemporary sculpture from emerging artists.",
                        "Visitors described the installations as provocative and memorable.",
                        "Attendance exceeded expectations considerably.",
                    ],
                    "simplified": [
                        "The show has new sculpture.",
                        "Visitors liked the art.",
                        "More people came than expected.",
                    ],
                    "alignment": [[0, 0], [1, 1], [2, 2]],
                },
            ],
        },
    ]
}


@pytest.fixture(scope="session")
def corpus_file(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("corpus") / "corpus.json"
    path.write_text(json.dumps(CORPUS_DOC), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def corpus(corpus_file):
    return load_corpus(corpus_file)


def synth_trial(rng, n_words, max_fix=15):
    """Mostly left-to-right fixation sequence with regressions and skips."""
    n_fix = int(rng.integers(1, max_fix + 1))
    fixations = []
    word = int(rng.integers(0, n_words))
    for _ in range(n_fix):
        fixations.append((word, int(rng.integers(80, 400))))
        step = int(rng.choice([-2, -1, 0, 1, 1, 2, 3]))
        word = min(n_words - 1, max(0, word + step))
    total = sum(d for _, d in fixations) + int(rng.integers(50, 600))
    return fixations, total


@pytest.fixture(scope="session")
def fixation_file(tmp_path_factory, corpus) -> Path:
    """Synthetic trials for every paired unit at both granularities."""
    rng = np.random.default_rng(20240817)
    path = tmp_path_factory.mktemp("fixations") / "fixations.csv"
    participants = [("p1", "L1", "ordinary"), ("p2", "L1", "ordinary"),
                    ("p3", "L1", "info_seeking"), ("p4", "L2", "ordinary"),
                    ("p5", "L2", "info_seeking"), ("p6", "L2", "ordinary")]
    units = sorted({u.unit_id: u for p in corpus.pairs
                    for u in (p.original, p.simplified)}.values(),
                   key=lambda u: u.unit_id)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["participant_id", "unit_id", "level", "regime", "group",
                         "order", "word_index", "duration_ms", "total_time_ms"])
        for unit in units:
            for pid, group, regime in participants:
                fixations, total = synth_trial(rng, unit.word_count)
                # simplified units read a bit faster on average
                if unit.level == "simplified":
                    fixations = [(w, max(60, d - int(rng.integers(0, 60))))
                                 for w, d in fixations]
                for order, (w, d) in enumerate(fixations):
                    writer.writerow([pid, unit.unit_id, unit.level, regime,
                                     group, order, w, d, total])
    return path


@pytest.fixture(scope="session")
def frequency_file(tmp_path_factory, corpus) -> Path:
    rng = np.random.default_rng(7)
    vocab = sorted({t.surface.lower() for u in corpus.units.values()
                    for t in u.words})
    path = tmp_path_factory.mktemp("freq") / "frequencies.tsv"
    lines = ["# word\tprobability"]
    for word in vocab:
        if word == "unprecedented":
            continue  # leave one word OOV on purpose
        lines.append(f"{word}\t{float(rng.uniform(1e-6, 0.05)):.9f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def word_measures_file(tmp_path_factory, corpus) -> Path:
    rng = np.random.default_rng(11)
    path = tmp_path_factory.mktemp("wm") / "word_measures.tsv"
    rows = ["unit_id\tword_index\tsurface\tsurprisal_bits\tentropy_bits\tpll\tembedding_depth"]
    for unit_id in sorted(corpus.units):
        unit = corpus.units[unit_id]
        for i, tok in enumerate(unit.words):
            surprisal = float(rng.uniform(0.5, 18.0))
            entropy = float(rng.uniform(0.1, 8.0))
            pll = float(-rng.uniform(0.5, 12.0))
            depth = int(rng.integers(0, 6))
            rows.append(f"{unit_id}\t{i}\t{tok.surface}\t{surprisal:.6f}"
                        f"\t{entropy:.6f}\t{pll:.6f}\t{depth}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def unit_scores_file(tmp_path_factory, corpus) -> Path:
    rng = np.random.default_rng(13)
    path = tmp_path_factory.mktemp("scores") / "lexile.csv"
    lines = ["unit_id,value"]
    for unit_id in sorted(corpus.units):
        unit = corpus.units[unit_id]
        lines.append(f"{unit_id},{float(rng.uniform(300, 1400)):.1f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture()
def config_file(tmp_path, corpus_file, fixation_file, frequency_file,
                word_measures_file, unit_scores_file) -> Path:
    text = f"""
corpus = "{corpus_file}"
fixations = ["{fixation_file}"]
seed = 42
resamples = 60
measures = ["TF", "SR", "RR"]

[word_measures]
file = "{word_measures_file}"
frequency_table = "{frequency_file}"

[scores]
lexile = "{unit_scores_file}"
"""
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return path
