import math

import pytest
from hypothesis import given
from hypothesis import strategies as hst

from readease.corpus import tokenize
from readease.word_measures import (FrequencyTable, MeasureError, MeasureStore,
                                    UnitScore, frequency_surprisal, word_length)


class TestWordLength:
    def test_trailing_punctuation_excluded(self):
        (tok,) = tokenize("cat,")
        assert word_length(tok) == 3

    def test_hyphen_excluded(self):
        (tok,) = tokenize("co-operate")
        assert word_length(tok) == 9

    def test_single_letter(self):
        (tok,) = tokenize("a")
        assert word_length(tok) == 1

    def test_punctuation_only_rejected(self):
        (tok,) = tokenize("--")
        with pytest.raises(MeasureError):
            word_length(tok)


class TestFrequencySurprisal:
    def test_half_is_one_bit(self):
        table = FrequencyTable({"the": 0.5})
        (tok,) = tokenize("the")
        assert frequency_surprisal(tok, table) == pytest.approx(1.0, abs=1e-12)

    def test_power_of_two(self):
        table = FrequencyTable({"rare": 1 / 1024})
        (tok,) = tokenize("rare")
        assert frequency_surprisal(tok, table) == pytest.approx(10.0, abs=1e-12)

    def test_oov_floor(self):
        table = FrequencyTable({}, oov_floor=1e-9)
        (tok,) = tokenize("zzzz")
        assert frequency_surprisal(tok, table) == pytest.approx(
            -math.log2(1e-9), abs=1e-9)
        assert frequency_surprisal(tok, table) == pytest.approx(29.897, abs=1e-3)

    def test_case_insensitive(self):
        table = FrequencyTable({"word": 0.25})
        (tok,) = tokenize("Word")
        assert frequency_surprisal(tok, table) == pytest.approx(2.0, abs=1e-12)

    @given(hst.floats(min_value=1e-9, max_value=1.0, exclude_min=False))
    def test_monotone_decreasing_in_p(self, p):
        table = FrequencyTable({"w": p, "v": min(1.0, p * 2)})
        tok_w, tok_v = tokenize("w v")
        assert frequency_surprisal(tok_w, table) >= frequency_surprisal(tok_v, table)

    def test_table_load_validates(self, tmp_path):
        bad = tmp_path / "f.tsv"
        bad.write_text("word\t1.5\n", encoding="utf-8")
        with pytest.raises(MeasureError, match="outside"):
            FrequencyTable.load(bad)


class TestIngestWordMeasures:
    def test_full_file_covers_every_word(self, corpus, word_measures_file):
        store = MeasureStore(corpus)
        store.ingest_word_measures(word_measures_file)
        for unit in corpus.units.values():
            values = store.word_values(unit.unit_id, "surprisal")
            assert values is not None
            assert len(values) == unit.word_count

    def test_word_count_mismatch_names_unit(self, corpus, tmp_path):
        path = tmp_path / "short.tsv"
        unit_id = "a1/1/original/0"
        unit = corpus.units[unit_id]
        rows = ["unit_id\tword_index\tsurface\tsurprisal_bits"]
        for i, tok in enumerate(unit.words):
            if i == unit.word_count - 1:
                break  # drop the last word's row
            rows.append(f"{unit_id}\t{i}\t{tok.surface}\t3.0")
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        store = MeasureStore(corpus)
        with pytest.raises(MeasureError, match=unit_id.replace("/", "/")):
            store.ingest_word_measures(path)

    def test_unknown_unit(self, corpus, tmp_path):
        path = tmp_path / "stray.tsv"
        path.write_text("unit_id\tword_index\tsurface\tsurprisal_bits\n"
                        "nope/0/original\t0\tword\t1.0\n", encoding="utf-8")
        store = MeasureStore(corpus)
        with pytest.raises(MeasureError, match="unknown unit_id"):
            store.ingest_word_measures(path)

    def test_surprisal_only_leaves_entropy_absent(self, corpus, tmp_path):
        path = tmp_path / "sonly.tsv"
        unit_id = "a1/1/original/0"
        unit = corpus.units[unit_id]
        rows = ["unit_id\tword_index\tsurface\tsurprisal_bits"]
        for i, tok in enumerate(unit.words):
            rows.append(f"{unit_id}\t{i}\t{tok.surface}\t2.5")
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        store = MeasureStore(corpus)
        store.ingest_word_measures(path)
        assert store.word_values(unit_id, "surprisal") is not None
        assert store.word_values(unit_id, "entropy") is None
        with pytest.raises(MeasureError, match="entropy"):
            store.aggregate_unit("entropy", unit)


class TestIngestUnitScores:
    def test_row_count(self, corpus, unit_scores_file):
        store = MeasureStore(corpus)
        scores = store.ingest_unit_scores(unit_scores_file, "lexile")
        assert len(scores) == len(corpus.units)
        assert store.unit_score("a1/0/original", "lexile") is not None

    def test_duplicate_rejected(self, corpus, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("unit_id,value\na1/0/original,10\na1/0/original,11\n",
                        encoding="utf-8")
        store = MeasureStore(corpus)
        with pytest.raises(MeasureError, match="duplicate"):
            store.ingest_unit_scores(path, "m")

    def test_non_numeric_names_row(self, corpus, tmp_path):
        path = tmp_path / "na.csv"
        path.write_text("unit_id,value\na1/0/original,N/A\n", encoding="utf-8")
        store = MeasureStore(corpus)
        with pytest.raises(MeasureError, match=":2"):
            store.ingest_unit_scores(path, "m")


class TestAggregation:
    def test_mean_of_three(self, corpus, tmp_path):
        unit_id = "a1/1/simplified/0"
        unit = corpus.units[unit_id]
        rows = ["unit_id\tword_index\tsurface\tsurprisal_bits"]
        values = [2.0, 4.0, 6.0] + [4.0] * (unit.word_count - 3)
        for i, tok in enumerate(unit.words):
            rows.append(f"{unit_id}\t{i}\t{tok.surface}\t{values[i]}")
        path = tmp_path / "m.tsv"
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        store = MeasureStore(corpus)
        store.ingest_word_measures(path)
        score = store.aggregate_unit("surprisal", unit)
        assert score.value == pytest.approx(sum(values) / len(values), abs=1e-12)

    def test_word_length_constant(self, corpus):
        store = MeasureStore(corpus)
        store.compute_native()
        unit = corpus.units["a1/0/original/0"]
        score = store.aggregate_unit("word_length", unit)
        expected = sum(t.letters for t in unit.words) / unit.word_count
        assert score.value == pytest.approx(expected, abs=1e-12)

    def test_permutation_invariance_and_scaling(self, corpus):
        import numpy as np
        rng = np.random.default_rng(3)
        unit = corpus.units["a1/0/original"]
        values = list(rng.uniform(1, 10, unit.word_count))
        store = MeasureStore(corpus)
        store._word_values[unit.unit_id] = {"surprisal": values}
        base = store.aggregate_unit("surprisal", unit).value
        store._word_values[unit.unit_id] = {"surprisal": values[::-1]}
        assert store.aggregate_unit("surprisal", unit).value == pytest.approx(
            base, abs=1e-9)
        store._word_values[unit.unit_id] = {"surprisal": [3.0 * v for v in values]}
        assert store.aggregate_unit("surprisal", unit).value == pytest.approx(
            3.0 * base, rel=1e-12)

    def test_missing_errors_list_indices(self, corpus):
        store = MeasureStore(corpus)
        unit = corpus.units["a1/1/original/1"]
        with pytest.raises(MeasureError, match="indices"):
            store.aggregate_unit("surprisal", unit)


class TestAuditAndSeal:
    def test_audit_passes_on_complete_store(self, corpus, word_measures_file):
        store = MeasureStore(corpus)
        store.compute_native()
        store.ingest_word_measures(word_measures_file)
        problems = store.audit(corpus.units.values(),
                               ["word_length", "surprisal", "entropy", "pll"])
        assert problems == []

    def test_audit_reports_gaps(self, corpus):
        store = MeasureStore(corpus)
        problems = store.audit(corpus.units.values(), ["surprisal"])
        assert len(problems) == len(corpus.units)

    def test_sealed_store_rejects_writes(self, corpus):
        store = MeasureStore(corpus)
        store.seal()
        with pytest.raises(MeasureError, match="sealed"):
            store.compute_native()

    def test_non_finite_unit_score_rejected(self):
        with pytest.raises(MeasureError):
            UnitScore("u", "m", float("nan"))
