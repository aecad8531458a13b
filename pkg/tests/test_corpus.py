import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from readease.corpus import (CorpusError, corpus_stats, count_syllables,
                             load_corpus, segment_sentences, tokenize)


class TestTokenize:
    def test_terminal_punctuation_stays_attached(self):
        tokens = tokenize("The cat sat.")
        assert [t.surface for t in tokens] == ["The", "cat", "sat."]
        assert all(t.is_word for t in tokens)
        assert [t.letters for t in tokens] == [3, 3, 3]

    def test_empty_text(self):
        assert tokenize("") == []

    def test_hyphenated_word(self):
        (tok,) = tokenize("co-operate")
        assert tok.is_word
        assert tok.letters == 9
        assert tok.syllables == 4

    def test_pure_punctuation_token(self):
        tokens = tokenize("yes -- no")
        assert [t.is_word for t in tokens] == [True, False, True]
        assert tokens[1].letters == 0
        assert tokens[1].syllables == 0

    def test_digits_count_as_letters(self):
        (tok,) = tokenize("42,000")
        assert tok.is_word
        assert tok.letters == 5
        assert tok.syllables == 1

    @given(hst.text(alphabet=hst.characters(blacklist_categories=("Cs",)),
                    max_size=80))
    @settings(max_examples=200)
    def test_idempotent_on_detokenized_output(self, text):
        once = tokenize(text)
        again = tokenize(" ".join(t.surface for t in once))
        assert [t.surface for t in once] == [t.surface for t in again]


class TestSyllables:
    @pytest.mark.parametrize("word,expected", [
        ("cat", 1),
        ("the", 1),
        ("readability", 5),
        ("co-operate", 4),
        ("free", 1),
        ("make", 1),
        ("agree", 2),
        ("rhythm", 1),
        ("yellow", 2),
    ])
    def test_examples(self, word, expected):
        assert count_syllables(word) == expected

    def test_no_letters_is_an_error(self):
        with pytest.raises(ValueError):
            count_syllables("1234")

    @given(hst.text(alphabet="bcdfgaeiouy", min_size=1, max_size=20))
    def test_at_least_one(self, word):
        assert count_syllables(word) >= 1


class TestSegmentSentences:
    def test_basic_split(self):
        text = "It rained. The match was cancelled! Nobody minded?  Fine."
        assert segment_sentences(text) == [
            "It rained.", "The match was cancelled!", "Nobody minded?", "Fine."]

    def test_abbreviation_not_split(self):
        text = "Dr. Smith arrived. He was late."
        assert segment_sentences(text) == ["Dr. Smith arrived.", "He was late."]

    def test_no_terminal(self):
        assert segment_sentences("no punctuation here") == ["no punctuation here"]


class TestLoadCorpus:
    def test_fixture_counts(self, corpus):
        assert len(corpus.pairs_at("passage")) == 4
        # 3 + 2 + 2 + 3 alignment groups
        assert len(corpus.pairs_at("sentence")) == 10

    def test_passage_word_count_equals_sentence_sum(self, corpus):
        for pair in corpus.pairs_at("passage"):
            for unit in (pair.original, pair.simplified):
                prefix = unit.unit_id + "/"
                sentence_sum = sum(
                    u.word_count for uid, u in corpus.units.items()
                    if uid.startswith(prefix) and "+" not in uid)
                assert sentence_sum == unit.word_count

    def test_merged_group_unit(self, corpus):
        merged = corpus.units["a1/0/simplified/1+2"]
        assert merged.sentence_count == 2
        parts = (corpus.units["a1/0/simplified/1"], corpus.units["a1/0/simplified/2"])
        assert merged.word_count == sum(p.word_count for p in parts)

    def test_alignment_is_a_bijection_over_paired_units(self, corpus):
        for granularity in ("sentence", "passage"):
            pairs = corpus.pairs_at(granularity)
            originals = [p.original.unit_id for p in pairs]
            simplified = [p.simplified.unit_id for p in pairs]
            assert len(set(originals)) == len(originals)
            assert len(set(simplified)) == len(simplified)

    def test_empty_articles_error(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({"articles": []}), encoding="utf-8")
        with pytest.raises(CorpusError, match="no units"):
            load_corpus(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(CorpusError, match="malformed"):
            load_corpus(path)

    def test_dangling_alignment(self, tmp_path):
        doc = {"articles": [{"article_id": "a", "paragraphs": [{
            "original": ["One sentence."],
            "simplified": ["One."],
            "alignment": [[0, 5]]}]}]}
        path = tmp_path / "dangling.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(CorpusError, match="out of range"):
            load_corpus(path)

    def test_word_tokens_only_in_counts(self, corpus):
        unit = corpus.units["a1/0/original"]
        assert unit.word_count == sum(1 for t in unit.tokens if t.is_word)
        assert all(t.syllables >= 1 and t.letters >= 1 for t in unit.words)


class TestCorpusStats:
    def test_levels_and_rows(self, corpus):
        stats = corpus_stats(corpus)
        assert stats.passage_count == {"original": 4, "simplified": 4}
        names = [r.name for r in stats.rows]
        assert names == ["words_per_passage", "sentences_per_passage",
                         "sentence_length_words", "mean_word_length"]
        words_row = stats.rows[0]
        assert words_row.original_ci > 0
        assert words_row.original_mean > words_row.simplified_mean

    def test_identical_levels_give_t_zero_p_one(self, tmp_path):
        doc = {"articles": [{"article_id": "a", "paragraphs": [
            {"original": ["Alpha beta gamma delta.", "Epsilon zeta."],
             "simplified": ["Alpha beta gamma delta.", "Epsilon zeta."],
             "alignment": [[0, 0], [1, 1]]},
            {"original": ["One two three.", "Four five six seven."],
             "simplified": ["One two three.", "Four five six seven."],
             "alignment": [[0, 0], [1, 1]]},
        ]}]}
        path = tmp_path / "same.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        stats = corpus_stats(load_corpus(path))
        for row in stats.rows:
            assert row.t_statistic == pytest.approx(0.0, abs=1e-12)
            assert row.p_value == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_two_passage_counts(self, tmp_path):
        doc = {"articles": [{"article_id": "a", "paragraphs": [
            {"original": ["w1 w2 w3 w4 w5 w6 w7 w8 w9 w10."],
             "simplified": ["v1 v2 v3 v4 v5 v6 v7 v8 v9 v10."],
             "alignment": [[0, 0]]},
            {"original": ["u1 u2 u3 u4 u5 u6 u7 u8 u9 u10 u11 u12 u13 u14 u15 u16 u17 u18 u19 u20."],
             "simplified": ["t1 t2 t3 t4 t5 t6 t7 t8 t9 t10 t11 t12 t13 t14 t15 t16 t17 t18 t19 t20."],
             "alignment": [[0, 0]]},
        ]}]}
        path = tmp_path / "sym.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        stats = corpus_stats(load_corpus(path))
        words = stats.rows[0]
        assert words.original_mean == 15.0
        assert words.simplified_mean == 15.0
        assert words.t_statistic == pytest.approx(0.0, abs=1e-12)

    def test_missing_level_errors(self, corpus):
        broken = type(corpus)(units={k: u for k, u in corpus.units.items()
                                     if u.level == "original"},
                              pairs=[])
        with pytest.raises(CorpusError, match="missing"):
            corpus_stats(broken)
