import pytest

from readease.annotate import (PROMPTS, AnnotationError, AnnotatorClient,
                               DecodingSettings, ProviderConfig, cache_key,
                               export_annotations, parse_response,
                               render_prompt)
from readease.corpus import TextUnit, tokenize


def unit(text, unit_id="u1"):
    return TextUnit(unit_id, "sentence", "original", "a",
                    tuple(tokenize(text)), 1)


class TestPrompts:
    def test_grade_prompt_contents(self):
        prompt = render_prompt("grade", "The cat sat.")
        assert prompt.startswith("Read the text below.")
        assert "range 1 to 12" in prompt
        assert prompt.endswith("The cat sat.")
        assert "school grade level" in prompt

    def test_score_criteria_prompt_contents(self):
        prompt = render_prompt("score_criteria", "t")
        assert "complexity of sentence structure" in prompt
        assert "range 1 to 100" in prompt

    def test_variant_ranges(self):
        assert PROMPTS["score"].output_range == (1, 100)
        assert PROMPTS["score_criteria"].output_range == (1, 100)
        assert PROMPTS["grade"].output_range == (1, 12)
        assert PROMPTS["grade_criteria"].output_range == (1, 12)

    def test_exactly_one_slot(self):
        for spec in PROMPTS.values():
            assert spec.template.count("<Text>") == 1

    def test_empty_text_rejected(self):
        with pytest.raises(AnnotationError, match="empty"):
            render_prompt("grade", "")

    def test_two_slot_template_rejected(self):
        from readease.annotate import PromptSpec
        with pytest.raises(AnnotationError, match="exactly one"):
            PromptSpec("bad", "<Text> and <Text>", (1, 12))


class TestParseResponse:
    def test_bare_integer(self):
        assert parse_response("7", (1, 12)) == 7

    def test_labeled_integer(self):
        assert parse_response("Grade: 7\n", (1, 12)) == 7

    def test_words_rejected(self):
        with pytest.raises(AnnotationError, match="no integer"):
            parse_response("thirteen", (1, 12))

    def test_out_of_range(self):
        with pytest.raises(AnnotationError, match="outside"):
            parse_response("13", (1, 12))

    def test_decimal_not_misread(self):
        with pytest.raises(AnnotationError):
            parse_response("7.5", (1, 12))


def stub_transport(answers):
    """Returns an openai-shaped payload per call; records request bodies."""
    calls = []

    def transport(url, headers, body):
        calls.append((url, body))
        answer = answers[min(len(calls) - 1, len(answers) - 1)]
        return {"choices": [{"message": {"content": answer}}]}

    transport.calls = calls
    return transport


def make_client(tmp_path, answers, retries=2):
    provider = ProviderConfig("test", "openai", "https://example.invalid/v1",
                              "TEST_API_KEY", requests_per_second=10_000)
    return AnnotatorClient(provider, tmp_path / "cache", DecodingSettings(),
                           max_retries=retries, concurrency=2,
                           transport=stub_transport(answers))


class TestClient:
    def test_simple_annotation(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "k")
        client = make_client(tmp_path, ["5"])
        (result,) = client.annotate([unit("Easy words here.")], "m1", "grade")
        assert result.value == 5
        assert result.attempts == 1
        assert not result.cached

    def test_cache_short_circuits_network(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "k")
        client = make_client(tmp_path, ["5"])
        units = [unit(f"Sentence number {i}.", f"u{i}") for i in range(8)]
        first = client.annotate(units, "m1", "grade")
        calls_after_first = len(client._transport.calls)
        again = client.annotate(units, "m1", "grade")
        assert len(client._transport.calls) == calls_after_first
        assert all(r.cached for r in again)
        assert [r.value for r in again] == [r.value for r in first]

    def test_cached_results_need_no_credentials(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "k")
        client = make_client(tmp_path, ["9"])
        client.annotate([unit("Text body.")], "m1", "grade")
        monkeypatch.delenv("TEST_API_KEY")
        (result,) = client.annotate([unit("Text body.")], "m1", "grade")
        assert result.cached
        assert result.value == 9

    def test_missing_credentials_error(self, tmp_path, monkeypatch):
        monkeypatch.delenv("TEST_API_KEY", raising=False)
        client = make_client(tmp_path, ["5"])
        with pytest.raises(AnnotationError, match="TEST_API_KEY"):
            client.annotate([unit("Text.")], "m1", "grade")

    def test_retry_with_repair_then_success(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "k")
        client = make_client(tmp_path, ["hard to say", "8"])
        (result,) = client.annotate([unit("Some text.")], "m1", "grade")
        assert result.value == 8
        assert result.attempts == 2
        second_body = client._transport.calls[1][1]
        assert "single number only" in second_body["messages"][0]["content"]

    def test_persistent_failure_recorded_as_missing(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "k")
        client = make_client(tmp_path, ["nope", "still nope", "never"], retries=2)
        (result,) = client.annotate([unit("Some text.")], "m1", "grade")
        assert result.value is None
        assert result.attempts == 3
        assert len(client._transport.calls) == 3  # <= units * (1 + retries)

    def test_never_out_of_range(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "k")
        client = make_client(tmp_path, ["55", "11"])
        (result,) = client.annotate([unit("Some text.")], "m1", "grade")
        assert result.value == 11  # 55 rejected by the grade range, retry accepted

    def test_deterministic_against_stub(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "k")
        units = [unit(f"Sentence {i} body.", f"u{i}") for i in range(5)]
        a = make_client(tmp_path / "a", ["4"]).annotate(units, "m1", "grade")
        b = make_client(tmp_path / "b", ["4"]).annotate(units, "m1", "grade")
        assert [(r.unit_id, r.value, r.attempts) for r in a] == \
               [(r.unit_id, r.value, r.attempts) for r in b]


class TestCacheKey:
    def test_any_component_change_misses(self):
        base = cache_key("m", "grade", "T <Text>", "body", DecodingSettings())
        assert cache_key("m2", "grade", "T <Text>", "body", DecodingSettings()) != base
        assert cache_key("m", "score", "T <Text>", "body", DecodingSettings()) != base
        assert cache_key("m", "grade", "U <Text>", "body", DecodingSettings()) != base
        assert cache_key("m", "grade", "T <Text>", "other", DecodingSettings()) != base
        assert cache_key("m", "grade", "T <Text>", "body",
                         DecodingSettings(temperature=0.7)) != base


class TestExport:
    def test_csv_shape_and_failure_skip(self, tmp_path):
        from readease.annotate import AnnotationResult
        results = [
            AnnotationResult("u2", "m", "grade", "7", 7, 1, False),
            AnnotationResult("u1", "m", "grade", "junk", None, 3, False),
            AnnotationResult("u3", "m", "grade", "4", 4, 1, True),
        ]
        out = tmp_path / "ann.csv"
        skipped = export_annotations(results, out)
        assert skipped == 1
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "unit_id,model_id,variant,value"
        assert lines[1:] == ["u2,m,grade,7", "u3,m,grade,4"]
