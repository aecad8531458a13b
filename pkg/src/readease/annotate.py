"""Readability annotations from chat-completion endpoints.

Four prompt variants ask for either a 1-100 readability score or a 1-12
school grade, each with or without extra scoring criteria. Requests are a
single user message; a thin adapter maps that shape onto each provider's
wire format. Responses are cached on disk keyed by a hash of everything that
affects the answer, parsed leniently for the first standalone integer, and
retried with a repair instruction on parse failure.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import httpx

from .corpus import TextUnit

TEXT_SLOT = "<Text>"

_SCORE_HEADER = (
    "Read the text below.\n\n"
    "Then, indicate the readability of the text, on a scale from 1 "
    "(very easy to read and understand) to 100 (very difficult to read "
    "and understand).\n\n"
)
_GRADE_HEADER = (
    "Read the text below.\n\n"
    "Then, indicate the readability level of the text by specifying the "
    "school grade level (1–12) for which the text would be most "
    "appropriate.\n\n"
)
_CRITERIA = (
    "To determine your score, consider factors such as the complexity of "
    "sentence structure, the complexity of discourse structure, the "
    "vocabulary used, and the overall clarity of the text.\n\n"
)
_SCORE_FOOTER = "Please answer with a single number in the range 1 to 100.\n\n" + TEXT_SLOT
_GRADE_FOOTER = "Please answer with a single number in the range 1 to 12.\n\n" + TEXT_SLOT

PROMPT_VARIANTS = ("score", "score_criteria", "grade", "grade_criteria")
DEFAULT_VARIANT = "grade_criteria"  # main-analysis default

_INTEGER = re.compile(r"(?<![\w.])-?\d+(?![\w.])")


class AnnotationError(ValueError):
    """Bad template, unparseable response, or transport/credential failure."""


@dataclass(frozen=True)
class PromptSpec:
    variant: str
    template: str
    output_range: tuple[int, int]

    def __post_init__(self):
        if self.template.count(TEXT_SLOT) != 1:
            raise AnnotationError(
                f"template for {self.variant} must contain exactly one {TEXT_SLOT} slot")


PROMPTS: dict[str, PromptSpec] = {
    "score": PromptSpec("score", _SCORE_HEADER + _SCORE_FOOTER, (1, 100)),
    "score_criteria": PromptSpec(
        "score_criteria", _SCORE_HEADER + _CRITERIA + _SCORE_FOOTER, (1, 100)),
    "grade": PromptSpec("grade", _GRADE_HEADER + _GRADE_FOOTER, (1, 12)),
    "grade_criteria": PromptSpec(
        "grade_criteria", _GRADE_HEADER + _CRITERIA + _GRADE_FOOTER, (1, 12)),
}


def render_prompt(variant: str, text: str) -> str:
    """Byte-exact instantiation of the stored template."""
    if not text:
        raise AnnotationError("empty text")
    spec = PROMPTS.get(variant)
    if spec is None:
        raise AnnotationError(f"unknown prompt variant {variant!r}")
    return spec.template.replace(TEXT_SLOT, text)


def parse_response(raw: str, output_range: tuple[int, int]) -> int:
    """First standalone integer in the response, validated against the range."""
    m = _INTEGER.search(raw)
    if m is None:
        raise AnnotationError(f"no integer in response {raw!r}")
    value = int(m.group())
    lo, hi = output_range
    if not lo <= value <= hi:
        raise AnnotationError(f"value {value} outside [{lo}, {hi}]")
    return value


@dataclass(frozen=True)
class AnnotationResult:
    unit_id: str
    model_id: str
    variant: str
    raw_response: str
    value: int | None
    attempts: int
    cached: bool


@dataclass
class ProviderConfig:
    name: str
    style: str  # "openai" | "anthropic"
    base_url: str
    api_key_env: str
    requests_per_second: float = 2.0


@dataclass
class DecodingSettings:
    temperature: float = 0.0
    max_tokens: int = 16

    def cache_repr(self) -> str:
        return json.dumps({"temperature": self.temperature,
                           "max_tokens": self.max_tokens}, sort_keys=True)


class TokenBucket:
    """Simple token bucket; acquire blocks until a slot is free."""

    def __init__(self, rate: float, capacity: float | None = None):
        self.rate = rate
        self.capacity = capacity if capacity is not None else max(1.0, rate)
        self._tokens = self.capacity
        self._last = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self):
        while True:
            with self._lock:
                now = time.monotonic()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            time.sleep(wait)


def cache_key(model_id: str, variant: str, template: str, text: str,
              settings: DecodingSettings) -> str:
    h = hashlib.sha256()
    for part in (model_id, variant, template, text, settings.cache_repr()):
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


class AnnotationCache:
    """One JSON file per key; writes are atomic (temp file + rename)."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, key: str, payload: dict):
        path = self._path(key)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)


def _build_request(provider: ProviderConfig, model_id: str, prompt: str,
                   settings: DecodingSettings, api_key: str) -> tuple[str, dict, dict]:
    if provider.style == "openai":
        url = provider.base_url.rstrip("/") + "/chat/completions"
        headers = {"Authorization": f"Bearer {api_key}"}
        body = {"model": model_id,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": settings.temperature,
                "max_tokens": settings.max_tokens}
    elif provider.style == "anthropic":
        url = provider.base_url.rstrip("/") + "/messages"
        headers = {"x-api-key": api_key, "anthropic-version": "2023-06-01"}
        body = {"model": model_id,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": settings.temperature,
                "max_tokens": settings.max_tokens}
    else:
        raise AnnotationError(f"unknown provider style {provider.style!r}")
    return url, headers, body


def _extract_text(provider: ProviderConfig, payload: dict) -> str:
    try:
        if provider.style == "openai":
            return payload["choices"][0]["message"]["content"]
        return payload["content"][0]["text"]
    except (KeyError, IndexError, TypeError) as exc:
        raise AnnotationError(f"malformed {provider.style} response: {payload}") from exc


REPAIR_INSTRUCTION = "\n\nPlease answer with a single number only."


class AnnotatorClient:
    """Annotate units against one provider with caching and rate control."""

    def __init__(self, provider: ProviderConfig, cache_dir: str | Path,
                 settings: DecodingSettings | None = None, max_retries: int = 2,
                 concurrency: int = 4,
                 transport: Callable[[str, dict, dict], dict] | None = None):
        self.provider = provider
        self.cache = AnnotationCache(cache_dir)
        self.settings = settings or DecodingSettings()
        self.max_retries = max_retries
        self.concurrency = concurrency
        self.bucket = TokenBucket(provider.requests_per_second)
        self._transport = transport  # test seam: (url, headers, body) -> payload dict

    def _call(self, url: str, headers: dict, body: dict) -> dict:
        if self._transport is not None:
            return self._transport(url, headers, body)
        resp = httpx.post(url, headers=headers, json=body, timeout=60.0)
        resp.raise_for_status()
        return resp.json()

    def _api_key(self) -> str:
        key = os.environ.get(self.provider.api_key_env, "")
        if not key:
            raise AnnotationError(
                f"missing credential: set {self.provider.api_key_env} for "
                f"provider {self.provider.name}")
        return key

    def annotate_unit(self, unit: TextUnit, model_id: str, variant: str) -> AnnotationResult:
        spec = PROMPTS[variant]
        text = unit.text
        key = cache_key(model_id, variant, spec.template, text, self.settings)
        hit = self.cache.get(key)
        if hit is not None:
            return AnnotationResult(unit.unit_id, model_id, variant,
                                    hit["raw_response"], hit["value"],
                                    hit["attempts"], cached=True)
        api_key = self._api_key()
        prompt = render_prompt(variant, text)
        raw = ""
        value: int | None = None
        attempts = 0
        for attempt in range(1 + self.max_retries):
            attempts = attempt + 1
            url, headers, body = _build_request(
                self.provider, model_id,
                prompt if attempt == 0 else prompt + REPAIR_INSTRUCTION,
                self.settings, api_key)
            self.bucket.acquire()
            payload = self._call(url, headers, body)
            raw = _extract_text(self.provider, payload)
            try:
                value = parse_response(raw, spec.output_range)
                break
            except AnnotationError:
                value = None
        self.cache.put(key, {"unit_id": unit.unit_id, "model_id": model_id,
                             "variant": variant, "raw_response": raw,
                             "value": value, "attempts": attempts})
        return AnnotationResult(unit.unit_id, model_id, variant, raw, value,
                                attempts, cached=False)

    def annotate(self, units: Sequence[TextUnit], model_id: str,
                 variant: str = DEFAULT_VARIANT) -> list[AnnotationResult]:
        if variant not in PROMPTS:
            raise AnnotationError(f"unknown prompt variant {variant!r}")
        with ThreadPoolExecutor(max_workers=self.concurrency) as pool:
            results = list(pool.map(
                lambda u: self.annotate_unit(u, model_id, variant), units))
        return results


def export_annotations(results: Iterable[AnnotationResult], path: str | Path):
    """CSV export: unit_id, model_id, variant, value (parse failures skipped)."""
    lines = ["unit_id,model_id,variant,value"]
    skipped = 0
    for r in sorted(results, key=lambda r: (r.model_id, r.variant, r.unit_id)):
        if r.value is None:
            skipped += 1
            continue
        lines.append(f"{r.unit_id},{r.model_id},{r.variant},{r.value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return skipped
