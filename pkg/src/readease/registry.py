"""Closed registry of scoring methods, extended via config.

Chronology (publication year) drives report and chart ordering. `sign`
records the direction convention: -1 marks ease-increasing values (only PLL
among the built-ins) so the evaluation can normalize psycholinguistic
measures to higher-is-harder; traditional formulas keep their native
direction and report signed correlations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

from .word_measures import WORD_MEASURES

FORMULA_KIND = "formula"


class RegistryError(ValueError):
    """Unknown method identifier or malformed registry entry."""


@dataclass(frozen=True)
class Method:
    id: str
    label: str
    year: int | None
    kind: str  # formula | psycholinguistic | llm | external
    sign: int = 1


class MethodRegistry:
    def __init__(self, methods: Iterable[Method]):
        self._methods: dict[str, Method] = {}
        for m in methods:
            if m.id in self._methods:
                raise RegistryError(f"duplicate method id {m.id}")
            if m.kind not in ("formula", "psycholinguistic", "llm", "external"):
                raise RegistryError(f"method {m.id}: unknown kind {m.kind!r}")
            self._methods[m.id] = m

    @classmethod
    def default(cls) -> "MethodRegistry":
        raw = json.loads(
            resources.files("readease").joinpath("data/methods.json").read_text("utf-8"))
        return cls(Method(**entry) for entry in raw["methods"])

    def extend(self, entries: Iterable[dict]) -> "MethodRegistry":
        merged = dict(self._methods)
        for entry in entries:
            m = Method(id=entry["id"], label=entry.get("label", entry["id"]),
                       year=entry.get("year"), kind=entry.get("kind", "external"),
                       sign=int(entry.get("sign", 1)))
            merged[m.id] = m
        return MethodRegistry(merged.values())

    def get(self, method_id: str) -> Method:
        m = self._methods.get(method_id)
        if m is None:
            raise RegistryError(
                f"unknown method {method_id!r}; registry has: "
                + ", ".join(self.chronological_ids()))
        return m

    def __contains__(self, method_id: str) -> bool:
        return method_id in self._methods

    def chronological(self) -> list[Method]:
        return sorted(self._methods.values(),
                      key=lambda m: (m.year is None, m.year or 0, m.id))

    def chronological_ids(self) -> list[str]:
        return [m.id for m in self.chronological()]

    def word_measure_ids(self) -> list[str]:
        return [m.id for m in self.chronological() if m.id in WORD_MEASURES]
