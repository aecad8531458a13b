"""Run configuration: a TOML-like key/value + tables document, overridable by CLI flags.

Supported syntax: `key = value` lines, `[table]` and `[table.sub]` headers,
strings in single or double quotes, integers, floats, booleans, and flat
arrays. Comments start with '#'. This intentionally small dialect keeps runs
reproducible from one committed file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    """Unparseable config text or invalid run settings."""


def _parse_scalar(raw: str, where: str) -> Any:
    raw = raw.strip()
    if not raw:
        raise ConfigError(f"{where}: empty value")
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part, where) for part in _split_array(inner, where)]
    if raw[0] in "\"'":
        if len(raw) < 2 or raw[-1] != raw[0]:
            raise ConfigError(f"{where}: unterminated string {raw!r}")
        return raw[1:-1]
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse value {raw!r}") from None


def _split_array(inner: str, where: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    quote: str | None = None
    current = ""
    for ch in inner:
        if quote:
            current += ch
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
            current += ch
        elif ch == "[":
            depth += 1
            current += ch
        elif ch == "]":
            depth -= 1
            current += ch
        elif ch == "," and depth == 0:
            parts.append(current)
            current = ""
        else:
            current += ch
    if current.strip():
        parts.append(current)
    if quote:
        raise ConfigError(f"{where}: unterminated string in array")
    return parts


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    root: dict[str, Any] = {}
    table = root
    for lineno, line in enumerate(text.splitlines(), 1):
        where = f"{source}:{lineno}"
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            table = root
            for part in stripped[1:-1].strip().split("."):
                if not part:
                    raise ConfigError(f"{where}: empty table name")
                table = table.setdefault(part, {})
                if not isinstance(table, dict):
                    raise ConfigError(f"{where}: {part} already holds a value")
            continue
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected key = value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{where}: empty key")
        # strip trailing comments outside strings
        cleaned = ""
        quote = None
        for ch in value:
            if quote:
                cleaned += ch
                if ch == quote:
                    quote = None
            elif ch in "\"'":
                quote = ch
                cleaned += ch
            elif ch == "#":
                break
            else:
                cleaned += ch
        table[key] = _parse_scalar(cleaned, where)
    return root


@dataclass
class RunConfig:
    corpus: Path | None = None
    fixations: list[Path] = field(default_factory=list)
    word_measures: Path | None = None
    frequency_table: Path | None = None
    easy_words: Path | None = None
    score_files: dict[str, Path] = field(default_factory=dict)
    annotations: Path | None = None
    methods: list[str] = field(default_factory=list)
    measures: list[str] = field(default_factory=list)
    granularity: list[str] = field(default_factory=lambda: ["sentence", "passage"])
    group: str | None = None
    regime: str | None = None
    seed: int = 0
    resamples: int = 200
    pvalue_mode: str = "analytic"
    out: Path = Path("out")
    format: str = "text"
    registry_extra: list[dict] = field(default_factory=list)
    oov_floor: float = 1e-9
    annotator: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        doc = parse_config_text(Path(path).read_text(encoding="utf-8"), str(path))
        return cls.from_dict(doc, base=Path(path).parent)

    @classmethod
    def from_dict(cls, doc: dict[str, Any], base: Path = Path(".")) -> "RunConfig":
        cfg = cls()

        def as_path(v) -> Path:
            p = Path(str(v))
            return p if p.is_absolute() else base / p

        if "corpus" in doc:
            cfg.corpus = as_path(doc["corpus"])
        fix = doc.get("fixations", [])
        cfg.fixations = [as_path(p) for p in (fix if isinstance(fix, list) else [fix])]
        wm = doc.get("word_measures", {})
        if isinstance(wm, dict):
            if "file" in wm:
                cfg.word_measures = as_path(wm["file"])
            if "frequency_table" in wm:
                cfg.frequency_table = as_path(wm["frequency_table"])
            if "oov_floor" in wm:
                cfg.oov_floor = float(wm["oov_floor"])
        if "easy_words" in doc:
            cfg.easy_words = as_path(doc["easy_words"])
        for method, p in doc.get("scores", {}).items():
            cfg.score_files[method] = as_path(p)
        if "annotations" in doc:
            cfg.annotations = as_path(doc["annotations"])
        cfg.methods = list(doc.get("methods", []))
        cfg.measures = list(doc.get("measures", []))
        if "granularity" in doc:
            g = doc["granularity"]
            cfg.granularity = list(g) if isinstance(g, list) else [g]
        cfg.group = doc.get("group")
        cfg.regime = doc.get("regime")
        cfg.seed = int(doc.get("seed", 0))
        cfg.resamples = int(doc.get("resamples", 200))
        cfg.pvalue_mode = doc.get("pvalue", "analytic")
        if "out" in doc:
            cfg.out = as_path(doc["out"])
        cfg.format = doc.get("format", "text")
        cfg.annotator = dict(doc.get("annotator", {}))
        # [registry.<id>] sub-tables add or override method metadata
        for method_id, entry in doc.get("registry", {}).items():
            if not isinstance(entry, dict):
                raise ConfigError(f"registry.{method_id} must be a table")
            cfg.registry_extra.append({"id": method_id, **entry})
        cfg.validate()
        return cfg

    def validate(self):
        for g in self.granularity:
            if g not in ("sentence", "passage"):
                raise ConfigError(f"unknown granularity {g!r}")
        if self.format not in ("text", "csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.pvalue_mode not in ("analytic", "bootstrap"):
            raise ConfigError(f"unknown pvalue mode {self.pvalue_mode!r}")
        if self.resamples < 1:
            raise ConfigError("resamples must be positive")
        configured = [self.corpus, self.word_measures, self.frequency_table,
                      self.easy_words, self.annotations,
                      *self.fixations, *self.score_files.values()]
        for path in configured:
            if path is not None and not Path(path).exists():
                raise ConfigError(f"configured path does not exist: {path}")
