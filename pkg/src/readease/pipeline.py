"""Orchestration: wire corpus, scores, ease values and statistics into result sets.

Evaluation cells are enumerated in a canonical order (granularity, then
measure, then registry-chronological method, then group/regime splits); each
cell's bootstrap stream is seeded by (seed, cell index), so a rerun with the
same config is bit-identical regardless of parallel scheduling.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import stats as st
from .config import RunConfig
from .corpus import Corpus, CorpusError, load_corpus
from .eye_measures import MEASURES, EaseTable, Trial, ingest_fixations
from .formulas import FORMULA_METHODS, compute_formula, load_easy_words
from .registry import MethodRegistry
from .word_measures import WORD_MEASURES, FrequencyTable, MeasureStore

log = logging.getLogger(__name__)

DEFAULT_MEASURES = ("TF", "SR", "RR")


@dataclass
class LoadedRun:
    config: RunConfig
    corpus: Corpus
    registry: MethodRegistry
    store: MeasureStore
    ease: EaseTable | None
    annotation_methods: dict[str, dict[str, float]] = field(default_factory=dict)


def load_run(config: RunConfig, need_fixations: bool = False) -> LoadedRun:
    if config.corpus is None:
        raise CorpusError("no corpus path configured")
    corpus = load_corpus(config.corpus)
    registry = MethodRegistry.default().extend(config.registry_extra)

    store = MeasureStore(corpus)
    table = None
    if config.frequency_table is not None:
        table = FrequencyTable.load(config.frequency_table, oov_floor=config.oov_floor)
    store.compute_native(table)
    if config.word_measures is not None:
        store.ingest_word_measures(config.word_measures)
    for method, path in sorted(config.score_files.items()):
        if method not in registry:
            registry = registry.extend([{"id": method, "kind": "external"}])
        store.ingest_unit_scores(path, method)

    annotation_methods: dict[str, dict[str, float]] = {}
    if config.annotations is not None:
        annotation_methods = _load_annotations(config.annotations, corpus)
        for model_id in annotation_methods:
            if model_id not in registry:
                registry = registry.extend([{"id": model_id, "kind": "llm"}])
    store.seal()

    ease = None
    if config.fixations:
        word_counts = {uid: u.word_count for uid, u in corpus.units.items()}
        trials: list[Trial] = []
        for path in config.fixations:
            trials.extend(ingest_fixations(path, word_counts))
        ease = EaseTable(trials)
    elif need_fixations:
        raise CorpusError("no fixation files configured")
    return LoadedRun(config, corpus, registry, store, ease, annotation_methods)


def _load_annotations(path: Path, corpus: Corpus) -> dict[str, dict[str, float]]:
    """Annotation export CSV -> {model_id: {unit_id: value}} (main variant only
    when several variants are present: grade_criteria wins, else the first)."""
    rows: dict[str, dict[str, dict[str, float]]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row["unit_id"] not in corpus.units:
                raise CorpusError(f"{path}: unknown unit_id {row['unit_id']}")
            rows.setdefault(row["model_id"], {}).setdefault(
                row["variant"], {})[row["unit_id"]] = float(row["value"])
    out: dict[str, dict[str, float]] = {}
    for model_id, variants in rows.items():
        variant = "grade_criteria" if "grade_criteria" in variants else sorted(variants)[0]
        out[model_id] = variants[variant]
    return out


def compute_scores(run: LoadedRun, granularity: str,
                   methods: Sequence[str]) -> dict[tuple[str, str], float]:
    """Per-(unit, method) scores for one granularity, direction-normalized by
    the registry sign."""
    units = sorted(run.corpus.units_at(granularity), key=lambda u: u.unit_id)
    easy = load_easy_words(run.config.easy_words) if "dale_chall" in methods else None
    scores: dict[tuple[str, str], float] = {}
    for method in methods:
        meta = run.registry.get(method)
        for unit in units:
            if method in FORMULA_METHODS:
                value = compute_formula(method, unit, easy).value
            elif method in WORD_MEASURES:
                if run.store.word_values(unit.unit_id, method) is None:
                    continue
                value = run.store.aggregate_unit(method, unit).value
            elif method in run.annotation_methods:
                raw = run.annotation_methods[method].get(unit.unit_id)
                if raw is None:
                    continue
                value = raw
            else:
                score = run.store.unit_score(unit.unit_id, method)
                if score is None:
                    continue
                value = score.value
            scores[(unit.unit_id, method)] = meta.sign * value
    return scores


def available_methods(run: LoadedRun, granularity: str) -> list[str]:
    """Registry-ordered methods with complete coverage over the granularity's
    paired units."""
    pair_units = [u for p in run.corpus.pairs_at(granularity)
                  for u in (p.original, p.simplified)]
    out = []
    for method in run.registry.chronological_ids():
        if method in FORMULA_METHODS:
            out.append(method)
        elif method in WORD_MEASURES:
            if all(run.store.word_values(u.unit_id, method) is not None
                   for u in pair_units):
                out.append(method)
        elif method in run.annotation_methods:
            if all(u.unit_id in run.annotation_methods[method] for u in pair_units):
                out.append(method)
        elif all(run.store.unit_score(u.unit_id, method) is not None
                 for u in pair_units):
            out.append(method)
    return out


def ease_map(run: LoadedRun, granularity: str, measures: Sequence[str],
             group: str | None = None,
             regime: str | None = None) -> dict[tuple[str, str], float]:
    assert run.ease is not None
    out: dict[tuple[str, str], float] = {}
    for unit in run.corpus.units_at(granularity):
        for measure in measures:
            value = run.ease.value(measure, unit.unit_id, unit.level, group, regime)
            if value is not None:
                out[(unit.unit_id, measure)] = value.value
    return out


@dataclass
class EvalOutput:
    records: list[dict]
    steiger: dict
    group_comparisons: list[dict]
    regime_comparisons: list[dict]
    audit: dict


def _record(res: st.CorrelationResult, group, regime, estimand, seed) -> dict:
    return {
        "method": res.method, "measure": res.measure, "granularity": res.granularity,
        "group": group, "regime": regime, "estimand": estimand,
        "r": res.r, "rho": res.rho, "ci_low": res.ci_low, "ci_high": res.ci_high,
        "p_value": res.p_value, "tier": st.significance_tier(res.p_value),
        "n": res.n, "seed": seed,
    }


def run_evaluation(run: LoadedRun, groups: Sequence[str] = (),
                   regimes: Sequence[str] = (), uncontrolled: bool = False) -> EvalOutput:
    """The full result set: per method x measure x granularity correlation
    records with bootstrap CIs, the pairwise Steiger grid, and optional
    group/regime splits and the uncontrolled variant."""
    if run.ease is None:
        raise CorpusError("evaluation needs fixation data")
    cfg = run.config
    measures = list(cfg.measures) if cfg.measures else list(DEFAULT_MEASURES)
    for m in measures:
        if m not in MEASURES:
            raise CorpusError(f"unknown reading-ease measure {m!r}")
    records: list[dict] = []
    steiger_grids: dict = {}
    group_comparisons: list[dict] = []
    regime_comparisons: list[dict] = []
    audit: dict = {"dropped_pairs": {}, "methods": {}}
    task = 0

    for granularity in cfg.granularity:
        methods = list(cfg.methods) if cfg.methods else available_methods(run, granularity)
        for m in methods:
            run.registry.get(m)  # unknown ids fail before any computation
        _audit_completeness(run, granularity, methods)
        audit["methods"][granularity] = methods
        scores = compute_scores(run, granularity, methods)
        pairs = run.corpus.pairs_at(granularity)

        filters: list[tuple[str | None, str | None]] = [(cfg.group, cfg.regime)]
        filters += [(g, cfg.regime) for g in groups]
        filters += [(cfg.group, r) for r in regimes]

        deltas_by_filter: dict[tuple[str | None, str | None], list[st.DeltaRecord]] = {}
        for group, regime in filters:
            ease = ease_map(run, granularity, measures, group, regime)
            deltas = st.compute_deltas(scores, ease, pairs, methods, measures)
            if not deltas:
                raise CorpusError(
                    f"no usable pairs at {granularity} (group={group}, regime={regime})")
            deltas_by_filter[(group, regime)] = deltas
            audit["dropped_pairs"][f"{granularity}/{group}/{regime}"] = \
                len(pairs) - len(deltas)
            for measure in measures:
                for method in methods:
                    res = st.evaluate_pair_set(
                        deltas, method, measure, granularity,
                        resamples=cfg.resamples, seed=cfg.seed, task_index=task,
                        pvalue_mode=cfg.pvalue_mode)
                    task += 1
                    records.append(_record(res, group, regime, "delta", cfg.seed))

        base = deltas_by_filter[(cfg.group, cfg.regime)]
        grid_for_g: dict = {}
        for measure in measures:
            cells: dict[str, dict] = {}
            for ma in methods:
                for mb in methods:
                    if ma == mb:
                        continue
                    ease_v = [d.ease[measure] for d in base]
                    a_v = [d.scores[ma] for d in base]
                    b_v = [d.scores[mb] for d in base]
                    res = st.compare_methods(ease_v, a_v, b_v)
                    cells[f"{ma}|{mb}"] = {
                        "z": res.z, "p_value": res.p_value, "r_jk": res.r_jk,
                        "r_jh": res.r_jh, "r_kh": res.r_kh, "n": res.n,
                    }
            grid_for_g[measure] = {"methods": methods, "cells": cells}
        steiger_grids[granularity] = grid_for_g

        if groups:
            group_comparisons += _split_comparisons(
                deltas_by_filter, [(g, cfg.regime) for g in groups], "group",
                methods, measures, granularity)
        if regimes:
            regime_comparisons += _split_comparisons(
                deltas_by_filter, [(cfg.group, r) for r in regimes], "regime",
                methods, measures, granularity)

        if uncontrolled:
            unit_ids = sorted(
                {u.unit_id for p in pairs for u in (p.original, p.simplified)})
            ease = ease_map(run, granularity, measures, cfg.group, cfg.regime)
            for measure in measures:
                for method in methods:
                    res = st.evaluate_uncontrolled(
                        scores, ease, unit_ids, method, measure, granularity,
                        resamples=cfg.resamples, seed=cfg.seed, task_index=task)
                    task += 1
                    records.append(
                        _record(res, cfg.group, cfg.regime, "uncontrolled", cfg.seed))

    return EvalOutput(records, steiger_grids, group_comparisons,
                      regime_comparisons, audit)


def _split_comparisons(deltas_by_filter, split_filters, kind, methods, measures,
                       granularity) -> list[dict]:
    if len(split_filters) != 2:
        raise CorpusError(f"{kind} comparison needs exactly two {kind}s")
    (fa, fb) = split_filters
    da = {d.pair_id: d for d in deltas_by_filter[fa]}
    db = {d.pair_id: d for d in deltas_by_filter[fb]}
    shared = sorted(set(da) & set(db))
    if not shared:
        raise st.StatError("non-overlapping pairs between the two splits")
    out = []
    for measure in measures:
        for method in methods:
            score = [da[p].scores[method] for p in shared]
            ease_a = [da[p].ease[measure] for p in shared]
            ease_b = [db[p].ease[measure] for p in shared]
            res = st.compare_groups(score, ease_a, ease_b)
            out.append({
                "kind": kind, "a": fa[0] if kind == "group" else fa[1],
                "b": fb[0] if kind == "group" else fb[1],
                "method": method, "measure": measure, "granularity": granularity,
                "z": res.z, "p_value": res.p_value,
                "tier": st.significance_tier(res.p_value), "n": res.n,
            })
    return out


def _audit_completeness(run: LoadedRun, granularity: str, methods: Sequence[str]):
    """Refuse to evaluate when per-word coverage is incomplete for a requested
    word measure."""
    word_methods = [m for m in methods if m in WORD_MEASURES]
    if not word_methods:
        return
    pair_units = [u for p in run.corpus.pairs_at(granularity)
                  for u in (p.original, p.simplified)]
    problems = run.store.audit(pair_units, word_methods)
    if problems:
        preview = "; ".join(problems[:5])
        raise CorpusError(
            f"measure completeness audit failed ({len(problems)} problems): {preview}")
