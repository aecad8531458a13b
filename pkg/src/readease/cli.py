"""Command-line interface.

Subcommands: stats, score, eye, eval, plot, annotate, ingest. Global flags
--config/--seed/--out/--format override config-file values. Exit codes:
0 ok, 1 data error, 2 config error. Every command is a pure function of
(config, input files, seed); reruns produce byte-identical outputs.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import click

from . import pipeline as pl
from . import stats as st
from . import svg as svg_mod
from .annotate import (DEFAULT_VARIANT, PROMPT_VARIANTS, AnnotationError,
                       AnnotatorClient, DecodingSettings, ProviderConfig,
                       export_annotations)
from .config import ConfigError, RunConfig
from .corpus import CorpusError, corpus_stats
from .eye_measures import MEASURES, FixationError
from .registry import RegistryError
from .stats import StatError
from .word_measures import MeasureError

log = logging.getLogger("readease")

DATA_ERRORS = (CorpusError, MeasureError, FixationError, StatError,
               AnnotationError, OSError, ValueError)


class DataError(click.ClickException):
    exit_code = 1

    def format_message(self):
        return f"data error: {self.message}"


class ConfigCliError(click.ClickException):
    exit_code = 2

    def format_message(self):
        return f"config error: {self.message}"


class Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError:
            raise
        except (ConfigError, RegistryError) as exc:
            raise ConfigCliError(str(exc)) from exc
        except DATA_ERRORS as exc:
            raise DataError(str(exc)) from exc


@click.group(cls=Cli)
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML-like run configuration file.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", type=click.Path(), default=None, help="Output directory.")
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]),
              default=None, help="Stdout format.")
@click.option("-v", "--verbose", is_flag=True, help="Log audit entries to stderr.")
@click.pass_context
def cli(ctx, config_path, seed, out, fmt, verbose):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.load(config_path) if config_path else RunConfig()
    except (FileNotFoundError, ConfigError) as exc:
        raise ConfigCliError(str(exc)) from exc
    if seed is not None:
        cfg.seed = seed
    if out is not None:
        cfg.out = Path(out)
    if fmt is not None:
        cfg.format = fmt
    ctx.obj = cfg


def _emit_table(cfg: RunConfig, header: list[str], rows: list[list], title: str = ""):
    if cfg.format == "json":
        click.echo(json.dumps([dict(zip(header, r)) for r in rows], indent=2,
                              sort_keys=True))
    elif cfg.format == "csv":
        click.echo(",".join(header))
        for r in rows:
            click.echo(",".join(str(c) for c in r))
    else:
        if title:
            click.echo(title)
        widths = [max(len(str(c)) for c in [h] + [r[i] for r in rows])
                  for i, h in enumerate(header)]
        click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for r in rows:
            click.echo("  ".join(str(c).ljust(w) for c, w in zip(r, widths)))


def _ensure_out(cfg: RunConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


@cli.command()
@click.pass_obj
def stats(cfg: RunConfig):
    """Descriptive corpus statistics per level with Welch t-tests."""
    run = pl.load_run(cfg)
    word_values = {}
    for name in ("word_frequency", "surprisal"):
        table = {}
        complete = True
        for unit in run.corpus.units_at("passage"):
            values = run.store.word_values(unit.unit_id, name)
            if values is None:
                complete = False
                break
            table[unit.unit_id] = dict(enumerate(values))
        if complete:
            word_values[name] = table
    result = corpus_stats(run.corpus, word_values, list(word_values))
    rows = [["passages", result.passage_count["original"],
             result.passage_count["simplified"], "", ""]]
    for row in result.rows:
        rows.append([row.name,
                     f"{row.original_mean:.4g} ± {row.original_ci:.2g}",
                     f"{row.simplified_mean:.4g} ± {row.simplified_ci:.2g}",
                     f"{row.t_statistic:.3f}",
                     f"{row.p_value:.3g}"])
    _emit_table(cfg, ["row", "original", "simplified", "t", "p"], rows,
                "corpus statistics")


@cli.command()
@click.option("--granularity", "granularities", multiple=True,
              type=click.Choice(["sentence", "passage"]))
@click.pass_obj
def score(cfg: RunConfig, granularities):
    """Per-unit scores for all requested methods (CSV on stdout or to --out)."""
    run = pl.load_run(cfg)
    gs = list(granularities) or cfg.granularity
    lines = ["unit_id,method,value"]
    for granularity in gs:
        methods = cfg.methods or pl.available_methods(run, granularity)
        for m in methods:
            run.registry.get(m)
        scores = pl.compute_scores(run, granularity, methods)
        for method in methods:
            for unit in sorted(run.corpus.units_at(granularity),
                               key=lambda u: u.unit_id):
                key = (unit.unit_id, method)
                if key in scores:
                    lines.append(f"{unit.unit_id},{method},{scores[key]!r}")
    text = "\n".join(lines) + "\n"
    out = _ensure_out(cfg) / "scores.csv"
    out.write_text(text, encoding="utf-8")
    if cfg.format != "text":
        click.echo(text, nl=False)
    else:
        click.echo(f"wrote {len(lines) - 1} scores to {out}")


@cli.command()
@click.pass_obj
def eye(cfg: RunConfig):
    """Reading-ease values per (unit, level, measure) from fixation reports."""
    run = pl.load_run(cfg, need_fixations=True)
    assert run.ease is not None
    lines = ["unit_id,granularity,level,measure,value,n_participants"]
    units = sorted(run.corpus.units.values(), key=lambda u: u.unit_id)
    for unit in units:
        for measure in MEASURES:
            v = run.ease.value(measure, unit.unit_id, unit.level,
                               cfg.group, cfg.regime)
            if v is not None:
                lines.append(f"{unit.unit_id},{unit.granularity},{unit.level},"
                             f"{measure},{v.value!r},{v.n_participants}")
    text = "\n".join(lines) + "\n"
    out = _ensure_out(cfg) / "reading_ease.csv"
    out.write_text(text, encoding="utf-8")
    if cfg.format != "text":
        click.echo(text, nl=False)
    else:
        click.echo(f"wrote {len(lines) - 1} reading-ease values to {out}")


@cli.command(name="eval")
@click.option("--groups", default="", help="Comma-separated reader groups to split (e.g. L1,L2).")
@click.option("--regimes", default="", help="Comma-separated regimes to split.")
@click.option("--uncontrolled", is_flag=True,
              help="Also correlate raw scores with raw ease over all units.")
@click.pass_obj
def eval_cmd(cfg: RunConfig, groups, regimes, uncontrolled):
    """Correlation records plus the pairwise Steiger grid, as JSON files."""
    run = pl.load_run(cfg, need_fixations=True)
    groups_list = [g for g in groups.split(",") if g]
    regimes_list = [r for r in regimes.split(",") if r]
    output = pl.run_evaluation(run, groups_list, regimes_list, uncontrolled)
    out = _ensure_out(cfg)
    results = {
        "seed": cfg.seed,
        "resamples": cfg.resamples,
        "pvalue_mode": cfg.pvalue_mode,
        "records": output.records,
        "group_comparisons": output.group_comparisons,
        "regime_comparisons": output.regime_comparisons,
        "audit": output.audit,
    }
    (out / "results.json").write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "steiger.json").write_text(
        json.dumps(output.steiger, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if cfg.format == "json":
        click.echo(json.dumps(results, indent=2, sort_keys=True))
    else:
        rows = [[r["method"], r["measure"], r["granularity"],
                 r["group"] or "-", r["regime"] or "-", r["estimand"],
                 f"{r['r']:.4f}", f"[{r['ci_low']:.3f}, {r['ci_high']:.3f}]",
                 r["tier"], r["n"]] for r in output.records]
        _emit_table(cfg, ["method", "measure", "gran", "group", "regime",
                          "estimand", "r", "ci95", "tier", "n"], rows,
                    f"evaluation results (seed {cfg.seed})")
        click.echo(f"wrote {out / 'results.json'} and {out / 'steiger.json'}")


@cli.command()
@click.option("--results", "results_path", type=click.Path(exists=True), required=True)
@click.option("--steiger", "steiger_path", type=click.Path(exists=True), default=None)
@click.option("--perplexity-points", "ppl_path", type=click.Path(exists=True),
              default=None,
              help="CSV model_id,log_perplexity,r for the perplexity scatter.")
@click.pass_obj
def plot(cfg: RunConfig, results_path, steiger_path, ppl_path):
    """SVG charts from eval output: bar panels, Steiger heatmaps, scatter."""
    out = _ensure_out(cfg)
    results = json.loads(Path(results_path).read_text(encoding="utf-8"))
    written = []
    by_panel: dict[tuple[str, str], list[dict]] = {}
    for rec in results["records"]:
        if rec["estimand"] != "delta" or rec.get("group") or rec.get("regime"):
            continue
        by_panel.setdefault((rec["measure"], rec["granularity"]), []).append(rec)
    for (measure, granularity), recs in sorted(by_panel.items()):
        res = [st.CorrelationResult(r["method"], r["measure"], r["granularity"],
                                    r["r"], r["rho"], r["ci_low"], r["ci_high"],
                                    r["p_value"], r["n"]) for r in recs]
        doc = svg_mod.bar_panel(res, f"{measure} / {granularity}")
        path = out / f"eval_{measure}_{granularity}.svg"
        path.write_text(doc, encoding="utf-8")
        written.append(path)
    if steiger_path:
        grids = json.loads(Path(steiger_path).read_text(encoding="utf-8"))
        for granularity, per_measure in sorted(grids.items()):
            for measure, grid in sorted(per_measure.items()):
                methods = grid["methods"]
                cells = {
                    (a, b): st.SteigerResult(
                        c["r_jk"], c["r_jh"], c["r_kh"], c["n"], c["z"], c["p_value"])
                    for key, c in grid["cells"].items()
                    for a, b in [tuple(key.split("|"))]
                }
                doc = svg_mod.steiger_heatmap(
                    methods, cells, f"pairwise comparisons: {measure} / {granularity}")
                path = out / f"steiger_{measure}_{granularity}.svg"
                path.write_text(doc, encoding="utf-8")
                written.append(path)
    if ppl_path:
        points = []
        for line in Path(ppl_path).read_text(encoding="utf-8").splitlines()[1:]:
            if not line.strip():
                continue
            model_id, x, r = line.split(",")
            points.append((float(x), float(r), model_id))
        slope, p = st.fit_r_vs_perplexity([(x, r) for x, r, _ in points])
        xs = [p_[0] for p_ in points]
        ys = [p_[1] for p_ in points]
        intercept = sum(ys) / len(ys) - slope * sum(xs) / len(xs)
        doc = svg_mod.scatter_panel(
            points, f"r vs log perplexity (slope {slope:.4g}, p {p:.2g})",
            "log perplexity", "r", fit=(slope, intercept))
        path = out / "r_vs_perplexity.svg"
        path.write_text(doc, encoding="utf-8")
        written.append(path)
    for path in written:
        click.echo(f"wrote {path}")


@cli.command()
@click.option("--model", "model_id", required=True)
@click.option("--variant", type=click.Choice(list(PROMPT_VARIANTS)),
              default=DEFAULT_VARIANT, show_default=True)
@click.option("--granularity", type=click.Choice(["sentence", "passage"]),
              default="passage", show_default=True)
@click.option("--provider", "provider_name", default=None,
              help="Provider name from the [annotator] config table.")
@click.option("--cache-dir", type=click.Path(), default=".annotation-cache",
              show_default=True)
@click.pass_obj
def annotate(cfg: RunConfig, model_id, variant, granularity, provider_name, cache_dir):
    """Collect LLM readability annotations and export them as a unit-score CSV."""
    run = pl.load_run(cfg)
    ann = cfg.annotator
    provider = ProviderConfig(
        name=provider_name or ann.get("name", "openai"),
        style=ann.get("style", "openai"),
        base_url=ann.get("base_url", "https://api.openai.com/v1"),
        api_key_env=ann.get("api_key_env", "OPENAI_API_KEY"),
        requests_per_second=float(ann.get("requests_per_second", 2.0)),
    )
    client = AnnotatorClient(provider, cache_dir,
                             DecodingSettings(),
                             max_retries=int(ann.get("retries", 2)),
                             concurrency=int(ann.get("concurrency", 4)))
    units = sorted(run.corpus.units_at(granularity), key=lambda u: u.unit_id)
    results = client.annotate(units, model_id, variant)
    out = _ensure_out(cfg) / f"annotations_{model_id}_{variant}.csv"
    skipped = export_annotations(results, out)
    hits = sum(1 for r in results if r.cached)
    click.echo(f"{len(results)} units annotated ({hits} cached, "
               f"{skipped} parse failures); wrote {out}")


@cli.command()
@click.pass_obj
def ingest(cfg: RunConfig):
    """Validate measure/score files against the corpus and run the
    completeness audit."""
    run = pl.load_run(cfg)
    units = sorted(run.corpus.units.values(), key=lambda u: u.unit_id)
    word_methods = [m for m in ("word_length", "word_frequency", "surprisal",
                                "entropy", "pll", "embedding_depth")
                    if any(run.store.word_values(u.unit_id, m) is not None
                           for u in units)]
    pair_units = [u for p in run.corpus.pairs for u in (p.original, p.simplified)]
    problems = run.store.audit(pair_units, word_methods)
    ingested = run.store.ingested_methods()
    click.echo(f"units: {len(units)}; pairs: {len(run.corpus.pairs)}")
    click.echo(f"word measures present: {', '.join(word_methods) or 'none'}")
    click.echo(f"ingested unit-score methods: {', '.join(ingested) or 'none'}")
    if problems:
        for p in problems[:20]:
            click.echo(f"AUDIT: {p}", err=True)
        raise MeasureError(f"completeness audit failed with {len(problems)} problems")
    click.echo("completeness audit: ok")


def main():
    cli()


if __name__ == "__main__":
    main()
