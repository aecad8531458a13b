"""Content-controlled evaluation statistics.

The evaluation of a scoring method against a reading-ease measure is the
Pearson correlation, over parallel text pairs, between the per-pair score
delta (original minus simplified) and the corresponding reading-ease delta.
Confidence intervals come from a percentile bootstrap over text pairs;
dependent correlations sharing a variable are compared with Steiger's
two-sided Z test; p-values for single correlations use the analytic t
transform by default (a bootstrap variant sits behind a flag).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .corpus import ParallelPair

log = logging.getLogger(__name__)

SIGNIFICANCE_TIERS = ((0.001, "p<0.001"), (0.01, "p<0.01"), (0.05, "p<0.05"))


class StatError(ValueError):
    """Degenerate inputs: zero variance, length mismatch, or |r|=1 transforms."""


def significance_tier(p: float) -> str:
    for threshold, label in SIGNIFICANCE_TIERS:
        if p < threshold:
            return label
    return "ns"


@dataclass
class DeltaRecord:
    pair_id: str
    scores: dict[str, float]  # method -> original minus simplified
    ease: dict[str, float]  # measure -> original minus simplified


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    measure: str
    granularity: str
    r: float
    rho: float
    ci_low: float
    ci_high: float
    p_value: float
    n: int


@dataclass(frozen=True)
class SteigerResult:
    r_jk: float
    r_jh: float
    r_kh: float
    n: int
    z: float
    p_value: float


def compute_deltas(scores: Mapping[tuple[str, str], float],
                   ease: Mapping[tuple[str, str], float],
                   pairs: Sequence[ParallelPair],
                   methods: Sequence[str],
                   measures: Sequence[str]) -> list[DeltaRecord]:
    """Original-minus-simplified deltas per pair; incomplete pairs are dropped
    with an audit log entry, never silently."""
    records: list[DeltaRecord] = []
    for pair in pairs:
        missing: list[str] = []
        ds: dict[str, float] = {}
        de: dict[str, float] = {}
        for method in methods:
            o = scores.get((pair.original.unit_id, method))
            s = scores.get((pair.simplified.unit_id, method))
            if o is None or s is None:
                missing.append(f"score:{method}")
            else:
                ds[method] = o - s
        for measure in measures:
            o = ease.get((pair.original.unit_id, measure))
            s = ease.get((pair.simplified.unit_id, measure))
            if o is None or s is None:
                missing.append(f"ease:{measure}")
            else:
                de[measure] = o - s
        if missing:
            log.warning("dropping pair %s: missing %s", pair.pair_id, ", ".join(missing))
            continue
        records.append(DeltaRecord(pair.pair_id, ds, de))
    return records


def _as_vectors(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise StatError("x and y must be equal-length vectors")
    if len(xv) < 3:
        raise StatError(f"need >=3 observations, got {len(xv)}")
    return xv, yv


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    xv, yv = _as_vectors(x, y)
    xd = xv - xv.mean()
    yd = yv - yv.mean()
    denom = math.sqrt(float(xd @ xd) * float(yd @ yd))
    if denom == 0.0:
        raise StatError("undefined correlation: zero variance")
    return float(xd @ yd) / denom


def _average_ranks(v: np.ndarray) -> np.ndarray:
    return _scipy_stats.rankdata(v, method="average")


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    xv, yv = _as_vectors(x, y)
    return pearson(_average_ranks(xv), _average_ranks(yv))


def correlation_pvalue(r: float, n: int) -> float:
    """Two-sided p from t = r*sqrt((n-2)/(1-r^2)) with n-2 degrees of freedom."""
    if n < 3:
        raise StatError("p-value needs n >= 3")
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * _scipy_stats.t.sf(abs(t), n - 2))


def bootstrap_correlations(x: Sequence[float], y: Sequence[float],
                           resamples: int, rng: np.random.Generator) -> np.ndarray:
    """Pearson r over `resamples` pair-resampled datasets.

    Degenerate draws (zero variance on either side) are redrawn, max 10
    attempts per slot; more than 50% degenerate draws overall is an error.
    """
    xv, yv = _as_vectors(x, y)
    n = len(xv)
    out = np.empty(resamples)
    degenerate = 0
    for i in range(resamples):
        for attempt in range(10):
            idx = rng.integers(0, n, size=n)
            xs, ys = xv[idx], yv[idx]
            if np.ptp(xs) == 0 or np.ptp(ys) == 0:
                degenerate += 1
                if degenerate > resamples / 2:
                    raise StatError("more than 50% of bootstrap resamples degenerate")
                continue
            out[i] = pearson(xs, ys)
            break
        else:
            raise StatError(f"bootstrap resample {i} degenerate after 10 redraws")
    return out


def bootstrap_ci(x: Sequence[float], y: Sequence[float], resamples: int = 200,
                 level: float = 0.95, seed: int | Sequence[int] = 0) -> tuple[float, float]:
    """Percentile bootstrap CI for the Pearson correlation, deterministic per
    seed; endpoints are median-unbiased sample quantiles, which calibrate
    better than linear interpolation at small resample counts."""
    rng = np.random.default_rng(seed)
    rs = bootstrap_correlations(x, y, resamples, rng)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(rs, [alpha, 1.0 - alpha], method="median_unbiased")
    return float(lo), float(hi)


def bootstrap_ci_for(records: Sequence[DeltaRecord], method: str, measure: str,
                     resamples: int = 200, level: float = 0.95,
                     seed: int | Sequence[int] = 0) -> tuple[float, float]:
    x = [rec.scores[method] for rec in records]
    y = [rec.ease[measure] for rec in records]
    return bootstrap_ci(x, y, resamples, level, seed)


def bootstrap_pvalue(rs: np.ndarray) -> float:
    """Sign-crossing two-sided p from a bootstrap correlation distribution."""
    b = len(rs)
    frac_le = float(np.mean(rs <= 0.0))
    frac_ge = float(np.mean(rs >= 0.0))
    return min(1.0, max(2.0 * min(frac_le, frac_ge), 1.0 / b))


def steiger_test(r_jk: float, r_jh: float, r_kh: float, n: int) -> SteigerResult:
    """Two-sided test for the difference of two dependent overlapping
    correlations (shared variable j), via Fisher transforms and the
    Dunn-Clark covariance with mean-r pooling."""
    for name, r in (("r_jk", r_jk), ("r_jh", r_jh), ("r_kh", r_kh)):
        if abs(r) > 1:
            raise StatError(f"{name}={r} outside [-1,1]")
    if abs(r_jk) == 1.0 or abs(r_jh) == 1.0:
        raise StatError("|r|=1 has an infinite Fisher transform")
    if n < 4:
        raise StatError("steiger test needs n >= 4")
    z_jk = math.atanh(r_jk)
    z_jh = math.atanh(r_jh)
    if z_jk == z_jh:
        return SteigerResult(r_jk, r_jh, r_kh, n, 0.0, 1.0)
    r_bar = (r_jk + r_jh) / 2.0
    c = ((r_kh * (1 - 2 * r_bar ** 2)
          - 0.5 * r_bar ** 2 * (1 - 2 * r_bar ** 2 - r_kh ** 2))
         / (1 - r_bar ** 2) ** 2)
    denom = 2.0 - 2.0 * c
    if denom <= 0:
        raise StatError("degenerate comparison: the two correlations are "
                        "deterministically linked (c >= 1)")
    z = (z_jk - z_jh) * math.sqrt(n - 3) / math.sqrt(denom)
    p = float(2.0 * _scipy_stats.norm.sf(abs(z)))
    return SteigerResult(r_jk, r_jh, r_kh, n, z, p)


def compare_methods(ease: Sequence[float], score_a: Sequence[float],
                    score_b: Sequence[float]) -> SteigerResult:
    """Does method B's delta correlate with the ease delta more than method A's?

    Shared variable j = the ease delta; k = method B, h = method A, so a
    positive Z favours B. Swapping A and B flips the sign of Z only.
    """
    if not (len(ease) == len(score_a) == len(score_b)):
        raise StatError("method comparison needs aligned vectors of one pair set")
    r_jh = pearson(ease, score_a)
    r_jk = pearson(ease, score_b)
    r_kh = pearson(score_b, score_a)
    return steiger_test(r_jk, r_jh, r_kh, len(ease))


def compare_correlation_results(eval_a: CorrelationResult, eval_b: CorrelationResult,
                                score_intercorrelation: float) -> SteigerResult:
    """Steiger comparison of two already-evaluated methods sharing the same
    ease deltas; `score_intercorrelation` is the Pearson r between the two
    methods' score deltas over the same pairs."""
    if eval_a.n != eval_b.n:
        raise StatError(f"n mismatch: {eval_a.n} vs {eval_b.n}")
    return steiger_test(eval_b.r, eval_a.r, score_intercorrelation, eval_a.n)


def compare_groups(score: Sequence[float], ease_a: Sequence[float],
                   ease_b: Sequence[float]) -> SteigerResult:
    """Same method, two reader groups (or regimes) on the same pairs:
    j = the score delta, k/h = the groups' ease deltas."""
    if not (len(score) == len(ease_a) == len(ease_b)):
        raise StatError("non-overlapping pairs: group vectors must align")
    r_jh = pearson(score, ease_a)
    r_jk = pearson(score, ease_b)
    r_kh = pearson(ease_b, ease_a)
    return steiger_test(r_jk, r_jh, r_kh, len(score))


def welch_ttest(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Welch unequal-variance two-sided t-test."""
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    if len(av) < 2 or len(bv) < 2:
        raise StatError("welch test needs >=2 observations per sample")
    if np.ptp(av) == 0 and np.ptp(bv) == 0:
        if av[0] == bv[0]:
            return 0.0, 1.0
        raise StatError("both samples have zero variance")
    t, p = _scipy_stats.ttest_ind(av, bv, equal_var=False)
    return float(t), float(p)


def fit_r_vs_perplexity(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """OLS slope of r against log-perplexity with the standard two-sided slope test."""
    if len(points) < 3:
        raise StatError("regression needs >=3 points")
    x = np.asarray([p[0] for p in points], dtype=float)
    y = np.asarray([p[1] for p in points], dtype=float)
    if np.ptp(x) == 0:
        raise StatError("zero variance in log-perplexity")
    with np.errstate(divide="ignore", invalid="ignore"):
        fit = _scipy_stats.linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)
    if float(residuals @ residuals) == 0.0:
        return float(fit.slope), 0.0  # exact fit: the slope t statistic is infinite
    return float(fit.slope), float(fit.pvalue)


def evaluate_pair_set(records: Sequence[DeltaRecord], method: str, measure: str,
                      granularity: str, resamples: int = 200,
                      seed: int = 0, task_index: int = 0,
                      pvalue_mode: str = "analytic") -> CorrelationResult:
    """Full evaluation of one (method, measure) cell over delta records."""
    x = [rec.scores[method] for rec in records]
    y = [rec.ease[measure] for rec in records]
    r = pearson(x, y)
    rho = spearman(x, y)
    rng = np.random.default_rng([seed, task_index])
    rs = bootstrap_correlations(x, y, resamples, rng)
    lo, hi = (float(q) for q in np.quantile(rs, [0.025, 0.975],
                                            method="median_unbiased"))
    if pvalue_mode == "bootstrap":
        p = bootstrap_pvalue(rs)
    else:
        p = correlation_pvalue(r, len(x))
    return CorrelationResult(method, measure, granularity, r, rho, lo, hi, p, len(x))


def evaluate_uncontrolled(scores: Mapping[tuple[str, str], float],
                          ease: Mapping[tuple[str, str], float],
                          unit_ids: Iterable[str], method: str, measure: str,
                          granularity: str, resamples: int = 200, seed: int = 0,
                          task_index: int = 0) -> CorrelationResult:
    """Raw score vs raw ease over all units of both levels (no deltas)."""
    x: list[float] = []
    y: list[float] = []
    for uid in unit_ids:
        sv = scores.get((uid, method))
        ev = ease.get((uid, measure))
        if sv is None or ev is None:
            log.warning("uncontrolled eval: dropping unit %s (missing %s)", uid,
                        "score" if sv is None else "ease")
            continue
        x.append(sv)
        y.append(ev)
    r = pearson(x, y)
    rho = spearman(x, y)
    rng = np.random.default_rng([seed, task_index])
    rs = bootstrap_correlations(x, y, resamples, rng)
    lo, hi = (float(q) for q in np.quantile(rs, [0.025, 0.975],
                                            method="median_unbiased"))
    return CorrelationResult(method, measure, granularity, r, rho, lo, hi,
                             correlation_pvalue(r, len(x)), len(x))
