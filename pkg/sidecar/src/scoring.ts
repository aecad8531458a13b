/**
 * Word-level scores from subword models.
 *
 * Alignment rule: a subword belongs to the word whose character span
 * contains the subword's first character; every subword of a unit must land
 * in exactly one word or scoring fails loudly. Word surprisal is the sum of
 * its subwords' -log2 probabilities given the preceding context (begin of
 * text for the first subword); word entropy is the mean of the per-position
 * next-subword entropies; word PLL is the sum over its subwords of log2
 * probabilities under masking of the current subword and all within-word
 * subwords to its right. Context policy: per-sentence resets the
 * autoregressive window at the unit's sentence boundaries, per-passage
 * scores the whole unit in one window; neither changes row counts.
 */

import {
  ScoringUnit,
  WordSpan,
  unitText,
  unitWords,
} from "./corpus.js";
import { CausalModel, MaskedModel, SubwordRef } from "./models.js";

export type ContextPolicy = "per-sentence" | "per-passage";

export interface WordScore {
  unitId: string;
  wordIndex: number;
  surface: string;
  surprisalBits?: number;
  entropyBits?: number;
  pll?: number;
}

export interface UnitTokenization {
  words: WordSpan[];
  subwords: SubwordRef[];
  /** word index for each subword */
  wordOf: number[];
  /** scoring-window id for each subword (sentence index or 0) */
  windowOf: number[];
}

export function assignSubwords(
  unit: ScoringUnit,
  subwords: SubwordRef[],
  policy: ContextPolicy,
): UnitTokenization {
  const text = unitText(unit);
  const words = unitWords(unit);
  const wordOf: number[] = [];
  let w = 0;
  for (const sub of subwords) {
    while (
      w < words.length &&
      sub.start >= words[w].start + words[w].text.length
    ) {
      w += 1;
    }
    const inWord =
      w < words.length &&
      sub.start >= words[w].start &&
      sub.start < words[w].start + words[w].text.length;
    if (!inWord) {
      throw new Error(
        `word alignment failure in ${unit.unitId}: subword ` +
          `${JSON.stringify(sub.text)} at offset ${sub.start} is outside ` +
          `every word span`,
      );
    }
    wordOf.push(w);
  }
  // sentence boundaries as char offsets (sentences joined with one space)
  const windowOf: number[] = [];
  if (policy === "per-passage") {
    for (let i = 0; i < subwords.length; i += 1) windowOf.push(0);
  } else {
    const starts: number[] = [];
    let offset = 0;
    for (const sentence of unit.sentences) {
      starts.push(offset);
      offset += sentence.length + 1;
    }
    for (const sub of subwords) {
      let win = 0;
      while (win + 1 < starts.length && sub.start >= starts[win + 1]) win += 1;
      windowOf.push(win);
    }
  }
  void text;
  return { words, subwords, wordOf, windowOf };
}

export function scoreCausalUnit(
  model: CausalModel,
  unit: ScoringUnit,
  policy: ContextPolicy,
  measures: { surprisal: boolean; entropy: boolean },
): { scores: WordScore[]; totalBits: number; tokenCount: number } {
  const subwords = model.tokenize(unitText(unit));
  const tok = assignSubwords(unit, subwords, policy);
  const scores: WordScore[] = tok.words.map((word, i) => ({
    unitId: unit.unitId,
    wordIndex: i,
    surface: word.text,
    ...(measures.surprisal ? { surprisalBits: 0 } : {}),
  }));
  const wordBits = new Array<number>(tok.words.length).fill(0);
  const entropySums = new Array<number>(tok.words.length).fill(0);
  const subwordCounts = new Array<number>(tok.words.length).fill(0);
  let context: string[] = [];
  let currentWindow = -1;
  subwords.forEach((sub, i) => {
    if (tok.windowOf[i] !== currentWindow) {
      currentWindow = tok.windowOf[i];
      context = [];
    }
    const step = model.step(context, sub.text);
    const wordIdx = tok.wordOf[i];
    wordBits[wordIdx] += -step.logProb;
    if (measures.entropy) {
      entropySums[wordIdx] += step.entropyBits;
    }
    subwordCounts[wordIdx] += 1;
    context.push(sub.text);
  });
  scores.forEach((score, i) => {
    if (measures.surprisal) score.surprisalBits = wordBits[i];
    if (measures.entropy) {
      score.entropyBits = subwordCounts[i] > 0 ? entropySums[i] / subwordCounts[i] : 0;
    }
  });
  // the sequence total is defined as the sum of word subtotals, so the
  // token-partition additivity invariant holds exactly in floating point
  const totalBits = wordBits.reduce((acc, b) => acc + b, 0);
  return { scores, totalBits, tokenCount: subwords.length };
}

/** Within-word right-context masking: scoring subword j of a word masks j
 * itself and every later subword of the same word; all other words stay
 * visible on both sides. */
export function scoreMaskedUnit(
  model: MaskedModel,
  unit: ScoringUnit,
  policy: ContextPolicy,
): WordScore[] {
  const subwords = model.tokenize(unitText(unit));
  const tok = assignSubwords(unit, subwords, policy);
  const tokens = subwords.map((s) => s.text);
  const scores: WordScore[] = tok.words.map((word, i) => ({
    unitId: unit.unitId,
    wordIndex: i,
    surface: word.text,
    pll: 0,
  }));
  subwords.forEach((_, i) => {
    const wordIdx = tok.wordOf[i];
    const masked: number[] = [];
    for (let j = i; j < subwords.length && tok.wordOf[j] === wordIdx; j += 1) {
      masked.push(j);
    }
    scores[wordIdx].pll! += model.maskedLogProb(tokens, masked, i);
  });
  return scores;
}

export interface PerplexityResult {
  model_id: string;
  ppl: number;
  token_count: number;
}

/** 2 to the mean per-subword surprisal over every passage unit (each text
 * counted once; sentence and group units are projections of the passages). */
export function corpusPerplexity(
  model: CausalModel,
  units: ScoringUnit[],
  policy: ContextPolicy,
): PerplexityResult {
  let totalBits = 0;
  let tokenCount = 0;
  for (const unit of units) {
    if (!unit.isPassage) continue;
    const { totalBits: bits, tokenCount: count } = scoreCausalUnit(
      model,
      unit,
      policy,
      { surprisal: true, entropy: false },
    );
    totalBits += bits;
    tokenCount += count;
  }
  if (tokenCount === 0) {
    throw new Error("empty corpus: no passage tokens to score");
  }
  return {
    model_id: model.id,
    ppl: Math.pow(2, totalBits / tokenCount),
    token_count: tokenCount,
  };
}
