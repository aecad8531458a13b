/** Word-measures TSV and perplexity JSON emission (fixed decimal places so
 * reruns are byte-identical). */

import { writeFileSync } from "node:fs";
import { WordScore } from "./scoring.js";
import { PerplexityResult } from "./scoring.js";

const DECIMALS = 6;

export function formatTsv(
  rows: WordScore[],
  measures: { surprisal: boolean; entropy: boolean; pll: boolean },
): string {
  const header = ["unit_id", "word_index", "surface"];
  if (measures.surprisal) header.push("surprisal_bits");
  if (measures.entropy) header.push("entropy_bits");
  if (measures.pll) header.push("pll");
  const lines = [header.join("\t")];
  for (const row of rows) {
    const cells = [row.unitId, String(row.wordIndex), row.surface];
    if (measures.surprisal) cells.push(row.surprisalBits!.toFixed(DECIMALS));
    if (measures.entropy) cells.push(row.entropyBits!.toFixed(DECIMALS));
    if (measures.pll) cells.push(row.pll!.toFixed(DECIMALS));
    lines.push(cells.join("\t"));
  }
  return lines.join("\n") + "\n";
}

export function writeTsv(
  path: string,
  rows: WordScore[],
  measures: { surprisal: boolean; entropy: boolean; pll: boolean },
): void {
  writeFileSync(path, formatTsv(rows, measures), "utf-8");
}

export function writePerplexity(path: string, result: PerplexityResult): void {
  const doc = {
    model_id: result.model_id,
    ppl: Number(result.ppl.toFixed(DECIMALS)),
    token_count: result.token_count,
  };
  writeFileSync(path, JSON.stringify(doc, null, 2) + "\n", "utf-8");
}
