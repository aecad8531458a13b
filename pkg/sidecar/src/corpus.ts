/**
 * Corpus reading and unit derivation, mirroring the consumer's contract:
 * sentence units (article/paragraph/level/index), passage units
 * (article/paragraph/level), and merged sentence-group units for
 * one-to-many alignment groups (indices joined with '+'). Words are
 * whitespace chunks; the word boundary rule is shared with the consumer so
 * its ingest audit sees identical word counts.
 */

import { readFileSync } from "node:fs";

export interface ParagraphDoc {
  original: string[];
  simplified: string[];
  alignment?: [number, number][];
}

export interface ArticleDoc {
  article_id: string;
  paragraphs: ParagraphDoc[];
}

export interface CorpusDoc {
  articles: ArticleDoc[];
}

export interface WordSpan {
  text: string;
  start: number; // char offset within the unit text
}

export interface ScoringUnit {
  unitId: string;
  level: "original" | "simplified";
  /** sentences in order; scoring may reset context at their boundaries */
  sentences: string[];
  /** true for passage units: these define the corpus for perplexity */
  isPassage: boolean;
}

export function wordSpans(text: string): WordSpan[] {
  const spans: WordSpan[] = [];
  const re = /\S+/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    spans.push({ text: m[0], start: m.index });
  }
  return spans;
}

export function unitText(unit: ScoringUnit): string {
  return unit.sentences.join(" ");
}

export function unitWords(unit: ScoringUnit): WordSpan[] {
  return wordSpans(unitText(unit));
}

/** Connected components of the alignment's bipartite graph, ordered by the
 * smallest original index. */
export function alignmentGroups(
  links: [number, number][],
  nOriginal: number,
  nSimplified: number,
  where: string,
): Array<[number[], number[]]> {
  for (const [o, s] of links) {
    if (o < 0 || o >= nOriginal) {
      throw new Error(`${where}: original sentence index ${o} out of range`);
    }
    if (s < 0 || s >= nSimplified) {
      throw new Error(`${where}: simplified sentence index ${s} out of range`);
    }
  }
  const parent = new Map<string, string>();
  const find = (x: string): string => {
    let root = x;
    while ((parent.get(root) ?? root) !== root) {
      root = parent.get(root)!;
    }
    parent.set(x, root);
    return root;
  };
  for (const [o, s] of links) {
    const ra = find(`o${o}`);
    const rb = find(`s${s}`);
    if (ra !== rb) parent.set(ra, rb);
  }
  const groups = new Map<string, [Set<number>, Set<number>]>();
  for (const [o, s] of links) {
    const root = find(`o${o}`);
    if (!groups.has(root)) groups.set(root, [new Set(), new Set()]);
    const [os, ss] = groups.get(root)!;
    os.add(o);
    ss.add(s);
  }
  const out = [...groups.values()].map(([os, ss]): [number[], number[]] => [
    [...os].sort((a, b) => a - b),
    [...ss].sort((a, b) => a - b),
  ]);
  out.sort((a, b) => a[0][0] - b[0][0]);
  return out;
}

export function loadCorpus(path: string): ScoringUnit[] {
  let doc: CorpusDoc;
  try {
    doc = JSON.parse(readFileSync(path, "utf-8")) as CorpusDoc;
  } catch (err) {
    throw new Error(`malformed corpus file ${path}: ${(err as Error).message}`);
  }
  if (!Array.isArray(doc.articles) || doc.articles.length === 0) {
    throw new Error("no units: corpus has an empty article list");
  }
  const units: ScoringUnit[] = [];
  for (const article of doc.articles) {
    article.paragraphs.forEach((para, paraIdx) => {
      const where = `${article.article_id}/${paraIdx}`;
      for (const level of ["original", "simplified"] as const) {
        const sentences = para[level];
        if (!Array.isArray(sentences) || sentences.length === 0) {
          throw new Error(`${where}: missing ${level} sentences`);
        }
        sentences.forEach((s, i) => {
          units.push({
            unitId: `${where}/${level}/${i}`,
            level,
            sentences: [s],
            isPassage: false,
          });
        });
        units.push({
          unitId: `${where}/${level}`,
          level,
          sentences: [...sentences],
          isPassage: true,
        });
      }
      const groups = alignmentGroups(
        para.alignment ?? [],
        para.original.length,
        para.simplified.length,
        where,
      );
      for (const [oIdx, sIdx] of groups) {
        if (oIdx.length > 1) {
          units.push({
            unitId: `${where}/original/${oIdx.join("+")}`,
            level: "original",
            sentences: oIdx.map((i) => para.original[i]),
            isPassage: false,
          });
        }
        if (sIdx.length > 1) {
          units.push({
            unitId: `${where}/simplified/${sIdx.join("+")}`,
            level: "simplified",
            sentences: sIdx.map((i) => para.simplified[i]),
            isPassage: false,
          });
        }
      }
    });
  }
  units.sort((a, b) => (a.unitId < b.unitId ? -1 : a.unitId > b.unitId ? 1 : 0));
  return units;
}
