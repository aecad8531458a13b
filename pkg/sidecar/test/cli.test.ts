import { describe, expect, it } from "vitest";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { main } from "../src/cli.js";
import { loadCorpus, unitWords } from "../src/corpus.js";
import { writeFixture } from "./corpus.test.js";

function run(extra: string[]): { tsv: string; dir: string } {
  const corpus = writeFixture();
  const dir = mkdtempSync(join(tmpdir(), "lmscore-out-"));
  const out = join(dir, "wm.tsv");
  main(["--corpus", corpus, "--out", out, ...extra]);
  return { tsv: readFileSync(out, "utf-8"), dir };
}

describe("cli", () => {
  it("emits one row per word token with the requested columns", () => {
    const { tsv } = run([
      "--model",
      "toy:uniform:64",
      "--measures",
      "surprisal,entropy",
    ]);
    const lines = tsv.trim().split("\n");
    expect(lines[0]).toBe("unit_id\tword_index\tsurface\tsurprisal_bits\tentropy_bits");
    const units = loadCorpus(writeFixture());
    const expectedRows = units.reduce((acc, u) => acc + unitWords(u).length, 0);
    expect(lines.length - 1).toBe(expectedRows);
  });

  it("is byte-identical across runs", () => {
    const a = run(["--model", "toy:uniform:64"]).tsv;
    const b = run(["--model", "toy:uniform:64"]).tsv;
    expect(a).toBe(b);
  });

  it("writes perplexity json for the model", () => {
    const corpus = writeFixture();
    const dir = mkdtempSync(join(tmpdir(), "lmscore-out-"));
    const out = join(dir, "wm.tsv");
    const ppl = join(dir, "ppl.json");
    main([
      "--corpus",
      corpus,
      "--out",
      out,
      "--model",
      "toy:onehot",
      "--ppl-out",
      ppl,
    ]);
    const doc = JSON.parse(readFileSync(ppl, "utf-8"));
    expect(doc.model_id).toBe("toy:onehot");
    expect(doc.ppl).toBe(1);
    expect(doc.token_count).toBeGreaterThan(0);
  });

  it("adds a pll column when a masked model is given", () => {
    const { tsv } = run([
      "--model",
      "toy:uniform:64",
      "--measures",
      "surprisal,pll",
      "--masked-model",
      "toy:uniform-masked:64",
    ]);
    const lines = tsv.trim().split("\n");
    expect(lines[0]).toBe("unit_id\tword_index\tsurface\tsurprisal_bits\tpll");
    expect(lines[1].split("\t")).toHaveLength(5);
  });

  it("rejects pll without a masked model", () => {
    expect(() => run(["--model", "toy:uniform:64", "--measures", "pll"])).toThrow(
      /masked/,
    );
  });

  it("rejects unknown models with a helpful message", () => {
    expect(() => run(["--model", "toy:bogus"])).toThrow(/unknown autoregressive/);
  });
});
