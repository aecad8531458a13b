/**
 * Language-model backends. The scoring layer only needs, per position, the
 * log2 probability of the realized next subword and the Shannon entropy of
 * the predictive distribution, so backends stay free to compute those
 * however they like (a hosted transformer would read them off its softmax).
 *
 * Toy backends ship for offline use and for pinning the scoring algebra:
 *   toy:uniform:<V>        every next subword has probability 1/V
 *   toy:onehot             memorizes its input: the realized subword has p=1
 *   toy:ramp:<V>           uniform over min(V, contextLength + 2) candidates
 *   toy:uniform-masked:<V> masked model with uniform predictions
 */

export interface SubwordRef {
  text: string;
  /** char offset of the subword's first character within the unit text */
  start: number;
}

export interface StepScore {
  /** log2 p(target | context) */
  logProb: number;
  /** Shannon entropy (bits) of the next-subword distribution */
  entropyBits: number;
}

export interface CausalModel {
  id: string;
  tokenize(text: string): SubwordRef[];
  /** Score one autoregressive step; context is the preceding subword texts
   * of the scoring window (empty at begin-of-text). */
  step(context: string[], target: string): StepScore;
}

export interface MaskedModel {
  id: string;
  tokenize(text: string): SubwordRef[];
  /** log2 p of the subword at `position` when the positions in `masked`
   * are hidden; `tokens` is the full unit subword sequence. */
  maskedLogProb(tokens: string[], masked: number[], position: number): number;
}

const CHUNK = 3;

/** Deterministic toy subword splitter: whitespace words cut into
 * fixed-length character chunks, offsets preserved. */
export function toyTokenize(text: string): SubwordRef[] {
  const out: SubwordRef[] = [];
  const re = /\S+/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    const word = m[0];
    for (let i = 0; i < word.length; i += CHUNK) {
      out.push({ text: word.slice(i, i + CHUNK), start: m.index + i });
    }
  }
  return out;
}

export class UniformModel implements CausalModel {
  readonly id: string;
  constructor(readonly vocabSize: number) {
    if (vocabSize < 2) throw new Error("uniform model needs vocab size >= 2");
    this.id = `toy:uniform:${vocabSize}`;
  }
  tokenize(text: string): SubwordRef[] {
    return toyTokenize(text);
  }
  step(): StepScore {
    const bits = Math.log2(this.vocabSize);
    return { logProb: -bits, entropyBits: bits };
  }
}

/** Predicts whatever actually comes next with probability one, i.e. a model
 * memorized on the very corpus it scores. */
export class OneHotModel implements CausalModel {
  readonly id = "toy:onehot";
  tokenize(text: string): SubwordRef[] {
    return toyTokenize(text);
  }
  step(): StepScore {
    return { logProb: 0, entropyBits: 0 };
  }
}

/** Uniform over a candidate set that grows with context length, so values
 * (but never row counts) change with the context policy. */
export class RampModel implements CausalModel {
  readonly id: string;
  constructor(readonly vocabSize: number) {
    if (vocabSize < 2) throw new Error("ramp model needs vocab size >= 2");
    this.id = `toy:ramp:${vocabSize}`;
  }
  tokenize(text: string): SubwordRef[] {
    return toyTokenize(text);
  }
  step(context: string[]): StepScore {
    const k = Math.min(this.vocabSize, context.length + 2);
    const bits = Math.log2(k);
    return { logProb: -bits, entropyBits: bits };
  }
}

export class UniformMaskedModel implements MaskedModel {
  readonly id: string;
  constructor(readonly vocabSize: number) {
    if (vocabSize < 2) throw new Error("masked model needs vocab size >= 2");
    this.id = `toy:uniform-masked:${vocabSize}`;
  }
  tokenize(text: string): SubwordRef[] {
    return toyTokenize(text);
  }
  maskedLogProb(): number {
    return -Math.log2(this.vocabSize);
  }
}

export function resolveCausalModel(spec: string): CausalModel {
  const parts = spec.split(":");
  if (parts[0] === "toy" && parts[1] === "uniform") {
    return new UniformModel(Number(parts[2] ?? 0));
  }
  if (parts[0] === "toy" && parts[1] === "onehot") {
    return new OneHotModel();
  }
  if (parts[0] === "toy" && parts[1] === "ramp") {
    return new RampModel(Number(parts[2] ?? 0));
  }
  throw new Error(
    `unknown autoregressive model ${spec}; available: toy:uniform:<V>, ` +
      `toy:onehot, toy:ramp:<V> (pretrained backends plug in through the ` +
      `CausalModel interface)`,
  );
}

export function resolveMaskedModel(spec: string): MaskedModel {
  const parts = spec.split(":");
  if (parts[0] === "toy" && parts[1] === "uniform-masked") {
    return new UniformMaskedModel(Number(parts[2] ?? 0));
  }
  throw new Error(
    `unknown masked model ${spec}; available: toy:uniform-masked:<V>`,
  );
}
