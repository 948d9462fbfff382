/**
 * Transcript humor scorer with fixed stub weights.
 *
 * A logistic model over hashed bag-of-words features: each token maps to
 * one of 2048 buckets whose weights are drawn once from a fixed seed, and
 * a small hand-set cue lexicon adds the obvious humor signals. Scores are
 * always in (0, 1), identical for identical input, and the model keeps no
 * state between chunks. An empty chunk scores exactly 0 — the protocol's
 * degenerate case, mirroring the pipeline's own rule for empty scenes.
 *
 * Training and real weights are out of scope here; swapping them in only
 * changes the constructor, not the wire protocol.
 */

import { hashToken, rngFromString } from "./prng.js";

export const SCORER_MODEL_ID = "hashed-bow-logistic-v1";

const BUCKETS = 2048;
const WEIGHT_SEED = "humor-scorer-stub-weights-v1";
const GAIN = 1.5;
const BIAS = -0.4;

const CUE_WEIGHTS: ReadonlyMap<string, number> = new Map([
  ["haha", 4.0],
  ["lol", 4.0],
  ["hilarious", 3.0],
  ["funny", 2.5],
  ["joke", 2.5],
  ["laugh", 2.0],
  ["laughing", 2.0],
  ["kidding", 2.0],
  ["giggle", 2.0],
]);

function sigmoid(x: number): number {
  return 1 / (1 + Math.exp(-x));
}

export class TranscriptHumorScorer {
  private readonly weights: Float64Array;

  constructor() {
    const rng = rngFromString(WEIGHT_SEED);
    this.weights = new Float64Array(BUCKETS);
    for (let i = 0; i < BUCKETS; i++) this.weights[i] = 2 * rng() - 1;
  }

  /** Humor probability in [0, 1] for one chunk of sentences. */
  scoreChunk(sentences: string[]): number {
    const tokens: string[] = [];
    for (const sentence of sentences) {
      for (const tok of sentence.toLowerCase().split(/[^a-z0-9']+/)) {
        if (tok.length > 0) tokens.push(tok);
      }
    }
    if (tokens.length === 0) return 0;
    let logit = 0;
    for (const tok of tokens) {
      logit += this.weights[hashToken(tok) % BUCKETS]!;
      logit += CUE_WEIGHTS.get(tok) ?? 0;
    }
    logit /= tokens.length;
    const score = sigmoid(GAIN * logit + BIAS);
    return Math.min(1, Math.max(0, score));
  }
}
