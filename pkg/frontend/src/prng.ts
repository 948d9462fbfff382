/**
 * Deterministic hashing and random numbers for the stub backbones.
 *
 * Every adapter output must be reproducible from the media bytes alone,
 * so all "model" randomness is derived here: a 128-bit mixing hash over
 * bytes or strings seeds a small counter-free PRNG (sfc32). Integer-only
 * arithmetic keeps the streams identical across platforms.
 */

export type Rng = () => number;

/** 128-bit hash of a byte sequence (cyrb128-style mixing). */
export function hash128(data: Uint8Array, seed = 0): [number, number, number, number] {
  let h1 = 1779033703 ^ seed;
  let h2 = 3144134277 ^ seed;
  let h3 = 1013904242 ^ seed;
  let h4 = 2773480762 ^ seed;
  for (let i = 0; i < data.length; i++) {
    const k = data[i]!;
    h1 = h2 ^ Math.imul(h1 ^ k, 597399067);
    h2 = h3 ^ Math.imul(h2 ^ k, 2869860233);
    h3 = h4 ^ Math.imul(h3 ^ k, 951274213);
    h4 = h1 ^ Math.imul(h4 ^ k, 2716044179);
  }
  h1 = Math.imul(h3 ^ (h1 >>> 18), 597399067);
  h2 = Math.imul(h4 ^ (h2 >>> 22), 2869860233);
  h3 = Math.imul(h1 ^ (h3 >>> 17), 951274213);
  h4 = Math.imul(h2 ^ (h4 >>> 19), 2716044179);
  return [(h1 ^ h2 ^ h3 ^ h4) >>> 0, (h2 ^ h1) >>> 0, (h3 ^ h1) >>> 0, (h4 ^ h1) >>> 0];
}

const utf8 = new TextEncoder();

export function hashString(text: string, seed = 0): [number, number, number, number] {
  return hash128(utf8.encode(text), seed);
}

/** 32-bit bucket hash for vocabulary features. */
export function hashToken(token: string, seed = 0): number {
  return hashString(token, seed)[0];
}

/** sfc32 PRNG: uniform floats in [0, 1) from a 128-bit seed. */
export function sfc32(a: number, b: number, c: number, d: number): Rng {
  return () => {
    a >>>= 0; b >>>= 0; c >>>= 0; d >>>= 0;
    let t = (a + b) | 0;
    a = b ^ (b >>> 9);
    b = (c + (c << 3)) | 0;
    c = (c << 21) | (c >>> 11);
    d = (d + 1) | 0;
    t = (t + d) | 0;
    c = (c + t) | 0;
    return (t >>> 0) / 4294967296;
  };
}

export function rngFromString(text: string, seed = 0): Rng {
  const [a, b, c, d] = hashString(text, seed);
  return sfc32(a, b, c, d);
}

export function rngFromBytes(data: Uint8Array, seed = 0): Rng {
  const [a, b, c, d] = hash128(data, seed);
  return sfc32(a, b, c, d);
}

/** Uniform draw from [lo, hi). */
export function uniform(rng: Rng, lo: number, hi: number): number {
  return lo + (hi - lo) * rng();
}

/** Integer draw from [lo, hi). */
export function randInt(rng: Rng, lo: number, hi: number): number {
  return lo + Math.floor(rng() * (hi - lo));
}

/** Vector of uniform values in [-1, 1]. */
export function uniformVector(rng: Rng, dim: number): Float64Array {
  const v = new Float64Array(dim);
  for (let i = 0; i < dim; i++) v[i] = 2 * rng() - 1;
  return v;
}
