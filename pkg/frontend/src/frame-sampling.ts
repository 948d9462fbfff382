/**
 * Per-shot frame sampling and feature pooling.
 *
 * A shot's representation is the mean of the features of N uniformly
 * spaced frames (default 8): each frame sits at the midpoint of one of
 * N equal sub-intervals of the shot, so samples never land on a shot
 * boundary and spacing is exactly (end - start) / N.
 */

export const DEFAULT_FRAMES_PER_SHOT = 8;

export function frameTimes(startS: number, endS: number, count: number): number[] {
  if (!(endS > startS)) {
    throw new Error(`empty shot span [${startS}, ${endS}]`);
  }
  if (!Number.isInteger(count) || count < 1) {
    throw new Error(`frame count must be a positive integer, got ${count}`);
  }
  const step = (endS - startS) / count;
  const times: number[] = [];
  for (let i = 0; i < count; i++) {
    times.push(startS + (i + 0.5) * step);
  }
  return times;
}

/** Element-wise mean of equal-length frame feature vectors. */
export function poolFrameFeatures(frames: Float64Array[]): Float64Array {
  if (frames.length === 0) {
    throw new Error("cannot pool zero frames");
  }
  const dim = frames[0]!.length;
  const pooled = new Float64Array(dim);
  for (const f of frames) {
    if (f.length !== dim) {
      throw new Error(`frame feature width ${f.length} != ${dim}`);
    }
    for (let i = 0; i < dim; i++) pooled[i]! += f[i]!;
  }
  for (let i = 0; i < dim; i++) pooled[i]! /= frames.length;
  return pooled;
}
