/**
 * Per-shot frame sampling: N uniformly spaced frames (8 by default),
 * pooled by element-wise mean, and honored by the extractor end to end.
 */

import { readFileSync } from "node:fs";
import path from "node:path";
import { describe, expect, it } from "vitest";

import {
  DEFAULT_FRAMES_PER_SHOT,
  frameTimes,
  poolFrameFeatures,
} from "../src/frame-sampling.js";
import { extractAll } from "../src/extract.js";
import { probeMedia } from "../src/media.js";
import { stubVisualEncoder } from "../src/backbones.js";
import { makeMediaFile, tempDir } from "./helpers.js";

interface ShotRowOnDisk {
  shot_id: number;
  start_s: number;
  end_s: number;
  visual_feat: number[];
}

function readShotRows(bundleDir: string): ShotRowOnDisk[] {
  return readFileSync(path.join(bundleDir, "shots.jsonl"), "utf-8")
    .split("\n")
    .filter((l) => l.trim() !== "")
    .map((l) => JSON.parse(l) as ShotRowOnDisk);
}

describe("frame sampling", () => {
  it("defaults to 8 frames per shot", () => {
    expect(DEFAULT_FRAMES_PER_SHOT).toBe(8);
    expect(frameTimes(0, 4, DEFAULT_FRAMES_PER_SHOT)).toHaveLength(8);
  });

  it("spaces frames uniformly, strictly inside the shot", () => {
    for (const [start, end, n] of [
      [10, 14, 8],
      [0, 2.3, 8],
      [5.25, 5.75, 8],
      [1, 7, 3],
      [2, 9, 16],
    ] as Array<[number, number, number]>) {
      const times = frameTimes(start, end, n);
      expect(times).toHaveLength(n);
      const step = (end - start) / n;
      for (let i = 0; i < n; i++) {
        expect(times[i]).toBeCloseTo(start + (i + 0.5) * step, 12);
        expect(times[i]!).toBeGreaterThan(start);
        expect(times[i]!).toBeLessThan(end);
      }
      for (let i = 1; i < n; i++) {
        expect(times[i]! - times[i - 1]!).toBeCloseTo(step, 12);
      }
    }
  });

  it("rejects empty spans and non-positive counts", () => {
    expect(() => frameTimes(3, 3, 8)).toThrow(/empty shot span/);
    expect(() => frameTimes(4, 3, 8)).toThrow(/empty shot span/);
    expect(() => frameTimes(0, 1, 0)).toThrow(/positive integer/);
    expect(() => frameTimes(0, 1, 2.5)).toThrow(/positive integer/);
  });

  it("pools by element-wise mean", () => {
    const frames = [
      new Float64Array([1, 2, 3]),
      new Float64Array([3, 4, 5]),
      new Float64Array([5, 0, 1]),
    ];
    const pooled = poolFrameFeatures(frames);
    expect(Array.from(pooled)).toEqual([3, 2, 3]);
    expect(() => poolFrameFeatures([])).toThrow(/zero frames/);
    expect(() =>
      poolFrameFeatures([new Float64Array(2), new Float64Array(3)]),
    ).toThrow(/width/);
  });

  it("extractor pools each shot from exactly the 8 uniform frames", () => {
    const dir = tempDir("frames-");
    const media = makeMediaFile(path.join(dir, "clip.bin"), "frames-e2e", 24_576);
    const visualDim = 24;
    const manifest = extractAll(media, path.join(dir, "corpus"), { visualDim });
    expect(manifest.config.frames_per_shot).toBe(8);

    const rows = readShotRows(path.join(dir, "corpus", "clip"));
    expect(rows.length).toBeGreaterThanOrEqual(4);

    // Recompute every pooled feature from first principles.
    const decoded = probeMedia(media);
    const visual = stubVisualEncoder(visualDim);
    for (const row of rows) {
      const frames = frameTimes(row.start_s, row.end_s, 8)
        .map((t) => visual.frameFeature(decoded, t));
      const expected = poolFrameFeatures(frames);
      expect(row.visual_feat).toEqual(Array.from(expected));
    }
  });

  it("honors a configured frame count and records it in the manifest", () => {
    const dir = tempDir("frames-cfg-");
    const media = makeMediaFile(path.join(dir, "clip.bin"), "frames-cfg", 16_384);
    const m4 = extractAll(media, path.join(dir, "c4"), {
      visualDim: 16,
      framesPerShot: 4,
    });
    const m8 = extractAll(media, path.join(dir, "c8"), { visualDim: 16 });
    expect(m4.config.frames_per_shot).toBe(4);
    expect(m8.config.frames_per_shot).toBe(8);

    const rows4 = readShotRows(path.join(dir, "c4", "clip"));
    const rows8 = readShotRows(path.join(dir, "c8", "clip"));
    expect(rows4.length).toBe(rows8.length);
    // Same shots, different frame sets -> different pooled features.
    const decoded = probeMedia(media);
    const visual = stubVisualEncoder(16);
    for (let i = 0; i < rows4.length; i++) {
      const row = rows4[i]!;
      const frames = frameTimes(row.start_s, row.end_s, 4)
        .map((t) => visual.frameFeature(decoded, t));
      expect(row.visual_feat).toEqual(Array.from(poolFrameFeatures(frames)));
      expect(row.visual_feat).not.toEqual(rows8[i]!.visual_feat);
    }
  });
});
