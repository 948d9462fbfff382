/**
 * Extraction behavior: bundle contents, manifest bookkeeping, stage
 * isolation, media rejection, and byte-identical reruns.
 */

import { existsSync, readFileSync } from "node:fs";
import path from "node:path";
import { describe, expect, it } from "vitest";

import { stubBackbones } from "../src/backbones.js";
import { ExtractError, extractAll } from "../src/extract.js";
import { MediaError, titleIdForMedia } from "../src/media.js";
import { makeMediaFile, readTree, tempDir } from "./helpers.js";

function jsonl(filePath: string): Array<Record<string, unknown>> {
  return readFileSync(filePath, "utf-8")
    .split("\n")
    .filter((l) => l.trim() !== "")
    .map((l) => JSON.parse(l) as Record<string, unknown>);
}

describe("extractAll", () => {
  it("writes a complete bundle with coherent timelines", () => {
    const dir = tempDir("extract-");
    const media = makeMediaFile(path.join(dir, "episode.bin"), "bundle-1", 32_768);
    const manifest = extractAll(media, path.join(dir, "corpus"), { visualDim: 32 });

    expect(manifest.complete).toBe(true);
    expect(manifest.partial).toEqual([]);
    expect(manifest.outputs.sort()).toEqual([
      "audio_tags.jsonl",
      "laughter.json",
      "shots.jsonl",
      "title.json",
      "transcript.jsonl",
    ]);
    expect(manifest.media.duration_s).toBe(32);
    expect(manifest.media.bytes).toBe(32_768);
    expect(manifest.models["shot_detector"]).toMatch(/shot-detector/);

    const bundle = path.join(dir, "corpus", "episode");
    const header = JSON.parse(readFileSync(path.join(bundle, "title.json"), "utf-8"));
    expect(header).toEqual({
      schema_version: 1,
      title_id: "episode",
      d_vis: 32,
      d_text: 768,
    });

    const shots = jsonl(path.join(bundle, "shots.jsonl"));
    expect(shots.length).toBeGreaterThanOrEqual(7); // 32 s of 2-5 s shots
    let prevEnd = 0;
    for (let i = 0; i < shots.length; i++) {
      const s = shots[i]!;
      expect(s["shot_id"]).toBe(i);
      expect(s["start_s"]).toBe(prevEnd); // consecutive, gap-free
      expect(s["end_s"] as number).toBeGreaterThan(s["start_s"] as number);
      expect(s["visual_feat"]).toHaveLength(32);
      expect(s["text_feat"]).toHaveLength(768);
      expect(typeof s["caption"]).toBe("string");
      prevEnd = s["end_s"] as number;
    }
    expect(prevEnd).toBe(32);

    const sentences = jsonl(path.join(bundle, "transcript.jsonl"));
    expect(sentences.length).toBeGreaterThan(5);
    sentences.forEach((row, i) => expect(row["index"]).toBe(i));

    const laughter = JSON.parse(
      readFileSync(path.join(bundle, "laughter.json"), "utf-8"),
    ) as { hop_s: number; probs: number[] };
    expect(laughter.hop_s).toBe(0.5);
    expect(laughter.probs).toHaveLength(64);
    for (const p of laughter.probs) {
      expect(p).toBeGreaterThanOrEqual(0);
      expect(p).toBeLessThanOrEqual(1);
    }

    for (const ev of jsonl(path.join(bundle, "audio_tags.jsonl"))) {
      expect(ev["start_s"] as number).toBeLessThan(ev["end_s"] as number);
      expect(ev["prob"] as number).toBeGreaterThanOrEqual(0);
      expect(ev["prob"] as number).toBeLessThanOrEqual(1);
    }
  });

  it("rebuilds byte-identically from the same media", () => {
    const dir = tempDir("extract-det-");
    const media = makeMediaFile(path.join(dir, "clip.bin"), "determinism", 20_480);
    extractAll(media, path.join(dir, "a"), { visualDim: 16 });
    extractAll(media, path.join(dir, "b"), { visualDim: 16 });

    const a = readTree(path.join(dir, "a"));
    const b = readTree(path.join(dir, "b"));
    expect([...a.keys()].sort()).toEqual([...b.keys()].sort());
    expect(a.size).toBeGreaterThanOrEqual(6);
    for (const [rel, bytes] of a) {
      expect(b.get(rel)!.equals(bytes), `${rel} differs between reruns`).toBe(true);
    }
  });

  it("derives different features from different media", () => {
    const dir = tempDir("extract-diff-");
    const m1 = makeMediaFile(path.join(dir, "one.bin"), "media-one", 16_384);
    const m2 = makeMediaFile(path.join(dir, "two.bin"), "media-two", 16_384);
    extractAll(m1, path.join(dir, "corpus"), { visualDim: 16 });
    extractAll(m2, path.join(dir, "corpus"), { visualDim: 16 });
    const f1 = jsonl(path.join(dir, "corpus", "one", "shots.jsonl"))[0]!;
    const f2 = jsonl(path.join(dir, "corpus", "two", "shots.jsonl"))[0]!;
    expect(f1["visual_feat"]).not.toEqual(f2["visual_feat"]);
  });

  it("isolates optional-stage failures and marks the bundle partial", () => {
    const dir = tempDir("extract-partial-");
    const media = makeMediaFile(path.join(dir, "clip.bin"), "partial", 16_384);
    const backbones = stubBackbones(16);
    backbones.laughter = {
      modelId: "broken-laughter-model",
      hopS: 0.5,
      track() {
        throw new Error("weights file corrupt");
      },
    };
    const manifest = extractAll(media, path.join(dir, "corpus"), {
      visualDim: 16,
      backbones,
    });
    expect(manifest.complete).toBe(false);
    expect(manifest.partial).toEqual([
      { stage: "laughter", error: "weights file corrupt" },
    ]);
    const bundle = path.join(dir, "corpus", "clip");
    expect(existsSync(path.join(bundle, "laughter.json"))).toBe(false);
    expect(existsSync(path.join(bundle, "shots.jsonl"))).toBe(true);
    expect(existsSync(path.join(bundle, "transcript.jsonl"))).toBe(true);
    expect(manifest.models).not.toHaveProperty("laughter");
  });

  it("treats shot detection as load-bearing", () => {
    const dir = tempDir("extract-fatal-");
    const media = makeMediaFile(path.join(dir, "clip.bin"), "fatal", 16_384);
    const backbones = stubBackbones(16);
    backbones.shotDetector = {
      modelId: "broken-shot-detector",
      detectShots() {
        throw new Error("no cuts found");
      },
    };
    expect(() =>
      extractAll(media, path.join(dir, "corpus"), { visualDim: 16, backbones }),
    ).toThrow(ExtractError);
  });

  it("rejects missing and too-small media", () => {
    const dir = tempDir("extract-bad-");
    expect(() => extractAll(path.join(dir, "nope.bin"), dir)).toThrow(MediaError);
    const tiny = makeMediaFile(path.join(dir, "tiny.bin"), "tiny", 64);
    expect(() => extractAll(tiny, dir)).toThrow(/too short/);
  });

  it("sanitizes media filenames into title ids", () => {
    expect(titleIdForMedia("/data/S01E02 final (v2).mp4")).toBe("S01E02-final-v2");
    expect(titleIdForMedia("weird..name..mov")).toBe("weird-name");
    expect(titleIdForMedia("...")).toBe("untitled");
  });
});
