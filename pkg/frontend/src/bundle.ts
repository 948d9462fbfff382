/**
 * Title-bundle manifest types and writers.
 *
 * A bundle is a directory of JSON/JSONL files: title.json (header),
 * shots.jsonl, and optionally transcript.jsonl, laughter.json,
 * audio_tags.jsonl. The field names, units, and invariants here mirror
 * the pipeline's loader, which is the reference validator — adapters
 * write files, the pipeline's `validate` subcommand judges them.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import path from "node:path";

export const SCHEMA_VERSION = 1;

export interface ShotRow {
  shot_id: number;
  start_s: number;
  end_s: number;
  visual_feat: number[];
  text_feat: number[] | null;
  caption: string | null;
}

export interface TranscriptRow {
  index: number;
  start_s: number;
  end_s: number;
  text: string;
}

export interface LaughterFile {
  hop_s: number;
  probs: number[];
}

export interface AudioTagRow {
  start_s: number;
  end_s: number;
  label: string;
  prob: number;
}

export interface TitleHeader {
  schema_version: number;
  title_id: string;
  d_vis: number;
  d_text: number;
}

function writeJson(filePath: string, obj: unknown): void {
  writeFileSync(filePath, JSON.stringify(obj, null, 2) + "\n", "utf-8");
}

function writeJsonl(filePath: string, rows: unknown[]): void {
  const lines = rows.map((row) => JSON.stringify(row) + "\n");
  writeFileSync(filePath, lines.join(""), "utf-8");
}

export interface BundleFiles {
  header: TitleHeader;
  shots: ShotRow[];
  transcript?: TranscriptRow[];
  laughter?: LaughterFile;
  audioTags?: AudioTagRow[];
}

/** Write one title bundle; returns the paths written, bundle-relative. */
export function writeBundle(bundleDir: string, files: BundleFiles): string[] {
  mkdirSync(bundleDir, { recursive: true });
  const written: string[] = [];
  const put = (name: string, writer: (p: string) => void) => {
    writer(path.join(bundleDir, name));
    written.push(name);
  };
  const { transcript, laughter, audioTags } = files;
  put("title.json", (p) => writeJson(p, files.header));
  put("shots.jsonl", (p) => writeJsonl(p, files.shots));
  if (transcript !== undefined) {
    put("transcript.jsonl", (p) => writeJsonl(p, transcript));
  }
  if (laughter !== undefined) {
    put("laughter.json", (p) => writeJson(p, laughter));
  }
  if (audioTags !== undefined) {
    put("audio_tags.jsonl", (p) => writeJsonl(p, audioTags));
  }
  return written;
}

export { writeJson };
