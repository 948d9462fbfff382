/**
 * extractAll: one media file in, one manifest bundle out.
 *
 * The probe and the shot stage are load-bearing — without shots there is
 * no usable bundle, so their failures abort. Transcript, laughter, and
 * audio-tag stages are isolated: a failure drops that file, the bundle
 * is marked partial in manifest.json, and extraction continues. The
 * manifest records media identity, model ids, sampling config, outputs,
 * and runtime metadata (no timestamps — bundles rebuild byte-identically).
 */

import path from "node:path";

import { Backbones, stubBackbones, TEXT_FEATURE_DIM } from "./backbones.js";
import {
  AudioTagRow,
  BundleFiles,
  LaughterFile,
  SCHEMA_VERSION,
  ShotRow,
  TranscriptRow,
  writeBundle,
  writeJson,
} from "./bundle.js";
import {
  DEFAULT_FRAMES_PER_SHOT,
  frameTimes,
  poolFrameFeatures,
} from "./frame-sampling.js";
import { probeMedia, titleIdForMedia } from "./media.js";

export const ADAPTER_NAME = "extractor-adapters";
export const ADAPTER_VERSION = "0.1.0";

export class ExtractError extends Error {}

export interface ExtractOptions {
  framesPerShot?: number;
  visualDim?: number;
  backbones?: Backbones;
  /** Bundle directory name; defaults to a sanitized media basename. */
  titleId?: string;
}

export interface StageFailure {
  stage: string;
  error: string;
}

export interface AdapterManifest {
  adapter: string;
  adapter_version: string;
  media: { path: string; sha256: string; bytes: number; duration_s: number };
  models: Record<string, string>;
  config: { frames_per_shot: number; visual_dim: number; text_dim: number };
  outputs: string[];
  complete: boolean;
  partial: StageFailure[];
  runtime: { node: string; platform: string; arch: string };
}

function errorText(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

/**
 * Extract every manifest from one media file into outDir/<titleId>/.
 * Returns the adapter manifest (also written as manifest.json).
 */
export function extractAll(
  mediaPath: string,
  outDir: string,
  options: ExtractOptions = {},
): AdapterManifest {
  const framesPerShot = options.framesPerShot ?? DEFAULT_FRAMES_PER_SHOT;
  const visualDim = options.visualDim ?? 512;
  const backbones = options.backbones ?? stubBackbones(visualDim);
  if (backbones.visual.dim !== visualDim) {
    throw new ExtractError(
      `visual backbone emits ${backbones.visual.dim}-d features, ` +
      `configured for ${visualDim}`,
    );
  }

  const media = probeMedia(mediaPath); // fatal on undecodable media

  const titleId = options.titleId ?? titleIdForMedia(mediaPath);
  const bundleDir = path.join(outDir, titleId);
  const partial: StageFailure[] = [];
  const models: Record<string, string> = {};

  // Shots are load-bearing: no shots, no bundle.
  let shots: ShotRow[];
  try {
    const spans = backbones.shotDetector.detectShots(media);
    models["shot_detector"] = backbones.shotDetector.modelId;
    models["visual_encoder"] = backbones.visual.modelId;
    models["captioner"] = backbones.captioner.modelId;
    models["text_encoder"] = backbones.textEncoder.modelId;
    shots = spans.map((span, shotId) => {
      const frames = frameTimes(span.startS, span.endS, framesPerShot)
        .map((t) => backbones.visual.frameFeature(media, t));
      const caption = backbones.captioner.caption(media, span);
      const textFeat = backbones.textEncoder.embed(caption);
      if (textFeat.length !== TEXT_FEATURE_DIM) {
        throw new ExtractError(
          `text encoder emitted ${textFeat.length}-d, ` +
          `expected ${TEXT_FEATURE_DIM}`,
        );
      }
      return {
        shot_id: shotId,
        start_s: span.startS,
        end_s: span.endS,
        visual_feat: Array.from(poolFrameFeatures(frames)),
        text_feat: Array.from(textFeat),
        caption,
      };
    });
  } catch (err) {
    throw new ExtractError(`shot stage failed: ${errorText(err)}`);
  }

  let transcript: TranscriptRow[] | undefined;
  try {
    transcript = backbones.transcriber.transcribe(media).map((s, index) => ({
      index,
      start_s: s.startS,
      end_s: s.endS,
      text: s.text,
    }));
    models["transcriber"] = backbones.transcriber.modelId;
  } catch (err) {
    partial.push({ stage: "transcript", error: errorText(err) });
  }

  let laughter: LaughterFile | undefined;
  try {
    laughter = {
      hop_s: backbones.laughter.hopS,
      probs: backbones.laughter.track(media),
    };
    models["laughter"] = backbones.laughter.modelId;
  } catch (err) {
    partial.push({ stage: "laughter", error: errorText(err) });
  }

  let audioTags: AudioTagRow[] | undefined;
  try {
    audioTags = backbones.audioTagger.tag(media).map((ev) => ({
      start_s: ev.startS,
      end_s: ev.endS,
      label: ev.label,
      prob: ev.prob,
    }));
    models["audio_tagger"] = backbones.audioTagger.modelId;
  } catch (err) {
    partial.push({ stage: "audio_tags", error: errorText(err) });
  }

  const files: BundleFiles = {
    header: {
      schema_version: SCHEMA_VERSION,
      title_id: titleId,
      d_vis: visualDim,
      d_text: TEXT_FEATURE_DIM,
    },
    shots,
    transcript,
    laughter,
    audioTags,
  };
  const outputs = writeBundle(bundleDir, files);

  const manifest: AdapterManifest = {
    adapter: ADAPTER_NAME,
    adapter_version: ADAPTER_VERSION,
    media: {
      path: mediaPath,
      sha256: media.sha256,
      bytes: media.bytes.length,
      duration_s: media.durationS,
    },
    models,
    config: {
      frames_per_shot: framesPerShot,
      visual_dim: visualDim,
      text_dim: TEXT_FEATURE_DIM,
    },
    outputs,
    complete: partial.length === 0,
    partial,
    runtime: {
      node: process.version,
      platform: process.platform,
      arch: process.arch,
    },
  };
  writeJson(path.join(bundleDir, "manifest.json"), manifest);
  return manifest;
}
