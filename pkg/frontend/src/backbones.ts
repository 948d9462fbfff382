/**
 * Backbone interfaces and their deterministic stub implementations.
 *
 * Real deployments plug shot detectors, visual/text encoders, speech
 * transcription, laughter models, and audio taggers in here. The stubs
 * stand in for all of them: each output is a pure function of the media
 * bytes (via seeded hashing), so bundles rebuild byte-identically and
 * tests need no model weights. The manifest records which model id
 * produced each file either way.
 */

import { DecodedMedia, frameWindow } from "./media.js";
import {
  Rng,
  randInt,
  rngFromBytes,
  rngFromString,
  uniform,
  uniformVector,
} from "./prng.js";

export const TEXT_FEATURE_DIM = 768;

export interface ShotSpan {
  startS: number;
  endS: number;
}

export interface SentenceSpan {
  startS: number;
  endS: number;
  text: string;
}

export interface AudioEvent {
  startS: number;
  endS: number;
  label: string;
  prob: number;
}

export interface ShotDetector {
  modelId: string;
  detectShots(media: DecodedMedia): ShotSpan[];
}

export interface VisualEncoder {
  modelId: string;
  dim: number;
  frameFeature(media: DecodedMedia, timeS: number): Float64Array;
}

export interface Captioner {
  modelId: string;
  caption(media: DecodedMedia, shot: ShotSpan): string;
}

export interface TextEncoder768 {
  modelId: string;
  embed(text: string): Float64Array; // always TEXT_FEATURE_DIM wide
}

export interface Transcriber {
  modelId: string;
  transcribe(media: DecodedMedia): SentenceSpan[];
}

export interface LaughterModel {
  modelId: string;
  hopS: number;
  track(media: DecodedMedia): number[]; // probabilities in [0, 1]
}

export interface AudioTagger {
  modelId: string;
  tag(media: DecodedMedia): AudioEvent[];
}

export interface Backbones {
  shotDetector: ShotDetector;
  visual: VisualEncoder;
  captioner: Captioner;
  textEncoder: TextEncoder768;
  transcriber: Transcriber;
  laughter: LaughterModel;
  audioTagger: AudioTagger;
}

// ------------------------------------------------------------------ stubs

const CAPTION_VOCAB = [
  "room", "street", "kitchen", "office", "car", "crowd", "table", "stage",
  "man", "woman", "group", "dog", "child", "band", "chef", "host",
  "talking", "laughing", "walking", "cooking", "arguing", "dancing",
  "sitting", "running", "pointing", "smiling", "shouting", "waving",
];

const SPEECH_VOCAB = [
  "well", "you", "know", "that", "was", "not", "the", "plan", "today",
  "maybe", "we", "should", "ask", "her", "about", "it", "again", "fine",
  "sure", "right", "okay", "listen", "wait", "what", "really", "never",
];

const AUDIO_LABELS = [
  "speech", "music", "laughter", "applause", "crowd", "footsteps",
  "door", "traffic",
];

// Rare in the stub's label space, but present: the content filter
// downstream owns the decision, not the extractor.
const DISTRESS_LABELS = ["crying", "screaming", "moaning", "grunting"];

function mediaRng(media: DecodedMedia, stream: string): Rng {
  return rngFromString(`${media.sha256}:${stream}`);
}

function pickWords(rng: Rng, vocab: string[], count: number): string {
  const words: string[] = [];
  for (let i = 0; i < count; i++) {
    words.push(vocab[randInt(rng, 0, vocab.length)]!);
  }
  return words.join(" ");
}

/** Cuts the timeline into consecutive 2–5 s shots. */
export function stubShotDetector(): ShotDetector {
  return {
    modelId: "stub-shot-detector-v1",
    detectShots(media) {
      const rng = mediaRng(media, "shots");
      const shots: ShotSpan[] = [];
      let t = 0;
      while (t < media.durationS) {
        const len = uniform(rng, 2.0, 5.0);
        shots.push({ startS: t, endS: Math.min(t + len, media.durationS) });
        t += len;
      }
      // A sliver of a final shot carries no usable frames; merge it back.
      const last = shots[shots.length - 1]!;
      if (shots.length > 1 && last.endS - last.startS < 0.5) {
        shots.pop();
        shots[shots.length - 1]!.endS = media.durationS;
      }
      return shots;
    },
  };
}

/** Frame feature = seeded vector from the byte window at that time. */
export function stubVisualEncoder(dim: number): VisualEncoder {
  return {
    modelId: `stub-visual-encoder-v1-d${dim}`,
    dim,
    frameFeature(media, timeS) {
      return uniformVector(rngFromBytes(frameWindow(media, timeS)), dim);
    },
  };
}

/** Short scene description seeded by the shot's opening frame. */
export function stubCaptioner(): Captioner {
  return {
    modelId: "stub-captioner-v1",
    caption(media, shot) {
      const rng = rngFromBytes(frameWindow(media, shot.startS), 7);
      return pickWords(rng, CAPTION_VOCAB, randInt(rng, 4, 9));
    },
  };
}

/** Mean of per-token seeded vectors: a pure function of the text. */
export function stubTextEncoder(): TextEncoder768 {
  return {
    modelId: "stub-text-encoder-v1-d768",
    embed(text) {
      const out = new Float64Array(TEXT_FEATURE_DIM);
      const tokens = text.toLowerCase().split(/\s+/).filter((t) => t.length > 0);
      if (tokens.length === 0) return out;
      for (const token of tokens) {
        const vec = uniformVector(rngFromString(`tok:${token}`), TEXT_FEATURE_DIM);
        for (let i = 0; i < TEXT_FEATURE_DIM; i++) out[i]! += vec[i]!;
      }
      for (let i = 0; i < TEXT_FEATURE_DIM; i++) out[i]! /= tokens.length;
      return out;
    },
  };
}

/** One sentence every 1.5–3.5 s, words seeded by local content. */
export function stubTranscriber(): Transcriber {
  return {
    modelId: "stub-transcriber-v1",
    transcribe(media) {
      const gaps = mediaRng(media, "asr");
      const sentences: SentenceSpan[] = [];
      let t = 0;
      while (t < media.durationS - 1.0) {
        const len = uniform(gaps, 1.5, 3.5);
        const endS = Math.min(t + len, media.durationS);
        const words = rngFromBytes(frameWindow(media, t), 13);
        sentences.push({
          startS: t,
          endS,
          text: pickWords(words, SPEECH_VOCAB, randInt(words, 5, 12)) + ".",
        });
        t = endS;
      }
      return sentences;
    },
  };
}

/** Clamped random walk over 0.5 s frames. */
export function stubLaughterModel(): LaughterModel {
  const hopS = 0.5;
  return {
    modelId: "stub-laughter-model-v1",
    hopS,
    track(media) {
      const rng = mediaRng(media, "laughter");
      const frames = Math.ceil(media.durationS / hopS);
      const probs: number[] = [];
      let p = uniform(rng, 0.05, 0.4);
      for (let i = 0; i < frames; i++) {
        p = Math.min(1, Math.max(0, p + uniform(rng, -0.15, 0.15)));
        probs.push(p);
      }
      return probs;
    },
  };
}

/** A handful of labeled events; distress labels appear but are rare. */
export function stubAudioTagger(): AudioTagger {
  return {
    modelId: "stub-audio-tagger-v1",
    tag(media) {
      const rng = mediaRng(media, "audio-tags");
      const events: AudioEvent[] = [];
      const count = Math.max(2, Math.round(media.durationS / 8));
      for (let i = 0; i < count; i++) {
        const startS = uniform(rng, 0, Math.max(0.5, media.durationS - 2.0));
        const labels = rng() < 0.06 ? DISTRESS_LABELS : AUDIO_LABELS;
        events.push({
          startS,
          endS: Math.min(startS + uniform(rng, 0.5, 3.0), media.durationS),
          label: labels[randInt(rng, 0, labels.length)]!,
          prob: uniform(rng, 0.3, 1.0),
        });
      }
      events.sort((a, b) => a.startS - b.startS || a.endS - b.endS);
      return events;
    },
  };
}

export function stubBackbones(visualDim = 512): Backbones {
  return {
    shotDetector: stubShotDetector(),
    visual: stubVisualEncoder(visualDim),
    captioner: stubCaptioner(),
    textEncoder: stubTextEncoder(),
    transcriber: stubTranscriber(),
    laughter: stubLaughterModel(),
    audioTagger: stubAudioTagger(),
  };
}
