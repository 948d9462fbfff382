/**
 * Media probing for the stub backbones.
 *
 * Real deployments decode video/audio here; the stubs treat any file as
 * an opaque byte stream and map it onto a timeline at a fixed byte rate.
 * That keeps every downstream feature a pure function of the file's
 * content while exercising the same probe/decode error surface.
 */

import { createHash } from "node:crypto";
import { readFileSync, statSync } from "node:fs";
import path from "node:path";

/** Bytes of "media" consumed per second of timeline. */
export const BYTES_PER_SECOND = 1024;
/** Window of bytes a single decoded frame sees. */
export const FRAME_WINDOW_BYTES = 256;
/** Anything smaller cannot carry even a couple of shots. */
export const MIN_MEDIA_BYTES = 2048;

export class MediaError extends Error {}

export interface DecodedMedia {
  /** Path as given on the command line. */
  mediaPath: string;
  /** Raw content; all stub features derive from it. */
  bytes: Uint8Array;
  /** Hex sha256 of the content, recorded in the manifest. */
  sha256: string;
  /** Timeline length implied by the byte rate. */
  durationS: number;
}

export function probeMedia(mediaPath: string): DecodedMedia {
  let bytes: Uint8Array;
  try {
    if (!statSync(mediaPath).isFile()) {
      throw new MediaError(`${mediaPath}: not a regular file`);
    }
    bytes = readFileSync(mediaPath);
  } catch (err) {
    if (err instanceof MediaError) throw err;
    const msg = err instanceof Error ? err.message : String(err);
    throw new MediaError(`${mediaPath}: cannot read media (${msg})`);
  }
  if (bytes.length < MIN_MEDIA_BYTES) {
    throw new MediaError(
      `${mediaPath}: ${bytes.length} bytes is too short to decode ` +
      `(need >= ${MIN_MEDIA_BYTES})`,
    );
  }
  const sha256 = createHash("sha256").update(bytes).digest("hex");
  return {
    mediaPath,
    bytes,
    sha256,
    durationS: bytes.length / BYTES_PER_SECOND,
  };
}

/** The byte window a frame decoded at time t sees. */
export function frameWindow(media: DecodedMedia, timeS: number): Uint8Array {
  const center = Math.floor(timeS * BYTES_PER_SECOND);
  const lo = Math.max(0, Math.min(center, media.bytes.length - 1));
  return media.bytes.subarray(lo, Math.min(lo + FRAME_WINDOW_BYTES, media.bytes.length));
}

/** Filesystem-safe title id derived from the media filename. */
export function titleIdForMedia(mediaPath: string): string {
  const base = path.basename(mediaPath).replace(/\.[^.]*$/, "");
  const safe = base.replace(/[^A-Za-z0-9_-]+/g, "-").replace(/^-+|-+$/g, "");
  return safe || "untitled";
}
