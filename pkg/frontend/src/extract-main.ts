/**
 * Batch extraction CLI: media files in, a corpus of bundles out.
 *
 *   node dist/extract-main.js <media>... --out <corpusDir>
 *       [--frames-per-shot N] [--visual-dim D]
 *
 * Each media file becomes one bundle directory under --out, so the
 * result is directly consumable by the pipeline's --corpus flag. Exit
 * codes: 0 all bundles written, 1 bad usage or failed media, 2 bug.
 */

import { pathToFileURL } from "node:url";

import { ExtractError, extractAll } from "./extract.js";
import { MediaError } from "./media.js";

interface CliArgs {
  media: string[];
  out: string;
  framesPerShot?: number;
  visualDim?: number;
}

class UsageError extends Error {}

const USAGE =
  "usage: extract-main <media>... --out <corpusDir> " +
  "[--frames-per-shot N] [--visual-dim D]";

export function parseArgs(argv: string[]): CliArgs {
  const media: string[] = [];
  let out: string | undefined;
  let framesPerShot: number | undefined;
  let visualDim: number | undefined;

  const takeValue = (flag: string, i: number): string => {
    const v = argv[i + 1];
    if (v === undefined) throw new UsageError(`${flag} needs a value`);
    return v;
  };
  const takeInt = (flag: string, i: number): number => {
    const n = Number(takeValue(flag, i));
    if (!Number.isInteger(n) || n < 1) {
      throw new UsageError(`${flag} needs a positive integer`);
    }
    return n;
  };

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    if (arg === "--out") {
      out = takeValue(arg, i);
      i++;
    } else if (arg === "--frames-per-shot") {
      framesPerShot = takeInt(arg, i);
      i++;
    } else if (arg === "--visual-dim") {
      visualDim = takeInt(arg, i);
      i++;
    } else if (arg.startsWith("--")) {
      throw new UsageError(`unknown flag ${arg}`);
    } else {
      media.push(arg);
    }
  }
  if (media.length === 0) throw new UsageError("no media files given");
  if (out === undefined) throw new UsageError("--out is required");
  return { media, out, framesPerShot, visualDim };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return 1;
    }
    throw err;
  }

  for (const mediaPath of args.media) {
    try {
      const manifest = extractAll(mediaPath, args.out, {
        framesPerShot: args.framesPerShot,
        visualDim: args.visualDim,
      });
      const state = manifest.complete
        ? "ok"
        : `partial (${manifest.partial.map((p) => p.stage).join(", ")} failed)`;
      console.log(
        `${mediaPath} -> ${manifest.outputs.length} files, ` +
        `${manifest.media.duration_s.toFixed(1)}s: ${state}`,
      );
    } catch (err) {
      if (err instanceof MediaError || err instanceof ExtractError) {
        console.error(`error: ${mediaPath}: ${err.message}`);
        return 1;
      }
      throw err;
    }
  }
  return 0;
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(err instanceof Error ? err.stack ?? err.message : String(err));
    process.exit(2);
  }
}
