/**
 * Scorer wire-protocol server over stdin/stdout.
 *
 * Line-delimited JSON, one reply line per non-empty request line:
 *   request  {"id": <any>, "sentences": ["...", ...]}
 *   success  {"id": <echoed>, "score": <number in [0, 1]>}
 *   failure  {"id": <echoed if parseable, else null>, "error": "..."}
 *
 * Malformed requests never kill the process — the error record is the
 * reply and the loop continues. Blank lines are ignored. The process
 * exits when stdin closes.
 */

import { createInterface } from "node:readline";
import { pathToFileURL } from "node:url";

import { TranscriptHumorScorer } from "./scorer.js";

export interface ScoreReply {
  id: unknown;
  score: number;
}

export interface ErrorReply {
  id: unknown;
  error: string;
}

/** One request line in, one reply object out. Never throws. */
export function handleRequestLine(
  line: string,
  scorer: TranscriptHumorScorer,
): ScoreReply | ErrorReply | null {
  const trimmed = line.trim();
  if (trimmed === "") return null;

  let parsed: unknown;
  try {
    parsed = JSON.parse(trimmed);
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    return { id: null, error: `bad JSON: ${msg}` };
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    return { id: null, error: "request must be a JSON object" };
  }
  const req = parsed as Record<string, unknown>;
  const id = "id" in req ? req["id"] : null;
  if (!("id" in req)) {
    return { id: null, error: "request is missing 'id'" };
  }
  const sentences = req["sentences"];
  if (!Array.isArray(sentences)) {
    return { id, error: "'sentences' must be an array of strings" };
  }
  for (const s of sentences) {
    if (typeof s !== "string") {
      return { id, error: "'sentences' must contain only strings" };
    }
  }
  return { id, score: scorer.scoreChunk(sentences as string[]) };
}

export function serveStdio(): void {
  const scorer = new TranscriptHumorScorer();
  const rl = createInterface({ input: process.stdin, crlfDelay: Infinity });
  rl.on("line", (line) => {
    const reply = handleRequestLine(line, scorer);
    if (reply !== null) {
      process.stdout.write(JSON.stringify(reply) + "\n");
    }
  });
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  serveStdio();
}
