/**
 * Shared plumbing for the adapter tests: deterministic fake media files,
 * child-process wrappers for the pipeline CLI and the scorer server, and
 * recursive byte-level directory comparison.
 */

import { spawn, spawnSync, SpawnSyncReturns } from "node:child_process";
import { mkdtempSync, readdirSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { rngFromString } from "../src/prng.js";

export const FRONTEND_DIR = fileURLToPath(new URL("..", import.meta.url));
export const REPO_ROOT = path.resolve(FRONTEND_DIR, "..");
export const SCORER_MAIN = path.join(FRONTEND_DIR, "dist", "scorer-main.js");
export const EXTRACT_MAIN = path.join(FRONTEND_DIR, "dist", "extract-main.js");
export const PYTHON = process.env.PYTHON ?? "python3";

export function tempDir(prefix: string): string {
  return mkdtempSync(path.join(tmpdir(), prefix));
}

/** Write `byteLen` pseudo-random bytes derived from `seedText`. */
export function makeMediaFile(
  filePath: string,
  seedText: string,
  byteLen: number,
): string {
  const rng = rngFromString(seedText);
  const bytes = Buffer.alloc(byteLen);
  for (let i = 0; i < byteLen; i++) {
    bytes[i] = Math.floor(rng() * 256);
  }
  writeFileSync(filePath, bytes);
  return filePath;
}

/** Run one pipeline subcommand; never throws on nonzero exit. */
export function runPipeline(
  args: string[],
  opts: { env?: Record<string, string> } = {},
): SpawnSyncReturns<string> {
  return spawnSync(PYTHON, ["-m", "laughcut", ...args], {
    cwd: REPO_ROOT,
    encoding: "utf-8",
    env: { ...process.env, ...opts.env },
    timeout: 110_000,
  });
}

export function expectExitZero(res: SpawnSyncReturns<string>, what: string): void {
  if (res.status !== 0) {
    throw new Error(
      `${what} exited ${res.status}\nstdout:\n${res.stdout}\nstderr:\n${res.stderr}`,
    );
  }
}

/** Map of relative path -> content for every file under dir. */
export function readTree(dir: string): Map<string, Buffer> {
  const tree = new Map<string, Buffer>();
  const walk = (rel: string) => {
    for (const entry of readdirSync(path.join(dir, rel), { withFileTypes: true })) {
      const relPath = rel === "" ? entry.name : `${rel}/${entry.name}`;
      if (entry.isDirectory()) walk(relPath);
      else tree.set(relPath, readFileSync(path.join(dir, relPath)));
    }
  };
  walk("");
  return tree;
}

/** Line-oriented client for a spawned scorer server process. */
export class ScorerProcess {
  private child;
  private buffered = "";
  private replyLines: string[] = [];
  private waiters: Array<{ count: number; resolve: () => void }> = [];
  private exited: Promise<number | null>;

  constructor(command = "node", args: string[] = [SCORER_MAIN]) {
    this.child = spawn(command, args, { stdio: ["pipe", "pipe", "inherit"] });
    this.child.stdout.setEncoding("utf-8");
    this.child.stdout.on("data", (chunk: string) => {
      this.buffered += chunk;
      const parts = this.buffered.split("\n");
      this.buffered = parts.pop() ?? "";
      for (const line of parts) {
        if (line.trim() !== "") this.replyLines.push(line);
      }
      this.waiters = this.waiters.filter((w) => {
        if (this.replyLines.length >= w.count) {
          w.resolve();
          return false;
        }
        return true;
      });
    });
    this.exited = new Promise((resolve) => this.child.on("exit", resolve));
  }

  get pid(): number | undefined {
    return this.child.pid;
  }

  get alive(): boolean {
    return this.child.exitCode === null && this.child.signalCode === null;
  }

  sendLine(line: string): void {
    this.child.stdin.write(line + "\n");
  }

  send(request: unknown): void {
    this.sendLine(JSON.stringify(request));
  }

  /** Resolve once at least `count` reply lines have arrived. */
  async repliesAtLeast(count: number, timeoutMs = 60_000): Promise<unknown[]> {
    if (this.replyLines.length < count) {
      await new Promise<void>((resolve, reject) => {
        const timer = setTimeout(
          () => reject(new Error(
            `timed out waiting for ${count} replies, got ${this.replyLines.length}`,
          )),
          timeoutMs,
        );
        this.waiters.push({
          count,
          resolve: () => {
            clearTimeout(timer);
            resolve();
          },
        });
      });
    }
    return this.replyLines.slice(0, count).map((l) => JSON.parse(l) as unknown);
  }

  get replyCount(): number {
    return this.replyLines.length;
  }

  /** Close stdin and wait for the process to exit. */
  async close(): Promise<number | null> {
    this.child.stdin.end();
    return this.exited;
  }

  kill(): void {
    this.child.kill();
  }
}
