/** Shared test plumbing: boot the real game server as a child process and
 * run the command line tools the tests compare against.
 */

import { spawn, spawnSync } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

/** Repository root: the Python package that owns the server and CLI. */
export const REPO_ROOT = resolve(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "..",
);

export interface ServerHandle {
  baseUrl: string;
  stop(): void;
}

export async function startServer(): Promise<ServerHandle> {
  const port = 8700 + Math.floor(Math.random() * 250);
  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "firegraph.cli", "serve", "--port", String(port)],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString();
  });
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (proc.exitCode !== null) {
      throw new Error(`server exited early (code ${proc.exitCode}): ${stderr}`);
    }
    try {
      const resp = await fetch(`${baseUrl}/session/does-not-exist`);
      if (resp.status === 404) {
        break;
      }
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      proc.kill();
      throw new Error(`server did not come up on ${baseUrl}: ${stderr}`);
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  return {
    baseUrl,
    stop() {
      proc.kill();
    },
  };
}

export interface CliResult {
  status: number;
  stdout: string;
  stderr: string;
}

/** Run one firegraph CLI verb from the repository root. */
export function runCli(args: string[]): CliResult {
  const out = spawnSync("python3", ["-m", "firegraph.cli", ...args], {
    cwd: REPO_ROOT,
    encoding: "utf-8",
    timeout: 120_000,
  });
  if (out.error !== undefined) {
    throw out.error;
  }
  return { status: out.status ?? -1, stdout: out.stdout, stderr: out.stderr };
}

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}
