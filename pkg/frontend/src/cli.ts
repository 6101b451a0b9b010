/**
 * Subprocess bridge to the core CLI. Every session operation shells out to
 * `python3 -m tacmap <subcommand> ...` and parses its one-line JSON summary;
 * the adapter itself performs no numerics.
 */

import { spawnSync } from "node:child_process";

/** The core process failed; carries its exit code and diagnostic text. */
export class CoreProcessError extends Error {
  constructor(
    readonly exitCode: number,
    readonly diagnostics: string,
    command: string,
  ) {
    super(`tacmap ${command} exited with code ${exitCode}: ${diagnostics.trim()}`);
  }
}

export interface CoreOptions {
  /** interpreter used to run the core; defaults to $TACMAP_PYTHON or python3 */
  pythonExecutable?: string;
}

export function resolvePython(opts?: CoreOptions): string {
  return opts?.pythonExecutable ?? process.env["TACMAP_PYTHON"] ?? "python3";
}

/** Run one core subcommand and return its parsed JSON stdout. */
export function runCore(python: string, args: string[]): Record<string, unknown> {
  const proc = spawnSync(python, ["-m", "tacmap", ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) {
    // never launched; use a sentinel exit code so callers can still
    // catch the one documented error type
    throw new CoreProcessError(-1, `failed to launch ${python}: ${proc.error.message}`, args[0] ?? "");
  }
  if (proc.status !== 0) {
    throw new CoreProcessError(proc.status ?? -1, proc.stderr ?? "", args[0] ?? "");
  }
  return JSON.parse(proc.stdout) as Record<string, unknown>;
}
