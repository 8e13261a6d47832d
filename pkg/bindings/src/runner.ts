/**
 * Process plumbing: locate and spawn the core CLI.
 *
 * The bindings never reimplement any computation — every call shells out
 * to the `orbitadj` command (or `python3 -m orbitadj.cli`) and exchanges
 * data through its documented file formats. Set ORBITADJ_CLI to override
 * the executable, e.g. `ORBITADJ_CLI="python3 -m orbitadj.cli"`.
 */

import { execFile } from "node:child_process";
import { mkdtemp, rm } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { BindingError, errorForExit } from "./errors.js";

/** Version of this binding package; must match the core's own version. */
export const VERSION = "0.1.0";

export interface RunResult {
  readonly stdout: string;
  readonly stderr: string;
}

let resolvedCommand: string[] | null = null;

function candidateCommands(): string[][] {
  const override = process.env["ORBITADJ_CLI"];
  if (override && override.trim() !== "") {
    return [override.trim().split(/\s+/)];
  }
  return [["orbitadj"], ["python3", "-m", "orbitadj.cli"]];
}

async function tryRun(command: string[], args: string[]): Promise<RunResult> {
  const [exe, ...prefix] = command;
  return new Promise<RunResult>((resolve, reject) => {
    execFile(
      exe!,
      [...prefix, ...args],
      { maxBuffer: 256 * 1024 * 1024 },
      (error, stdout, stderr) => {
        if (error === null) {
          resolve({ stdout, stderr });
          return;
        }
        const code = typeof error.code === "number" ? error.code : null;
        if (code !== null) {
          reject(errorForExit(code, stderr));
        } else {
          reject(new BindingError(`failed to spawn ${exe}: ${error.message}`));
        }
      },
    );
  });
}

/**
 * Run one CLI invocation, resolving the executable on first use.
 *
 * Resolution probes each candidate with `--version` once and caches the
 * winner for the life of the process.
 */
export async function runCli(args: string[]): Promise<RunResult> {
  if (resolvedCommand === null) {
    const failures: string[] = [];
    for (const candidate of candidateCommands()) {
      try {
        await tryRun(candidate, ["--version"]);
        resolvedCommand = candidate;
        break;
      } catch (err) {
        failures.push(`${candidate.join(" ")}: ${(err as Error).message}`);
      }
    }
    if (resolvedCommand === null) {
      throw new BindingError(
        `no usable core CLI found; tried:\n  ${failures.join("\n  ")}`,
      );
    }
  }
  return tryRun(resolvedCommand, args);
}

/** Report the core CLI's version string (e.g. "0.1.0"). */
export async function coreVersion(): Promise<string> {
  const { stdout } = await runCli(["--version"]);
  const match = /orbitadj\s+(\S+)/.exec(stdout);
  if (!match) {
    throw new BindingError(`unrecognised --version output: ${stdout.trim()}`);
  }
  return match[1]!;
}

/** Run `body` with a private scratch directory, removed afterwards. */
export async function withScratchDir<T>(body: (dir: string) => Promise<T>): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "orbitadj-"));
  try {
    return await body(dir);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}
