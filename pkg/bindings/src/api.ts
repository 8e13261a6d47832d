/**
 * Public operations: count, verify, embed, generate.
 *
 * Each call materialises its inputs as the CLI's edge-list format in a
 * scratch directory, runs one core invocation, and parses the files the
 * core writes back. Results are plain immutable data; all numerical work
 * happens in the core process.
 */

import { readFile, readdir, writeFile } from "node:fs/promises";
import { join } from "node:path";

import { InputError } from "./errors.js";
import {
  CsrMatrix,
  EdgePair,
  EmbeddingTable,
  OrbitPairKey,
  formatEdgeList,
  formatKey,
  parseEdgeList,
  parseEmbedding,
  parseLabels,
  parseManifest,
  parseTriplets,
} from "./formats.js";
import { runCli, withScratchDir } from "./runner.js";

const TRIPLET_FILE = /^o\d+-o\d+-h\d\.tsv$/;

/**
 * The complete result of one counting run: all 28 role-pair matrices,
 * node labels in row order, and the run manifest.
 */
export class BoundResultSet {
  readonly labels: string[];
  readonly manifest: Record<string, string>;
  private readonly byKey: Map<string, CsrMatrix>;

  constructor(
    matrices: Map<string, CsrMatrix>,
    labels: string[],
    manifest: Record<string, string>,
  ) {
    this.byKey = matrices;
    this.labels = labels;
    this.manifest = manifest;
  }

  /** Number of nodes (rows of every matrix). */
  get n(): number {
    return this.labels.length;
  }

  /** Canonical key strings present, sorted. */
  keys(): string[] {
    return [...this.byKey.keys()].sort();
  }

  /** Matrix for a key given as `o1-o2-h1` or as an {i, j, h} object. */
  matrix(key: string | OrbitPairKey): CsrMatrix {
    const name = typeof key === "string" ? key : formatKey(key);
    const found = this.byKey.get(name);
    if (found === undefined) {
      throw new InputError(`unknown matrix key ${name}`);
    }
    return found;
  }
}

/** Count every role-pair matrix for the given edges. */
export async function count(
  edges: readonly EdgePair[],
  threads = 1,
): Promise<BoundResultSet> {
  requirePositiveInt("threads", threads);
  const text = formatEdgeList(edges);
  return withScratchDir(async (dir) => {
    const input = join(dir, "edges.txt");
    const outdir = join(dir, "out");
    await writeFile(input, text, "utf8");
    await runCli([
      "count",
      "--input",
      input,
      "--out",
      outdir,
      "--threads",
      String(threads),
    ]);
    const matrices = new Map<string, CsrMatrix>();
    for (const name of await readdir(outdir)) {
      if (!TRIPLET_FILE.test(name)) continue;
      const parsed = parseTriplets(await readFile(join(outdir, name), "utf8"));
      matrices.set(formatKey(parsed.key), parsed.matrix);
    }
    const labels = parseLabels(await readFile(join(outdir, "labels.tsv"), "utf8"));
    const manifest = parseManifest(
      await readFile(join(outdir, "manifest.txt"), "utf8"),
    );
    return new BoundResultSet(matrices, labels, manifest);
  });
}

/**
 * Re-count everything by brute force in the core and compare.
 *
 * Resolves to the core's one-line success message; a detected divergence
 * rejects with InconsistencyError, oversized inputs with ResourceError.
 */
export async function verify(
  edges: readonly EdgePair[],
  threads = 1,
): Promise<string> {
  requirePositiveInt("threads", threads);
  const text = formatEdgeList(edges);
  return withScratchDir(async (dir) => {
    const input = join(dir, "edges.txt");
    await writeFile(input, text, "utf8");
    const { stdout } = await runCli([
      "verify",
      "--input",
      input,
      "--threads",
      String(threads),
    ]);
    return stdout.trim();
  });
}

export type PmiKind = "gopmi" | "rwpmi" | "deepwalk";

/** An embedding plus the manifest describing how it was produced. */
export interface BoundEmbedding extends EmbeddingTable {
  readonly manifest: Record<string, string>;
}

/**
 * Embed nodes via one of the three PMI constructions.
 *
 * The third argument selects the construction's parameter: a key string
 * (e.g. `"o0-0"`) for `gopmi`, the walk power for `rwpmi`, or the window
 * size for `deepwalk`. `b` is the shift divisor (default 1).
 */
export async function embed(
  edges: readonly EdgePair[],
  pmi: PmiKind,
  keyOrParam: string | number,
  dim: number,
  b?: number,
  threads = 1,
): Promise<BoundEmbedding> {
  requirePositiveInt("dim", dim);
  requirePositiveInt("threads", threads);
  const args = ["--pmi", pmi, "--dim", String(dim), "--threads", String(threads)];
  if (pmi === "gopmi") {
    if (typeof keyOrParam !== "string") {
      throw new InputError("gopmi takes a key string, e.g. \"o0-0\"");
    }
    args.push("--key", keyOrParam);
  } else if (pmi === "rwpmi") {
    requirePositiveInt("power", keyOrParam);
    args.push("--power", String(keyOrParam));
  } else if (pmi === "deepwalk") {
    requirePositiveInt("T", keyOrParam);
    args.push("--T", String(keyOrParam));
  } else {
    throw new InputError(`unknown PMI kind ${String(pmi)}`);
  }
  if (b !== undefined) {
    if (typeof b !== "number" || !Number.isFinite(b)) {
      throw new InputError("b must be a finite number");
    }
    args.push("--b", String(b));
  }
  const text = formatEdgeList(edges);
  return withScratchDir(async (dir) => {
    const input = join(dir, "edges.txt");
    const out = join(dir, "embedding.tsv");
    await writeFile(input, text, "utf8");
    await runCli(["embed", "--input", input, ...args, "--out", out]);
    const table = parseEmbedding(await readFile(out, "utf8"));
    const manifest = parseManifest(await readFile(`${out}.manifest.txt`, "utf8"));
    return { ...table, manifest };
  });
}

/** A generated graph: its edges in file order plus the run manifest. */
export interface GeneratedGraph {
  readonly edges: EdgePair[];
  readonly manifest: Record<string, string>;
}

/** Generate a seeded random graph (`er` uniform or `ba` preferential). */
export async function generate(
  model: "er" | "ba" | "ER" | "BA",
  nodes: number,
  edges: number,
  seed = 0,
): Promise<GeneratedGraph> {
  requirePositiveInt("nodes", nodes);
  if (!Number.isInteger(edges) || edges < 0) {
    throw new InputError(`edges must be a non-negative integer, got ${edges}`);
  }
  if (!Number.isInteger(seed) || seed < 0) {
    throw new InputError(`seed must be a non-negative integer, got ${seed}`);
  }
  return withScratchDir(async (dir) => {
    const out = join(dir, "graph.txt");
    await runCli([
      "generate",
      "--model",
      model.toLowerCase(),
      "--nodes",
      String(nodes),
      "--edges",
      String(edges),
      "--seed",
      String(seed),
      "--out",
      out,
    ]);
    const pairs = parseEdgeList(await readFile(out, "utf8"));
    const manifest = parseManifest(await readFile(`${out}.manifest.txt`, "utf8"));
    return { edges: pairs, manifest };
  });
}

function requirePositiveInt(name: string, value: unknown): void {
  if (typeof value !== "number" || !Number.isInteger(value) || value < 1) {
    throw new InputError(`${name} must be a positive integer, got ${String(value)}`);
  }
}
