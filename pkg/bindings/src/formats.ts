/**
 * Parsers and views for the core's line-oriented text formats.
 *
 * Three formats cross the process boundary, all tab-separated:
 *  - triplet matrices: `# n:` / `# key:` headers, then `row⇥col⇥count`;
 *  - embeddings: one `label⇥v1⇥…⇥vd` line per node;
 *  - manifests: flat `key⇥value` pairs.
 *
 * Counts are 64-bit integers in the core; they are held here as
 * JavaScript numbers, which are exact for every value the desk-scale
 * graphs can produce (well below 2^53).
 */

import { InputError } from "./errors.js";

/** An ordered orbit-pair key: orbit i on rows, orbit j on columns, hop distance h. */
export interface OrbitPairKey {
  readonly i: number;
  readonly j: number;
  readonly h: number;
}

/** Canonical string form of a key, matching the core's file names (`o1-o2-h1`). */
export function formatKey(key: OrbitPairKey): string {
  return `o${key.i}-o${key.j}-h${key.h}`;
}

/**
 * Sparse integer matrix in compressed-sparse-row form.
 *
 * Row pointers and column indices are typed arrays; values stay exact
 * because every count fits a double. Instances are immutable views.
 */
export class CsrMatrix {
  readonly n: number;
  readonly rowPtr: Int32Array;
  readonly cols: Int32Array;
  readonly values: Float64Array;

  constructor(n: number, rowPtr: Int32Array, cols: Int32Array, values: Float64Array) {
    if (rowPtr.length !== n + 1) {
      throw new InputError(`row pointer length ${rowPtr.length} does not match n=${n}`);
    }
    if (cols.length !== values.length) {
      throw new InputError("column and value arrays must have the same length");
    }
    this.n = n;
    this.rowPtr = rowPtr;
    this.cols = cols;
    this.values = values;
  }

  /** Number of stored (non-zero) entries. */
  get nnz(): number {
    return this.values.length;
  }

  /** Entry at (row, col); zero when absent. */
  get(row: number, col: number): number {
    if (row < 0 || row >= this.n || col < 0 || col >= this.n) {
      throw new InputError(`index (${row}, ${col}) out of range for n=${this.n}`);
    }
    let lo = this.rowPtr[row]!;
    let hi = this.rowPtr[row + 1]!;
    while (lo < hi) {
      const mid = (lo + hi) >>> 1;
      const c = this.cols[mid]!;
      if (c === col) return this.values[mid]!;
      if (c < col) lo = mid + 1;
      else hi = mid;
    }
    return 0;
  }

  /** Per-row sums of stored values. */
  rowSums(): Float64Array {
    const sums = new Float64Array(this.n);
    for (let r = 0; r < this.n; r++) {
      for (let k = this.rowPtr[r]!; k < this.rowPtr[r + 1]!; k++) {
        sums[r]! += this.values[k]!;
      }
    }
    return sums;
  }

  /** Dense row-major copy; only sensible for small matrices. */
  toDense(): number[][] {
    const out: number[][] = [];
    for (let r = 0; r < this.n; r++) {
      const row = new Array<number>(this.n).fill(0);
      for (let k = this.rowPtr[r]!; k < this.rowPtr[r + 1]!; k++) {
        row[this.cols[k]!] = this.values[k]!;
      }
      out.push(row);
    }
    return out;
  }

  /** Iterate stored entries as [row, col, value] in row-major order. */
  *entries(): IterableIterator<[number, number, number]> {
    for (let r = 0; r < this.n; r++) {
      for (let k = this.rowPtr[r]!; k < this.rowPtr[r + 1]!; k++) {
        yield [r, this.cols[k]!, this.values[k]!];
      }
    }
  }
}

/** A parsed triplet file: the matrix plus the key its header declares. */
export interface KeyedMatrix {
  readonly key: OrbitPairKey;
  readonly matrix: CsrMatrix;
}

/**
 * Parse the core's triplet format.
 *
 * Data lines arrive sorted by (row, col), so the CSR arrays are built in
 * one pass without re-sorting.
 */
export function parseTriplets(text: string): KeyedMatrix {
  let n = -1;
  let key: OrbitPairKey | null = null;
  const rows: number[] = [];
  const cols: number[] = [];
  const values: number[] = [];
  let lineno = 0;
  for (const raw of text.split("\n")) {
    lineno++;
    const line = raw.trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      if (body.startsWith("n:")) {
        n = Number(body.slice(2).trim());
      } else if (body.startsWith("key:")) {
        const match = /^o(\d+)-o(\d+)\s+hops=(\d+)$/.exec(body.slice(4).trim());
        if (!match) {
          throw new InputError(`triplet line ${lineno}: malformed key header`);
        }
        key = { i: Number(match[1]), j: Number(match[2]), h: Number(match[3]) };
      }
      continue;
    }
    const parts = line.split("\t");
    if (parts.length !== 3) {
      throw new InputError(`triplet line ${lineno}: expected 3 tab-separated fields`);
    }
    rows.push(Number(parts[0]));
    cols.push(Number(parts[1]));
    values.push(Number(parts[2]));
  }
  if (n < 0 || key === null) {
    throw new InputError("triplet input missing '# n:' or '# key:' header");
  }
  const rowPtr = new Int32Array(n + 1);
  for (const r of rows) rowPtr[r + 1]!++;
  for (let r = 0; r < n; r++) rowPtr[r + 1]! += rowPtr[r]!;
  return {
    key,
    matrix: new CsrMatrix(n, rowPtr, Int32Array.from(cols), Float64Array.from(values)),
  };
}

/**
 * Render a matrix back into the triplet format, byte-for-byte as the
 * core writes it (entries in row-major order, integer values).
 */
export function serializeTriplets(matrix: CsrMatrix, key: OrbitPairKey): string {
  const lines = [`# n: ${matrix.n}`, `# key: o${key.i}-o${key.j} hops=${key.h}`];
  for (const [r, c, v] of matrix.entries()) {
    lines.push(`${r}\t${c}\t${v}`);
  }
  return lines.join("\n") + "\n";
}

/** A parsed embedding: node labels in row order and one vector per node. */
export interface EmbeddingTable {
  readonly labels: string[];
  readonly vectors: Float64Array[];
  readonly dim: number;
}

/** Parse the embedding format: `label⇥v1⇥…⇥vd`, one node per line. */
export function parseEmbedding(text: string): EmbeddingTable {
  const labels: string[] = [];
  const vectors: Float64Array[] = [];
  let dim = -1;
  let lineno = 0;
  for (const raw of text.split("\n")) {
    lineno++;
    if (raw === "") continue;
    const parts = raw.split("\t");
    if (parts.length < 2) {
      throw new InputError(`embedding line ${lineno}: expected label and values`);
    }
    const vec = Float64Array.from(parts.slice(1), Number);
    if (vec.some(Number.isNaN)) {
      throw new InputError(`embedding line ${lineno}: non-numeric value`);
    }
    if (dim === -1) dim = vec.length;
    else if (vec.length !== dim) {
      throw new InputError(`embedding line ${lineno}: ragged row width`);
    }
    labels.push(parts[0]!);
    vectors.push(vec);
  }
  if (dim === -1) {
    throw new InputError("embedding input is empty");
  }
  return { labels, vectors, dim };
}

/** Parse the flat `key⇥value` manifest format into a record. */
export function parseManifest(text: string): Record<string, string> {
  const out: Record<string, string> = {};
  let lineno = 0;
  for (const raw of text.split("\n")) {
    lineno++;
    if (raw === "") continue;
    const tab = raw.indexOf("\t");
    if (tab < 0) {
      throw new InputError(`manifest line ${lineno}: missing tab separator`);
    }
    out[raw.slice(0, tab)] = raw.slice(tab + 1);
  }
  return out;
}

/** Parse the `id⇥label` map written next to counted matrices. */
export function parseLabels(text: string): string[] {
  const labels: string[] = [];
  for (const raw of text.split("\n")) {
    if (raw === "") continue;
    const tab = raw.indexOf("\t");
    if (tab < 0) {
      throw new InputError("label map line missing tab separator");
    }
    const id = Number(raw.slice(0, tab));
    labels[id] = raw.slice(tab + 1);
  }
  return labels;
}

/** One undirected edge as a pair of node labels. */
export type EdgePair = readonly [string, string];

/**
 * Render edge pairs as the edge-list format the CLI consumes.
 *
 * Node ids are assigned by the core in first-appearance order, so the
 * pair order given here fixes the row order of every result.
 */
export function formatEdgeList(edges: readonly EdgePair[]): string {
  if (edges.length === 0) {
    throw new InputError("edge list is empty");
  }
  const lines: string[] = [];
  for (const [index, pair] of edges.entries()) {
    if (!Array.isArray(pair) || pair.length !== 2) {
      throw new InputError(`edge ${index}: expected a [label, label] pair`);
    }
    const [a, b] = pair;
    for (const label of [a, b]) {
      if (typeof label !== "string" || label === "" || /\s/.test(label)) {
        throw new InputError(
          `edge ${index}: labels must be non-empty and whitespace-free, got ${JSON.stringify(label)}`,
        );
      }
    }
    lines.push(`${a}\t${b}`);
  }
  return lines.join("\n") + "\n";
}

/** Parse an edge-list file (comments and blank lines skipped) into pairs. */
export function parseEdgeList(text: string): EdgePair[] {
  const edges: EdgePair[] = [];
  let lineno = 0;
  for (const raw of text.split("\n")) {
    lineno++;
    const line = raw.trim();
    if (line === "" || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    if (parts.length !== 2) {
      throw new InputError(`edge list line ${lineno}: expected 2 fields`);
    }
    edges.push([parts[0]!, parts[1]!]);
  }
  return edges;
}
