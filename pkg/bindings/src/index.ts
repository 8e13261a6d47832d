/**
 * TypeScript bindings for the orbitadj core.
 *
 * Everything is computed by the core CLI; this package supplies typed
 * wrappers around its file formats. See the package README for usage.
 */

export { BoundResultSet, count, embed, generate, verify } from "./api.js";
export type { BoundEmbedding, GeneratedGraph, PmiKind } from "./api.js";
export {
  BindingError,
  InconsistencyError,
  InputError,
  ResourceError,
} from "./errors.js";
export {
  CsrMatrix,
  formatEdgeList,
  formatKey,
  parseEdgeList,
  parseEmbedding,
  parseLabels,
  parseManifest,
  parseTriplets,
  serializeTriplets,
} from "./formats.js";
export type { EdgePair, EmbeddingTable, KeyedMatrix, OrbitPairKey } from "./formats.js";
export { VERSION, coreVersion } from "./runner.js";
