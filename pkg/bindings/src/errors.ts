/**
 * Error hierarchy mirroring the core CLI's exit-code contract.
 *
 * Exit code 1 → InputError, 2 → InconsistencyError, 3 → ResourceError.
 * Anything else (spawn failure, signal, unparseable output) surfaces as
 * the base BindingError.
 */

/** Base class for every failure raised by the bindings. */
export class BindingError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** The input (edge pairs, key string, parameters) was rejected. */
export class InputError extends BindingError {}

/** The core detected an internal inconsistency (verification mismatch). */
export class InconsistencyError extends BindingError {}

/** The core refused the computation at a documented resource cap. */
export class ResourceError extends BindingError {}

/** Map a CLI exit code plus its stderr text to the matching error. */
export function errorForExit(code: number, stderr: string): BindingError {
  const detail = stderr.trim() || `exit code ${code}`;
  switch (code) {
    case 1:
      return new InputError(detail);
    case 2:
      return new InconsistencyError(detail);
    case 3:
      return new ResourceError(detail);
    default:
      return new BindingError(detail);
  }
}
