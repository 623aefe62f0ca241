/** Client-side mirrors of the server's parameter preconditions.
 *
 * These exist only to catch obviously bad input before a request is sent
 * (an even blur kernel, a negative sigma); the server remains the authority
 * and its path-qualified errors are rendered next to the fields regardless.
 */

export type FieldErrors = Record<string, string>;

const CHECKS: Record<string, (v: number) => string | null> = {
  blur_kernel: (v) =>
    !Number.isInteger(v) || v < 1 ? "must be a positive integer" : v % 2 === 0 ? "must be odd" : null,
  blur_sigma: (v) => (v <= 0 ? "must be > 0" : null),
  threshold: (v) => (v < 0 || v > 255 ? "must be in 0..255" : null),
  lit_threshold: (v) => (v < 0 || v > 255 ? "must be in 0..255" : null),
  digits: (v) => (!Number.isInteger(v) || v < 1 ? "must be a positive integer" : null),
  sample_divisor: (v) => (!Number.isInteger(v) || v < 1 ? "must be a positive integer" : null),
  reject_score: (v) => (v < 0 ? "must be >= 0" : null),
  min_votes: (v) => (!Number.isInteger(v) || v < 1 ? "must be a positive integer" : null),
};

/** Validate a params document; an empty result means "safe to send". */
export function validateParams(params: Record<string, unknown>): FieldErrors {
  const errors: FieldErrors = {};
  for (const [name, value] of Object.entries(params)) {
    const check = CHECKS[name];
    if (!check) continue;
    if (typeof value !== "number" || Number.isNaN(value)) {
      errors[name] = "must be a number";
    } else {
      const msg = check(value);
      if (msg) errors[name] = msg;
    }
  }
  return errors;
}
