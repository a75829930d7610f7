/**
 * Wire-schema validation for sentence-record JSONL.
 *
 * Mirrors the rules the downstream parser enforces: required fields,
 * token shape, verb index in bounds with a non-empty lemma, half-open
 * argument spans within the token list, mention shape.  Unknown extra
 * keys are tolerated, as they are downstream.
 */

export interface ValidationReport {
  valid: number;
  invalid: number;
  /** first ten problems, each prefixed "line N: " */
  errors: string[];
}

export const MAX_REPORTED_ERRORS = 10;

function checkSpan(value: unknown, name: string, nTokens: number): string | null {
  if (value === null || value === undefined) return null;
  if (!Array.isArray(value) || value.length !== 2 ||
      !Number.isInteger(value[0]) || !Number.isInteger(value[1])) {
    return `${name} must be null or a [start, end) pair`;
  }
  const [i, j] = value as [number, number];
  if (!(0 <= i && i < j && j <= nTokens)) {
    return `${name} span out of bounds`;
  }
  return null;
}

/** Check one decoded JSON value; returns null when valid, else a reason. */
export function checkRecord(obj: unknown): string | null {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    return "record must be a JSON object";
  }
  const rec = obj as Record<string, unknown>;
  for (const key of ["doc_id", "sent_id", "text", "tokens", "frames", "ents"]) {
    if (!(key in rec)) return `missing field ${key}`;
  }
  if (typeof rec.doc_id !== "string" || rec.doc_id === "") {
    return "doc_id must be a non-empty string";
  }
  if (!Number.isInteger(rec.sent_id) || (rec.sent_id as number) < 0) {
    return "sent_id must be a non-negative integer";
  }
  if (typeof rec.text !== "string") return "text must be a string";

  if (!Array.isArray(rec.tokens)) return "tokens must be a list";
  for (let i = 0; i < rec.tokens.length; i++) {
    const tok = rec.tokens[i] as Record<string, unknown> | null;
    if (typeof tok !== "object" || tok === null ||
        typeof tok.t !== "string" || typeof tok.l !== "string") {
      return `tokens[${i}] must have string fields 't' and 'l'`;
    }
  }
  const nTokens = rec.tokens.length;

  if (!Array.isArray(rec.frames)) return "frames must be a list";
  for (let i = 0; i < rec.frames.length; i++) {
    const fr = rec.frames[i] as Record<string, unknown> | null;
    if (typeof fr !== "object" || fr === null) return `frames[${i}] must be an object`;
    if (!Number.isInteger(fr.v) || (fr.v as number) < 0 || (fr.v as number) >= nTokens) {
      return `frames[${i}].v must be a token index`;
    }
    if (typeof fr.vl !== "string" || fr.vl === "") return "verb required";
    if ("neg" in fr && typeof fr.neg !== "boolean") {
      return `frames[${i}].neg must be a boolean`;
    }
    if ("mod" in fr && fr.mod !== null && (typeof fr.mod !== "string" || fr.mod === "")) {
      return `frames[${i}].mod must be null or a non-empty string`;
    }
    for (const arg of ["arg0", "arg1", "arg2"]) {
      const problem = checkSpan(fr[arg], `frames[${i}].${arg}`, nTokens);
      if (problem !== null) return problem;
    }
  }

  if (!Array.isArray(rec.ents)) return "ents must be a list";
  for (let i = 0; i < rec.ents.length; i++) {
    const ent = rec.ents[i] as Record<string, unknown> | null;
    if (typeof ent !== "object" || ent === null ||
        typeof ent.s !== "string" || ent.s === "" || typeof ent.lbl !== "string") {
      return `ents[${i}] must have a non-empty 's' and a string 'lbl'`;
    }
  }
  return null;
}

/** Validate JSONL content line by line (blank lines are ignored). */
export function validateLines(lines: Iterable<string>): ValidationReport {
  const report: ValidationReport = { valid: 0, invalid: 0, errors: [] };
  let lineNo = 0;
  for (const line of lines) {
    lineNo++;
    if (line.trim() === "") continue;
    let reason: string | null;
    try {
      reason = checkRecord(JSON.parse(line));
    } catch {
      reason = "not valid JSON";
    }
    if (reason === null) {
      report.valid++;
    } else {
      report.invalid++;
      if (report.errors.length < MAX_REPORTED_ERRORS) {
        report.errors.push(`line ${lineNo}: ${reason}`);
      }
    }
  }
  return report;
}
