/**
 * Wire types shared across the adapter.
 *
 * The JSONL record layout is owned by the downstream pipeline; this package
 * only produces and checks it.  Spans are half-open `[start, end)` pairs of
 * token indices.
 */

export type Span = [number, number];

export interface TokenObj {
  /** surface form */
  t: string;
  /** lemma */
  l: string;
}

export interface FrameObj {
  /** token index of the head verb */
  v: number;
  /** lemma of the head verb */
  vl: string;
  /** negated frame */
  neg: boolean;
  /** modal lemma, if any */
  mod: string | null;
  /** agent span */
  arg0: Span | null;
  /** patient span */
  arg1: Span | null;
  /** secondary-argument span */
  arg2: Span | null;
}

export interface EntObj {
  /** mention surface text */
  s: string;
  /** entity label (PERSON, NORP, GPE, ORG, ...) */
  lbl: string;
}

export interface SentenceRecordObj {
  doc_id: string;
  sent_id: number;
  text: string;
  tokens: TokenObj[];
  frames: FrameObj[];
  ents: EntObj[];
  /** set only when the sentence exceeds the token cap */
  long?: boolean;
}

/** One input document: raw text plus free-form metadata. */
export interface RawDocument {
  doc_id: string;
  text: string;
  metadata: Record<string, string>;
}
