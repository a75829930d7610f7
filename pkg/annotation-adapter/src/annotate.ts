/**
 * Document annotation: sentence splitting, tokenization, lemmas, named
 * entities, and one semantic-role frame per sentence, serialized to the
 * JSONL wire format consumed downstream.
 *
 * Everything here is a pure function of the input text, so re-running on
 * the same corpus yields byte-identical output.
 */

import { lemmatize } from "./lemma.js";
import { tagEntities } from "./ner.js";
import { extractFrame } from "./srl.js";
import { splitSentences, tokenize, DEFAULT_ABBREVIATIONS } from "./tokenize.js";
import type { RawDocument, SentenceRecordObj } from "./types.js";

export interface AnnotateOptions {
  /** sentences with more tokens than this are flagged `"long": true` */
  tokenCap?: number;
  abbreviations?: ReadonlySet<string>;
  /** called for sentences that failed to annotate and were skipped */
  onSkip?: (docId: string, sentId: number, reason: string) => void;
}

export const DEFAULT_TOKEN_CAP = 120;

/** Annotate one document into sentence records, in sentence order. */
export function annotateDocument(doc: RawDocument, options: AnnotateOptions = {}): SentenceRecordObj[] {
  const cap = options.tokenCap ?? DEFAULT_TOKEN_CAP;
  const abbreviations = options.abbreviations ?? DEFAULT_ABBREVIATIONS;
  const records: SentenceRecordObj[] = [];
  const sentences = splitSentences(doc.text, abbreviations);
  for (let sentId = 0; sentId < sentences.length; sentId++) {
    try {
      const text = sentences[sentId];
      const surfaces = tokenize(text);
      if (surfaces.length === 0) continue;
      const lemmas = surfaces.map(lemmatize);
      const frame = extractFrame(surfaces, lemmas);
      const record: SentenceRecordObj = {
        doc_id: doc.doc_id,
        sent_id: sentId,
        text,
        tokens: surfaces.map((t, i) => ({ t, l: lemmas[i] })),
        frames: frame === null ? [] : [frame],
        ents: tagEntities(surfaces),
      };
      if (surfaces.length > cap) record.long = true;
      records.push(record);
    } catch (err) {
      options.onSkip?.(doc.doc_id, sentId, String(err instanceof Error ? err.message : err));
    }
  }
  return records;
}

/**
 * Annotate a document stream in input order.  `batchSize` bounds how many
 * documents are in flight at once; output order never depends on it.
 */
export async function* annotateCorpus(
  docs: AsyncIterable<RawDocument> | Iterable<RawDocument>,
  batchSize: number,
  options: AnnotateOptions = {},
): AsyncGenerator<string> {
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new Error(`batch size must be a positive integer, got ${batchSize}`);
  }
  let batch: RawDocument[] = [];
  const flush = function* (ready: RawDocument[]) {
    for (const doc of ready) {
      for (const record of annotateDocument(doc, options)) {
        yield JSON.stringify(record);
      }
    }
  };
  for await (const doc of docs) {
    batch.push(doc);
    if (batch.length >= batchSize) {
      yield* flush(batch);
      batch = [];
    }
  }
  yield* flush(batch);
}
