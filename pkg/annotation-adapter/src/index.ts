export { annotateCorpus, annotateDocument, DEFAULT_TOKEN_CAP } from "./annotate.js";
export { lemmatize } from "./lemma.js";
export { tagEntities, GAZETTEER } from "./ner.js";
export { checkRecord, validateLines, MAX_REPORTED_ERRORS } from "./schema.js";
export type { ValidationReport } from "./schema.js";
export { extractFrame } from "./srl.js";
export { splitSentences, tokenize, DEFAULT_ABBREVIATIONS } from "./tokenize.js";
export type {
  EntObj,
  FrameObj,
  RawDocument,
  SentenceRecordObj,
  Span,
  TokenObj,
} from "./types.js";
