/**
 * Rule-based semantic-role tagger for simple English clauses.
 *
 * One frame per sentence: the first verb group (modal + auxiliaries +
 * negation + head verb) found left to right.  The pre-verbal noun span is
 * the grammatical subject, the post-verbal span the object.  Role mapping:
 *
 * - active clause:     subject -> arg0, object -> arg1
 * - passive clause:    subject -> arg1, "by"-phrase -> arg0
 * - unaccusative verb with no object ("Americans change"): subject -> arg1
 * - imperative (no subject): verb only
 *
 * Verbs are recognized against a lemma lexicon — there is no statistical
 * POS tagger here, which is exactly the point: the output is a pure
 * function of the input text.
 */

import type { FrameObj, Span } from "./types.js";

const MODALS = new Set([
  "will", "would", "can", "could", "may", "might", "shall", "should", "must",
]);

const AUXILIARIES = new Set(["be", "have", "do"]);

const NEGATIONS = new Set(["not", "never"]);

/** Verbs whose intransitive subject is the patient, not the agent. */
const UNACCUSATIVE = new Set([
  "change", "break", "open", "close", "melt", "sink", "grow", "improve",
  "increase", "decrease", "begin", "end", "vary", "spread", "collapse",
]);

/** Head-verb lemma lexicon. */
const VERB_LEMMAS = new Set([
  "lose", "pose", "go", "change", "win", "fund", "help", "threaten",
  "bless", "suffer", "make", "take", "give", "get", "say", "see", "come",
  "want", "need", "support", "oppose", "raise", "cut", "pay", "protect",
  "defend", "fight", "vote", "pass", "sign", "veto", "destroy", "build",
  "create", "keep", "hold", "find", "bring", "buy", "catch", "teach",
  "think", "sell", "tell", "know", "speak", "write", "run", "meet", "lead",
  "feel", "mean", "rise", "fall", "begin", "break", "choose", "send",
  "spend", "leave", "work", "live", "move", "stop", "start", "end", "open",
  "close", "call", "ask", "turn", "show", "hear", "believe", "happen",
  "provide", "include", "continue", "serve", "die", "kill", "attack",
  "invade", "impose", "reduce", "increase", "improve", "deliver",
  "promise", "fail", "succeed", "cost", "save", "spare", "grant", "deny",
  "grow", "face", "cause", "demand", "offer", "owe", "harm", "hurt",
]);

/** Irregular past participles (regular ones end in -ed). */
const PARTICIPLES = new Set([
  "lost", "won", "taken", "given", "made", "seen", "done", "known",
  "found", "held", "kept", "left", "paid", "sent", "spent", "built",
  "brought", "bought", "caught", "taught", "thought", "fought", "sold",
  "told", "broken", "chosen", "spoken", "written", "gone", "been",
  "grown", "begun", "fallen", "risen", "hurt", "cost",
]);

/** Leading adjuncts stripped off the subject span. */
const TEMPORAL = new Set([
  "today", "yesterday", "tomorrow", "now", "then", "meanwhile", "finally",
]);

function isPunct(token: string): boolean {
  return !/[A-Za-z0-9]/.test(token);
}

function isParticiple(surface: string): boolean {
  const w = surface.toLowerCase();
  return PARTICIPLES.has(w) || w.endsWith("ed");
}

interface VerbGroup {
  start: number;
  head: number;
  headIsAux: boolean;
  passive: boolean;
  negated: boolean;
  modal: string | null;
}

function findVerbGroup(tokens: readonly string[], lemmas: readonly string[]): VerbGroup | null {
  const n = tokens.length;
  let start = -1;
  for (let i = 0; i < n; i++) {
    const lem = lemmas[i];
    if (MODALS.has(lem) || lem === "cannot" || AUXILIARIES.has(lem) || VERB_LEMMAS.has(lem)) {
      start = i;
      break;
    }
  }
  if (start === -1) return null;

  let modal: string | null = null;
  let negated = false;
  let head = -1;
  let headIsAux = false;
  let lastAux: string | null = null;
  let k = start;
  while (k < n) {
    const lem = lemmas[k];
    if (lem === "cannot") {
      if (modal === null) modal = "can";
      negated = true;
    } else if (NEGATIONS.has(lem)) {
      negated = true;
    } else if (MODALS.has(lem) && head === -1 && modal === null) {
      modal = lem;
    } else if (AUXILIARIES.has(lem) && (head === -1 || headIsAux)) {
      lastAux = lem;
      head = k; // an auxiliary can end up as the main verb ("Americans are angry")
      headIsAux = true;
    } else if (VERB_LEMMAS.has(lem) || (lastAux !== null && isParticiple(tokens[k]))) {
      head = k;
      headIsAux = false;
      break;
    } else {
      break;
    }
    k++;
  }
  if (head === -1) return null;
  const passive = !headIsAux && lastAux === "be" && isParticiple(tokens[head]);
  return { start, head, headIsAux, passive, negated, modal };
}

function trimSpan(tokens: readonly string[], lo: number, hi: number): Span | null {
  let a = lo;
  let b = hi;
  while (a < b && (isPunct(tokens[a]) || TEMPORAL.has(tokens[a].toLowerCase()))) a++;
  while (b > a && isPunct(tokens[b - 1])) b--;
  return a < b ? [a, b] : null;
}

/**
 * Extract the sentence's frame, or null when no verb is found.
 */
export function extractFrame(tokens: readonly string[], lemmas: readonly string[]): FrameObj | null {
  const group = findVerbGroup(tokens, lemmas);
  if (group === null) return null;

  const subject = trimSpan(tokens, 0, group.start);
  let object = trimSpan(tokens, group.head + 1, tokens.length);

  let arg0: Span | null = null;
  let arg1: Span | null = null;
  if (group.passive) {
    arg1 = subject;
    if (object !== null && lemmas[object[0]] === "by") {
      arg0 = trimSpan(tokens, object[0] + 1, object[1]);
    } else if (object !== null) {
      // passive with a retained object ("were given aid")
      arg1 = arg1 ?? object;
    }
  } else if (subject !== null) {
    if (object === null && UNACCUSATIVE.has(lemmas[group.head])) {
      arg1 = subject;
    } else {
      arg0 = subject;
      arg1 = object;
    }
  } else {
    // imperative: no subject; a post-verbal span is still the patient
    arg1 = object;
  }

  return {
    v: group.head,
    vl: lemmas[group.head],
    neg: group.negated,
    mod: group.modal,
    arg0,
    arg1,
    arg2: null,
  };
}
