/**
 * Pattern-based named-entity tagger.
 *
 * A gazetteer labels known names; otherwise maximal runs of name-cased
 * tokens are emitted, defaulting to PERSON for multi-token runs.  A
 * sentence-initial capitalized token only opens a mention when the
 * gazetteer knows it or the run continues past it — plain sentence-case
 * words ("Millions of ...") are not mentions.
 */

import type { EntObj } from "./types.js";

/** Longest-match gazetteer; keys are lower-cased surface phrases. */
export const GAZETTEER: ReadonlyMap<string, string> = new Map([
  // nationalities, religious and political groups
  ["americans", "NORP"], ["american", "NORP"], ["republicans", "NORP"],
  ["democrats", "NORP"], ["republican", "NORP"], ["democrat", "NORP"],
  ["iraqis", "NORP"], ["texans", "NORP"], ["christians", "NORP"],
  // geo-political entities
  ["america", "GPE"], ["united states", "GPE"], ["u.s", "GPE"], ["u.s.", "GPE"],
  ["iraq", "GPE"], ["texas", "GPE"], ["washington", "GPE"], ["china", "GPE"],
  ["russia", "GPE"], ["afghanistan", "GPE"],
  // organizations
  ["congress", "ORG"], ["senate", "ORG"], ["house", "ORG"],
  ["pentagon", "ORG"], ["white house", "ORG"], ["supreme court", "ORG"],
  // people
  ["saddam hussein", "PERSON"], ["saddam", "PERSON"], ["god", "PERSON"],
]);

/**
 * Words that are capitalized by convention or position but never entity
 * heads: calendar terms, titles, and function words that pick up sentence
 * case.
 */
const NON_ENTITY = new Set([
  "i", "today", "yesterday", "tomorrow", "monday", "tuesday", "wednesday",
  "thursday", "friday", "saturday", "sunday", "january", "february",
  "march", "april", "may", "june", "july", "august", "september",
  "october", "november", "december", "mr", "mrs", "ms", "dr",
  "the", "a", "an", "and", "or", "but", "in", "on", "at", "of", "to",
  "for", "with", "by", "from", "this", "that", "these", "those", "it",
  "he", "she", "we", "they", "you", "his", "her", "their", "our", "your",
  "its", "when", "while", "after", "before", "if", "as", "is", "are",
  "was", "were", "be", "been", "do", "does", "did", "will", "would",
  "can", "could", "shall", "should", "must", "not", "no", "there", "here",
  "what", "who", "why", "how", "which", "all", "some", "any", "each",
  "every", "my", "me", "us", "him", "them",
]);

function nameCased(token: string): boolean {
  return /^[A-Z][A-Za-z.'-]*$/.test(token);
}

/**
 * Tag one tokenized sentence.  Returns mentions in sentence order with
 * surface text joined by single spaces.
 */
export function tagEntities(tokens: readonly string[]): EntObj[] {
  const ents: EntObj[] = [];
  let i = 0;
  while (i < tokens.length) {
    if (!nameCased(tokens[i]) || NON_ENTITY.has(tokens[i].toLowerCase())) {
      i++;
      continue;
    }
    let j = i + 1;
    while (j < tokens.length && nameCased(tokens[j]) &&
           !NON_ENTITY.has(tokens[j].toLowerCase())) {
      j++;
    }
    // longest gazetteer match inside the run wins
    let matched = false;
    for (let end = j; end > i; end--) {
      const phrase = tokens.slice(i, end).join(" ");
      const label = GAZETTEER.get(phrase.toLowerCase());
      if (label !== undefined) {
        ents.push({ s: phrase, lbl: label });
        i = end;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (j - i >= 2) {
      // unknown multi-token name: default PERSON
      ents.push({ s: tokens.slice(i, j).join(" "), lbl: "PERSON" });
    } else if (i > 0) {
      // unknown single capitalized word mid-sentence
      ents.push({ s: tokens[i], lbl: "MISC" });
    }
    // sentence-initial single unknown word: plain sentence case, skip
    i = j;
  }
  return ents;
}
