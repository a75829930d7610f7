/**
 * Rule-based sentence splitting and tokenization.
 *
 * Both functions are total and deterministic.  The splitter breaks at
 * `.`, `!`, or `?` followed by whitespace and an upper-case letter, digit,
 * or opening quote, unless the period terminates a known abbreviation.
 * The tokenizer peels punctuation off word edges and splits contracted
 * negations (`don't` -> `do` + `n't`) so negation is visible as a token.
 */

export const DEFAULT_ABBREVIATIONS: ReadonlySet<string> = new Set([
  "mr", "mrs", "ms", "dr", "prof", "sen", "rep", "gov", "gen", "col",
  "sgt", "hon", "jr", "sr", "st", "mt", "etc", "vs", "inc", "corp", "co",
  "no", "vol", "cf", "e.g", "i.e", "u.s", "u.k", "u.n", "d.c", "a.m", "p.m",
]);

const TERMINATOR = /[.!?]/;
const OPENER = /[A-Z0-9"'‘“(]/;

function endsWithAbbreviation(chunk: string, abbreviations: ReadonlySet<string>): boolean {
  const m = chunk.match(/([A-Za-z](?:[A-Za-z.]*[A-Za-z])?)\.$/);
  if (!m) return false;
  const word = m[1].toLowerCase();
  // single letters ("J. Smith") and dotted initialisms count as abbreviations
  return word.length === 1 || word.includes(".") || abbreviations.has(word);
}

/**
 * Split raw text into sentences.  Joining the output (and the dropped
 * whitespace) reproduces the input: no characters are added or removed.
 */
export function splitSentences(
  text: string,
  abbreviations: ReadonlySet<string> = DEFAULT_ABBREVIATIONS,
): string[] {
  const sentences: string[] = [];
  let start = 0;
  for (let i = 0; i < text.length; i++) {
    if (!TERMINATOR.test(text[i])) continue;
    // swallow a run of terminators and closing quotes/brackets
    let end = i + 1;
    while (end < text.length && /[.!?"'’”)\]]/.test(text[end])) end++;
    // must be followed by whitespace and a plausible sentence opener
    let j = end;
    while (j < text.length && /\s/.test(text[j])) j++;
    if (j === end || j === text.length) {
      if (j === text.length) {
        // terminator at end of text closes the final sentence below
        i = end - 1;
      }
      continue;
    }
    if (!OPENER.test(text[j])) continue;
    if (text[i] === "." && endsWithAbbreviation(text.slice(start, i + 1), abbreviations)) {
      continue;
    }
    const sentence = text.slice(start, end).trim();
    if (sentence) sentences.push(sentence);
    start = end;
    i = end - 1;
  }
  const tail = text.slice(start).trim();
  if (tail) sentences.push(tail);
  return sentences;
}

const EDGE_PUNCT = /[.,;:!?"'‘’“”()\[\]{}—–]/;

/** Tokenize one sentence into surface strings. */
export function tokenize(sentence: string): string[] {
  const tokens: string[] = [];
  for (const chunk of sentence.split(/\s+/)) {
    if (!chunk) continue;
    // peel leading punctuation
    let body = chunk;
    let lead = 0;
    while (lead < body.length && EDGE_PUNCT.test(body[lead])) lead++;
    for (let k = 0; k < lead; k++) tokens.push(body[k]);
    body = body.slice(lead);
    // peel trailing punctuation (apostrophes inside words survive)
    const trail: string[] = [];
    while (body.length > 0 && EDGE_PUNCT.test(body[body.length - 1])) {
      trail.unshift(body[body.length - 1]);
      body = body.slice(0, -1);
    }
    if (body) {
      const lower = body.toLowerCase();
      if (lower.endsWith("n't") && body.length > 3) {
        tokens.push(body.slice(0, -3));
        tokens.push(body.slice(-3));
      } else {
        tokens.push(body);
      }
    }
    tokens.push(...trail);
  }
  return tokens;
}
