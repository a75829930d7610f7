/**
 * Deterministic rule lemmatizer.
 *
 * An exception table covers irregular forms; regular inflection is stripped
 * by suffix rules (plural -s/-es/-ies, past -ed, progressive -ing) with
 * consonant undoubling and final-e restoration heuristics.  Output is
 * always lower-case.  This is an approximation — good enough for the
 * clause patterns this adapter targets, not a dictionary lemmatizer.
 */

const EXCEPTIONS: Record<string, string> = {
  // be / have / do
  am: "be", is: "be", are: "be", was: "be", were: "be", been: "be", being: "be",
  has: "have", had: "have", having: "have",
  does: "do", did: "do", done: "do", doing: "do",
  // common irregular verbs
  lost: "lose", loses: "lose", losing: "lose",
  went: "go", gone: "go", goes: "go", going: "go",
  said: "say", says: "say",
  made: "make", making: "make",
  got: "get", gotten: "get", getting: "get",
  took: "take", taken: "take", taking: "take",
  gave: "give", given: "give", giving: "give",
  came: "come", coming: "come",
  saw: "see", seen: "see", seeing: "see",
  knew: "know", known: "know",
  found: "find", held: "hold", kept: "keep", left: "leave",
  paid: "pay", spent: "spend", sent: "send", built: "build",
  brought: "bring", bought: "buy", caught: "catch", taught: "teach",
  thought: "think", fought: "fight", sold: "sell", told: "tell",
  won: "win", wins: "win", winning: "win",
  met: "meet", led: "lead", felt: "feel", meant: "mean",
  rose: "rise", risen: "rise", fell: "fall", fallen: "fall",
  grew: "grow", grown: "grow", began: "begin", begun: "begin",
  broke: "break", broken: "break", chose: "choose", chosen: "choose",
  spoke: "speak", spoken: "speak", wrote: "write", written: "write",
  ran: "run", running: "run",
  // negation / modals; "wo"/"ca"/"sha" are contraction stems ("won't" is
  // tokenized as "wo" + "n't")
  "n't": "not", cannot: "cannot", wo: "will", ca: "can", sha: "shall",
  // common irregular nouns
  men: "man", women: "woman", children: "child", people: "people",
  lives: "life", feet: "foot", teeth: "tooth",
  // words a bare suffix rule would mangle
  this: "this", his: "his", its: "its", using: "use",
  voted: "vote", voting: "vote", united: "unite",
  during: "during", nothing: "nothing", something: "something",
  anything: "anything", everything: "everything", thing: "thing",
  bus: "bus", gas: "gas", crisis: "crisis", analysis: "analysis",
  news: "news", series: "series", species: "species",
  congress: "congress", business: "business",
  americans: "american", republicans: "republican", democrats: "democrat",
  iraqis: "iraqi", texans: "texan",
};

const VOWELS = new Set(["a", "e", "i", "o", "u"]);

function undouble(stem: string): string {
  const n = stem.length;
  if (
    n >= 3 &&
    stem[n - 1] === stem[n - 2] &&
    !VOWELS.has(stem[n - 1]) &&
    !["l", "s", "z"].includes(stem[n - 1])
  ) {
    return stem.slice(0, -1);
  }
  return stem;
}

/** Restore a dropped final e after stems like pos-, chang-, believ-. */
function restoreE(stem: string): string {
  const last = stem[stem.length - 1];
  if (["c", "g", "s", "v", "z", "u"].includes(last)) return stem + "e";
  return stem;
}

export function lemmatize(surface: string): string {
  const w = surface.toLowerCase();
  if (w in EXCEPTIONS) return EXCEPTIONS[w];
  if (w.length <= 3 || /[^a-z]/.test(w)) return w;

  if (w.endsWith("ies") && w.length > 4) return w.slice(0, -3) + "y";
  if (w.endsWith("sses") || w.endsWith("xes") || w.endsWith("zes") ||
      w.endsWith("ches") || w.endsWith("shes")) {
    return w.slice(0, -2);
  }
  if (w.endsWith("ss")) return w;
  if (w.endsWith("s") && !w.endsWith("us") && !w.endsWith("is")) {
    const stem = w.slice(0, -1);
    return stem.endsWith("e") || !stem.endsWith("s") ? stem : w;
  }
  if (w.endsWith("ied") && w.length > 4) return w.slice(0, -3) + "y";
  if (w.endsWith("ed") && w.length > 4) {
    return restoreE(undouble(w.slice(0, -2)));
  }
  if (w.endsWith("ing") && w.length > 5) {
    return restoreE(undouble(w.slice(0, -3)));
  }
  return w;
}
