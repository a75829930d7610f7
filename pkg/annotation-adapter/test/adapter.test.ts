import { mkdtemp, readFile, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { annotateCorpus, annotateDocument } from "../src/annotate.js";
import { runCli } from "../src/cli.js";
import { validateLines } from "../src/schema.js";
import type { RawDocument, SentenceRecordObj } from "../src/types.js";
import { FIXTURE_SENTENCES } from "./fixtures.js";

function fixtureDocs(): RawDocument[] {
  return FIXTURE_SENTENCES.map((text, i) => ({
    doc_id: `d${i}`,
    text,
    metadata: { speaker: `speaker ${i}`, party: i % 2 === 0 ? "D" : "R", year: "2011" },
  }));
}

async function collect(gen: AsyncGenerator<string>): Promise<string[]> {
  const lines: string[] = [];
  for await (const line of gen) lines.push(line);
  return lines;
}

describe("fixture-sentence acceptance", () => {
  it("S1: emits schema-valid records with the expected role assignment", async () => {
    const lines = await collect(annotateCorpus(fixtureDocs(), 2));
    expect(lines).toHaveLength(FIXTURE_SENTENCES.length);

    const report = validateLines(lines);
    expect(report.invalid).toBe(0);
    expect(report.valid).toBe(FIXTURE_SENTENCES.length);

    const records = lines.map((l) => JSON.parse(l) as SentenceRecordObj);

    // "Millions of Americans lost their unemployment benefits."
    const first = records[0];
    expect(first.tokens.map((t) => t.t)).toEqual([
      "Millions", "of", "Americans", "lost", "their", "unemployment", "benefits", ".",
    ]);
    expect(first.frames).toHaveLength(1);
    const frame = first.frames[0];
    expect(first.tokens.slice(...frame.arg0!).map((t) => t.t).join(" ")).toBe(
      "Millions of Americans",
    );
    expect(first.tokens[frame.v].t).toBe("lost");
    expect(frame.vl).toBe("lose");
    expect(first.tokens.slice(...frame.arg1!).map((t) => t.t).join(" ")).toBe(
      "their unemployment benefits",
    );

    // "Saddam Hussein poses a threat." carries a PERSON mention
    expect(records[1].ents).toContainEqual({ s: "Saddam Hussein", lbl: "PERSON" });

    // agent-only, patient-only, and negated-modal sentences
    expect(records[2].frames[0]).toMatchObject({ vl: "go", arg1: null });
    expect(records[2].frames[0].arg0).not.toBeNull();
    expect(records[3].frames[0]).toMatchObject({ vl: "change", arg0: null });
    expect(records[3].frames[0].arg1).not.toBeNull();
    expect(records[4].frames[0]).toMatchObject({ vl: "lose", neg: true, mod: "should" });

    console.log("S1 adapter fixture sentences: PASS");
  });
});

describe("annotateDocument", () => {
  it("produces zero records for empty text", () => {
    expect(annotateDocument({ doc_id: "e", text: "", metadata: {} })).toEqual([]);
    expect(annotateDocument({ doc_id: "w", text: "   \n ", metadata: {} })).toEqual([]);
  });

  it("numbers sentences within a document", () => {
    const records = annotateDocument({
      doc_id: "two",
      text: "Americans go. Americans change.",
      metadata: {},
    });
    expect(records.map((r) => [r.doc_id, r.sent_id])).toEqual([["two", 0], ["two", 1]]);
    expect(records.map((r) => r.text)).toEqual(["Americans go.", "Americans change."]);
  });

  it("keeps every span inside the token list", () => {
    const text =
      "The senate passed the bill. Their benefits were lost. " +
      "Mr. Smith should not have fought the amendment!";
    for (const record of annotateDocument({ doc_id: "b", text, metadata: {} })) {
      const n = record.tokens.length;
      for (const frame of record.frames) {
        expect(frame.v).toBeGreaterThanOrEqual(0);
        expect(frame.v).toBeLessThan(n);
        for (const span of [frame.arg0, frame.arg1, frame.arg2]) {
          if (span === null) continue;
          expect(span[0]).toBeGreaterThanOrEqual(0);
          expect(span[0]).toBeLessThan(span[1]);
          expect(span[1]).toBeLessThanOrEqual(n);
        }
      }
    }
  });

  it("flags sentences over the token cap", () => {
    const long = "Congress " + "really ".repeat(130) + "voted.";
    const records = annotateDocument({ doc_id: "l", text: long, metadata: {} });
    expect(records).toHaveLength(1);
    expect(records[0].long).toBe(true);
    const short = annotateDocument({ doc_id: "s", text: "Americans go.", metadata: {} });
    expect(short[0]).not.toHaveProperty("long");
  });

  it("respects a custom token cap", () => {
    const records = annotateDocument(
      { doc_id: "c", text: "Americans go.", metadata: {} },
      { tokenCap: 2 },
    );
    expect(records[0].long).toBe(true);
  });
});

describe("annotateCorpus", () => {
  it("rejects a non-positive batch size", async () => {
    await expect(collect(annotateCorpus([], 0))).rejects.toThrow(
      "batch size must be a positive integer",
    );
  });

  it("is deterministic and batch-size invariant", async () => {
    const a = await collect(annotateCorpus(fixtureDocs(), 1));
    const b = await collect(annotateCorpus(fixtureDocs(), 1));
    const c = await collect(annotateCorpus(fixtureDocs(), 4));
    const d = await collect(annotateCorpus(fixtureDocs(), 100));
    expect(b).toEqual(a);
    expect(c).toEqual(a);
    expect(d).toEqual(a);
  });

  it("preserves document order", async () => {
    const lines = await collect(annotateCorpus(fixtureDocs(), 3));
    const ids = lines.map((l) => (JSON.parse(l) as SentenceRecordObj).doc_id);
    expect(ids).toEqual(["d0", "d1", "d2", "d3", "d4"]);
  });
});

describe("cli", () => {
  it("annotates a document file and writes metadata CSV", async () => {
    const dir = await mkdtemp(join(tmpdir(), "adapter-"));
    const docsPath = join(dir, "docs.jsonl");
    const outPath = join(dir, "annotated.jsonl");
    const metaPath = join(dir, "metadata.csv");
    await writeFile(
      docsPath,
      fixtureDocs().map((d) => JSON.stringify(d)).join("\n") + "\n",
    );

    const code = await runCli([
      "annotate", "--input", docsPath, "--output", outPath,
      "--batch-size", "2", "--meta", metaPath,
    ]);
    expect(code).toBe(0);

    const outLines = (await readFile(outPath, "utf8")).trimEnd().split("\n");
    expect(validateLines(outLines)).toMatchObject({ valid: 5, invalid: 0 });

    const csv = await readFile(metaPath, "utf8");
    const rows = csv.trimEnd().split("\n");
    expect(rows[0]).toBe("doc_id,speaker,party,year");
    expect(rows).toHaveLength(6);
    expect(rows[1]).toBe("d0,speaker 0,D,2011");
  });

  it("round-trips its own output through validate", async () => {
    const dir = await mkdtemp(join(tmpdir(), "adapter-"));
    const docsPath = join(dir, "docs.jsonl");
    const outPath = join(dir, "annotated.jsonl");
    await writeFile(docsPath, JSON.stringify(fixtureDocs()[0]) + "\n");
    expect(await runCli(["annotate", "--input", docsPath, "--output", outPath])).toBe(0);
    expect(await runCli(["validate", "--input", outPath])).toBe(0);
  });

  it("exits 1 when validate finds invalid lines", async () => {
    const dir = await mkdtemp(join(tmpdir(), "adapter-"));
    const badPath = join(dir, "bad.jsonl");
    await writeFile(badPath, '{"doc_id": "d"}\n');
    expect(await runCli(["validate", "--input", badPath])).toBe(1);
  });

  it("exits 2 on usage errors", async () => {
    expect(await runCli([])).toBe(2);
    expect(await runCli(["annotate"])).toBe(2);
    expect(await runCli(["validate"])).toBe(2);
    expect(await runCli(["frobnicate"])).toBe(2);
  });

  it("rejects duplicate document ids", async () => {
    const dir = await mkdtemp(join(tmpdir(), "adapter-"));
    const docsPath = join(dir, "docs.jsonl");
    const doc = JSON.stringify({ doc_id: "same", text: "Americans go." });
    await writeFile(docsPath, doc + "\n" + doc + "\n");
    expect(
      await runCli(["annotate", "--input", docsPath, "--output", join(dir, "out.jsonl")]),
    ).toBe(1);
  });

  it("annotates a directory of text files in name order", async () => {
    const dir = await mkdtemp(join(tmpdir(), "adapter-"));
    await writeFile(join(dir, "b.txt"), "Americans change.");
    await writeFile(join(dir, "a.txt"), "Americans go.");
    const outPath = join(dir, "out.jsonl");
    expect(await runCli(["annotate", "--input", dir, "--output", outPath])).toBe(0);
    const ids = (await readFile(outPath, "utf8"))
      .trimEnd()
      .split("\n")
      .map((l) => (JSON.parse(l) as SentenceRecordObj).doc_id);
    expect(ids).toEqual(["a", "b"]);
  });
});
