#!/usr/bin/env node
/**
 * Command-line entry points.
 *
 *   annotation-adapter annotate --input <dir|file> --output <jsonl>
 *                               [--batch-size N] [--meta <csv>] [--token-cap N]
 *   annotation-adapter validate --input <jsonl>
 *
 * `annotate` accepts either a directory of `.txt` files (document id =
 * file stem), a single `.txt` file, or a `.jsonl` file of
 * `{"doc_id", "text", "metadata"}` objects.  With `--meta`, speaker
 * metadata (`speaker`, `party`, `year` keys) is written as the CSV the
 * downstream pipeline joins on.  `validate` checks an annotated JSONL
 * file and exits nonzero if any line is invalid.
 */

import { createWriteStream } from "node:fs";
import { readdir, readFile, writeFile } from "node:fs/promises";
import { basename, extname, join } from "node:path";
import { Readable } from "node:stream";
import { pipeline } from "node:stream/promises";
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { annotateCorpus, DEFAULT_TOKEN_CAP } from "./annotate.js";
import { validateLines } from "./schema.js";
import type { RawDocument } from "./types.js";

const USAGE = `usage:
  annotation-adapter annotate --input <dir|file> --output <jsonl> [--batch-size N] [--meta <csv>] [--token-cap N]
  annotation-adapter validate --input <jsonl>`;

function parseRawDocument(line: string, lineNo: number): RawDocument {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    throw new Error(`line ${lineNo}: not valid JSON`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new Error(`line ${lineNo}: document must be a JSON object`);
  }
  const doc = obj as Record<string, unknown>;
  if (typeof doc.doc_id !== "string" || doc.doc_id === "") {
    throw new Error(`line ${lineNo}: doc_id must be a non-empty string`);
  }
  if (typeof doc.text !== "string") {
    throw new Error(`line ${lineNo}: text must be a string`);
  }
  const metadata: Record<string, string> = {};
  if (doc.metadata !== undefined) {
    if (typeof doc.metadata !== "object" || doc.metadata === null || Array.isArray(doc.metadata)) {
      throw new Error(`line ${lineNo}: metadata must be an object`);
    }
    for (const [key, value] of Object.entries(doc.metadata)) {
      if (typeof value !== "string") {
        throw new Error(`line ${lineNo}: metadata values must be strings`);
      }
      metadata[key] = value;
    }
  }
  return { doc_id: doc.doc_id, text: doc.text, metadata };
}

async function loadDocuments(input: string): Promise<RawDocument[]> {
  const docs: RawDocument[] = [];
  if (extname(input) === ".jsonl") {
    const content = await readFile(input, "utf8");
    const lines = content.split("\n");
    for (let i = 0; i < lines.length; i++) {
      if (lines[i].trim() === "") continue;
      docs.push(parseRawDocument(lines[i], i + 1));
    }
  } else if (extname(input) === ".txt") {
    docs.push({
      doc_id: basename(input, ".txt"),
      text: await readFile(input, "utf8"),
      metadata: {},
    });
  } else {
    const names = (await readdir(input)).filter((n) => n.endsWith(".txt")).sort();
    if (names.length === 0) throw new Error(`no .txt files in ${input}`);
    for (const name of names) {
      docs.push({
        doc_id: basename(name, ".txt"),
        text: await readFile(join(input, name), "utf8"),
        metadata: {},
      });
    }
  }
  const seen = new Set<string>();
  for (const doc of docs) {
    if (seen.has(doc.doc_id)) throw new Error(`duplicate doc_id ${doc.doc_id}`);
    seen.add(doc.doc_id);
  }
  return docs;
}

function csvField(value: string): string {
  return /[",\n]/.test(value) ? `"${value.replace(/"/g, '""')}"` : value;
}

function metadataCsv(docs: readonly RawDocument[], warn: (msg: string) => void): string {
  const rows = ["doc_id,speaker,party,year"];
  for (const doc of docs) {
    const { speaker, party, year } = doc.metadata;
    if (speaker === undefined || party === undefined || year === undefined) {
      warn(`document ${doc.doc_id} lacks speaker/party/year metadata; omitted from CSV`);
      continue;
    }
    rows.push([doc.doc_id, speaker, party, year].map(csvField).join(","));
  }
  return rows.join("\n") + "\n";
}

async function cmdAnnotate(values: Record<string, string | undefined>): Promise<number> {
  if (!values.input || !values.output) {
    console.error(USAGE);
    return 2;
  }
  const batchSize = Number(values["batch-size"] ?? "1");
  const tokenCap = Number(values["token-cap"] ?? String(DEFAULT_TOKEN_CAP));
  const docs = await loadDocuments(values.input);

  let nRecords = 0;
  let nLong = 0;
  let nSkipped = 0;
  const lines = annotateCorpus(docs, batchSize, {
    tokenCap,
    onSkip: (docId, sentId, reason) => {
      nSkipped++;
      console.error(`skipping ${docId}#${sentId}: ${reason}`);
    },
  });
  async function* withNewlines() {
    for await (const line of lines) {
      nRecords++;
      if (line.includes('"long":true')) nLong++;
      yield line + "\n";
    }
  }
  await pipeline(Readable.from(withNewlines()), createWriteStream(values.output));

  if (values.meta !== undefined) {
    await writeFile(values.meta, metadataCsv(docs, (msg) => console.error(msg)));
  }
  console.error(
    `documents: ${docs.length}  records: ${nRecords}  long: ${nLong}  skipped: ${nSkipped}`,
  );
  return 0;
}

async function cmdValidate(values: Record<string, string | undefined>): Promise<number> {
  if (!values.input) {
    console.error(USAGE);
    return 2;
  }
  const content = await readFile(values.input, "utf8");
  const report = validateLines(content.split("\n"));
  console.log(JSON.stringify(report, null, 2));
  return report.invalid > 0 ? 1 : 0;
}

export async function runCli(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        input: { type: "string" },
        output: { type: "string" },
        "batch-size": { type: "string" },
        meta: { type: "string" },
        "token-cap": { type: "string" },
      },
    });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(USAGE);
    return 2;
  }
  const [command] = parsed.positionals;
  try {
    if (command === "annotate") return await cmdAnnotate(parsed.values);
    if (command === "validate") return await cmdValidate(parsed.values);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  console.error(USAGE);
  return 2;
}

const isMain =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  runCli(process.argv.slice(2)).then((code) => process.exit(code));
}
