/** Corpus file parsing: line-delimited samples, optional _meta first line. */

import type { SampleData, SentenceData, PredictionOverlay } from "./types.js";

export class CorpusError extends Error {
  constructor(message: string, public readonly line?: number) {
    super(line === undefined ? message : `line ${line}: ${message}`);
    this.name = "CorpusError";
  }
}

function checkSentence(obj: unknown, what: string, line: number): SentenceData {
  const sentence = obj as SentenceData;
  if (!sentence || !Array.isArray(sentence.tokens)) {
    throw new CorpusError(`${what} must carry a token list`, line);
  }
  sentence.tokens.forEach((token, i) => {
    if (typeof token.text !== "string" || token.text.length === 0) {
      throw new CorpusError(`${what} token ${i} has no text`, line);
    }
  });
  if (sentence.noun_chunks) {
    for (const [start, end] of sentence.noun_chunks) {
      if (start < 0 || start >= end || end > sentence.tokens.length) {
        throw new CorpusError(`${what} noun chunk [${start}, ${end}) out of bounds`, line);
      }
    }
  }
  return sentence;
}

/** Parse a corpus file's text into samples, validating ids and spans. */
export function parseCorpus(text: string): SampleData[] {
  const samples: SampleData[] = [];
  const seen = new Set<string>();
  const lines = text.split("\n");
  lines.forEach((raw, index) => {
    const line = raw.trim();
    if (line === "") return;
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new CorpusError(`invalid JSON (${(err as Error).message})`, index + 1);
    }
    if (index === 0 && "_meta" in obj) return;
    if (typeof obj.id !== "string" || obj.id === "") {
      throw new CorpusError("sample id missing", index + 1);
    }
    if (seen.has(obj.id)) {
      throw new CorpusError(`duplicate sample id '${obj.id}'`, index + 1);
    }
    seen.add(obj.id);
    const sample: SampleData = {
      id: obj.id,
      premise: checkSentence(obj.premise, "premise", index + 1),
      hypothesis: checkSentence(obj.hypothesis, "hypothesis", index + 1),
    };
    if (typeof obj.label === "string") {
      sample.label = obj.label as SampleData["label"];
    }
    samples.push(sample);
  });
  return samples;
}

/** Parse a prediction file into per-sample overlays (read-only layer). */
export function parsePredictions(text: string): Map<string, PredictionOverlay> {
  const overlays = new Map<string, PredictionOverlay>();
  text.split("\n").forEach((raw, index) => {
    const line = raw.trim();
    if (line === "") return;
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new CorpusError(`invalid JSON (${(err as Error).message})`, index + 1);
    }
    if (index === 0 && "_meta" in obj) return;
    if (typeof obj.sample_id !== "string" || !Array.isArray(obj.pairs)) {
      throw new CorpusError("prediction record needs sample_id and pairs", index + 1);
    }
    overlays.set(obj.sample_id, {
      sample_id: obj.sample_id,
      pairs: obj.pairs as PredictionOverlay["pairs"],
      sentence_label: obj.sentence_label as PredictionOverlay["sentence_label"],
    });
  });
  return overlays;
}
