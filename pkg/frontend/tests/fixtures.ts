/** Shared corpus fixtures for the frontend tests. */

function token(text: string, pos = "NOUN", tag = "NN") {
  return { text, pos, tag };
}

function sentenceOf(words: string[]) {
  return { tokens: words.map((w) => token(w)) };
}

/**
 * The kid-in-red sample used by the metric's worked examples.
 * Premise:    "A kid in red is playing in a garden"          (9 tokens)
 * Hypothesis: "A child in red is watching TV in the bedroom" (10 tokens)
 */
export function kidCorpusLine(): string {
  return JSON.stringify({
    id: "kid",
    label: "entailment",
    premise: sentenceOf(["A", "kid", "in", "red", "is", "playing", "in", "a", "garden"]),
    hypothesis: sentenceOf(
      ["A", "child", "in", "red", "is", "watching", "TV", "in", "the", "bedroom"]),
  });
}

export function threeSampleCorpus(): string {
  const rows = [kidCorpusLine()];
  for (const id of ["s2", "s3"]) {
    rows.push(JSON.stringify({
      id,
      premise: sentenceOf(["the", "dog", "runs", "fast"]),
      hypothesis: sentenceOf(["a", "puppy", "moves", "quickly"]),
    }));
  }
  return rows.join("\n") + "\n";
}
