/** Shared record shapes, bit-compatible with the Python pipeline's files. */

export type Side = "premise" | "hypothesis";

export type PairLabel = "E" | "C" | "N";

/** E/C/N label both sides of a unit; UP/UH mark one-sided surplus phrases. */
export type UnitLabel = PairLabel | "UP" | "UH";

/** Half-open token-index interval [start, end). */
export type Span = [number, number];

export interface Token {
  text: string;
  pos: string;
  tag: string;
}

export interface SentenceData {
  tokens: Token[];
  noun_chunks?: Span[];
}

export interface SampleData {
  id: string;
  label?: "entailment" | "contradiction" | "neutral";
  premise: SentenceData;
  hypothesis: SentenceData;
}

export interface AnnotationUnit {
  label: UnitLabel;
  premise_span: Span | null;
  hypothesis_span: Span | null;
}

export interface AnnotatorRecord {
  annotator_id: string;
  units: AnnotationUnit[];
}

/** The annotation file: one JSON document mapping sample id to records. */
export type AnnotationDocument = Record<string, AnnotatorRecord[]>;

/** One pair of a prediction record, as the overlay consumes it. */
export interface PredictedPair {
  premise_phrase: { span: Span } | null;
  hypothesis_phrase: { span: Span } | null;
  aligned: boolean;
  probs: [number, number, number];
  label: PairLabel;
}

export interface PredictionOverlay {
  sample_id: string;
  pairs: PredictedPair[];
  sentence_label: PairLabel;
}

export function spanLength(span: Span): number {
  return span[1] - span[0];
}

export function spansOverlap(a: Span, b: Span): boolean {
  return a[0] < b[1] && b[0] < a[1];
}
