/** Annotation units: invariants, overlap checks, import/export. */

import type {
  AnnotationDocument,
  AnnotationUnit,
  AnnotatorRecord,
  SampleData,
  Span,
  UnitLabel,
} from "./types.js";
import { spansOverlap } from "./types.js";

export class AnnotationError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "AnnotationError";
  }
}

/** Enforce the per-unit span requirements of each label. */
export function checkUnit(unit: AnnotationUnit): void {
  const { label, premise_span, hypothesis_span } = unit;
  for (const [name, span] of [["premise", premise_span], ["hypothesis", hypothesis_span]] as const) {
    if (span !== null && (span[0] < 0 || span[0] >= span[1])) {
      throw new AnnotationError(`${name} span [${span[0]}, ${span[1]}) is not a valid interval`);
    }
  }
  if (label === "E" || label === "C" || label === "N") {
    if (!premise_span || !hypothesis_span) {
      throw new AnnotationError(`label ${label} needs a selection on both sides`);
    }
  } else if (label === "UP") {
    if (!premise_span || hypothesis_span) {
      throw new AnnotationError("label UP needs a premise selection only");
    }
  } else if (label === "UH") {
    if (!hypothesis_span || premise_span) {
      throw new AnnotationError("label UH needs a hypothesis selection only");
    }
  } else {
    throw new AnnotationError(`unknown label ${label as string}`);
  }
}

/** Reject a unit whose spans overlap existing same-side spans. */
export function checkNoOverlap(unit: AnnotationUnit, existing: AnnotationUnit[]): void {
  for (const other of existing) {
    if (unit.premise_span && other.premise_span
        && spansOverlap(unit.premise_span, other.premise_span)) {
      throw new AnnotationError(
        `premise span [${unit.premise_span[0]}, ${unit.premise_span[1]}) overlaps `
        + `an existing ${other.label} unit`);
    }
    if (unit.hypothesis_span && other.hypothesis_span
        && spansOverlap(unit.hypothesis_span, other.hypothesis_span)) {
      throw new AnnotationError(
        `hypothesis span [${unit.hypothesis_span[0]}, ${unit.hypothesis_span[1]}) overlaps `
        + `an existing ${other.label} unit`);
    }
  }
}

export function checkBounds(unit: AnnotationUnit, sample: SampleData): void {
  if (unit.premise_span && unit.premise_span[1] > sample.premise.tokens.length) {
    throw new AnnotationError("premise span exceeds the sentence");
  }
  if (unit.hypothesis_span && unit.hypothesis_span[1] > sample.hypothesis.tokens.length) {
    throw new AnnotationError("hypothesis span exceeds the sentence");
  }
}

export function makeUnit(label: UnitLabel, premise: Span | null,
                         hypothesis: Span | null): AnnotationUnit {
  const unit: AnnotationUnit = {
    label,
    premise_span: premise ? [premise[0], premise[1]] : null,
    hypothesis_span: hypothesis ? [hypothesis[0], hypothesis[1]] : null,
  };
  checkUnit(unit);
  return unit;
}

/** Build the annotation document the Python evaluator reads. */
export function exportDocument(annotatorId: string,
                               drafts: Map<string, AnnotationUnit[]>): AnnotationDocument {
  const doc: AnnotationDocument = {};
  for (const sampleId of [...drafts.keys()].sort()) {
    const units = drafts.get(sampleId) ?? [];
    if (units.length === 0) continue;
    doc[sampleId] = [{
      annotator_id: annotatorId,
      units: units.map((u) => ({
        label: u.label,
        premise_span: u.premise_span ? [...u.premise_span] as Span : null,
        hypothesis_span: u.hypothesis_span ? [...u.hypothesis_span] as Span : null,
      })),
    }];
  }
  return doc;
}

export function serializeDocument(doc: AnnotationDocument): string {
  return JSON.stringify(doc, null, 1) + "\n";
}

/** Load a previously exported document back into per-sample drafts. */
export function importDocument(text: string,
                               annotatorId?: string): Map<string, AnnotationUnit[]> {
  let doc: AnnotationDocument;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new AnnotationError(`invalid annotation JSON (${(err as Error).message})`);
  }
  const drafts = new Map<string, AnnotationUnit[]>();
  for (const [sampleId, records] of Object.entries(doc)) {
    if (sampleId === "_meta") continue;
    const wanted = (records as AnnotatorRecord[]).filter(
      (rec) => annotatorId === undefined || rec.annotator_id === annotatorId);
    const units: AnnotationUnit[] = [];
    for (const rec of wanted) {
      for (const unit of rec.units) {
        checkUnit(unit);
        checkNoOverlap(unit, units);
        units.push(unit);
      }
    }
    if (units.length > 0) drafts.set(sampleId, units);
  }
  return drafts;
}
