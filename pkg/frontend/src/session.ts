/** DOM-free annotation session: selection state, drafts, persistence. */

import {
  AnnotationError,
  checkBounds,
  checkNoOverlap,
  exportDocument,
  importDocument,
  makeUnit,
  serializeDocument,
} from "./annotations.js";
import { parseCorpus, parsePredictions } from "./corpus.js";
import type {
  AnnotationUnit,
  PredictionOverlay,
  SampleData,
  Side,
  Span,
  UnitLabel,
} from "./types.js";

/** Minimal key-value persistence; localStorage in the browser. */
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

interface PersistedState {
  fingerprint: string;
  annotatorId: string;
  cursor: number;
  drafts: Record<string, AnnotationUnit[]>;
}

const STORAGE_KEY = "phrasenli-annotator/v1";

function fingerprint(samples: SampleData[]): string {
  // enough to tell corpora apart without hashing machinery
  return `${samples.length}:${samples[0]?.id ?? ""}:${samples[samples.length - 1]?.id ?? ""}`;
}

export class AnnotationSession {
  readonly samples: SampleData[];
  annotatorId: string;
  cursor = 0;
  private drafts = new Map<string, AnnotationUnit[]>();
  private pending: { premise: Span | null; hypothesis: Span | null } =
    { premise: null, hypothesis: null };
  private overlays = new Map<string, PredictionOverlay>();
  private store?: KeyValueStore;

  constructor(samples: SampleData[], annotatorId: string, store?: KeyValueStore) {
    if (samples.length === 0) {
      throw new AnnotationError("the corpus has no samples");
    }
    this.samples = samples;
    this.annotatorId = annotatorId;
    this.store = store;
    this.restore();
  }

  static fromCorpusText(text: string, annotatorId: string,
                        store?: KeyValueStore): AnnotationSession {
    return new AnnotationSession(parseCorpus(text), annotatorId, store);
  }

  get current(): SampleData {
    return this.samples[this.cursor];
  }

  get pendingSelections(): { premise: Span | null; hypothesis: Span | null } {
    return { premise: this.pending.premise, hypothesis: this.pending.hypothesis };
  }

  unitsFor(sampleId: string): AnnotationUnit[] {
    return [...(this.drafts.get(sampleId) ?? [])];
  }

  get currentUnits(): AnnotationUnit[] {
    return this.unitsFor(this.current.id);
  }

  /** Samples that carry at least one committed unit. */
  get completedCount(): number {
    let done = 0;
    for (const sample of this.samples) {
      if ((this.drafts.get(sample.id) ?? []).length > 0) done += 1;
    }
    return done;
  }

  goto(index: number): void {
    if (index < 0 || index >= this.samples.length) {
      throw new AnnotationError(`sample index ${index} out of range`);
    }
    this.cursor = index;
    this.clearSelection();
    this.persist();
  }

  next(): void {
    this.goto(Math.min(this.cursor + 1, this.samples.length - 1));
  }

  previous(): void {
    this.goto(Math.max(this.cursor - 1, 0));
  }

  /** Record a pending token-span selection on one side. */
  selectSpan(side: Side, start: number, end: number): Span {
    const sentence = side === "premise" ? this.current.premise : this.current.hypothesis;
    if (!(0 <= start && start < end && end <= sentence.tokens.length)) {
      throw new AnnotationError(
        `selection [${start}, ${end}) out of range for the ${side}`);
    }
    const span: Span = [start, end];
    this.pending[side] = span;
    return span;
  }

  clearSelection(side?: Side): void {
    if (side === undefined || side === "premise") this.pending.premise = null;
    if (side === undefined || side === "hypothesis") this.pending.hypothesis = null;
  }

  /** Turn the pending selections into a unit of the given label. */
  commitUnit(label: UnitLabel): AnnotationUnit {
    if (label === "UP" && this.pending.hypothesis) {
      throw new AnnotationError("UP takes the premise selection only; clear the hypothesis one");
    }
    if (label === "UH" && this.pending.premise) {
      throw new AnnotationError("UH takes the hypothesis selection only; clear the premise one");
    }
    const unit = makeUnit(
      label,
      label === "UH" ? null : this.pending.premise,
      label === "UP" ? null : this.pending.hypothesis,
    );
    checkBounds(unit, this.current);
    const units = this.drafts.get(this.current.id) ?? [];
    checkNoOverlap(unit, units);
    units.push(unit);
    this.drafts.set(this.current.id, units);
    this.clearSelection();
    this.persist();
    return unit;
  }

  deleteUnit(index: number): void {
    const units = this.drafts.get(this.current.id) ?? [];
    if (index < 0 || index >= units.length) {
      throw new AnnotationError(`no unit at index ${index}`);
    }
    units.splice(index, 1);
    if (units.length === 0) {
      this.drafts.delete(this.current.id);
    } else {
      this.drafts.set(this.current.id, units);
    }
    this.persist();
  }

  get totalUnits(): number {
    let n = 0;
    for (const units of this.drafts.values()) n += units.length;
    return n;
  }

  /** Serialized annotation document, ready to download. */
  exportAnnotations(): string {
    return serializeDocument(exportDocument(this.annotatorId, this.drafts));
  }

  /** Merge a previously exported document into the drafts. */
  importAnnotations(text: string): number {
    const imported = importDocument(text);
    let count = 0;
    for (const [sampleId, units] of imported) {
      this.drafts.set(sampleId, units);
      count += units.length;
    }
    this.persist();
    return count;
  }

  /** Attach model predictions as a read-only highlight layer. */
  overlayPredictions(text: string): number {
    this.overlays = parsePredictions(text);
    return this.overlays.size;
  }

  clearOverlay(): void {
    this.overlays = new Map();
  }

  get currentOverlay(): PredictionOverlay | undefined {
    return this.overlays.get(this.current.id);
  }

  // -- persistence ---------------------------------------------------------

  private persist(): void {
    if (!this.store) return;
    const state: PersistedState = {
      fingerprint: fingerprint(this.samples),
      annotatorId: this.annotatorId,
      cursor: this.cursor,
      drafts: Object.fromEntries(this.drafts),
    };
    this.store.setItem(STORAGE_KEY, JSON.stringify(state));
  }

  private restore(): void {
    if (!this.store) return;
    const raw = this.store.getItem(STORAGE_KEY);
    if (!raw) return;
    try {
      const state = JSON.parse(raw) as PersistedState;
      if (state.fingerprint !== fingerprint(this.samples)) return;
      this.annotatorId = state.annotatorId || this.annotatorId;
      this.cursor = Math.min(Math.max(state.cursor, 0), this.samples.length - 1);
      this.drafts = new Map(Object.entries(state.drafts));
    } catch {
      // a broken saved state never blocks a fresh session
    }
  }
}
