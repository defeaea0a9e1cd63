import { describe, expect, it } from "vitest";

import { AnnotationSession, type KeyValueStore } from "../src/session.js";
import { kidCorpusLine, threeSampleCorpus } from "./fixtures.js";

class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>();
  getItem(key: string) { return this.data.get(key) ?? null; }
  setItem(key: string, value: string) { this.data.set(key, value); }
}

function session(store?: KeyValueStore) {
  return AnnotationSession.fromCorpusText(threeSampleCorpus(), "tester", store);
}

describe("selection and commit", () => {
  it("pairs two selections into an E unit", () => {
    const s = session();
    s.selectSpan("premise", 0, 2);
    s.selectSpan("hypothesis", 0, 2);
    const unit = s.commitUnit("E");
    expect(unit).toEqual({ label: "E", premise_span: [0, 2], hypothesis_span: [0, 2] });
    expect(s.currentUnits).toHaveLength(1);
    expect(s.pendingSelections).toEqual({ premise: null, hypothesis: null });
  });

  it("rejects E with only a premise selection", () => {
    const s = session();
    s.selectSpan("premise", 0, 2);
    expect(() => s.commitUnit("E")).toThrow(/both sides/);
    expect(s.currentUnits).toHaveLength(0);
  });

  it("commits UP from a premise-only selection", () => {
    const s = session();
    s.selectSpan("premise", 4, 6);
    expect(s.commitUnit("UP").premise_span).toEqual([4, 6]);
  });

  it("refuses UP while a hypothesis selection is pending", () => {
    const s = session();
    s.selectSpan("premise", 0, 1);
    s.selectSpan("hypothesis", 0, 1);
    expect(() => s.commitUnit("UP")).toThrow(/premise selection only/);
  });

  it("rejects overlapping spans on the same side inline", () => {
    const s = session();
    s.selectSpan("premise", 0, 3);
    s.selectSpan("hypothesis", 0, 2);
    s.commitUnit("E");
    s.selectSpan("premise", 2, 4);
    s.selectSpan("hypothesis", 3, 5);
    expect(() => s.commitUnit("C")).toThrow(/overlaps/);
    expect(s.currentUnits).toHaveLength(1);
  });

  it("validates selection bounds against the tokenization", () => {
    const s = session();
    expect(() => s.selectSpan("premise", 0, 99)).toThrow(/out of range/);
    expect(() => s.selectSpan("hypothesis", 3, 3)).toThrow(/out of range/);
  });

  it("deletes units by index", () => {
    const s = session();
    s.selectSpan("premise", 0, 1);
    s.commitUnit("UP");
    s.selectSpan("premise", 2, 3);
    s.commitUnit("UP");
    s.deleteUnit(0);
    expect(s.currentUnits).toHaveLength(1);
    expect(s.currentUnits[0].premise_span).toEqual([2, 3]);
    expect(() => s.deleteUnit(5)).toThrow(/no unit/);
  });
});

describe("navigation", () => {
  it("moves the cursor and keeps per-sample drafts apart", () => {
    const s = session();
    s.selectSpan("premise", 0, 1);
    s.commitUnit("UP");
    s.next();
    expect(s.current.id).toBe("s2");
    expect(s.currentUnits).toHaveLength(0);
    s.previous();
    expect(s.currentUnits).toHaveLength(1);
  });

  it("clamps at the corpus edges", () => {
    const s = session();
    s.previous();
    expect(s.cursor).toBe(0);
    s.goto(2);
    s.next();
    expect(s.cursor).toBe(2);
  });

  it("counts annotated samples", () => {
    const s = session();
    expect(s.completedCount).toBe(0);
    s.selectSpan("premise", 0, 1);
    s.commitUnit("UP");
    expect(s.completedCount).toBe(1);
  });
});

describe("persistence", () => {
  it("survives a reload through the store", () => {
    const store = new MemoryStore();
    const first = session(store);
    first.selectSpan("premise", 0, 2);
    first.selectSpan("hypothesis", 0, 2);
    first.commitUnit("E");
    first.next();

    const resumed = session(store);
    expect(resumed.cursor).toBe(1);
    expect(resumed.unitsFor("kid")).toEqual([
      { label: "E", premise_span: [0, 2], hypothesis_span: [0, 2] },
    ]);
  });

  it("ignores state from a different corpus", () => {
    const store = new MemoryStore();
    const other = AnnotationSession.fromCorpusText(kidCorpusLine(), "tester", store);
    other.selectSpan("premise", 0, 1);
    other.commitUnit("UP");
    const fresh = session(store);
    expect(fresh.completedCount).toBe(0);
  });
});

describe("import and overlays", () => {
  it("round-trips an exported session", () => {
    const s = session();
    s.selectSpan("premise", 0, 2);
    s.selectSpan("hypothesis", 0, 2);
    s.commitUnit("E");
    s.next();
    s.selectSpan("hypothesis", 1, 3);
    s.commitUnit("UH");
    const text = s.exportAnnotations();

    const fresh = session();
    expect(fresh.importAnnotations(text)).toBe(2);
    expect(fresh.exportAnnotations()).toBe(text);
  });

  it("exposes the overlay of the current sample only", () => {
    const s = session();
    const line = JSON.stringify({
      sample_id: "s2",
      pairs: [],
      sentence_label: "N",
    });
    expect(s.overlayPredictions(line + "\n")).toBe(1);
    expect(s.currentOverlay).toBeUndefined();
    s.next();
    expect(s.currentOverlay?.sentence_label).toBe("N");
    s.clearOverlay();
    expect(s.currentOverlay).toBeUndefined();
  });
});
