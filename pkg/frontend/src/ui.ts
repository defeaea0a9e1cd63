/** DOM layer: token rendering, drag selection, unit list, file exchange. */

import { AnnotationSession } from "./session.js";
import type { PredictedPair, Side, Span, UnitLabel } from "./types.js";

const LABEL_NAMES: Record<UnitLabel, string> = {
  E: "Entailment",
  C: "Contradiction",
  N: "Neutral",
  UP: "Unaligned (premise)",
  UH: "Unaligned (hypothesis)",
};

interface DragState {
  side: Side;
  anchor: number;
  focus: number;
}

export class AnnotatorApp {
  private session: AnnotationSession | null = null;
  private drag: DragState | null = null;

  constructor(private root: Document) {
    this.bindControls();
    this.render();
  }

  private el<T extends HTMLElement>(id: string): T {
    const node = this.root.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  private bindControls(): void {
    this.el<HTMLInputElement>("corpus-file").addEventListener("change", (event) => {
      void this.loadCorpus((event.target as HTMLInputElement).files?.[0]);
    });
    this.el<HTMLInputElement>("annotations-file").addEventListener("change", (event) => {
      void this.importAnnotations((event.target as HTMLInputElement).files?.[0]);
    });
    this.el<HTMLInputElement>("predictions-file").addEventListener("change", (event) => {
      void this.loadPredictions((event.target as HTMLInputElement).files?.[0]);
    });
    this.el("export").addEventListener("click", () => this.exportAnnotations());
    this.el("prev").addEventListener("click", () => this.withSession((s) => s.previous()));
    this.el("next").addEventListener("click", () => this.withSession((s) => s.next()));
    this.el("clear-selection").addEventListener("click", () =>
      this.withSession((s) => s.clearSelection()));
    this.el("clear-overlay").addEventListener("click", () =>
      this.withSession((s) => s.clearOverlay()));
    for (const label of Object.keys(LABEL_NAMES) as UnitLabel[]) {
      this.el(`commit-${label}`).addEventListener("click", () => this.commit(label));
    }
    this.el<HTMLInputElement>("annotator-id").addEventListener("change", (event) => {
      if (this.session) {
        this.session.annotatorId = (event.target as HTMLInputElement).value || "annotator";
      }
    });
    this.root.addEventListener("mouseup", () => this.finishDrag());
  }

  private withSession(action: (session: AnnotationSession) => void): void {
    if (!this.session) return;
    try {
      action(this.session);
      this.setMessage("");
    } catch (err) {
      this.setMessage((err as Error).message);
    }
    this.render();
  }

  private setMessage(text: string): void {
    const box = this.el("message");
    box.textContent = text;
    box.classList.toggle("error", text !== "");
  }

  private async loadCorpus(file: File | undefined): Promise<void> {
    if (!file) return;
    try {
      const text = await file.text();
      const annotatorId = this.el<HTMLInputElement>("annotator-id").value || "annotator";
      this.session = AnnotationSession.fromCorpusText(text, annotatorId, window.localStorage);
      this.setMessage(`loaded ${this.session.samples.length} samples from ${file.name}`);
    } catch (err) {
      this.setMessage((err as Error).message);
    }
    this.render();
  }

  private async importAnnotations(file: File | undefined): Promise<void> {
    if (!file || !this.session) return;
    try {
      const count = this.session.importAnnotations(await file.text());
      this.setMessage(`imported ${count} units from ${file.name}`);
    } catch (err) {
      this.setMessage((err as Error).message);
    }
    this.render();
  }

  private async loadPredictions(file: File | undefined): Promise<void> {
    if (!file || !this.session) return;
    try {
      const count = this.session.overlayPredictions(await file.text());
      this.setMessage(`prediction overlay covers ${count} samples`);
    } catch (err) {
      this.setMessage((err as Error).message);
    }
    this.render();
  }

  private exportAnnotations(): void {
    if (!this.session) return;
    if (this.session.totalUnits === 0
        && !window.confirm("No units committed yet. Export an empty file?")) {
      return;
    }
    const blob = new Blob([this.session.exportAnnotations()],
                          { type: "application/json" });
    const anchor = this.root.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = "annotations.json";
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  }

  private commit(label: UnitLabel): void {
    this.withSession((session) => {
      const unit = session.commitUnit(label);
      this.setMessage(`committed ${LABEL_NAMES[unit.label]}`);
    });
  }

  // -- drag selection ------------------------------------------------------

  private startDrag(side: Side, index: number): void {
    this.drag = { side, anchor: index, focus: index };
    this.render();
  }

  private extendDrag(side: Side, index: number): void {
    if (this.drag && this.drag.side === side) {
      this.drag.focus = index;
      this.render();
    }
  }

  private finishDrag(): void {
    if (!this.drag || !this.session) {
      this.drag = null;
      return;
    }
    const { side, anchor, focus } = this.drag;
    this.drag = null;
    const start = Math.min(anchor, focus);
    const end = Math.max(anchor, focus) + 1;
    this.withSession((session) => {
      session.selectSpan(side, start, end);
    });
  }

  // -- rendering -----------------------------------------------------------

  render(): void {
    const hasSession = this.session !== null;
    this.el("workbench").classList.toggle("hidden", !hasSession);
    if (!this.session) return;
    const session = this.session;

    const sample = session.current;
    this.el("sample-id").textContent = sample.id;
    this.el("sample-label").textContent = sample.label ? `gold: ${sample.label}` : "";
    this.el("progress").textContent =
      `sample ${session.cursor + 1} / ${session.samples.length} · ` +
      `${session.completedCount} annotated`;

    this.renderSentence("premise");
    this.renderSentence("hypothesis");
    this.renderUnits();
    this.renderOverlay();
  }

  private renderSentence(side: Side): void {
    if (!this.session) return;
    const session = this.session;
    const container = this.el(`${side}-tokens`);
    container.textContent = "";
    const sentence = side === "premise" ? session.current.premise
      : session.current.hypothesis;
    const pending = session.pendingSelections[side];
    const covered = new Map<number, UnitLabel>();
    session.currentUnits.forEach((unit) => {
      const span = side === "premise" ? unit.premise_span : unit.hypothesis_span;
      if (span) {
        for (let t = span[0]; t < span[1]; t += 1) covered.set(t, unit.label);
      }
    });

    sentence.tokens.forEach((token, index) => {
      const node = this.root.createElement("span");
      node.className = "token";
      node.textContent = token.text;
      const unitLabel = covered.get(index);
      if (unitLabel) node.classList.add(`label-${unitLabel}`);
      if (pending && pending[0] <= index && index < pending[1]) {
        node.classList.add("pending");
      }
      if (this.drag && this.drag.side === side) {
        const lo = Math.min(this.drag.anchor, this.drag.focus);
        const hi = Math.max(this.drag.anchor, this.drag.focus);
        if (lo <= index && index <= hi) node.classList.add("pending");
      }
      node.addEventListener("mousedown", (event) => {
        event.preventDefault();
        this.startDrag(side, index);
      });
      node.addEventListener("mouseenter", () => this.extendDrag(side, index));
      container.appendChild(node);
    });
  }

  private renderUnits(): void {
    if (!this.session) return;
    const session = this.session;
    const list = this.el("unit-list");
    list.textContent = "";
    const sample = session.current;
    session.currentUnits.forEach((unit, index) => {
      const item = this.root.createElement("li");
      const text = (side: "premise" | "hypothesis", span: Span | null) => {
        if (!span) return "⟨EMPTY⟩";
        const tokens = (side === "premise" ? sample.premise : sample.hypothesis).tokens;
        return tokens.slice(span[0], span[1]).map((t) => t.text).join(" ");
      };
      const tag = this.root.createElement("span");
      tag.className = `unit-tag label-${unit.label}`;
      tag.textContent = unit.label;
      item.appendChild(tag);
      const body = this.root.createElement("span");
      body.textContent =
        ` ${text("premise", unit.premise_span)} ↔ ${text("hypothesis", unit.hypothesis_span)} `;
      item.appendChild(body);
      const remove = this.root.createElement("button");
      remove.textContent = "✕";
      remove.title = "delete unit";
      remove.addEventListener("click", () => this.withSession((s) => s.deleteUnit(index)));
      item.appendChild(remove);
      list.appendChild(item);
    });
  }

  private renderOverlay(): void {
    if (!this.session) return;
    const session = this.session;
    const box = this.el("overlay");
    box.textContent = "";
    const overlay = session.currentOverlay;
    if (!overlay) {
      box.classList.add("hidden");
      return;
    }
    box.classList.remove("hidden");
    const sample = session.current;
    const heading = this.root.createElement("div");
    heading.className = "overlay-heading";
    heading.textContent = `model prediction: ${overlay.sentence_label}`;
    box.appendChild(heading);
    overlay.pairs.forEach((pair: PredictedPair) => {
      const row = this.root.createElement("div");
      row.className = `overlay-pair label-${pair.label}`;
      const side = (span: Span | null, tokens: { text: string }[]) =>
        span ? tokens.slice(span[0], span[1]).map((t) => t.text).join(" ") : "⟨EMPTY⟩";
      row.textContent =
        `${pair.label}  ${side(pair.premise_phrase?.span ?? null, sample.premise.tokens)}`
        + ` ↔ ${side(pair.hypothesis_phrase?.span ?? null, sample.hypothesis.tokens)}`;
      box.appendChild(row);
    });
  }
}
