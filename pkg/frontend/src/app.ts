// Browser workspace: arrange documents into cluster frames, mark text,
// attach notes, then refine and read the targeted report updates.

import { ApiClient, ApiRequestError, RefineGate } from "./api.js";
import { computeBadges, sentenceMarks } from "./badges.js";
import { WorkspaceState, loadLayout, saveLayout } from "./state.js";
import { condenseEntry, reverseChronological } from "./timeline.js";
import type {
  AnalysisWire,
  ReportDiffWire,
  ReportWire,
  TimelineEntryWire,
} from "./types.js";
import { reportParagraphs } from "./types.js";

const FRAME_DEFAULT = { width: 260, height: 220 };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function h<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

class WorkspaceApp {
  private readonly api = new ApiClient("");
  private readonly gate = new RefineGate();
  private state = new WorkspaceState();
  private sessionId: string | null = null;
  private report: ReportWire | null = null;
  private reportDiff: ReportDiffWire | null = null;
  private analysis: AnalysisWire | null = null;
  private timeline: TimelineEntryWire[] = [];
  private openDocId: string | null = null;
  private nextFrameOffset = 0;

  bind(): void {
    el<HTMLButtonElement>("start-session").addEventListener("click", () => {
      void this.startSession();
    });
    el<HTMLButtonElement>("new-cluster").addEventListener("click", () => {
      const label = window.prompt("Cluster label:", "New cluster");
      if (!label) return;
      this.state.createCluster(label, {
        x: 24 + this.nextFrameOffset,
        y: 24 + this.nextFrameOffset,
        ...FRAME_DEFAULT,
      });
      this.nextFrameOffset = (this.nextFrameOffset + 36) % 240;
      this.renderCanvas();
    });
    el<HTMLButtonElement>("refine").addEventListener("click", () => {
      void this.refine();
    });
    for (const tab of ["report", "intent", "timeline"]) {
      el(`tab-${tab}`).addEventListener("click", () => this.showTab(tab));
    }
    el("doc-close").addEventListener("click", () => {
      this.openDocId = null;
      el("doc-view").hidden = true;
    });
    el<HTMLButtonElement>("doc-highlight").addEventListener("click", () => {
      this.highlightSelection();
    });
    el<HTMLButtonElement>("doc-note").addEventListener("click", () => {
      if (!this.openDocId) return;
      const text = window.prompt("Note on this document:");
      if (!text) return;
      this.withState(() => this.state.addNote("document", this.openDocId!, text));
      this.renderDocView();
    });
  }

  private status(text: string, isError = false): void {
    const node = el("status");
    node.textContent = text;
    node.classList.toggle("error", isError);
  }

  private withState(action: () => void): void {
    try {
      action();
    } catch (err) {
      this.status(String(err), true);
      return;
    }
    this.renderCanvas();
  }

  // -- session ----------------------------------------------------------------

  private async startSession(): Promise<void> {
    const input = el<HTMLInputElement>("corpus-files");
    const files = input.files;
    if (!files || files.length === 0) {
      this.status("choose corpus .txt files first", true);
      return;
    }
    try {
      const payload = await Promise.all(
        [...files].map(async (f) => ({ name: f.name, content: await f.text() })),
      );
      const corpusId = await this.api.createCorpus(payload);
      const method = el<HTMLSelectElement>("method").value;
      const session = await this.api.createSession(corpusId, method);
      this.sessionId = session.session_id;
      this.state = WorkspaceState.fromSnapshot(
        session.snapshot, loadLayout(window.localStorage, this.sessionId));
      for (const doc of await this.api.getCorpus(corpusId)) {
        if (!this.state.documents.has(doc.doc_id)) this.state.addDocument(doc);
      }
      this.report = session.report;
      this.reportDiff = null;
      this.analysis = null;
      this.timeline = [];
      el<HTMLButtonElement>("new-cluster").disabled = false;
      el<HTMLButtonElement>("refine").disabled = false;
      el("session-label").textContent = this.sessionId;
      this.status(`session ${this.sessionId} ready`);
      this.renderCanvas();
      this.renderReport();
      this.renderIntent();
      this.renderTimeline();
    } catch (err) {
      this.status(String(err), true);
    }
  }

  // -- refine -------------------------------------------------------------------

  private async refine(): Promise<void> {
    if (!this.sessionId) return;
    if (this.gate.busy) {
      this.status("refine already in flight", true);
      return;
    }
    const button = el<HTMLButtonElement>("refine");
    button.disabled = true;
    this.status("refining…");
    try {
      const response = await this.gate.run(async () => {
        const snapshot = this.state.toSnapshot(
          `${this.sessionId}-staged-${Date.now()}`, 0);
        await this.api.putWorkspace(this.sessionId!, snapshot);
        return this.api.refine(this.sessionId!);
      });
      this.report = response.report;
      this.reportDiff = response.report_diff;
      this.analysis = response.analysis;
      if (response.committed) {
        const edits = response.interaction_set.interactions.length;
        this.status(`committed iteration ${response.sequence_index} `
          + `(${edits} interaction${edits === 1 ? "" : "s"})`);
        this.timeline = (await this.api.getTimeline(this.sessionId)).entries;
      } else {
        this.status("no changes to apply");
      }
      this.renderReport();
      this.renderIntent();
      this.renderTimeline();
      this.showTab("report");
    } catch (err) {
      if (err instanceof ApiRequestError && err.info.status === 409) {
        this.status("a refine is already running for this session", true);
      } else if (err instanceof ApiRequestError && err.info.violations) {
        const rules = err.info.violations.map((v) => v.rule).join(", ");
        this.status(`snapshot rejected: ${rules}`, true);
      } else {
        this.status(String(err), true);
      }
    } finally {
      button.disabled = false;
    }
  }

  // -- canvas ------------------------------------------------------------------

  private renderCanvas(): void {
    if (this.sessionId) saveLayout(window.localStorage, this.sessionId, this.state.layout);
    const canvas = el("canvas");
    canvas.querySelectorAll(".frame").forEach((n) => n.remove());
    const shelf = el("shelf-cards");
    shelf.textContent = "";

    for (const docId of this.state.shelfDocIds()) {
      shelf.appendChild(this.docCard(docId));
    }
    this.makeDropTarget(el("shelf"), null);

    for (const [clusterId, cluster] of this.state.clusters) {
      const layout = this.state.layout.frames[clusterId]
        ?? { x: 24, y: 24, ...FRAME_DEFAULT };
      this.state.layout.frames[clusterId] = layout;
      const frame = h("div", "frame");
      frame.style.left = `${layout.x}px`;
      frame.style.top = `${layout.y}px`;
      frame.style.width = `${layout.width}px`;
      frame.style.minHeight = `${layout.height}px`;

      const header = h("div", "frame-header");
      const title = h("span", "frame-title", cluster.label);
      title.title = "double-click to rename";
      title.addEventListener("dblclick", () => {
        const label = window.prompt("Rename cluster:", cluster.label);
        if (label) this.withState(() => this.state.renameCluster(clusterId, label));
      });
      header.appendChild(title);

      const noteButton = h("button", "mini", "+note");
      noteButton.addEventListener("click", () => {
        const text = window.prompt(`Note on "${cluster.label}":`);
        if (text) this.withState(() => this.state.addNote("cluster", clusterId, text));
      });
      header.appendChild(noteButton);

      const deleteButton = h("button", "mini danger", "×");
      deleteButton.title = "delete frame (documents return to the shelf)";
      deleteButton.addEventListener("click", () => {
        this.withState(() => this.state.deleteCluster(clusterId));
      });
      header.appendChild(deleteButton);
      this.makeFrameDraggable(header, clusterId, frame);
      frame.appendChild(header);

      for (const note of this.state.notesFor("cluster", clusterId)) {
        const noteNode = h("div", "note", `✎ ${note.text}`);
        const remove = h("button", "mini danger", "×");
        remove.addEventListener("click", () => {
          this.withState(() => this.state.removeNote(note.note_id));
        });
        noteNode.appendChild(remove);
        frame.appendChild(noteNode);
      }

      const body = h("div", "frame-body");
      for (const docId of cluster.members) body.appendChild(this.docCard(docId));
      frame.appendChild(body);
      this.makeDropTarget(frame, clusterId);
      canvas.appendChild(frame);
    }
    if (this.openDocId) this.renderDocView();
  }

  private docCard(docId: string): HTMLElement {
    const doc = this.state.documents.get(docId);
    const card = h("div", "card", doc ? doc.title : docId);
    card.draggable = true;
    const marks = this.state.highlightsFor(docId).length
      + this.state.notesFor("document", docId).length;
    if (marks > 0) card.appendChild(h("span", "mark-count", String(marks)));
    card.addEventListener("dragstart", (event) => {
      event.dataTransfer?.setData("text/doc-id", docId);
    });
    card.addEventListener("click", () => {
      this.openDocId = docId;
      this.renderDocView();
    });
    return card;
  }

  private makeDropTarget(target: HTMLElement, clusterId: string | null): void {
    target.addEventListener("dragover", (event) => {
      event.preventDefault();
    });
    target.addEventListener("drop", (event) => {
      event.preventDefault();
      event.stopPropagation();
      const docId = event.dataTransfer?.getData("text/doc-id");
      if (docId) this.withState(() => this.state.moveDocument(docId, clusterId));
    });
  }

  private makeFrameDraggable(handle: HTMLElement, clusterId: string,
                             frame: HTMLElement): void {
    handle.addEventListener("pointerdown", (down) => {
      if ((down.target as HTMLElement).tagName === "BUTTON") return;
      const layout = this.state.layout.frames[clusterId];
      if (!layout) return;
      const originX = down.clientX - layout.x;
      const originY = down.clientY - layout.y;
      const move = (event: PointerEvent) => {
        layout.x = Math.max(0, event.clientX - originX);
        layout.y = Math.max(0, event.clientY - originY);
        frame.style.left = `${layout.x}px`;
        frame.style.top = `${layout.y}px`;
      };
      const up = () => {
        window.removeEventListener("pointermove", move);
        window.removeEventListener("pointerup", up);
        if (this.sessionId) {
          saveLayout(window.localStorage, this.sessionId, this.state.layout);
        }
      };
      window.addEventListener("pointermove", move);
      window.addEventListener("pointerup", up);
    });
  }

  // -- document view -------------------------------------------------------------

  private renderDocView(): void {
    const docId = this.openDocId;
    const panel = el("doc-view");
    if (!docId) {
      panel.hidden = true;
      return;
    }
    const doc = this.state.documents.get(docId);
    if (!doc) return;
    panel.hidden = false;
    el("doc-title").textContent = `${doc.title} (${docId})`;
    const body = el("doc-body");
    body.textContent = "";
    let cursor = 0;
    for (const highlight of this.state.highlightsFor(docId)) {
      if (highlight.span.start > cursor) {
        body.appendChild(document.createTextNode(
          doc.body.slice(cursor, highlight.span.start)));
      }
      const mark = h("mark", undefined, doc.body.slice(
        highlight.span.start, highlight.span.end));
      mark.title = `weight ${highlight.weight} — click to remove`;
      mark.addEventListener("click", () => {
        this.withState(() => this.state.removeHighlight(highlight.highlight_id));
        this.renderDocView();
      });
      body.appendChild(mark);
      cursor = highlight.span.end;
    }
    body.appendChild(document.createTextNode(doc.body.slice(cursor)));

    const noteList = el("doc-notes");
    noteList.textContent = "";
    for (const note of this.state.notesFor("document", docId)) {
      const item = h("li", undefined, note.text + " ");
      const remove = h("button", "mini danger", "×");
      remove.addEventListener("click", () => {
        this.withState(() => this.state.removeNote(note.note_id));
        this.renderDocView();
      });
      item.appendChild(remove);
      noteList.appendChild(item);
    }
  }

  /** Map the current selection inside #doc-body to body offsets. */
  private highlightSelection(): void {
    const docId = this.openDocId;
    if (!docId) return;
    const selection = window.getSelection();
    const container = el("doc-body");
    if (!selection || selection.rangeCount === 0 || selection.isCollapsed) {
      this.status("select some text in the document first", true);
      return;
    }
    const range = selection.getRangeAt(0);
    if (!container.contains(range.commonAncestorContainer)) {
      this.status("selection must be inside the document body", true);
      return;
    }
    const prefix = range.cloneRange();
    prefix.selectNodeContents(container);
    prefix.setEnd(range.startContainer, range.startOffset);
    const start = prefix.toString().length;
    const end = start + range.toString().length;
    selection.removeAllRanges();
    this.withState(() => this.state.addHighlight(docId, start, end));
    this.renderDocView();
  }

  // -- panels ---------------------------------------------------------------------

  private showTab(tab: string): void {
    for (const name of ["report", "intent", "timeline"]) {
      el(`${name}-panel`).hidden = name !== tab;
      el(`tab-${name}`).classList.toggle("active", name === tab);
    }
  }

  private renderReport(): void {
    const panel = el("report-panel");
    panel.textContent = "";
    if (!this.report) {
      panel.appendChild(h("p", "empty", "No report yet."));
      return;
    }
    const badges = this.reportDiff
      ? computeBadges(this.report, this.reportDiff)
      : new Map();
    for (const paragraph of reportParagraphs(this.report)) {
      const badge = badges.get(paragraph.section_key);
      const section = h("section",
                        badge?.edited ? "report-section edited" : "report-section");
      const head = h("div", "section-head", paragraph.section_key);
      if (badge?.edited) head.appendChild(h("span", "badge", "edited"));
      section.appendChild(head);
      const text = h("p");
      const marks = sentenceMarks(paragraph, badge);
      paragraph.sentences.forEach((sentence, i) => {
        const span = h("span", marks[i] ?? undefined, sentence + " ");
        text.appendChild(span);
      });
      section.appendChild(text);
      for (const removed of badge?.removed ?? []) {
        section.appendChild(h("p", "removed", removed.text));
      }
      panel.appendChild(section);
    }
  }

  private renderIntent(): void {
    const panel = el("intent-panel");
    panel.textContent = "";
    if (!this.analysis) {
      panel.appendChild(h("p", "empty",
        "No analysis yet. The intent inference appears here after a "
        + "visreact refinement."));
      return;
    }
    panel.appendChild(h("h3", undefined, "Inferred intent"));
    panel.appendChild(h("p", undefined, this.analysis.intent_inference));
    panel.appendChild(h("h3", undefined, "Refinement plan"));
    const list = h("ul");
    for (const edit of this.analysis.refinement_plan) {
      list.appendChild(h("li", undefined,
        `${edit.target_section} · ${edit.action}: ${edit.instruction}`));
    }
    panel.appendChild(list);
  }

  private renderTimeline(): void {
    const panel = el("timeline-panel");
    panel.textContent = "";
    if (this.timeline.length === 0) {
      panel.appendChild(h("p", "empty", "No refinements yet."));
      return;
    }
    const list = h("ol", "timeline");
    for (const entry of reverseChronological(this.timeline)) {
      const item = h("li");
      item.appendChild(h("span", "iteration", `#${entry.iteration}`));
      item.appendChild(h("span", undefined, condenseEntry(entry)));
      list.appendChild(item);
    }
    panel.appendChild(list);
  }
}

const app = new WorkspaceApp();
app.bind();
