// Local workspace model: the editable mirror of a snapshot plus layout
// geometry. Layout never leaves the browser; toSnapshot() strips it, so the
// PUT payload is always a plain, server-valid snapshot.

import type {
  AttachmentKind,
  ClusterWire,
  DocumentWire,
  HighlightWire,
  NoteWire,
  SnapshotWire,
} from "./types.js";

export interface FrameLayout {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface CardLayout {
  x: number;
  y: number;
}

export interface WorkspaceLayout {
  frames: Record<string, FrameLayout>;
  cards: Record<string, CardLayout>;
}

const SCHEMA_VERSION = 1;

function emptyLayout(): WorkspaceLayout {
  return { frames: {}, cards: {} };
}

export class WorkspaceState {
  readonly documents = new Map<string, DocumentWire>();
  readonly clusters = new Map<string, { label: string; members: string[] }>();
  readonly highlights = new Map<string, HighlightWire>();
  readonly notes = new Map<string, NoteWire>();
  layout: WorkspaceLayout = emptyLayout();
  private counter = 0;

  static fromSnapshot(snapshot: SnapshotWire, layout?: WorkspaceLayout): WorkspaceState {
    const state = new WorkspaceState();
    for (const doc of snapshot.documents) state.documents.set(doc.doc_id, doc);
    for (const cluster of snapshot.clusters) {
      state.clusters.set(cluster.cluster_id, {
        label: cluster.label,
        members: [...cluster.member_doc_ids],
      });
    }
    for (const h of snapshot.highlights) state.highlights.set(h.highlight_id, h);
    for (const n of snapshot.notes) state.notes.set(n.note_id, n);
    if (layout) state.layout = layout;
    state.counter = maxIdCounter(snapshot);
    return state;
  }

  /** Server-valid snapshot; layout geometry is stripped. */
  toSnapshot(snapshotId: string, sequenceIndex: number): SnapshotWire {
    const clusters: ClusterWire[] = [...this.clusters.entries()].map(
      ([cluster_id, c]) => ({
        cluster_id,
        label: c.label,
        member_doc_ids: [...c.members],
      }),
    );
    return {
      schema_version: SCHEMA_VERSION,
      kind: "workspace_snapshot",
      snapshot_id: snapshotId,
      sequence_index: sequenceIndex,
      clusters,
      documents: [...this.documents.values()],
      highlights: [...this.highlights.values()],
      notes: [...this.notes.values()],
    };
  }

  private nextId(prefix: string): string {
    this.counter += 1;
    return `${prefix}-ui${this.counter}`;
  }

  // -- documents ------------------------------------------------------------

  addDocument(doc: DocumentWire): void {
    this.documents.set(doc.doc_id, doc);
  }

  clusterOf(docId: string): string | null {
    for (const [id, cluster] of this.clusters) {
      if (cluster.members.includes(docId)) return id;
    }
    return null;
  }

  /** Doc ids in the workspace that sit outside every cluster frame. */
  shelfDocIds(): string[] {
    return [...this.documents.keys()].filter((d) => this.clusterOf(d) === null);
  }

  // -- clusters ----------------------------------------------------------------

  createCluster(label: string, frame?: FrameLayout): string {
    const id = this.nextId("c");
    this.clusters.set(id, { label, members: [] });
    if (frame) this.layout.frames[id] = frame;
    return id;
  }

  renameCluster(clusterId: string, label: string): void {
    const cluster = this.mustCluster(clusterId);
    cluster.label = label;
  }

  /** Members return to the shelf; notes attached to the frame are dropped. */
  deleteCluster(clusterId: string): void {
    this.mustCluster(clusterId);
    this.clusters.delete(clusterId);
    delete this.layout.frames[clusterId];
    for (const [noteId, note] of [...this.notes]) {
      if (note.attachment.kind === "cluster" && note.attachment.id === clusterId) {
        this.notes.delete(noteId);
      }
    }
  }

  /** Move a document into a cluster, or to the shelf with null. */
  moveDocument(docId: string, toClusterId: string | null): void {
    if (!this.documents.has(docId)) throw new Error(`unknown document ${docId}`);
    if (toClusterId !== null) this.mustCluster(toClusterId);
    const from = this.clusterOf(docId);
    if (from === toClusterId) return;
    if (from !== null) {
      const cluster = this.mustCluster(from);
      cluster.members = cluster.members.filter((d) => d !== docId);
    }
    if (toClusterId !== null) {
      this.mustCluster(toClusterId).members.push(docId);
    }
  }

  private mustCluster(clusterId: string): { label: string; members: string[] } {
    const cluster = this.clusters.get(clusterId);
    if (!cluster) throw new Error(`unknown cluster ${clusterId}`);
    return cluster;
  }

  // -- highlights -----------------------------------------------------------

  /** Repeat selection of the same span bumps the weight instead of duplicating. */
  addHighlight(docId: string, start: number, end: number): HighlightWire {
    const doc = this.documents.get(docId);
    if (!doc) throw new Error(`unknown document ${docId}`);
    if (!(start >= 0 && start < end && end <= doc.body.length)) {
      throw new Error(`span ${start}..${end} outside body of length ${doc.body.length}`);
    }
    for (const existing of this.highlights.values()) {
      if (existing.doc_id === docId && existing.span.start === start
          && existing.span.end === end) {
        existing.weight += 1;
        return existing;
      }
    }
    const highlight: HighlightWire = {
      highlight_id: this.nextId("h"),
      doc_id: docId,
      span: { start, end },
      text: doc.body.slice(start, end),
      weight: 1,
    };
    this.highlights.set(highlight.highlight_id, highlight);
    return highlight;
  }

  removeHighlight(highlightId: string): void {
    this.highlights.delete(highlightId);
  }

  highlightsFor(docId: string): HighlightWire[] {
    return [...this.highlights.values()]
      .filter((h) => h.doc_id === docId)
      .sort((a, b) => a.span.start - b.span.start);
  }

  // -- notes -------------------------------------------------------------------

  addNote(kind: AttachmentKind, refId: string, text: string): NoteWire {
    const pool = kind === "cluster" ? this.clusters : this.documents;
    if (!pool.has(refId)) throw new Error(`unknown ${kind} ${refId}`);
    if (!text.trim()) throw new Error("note text must not be empty");
    const note: NoteWire = {
      note_id: this.nextId("n"),
      attachment: { kind, id: refId },
      text,
    };
    this.notes.set(note.note_id, note);
    return note;
  }

  editNote(noteId: string, text: string): void {
    const note = this.notes.get(noteId);
    if (!note) throw new Error(`unknown note ${noteId}`);
    if (!text.trim()) throw new Error("note text must not be empty");
    note.text = text;
  }

  removeNote(noteId: string): void {
    this.notes.delete(noteId);
  }

  notesFor(kind: AttachmentKind, refId: string): NoteWire[] {
    return [...this.notes.values()].filter(
      (n) => n.attachment.kind === kind && n.attachment.id === refId,
    );
  }
}

/** Highest trailing "-ui<N>" counter in the snapshot's object ids, so fresh
 * ids never collide after a reload. */
function maxIdCounter(snapshot: SnapshotWire): number {
  const ids = [
    ...snapshot.clusters.map((c) => c.cluster_id),
    ...snapshot.highlights.map((h) => h.highlight_id),
    ...snapshot.notes.map((n) => n.note_id),
  ];
  let max = 0;
  for (const id of ids) {
    const match = /-ui(\d+)$/.exec(id);
    if (match) max = Math.max(max, Number(match[1]));
  }
  return max;
}

// -- layout persistence --------------------------------------------------------

const LAYOUT_PREFIX = "senseloop-layout:";

export function saveLayout(storage: Pick<Storage, "setItem">,
                           sessionId: string, layout: WorkspaceLayout): void {
  storage.setItem(LAYOUT_PREFIX + sessionId, JSON.stringify(layout));
}

export function loadLayout(storage: Pick<Storage, "getItem">,
                           sessionId: string): WorkspaceLayout | undefined {
  const raw = storage.getItem(LAYOUT_PREFIX + sessionId);
  if (!raw) return undefined;
  try {
    return JSON.parse(raw) as WorkspaceLayout;
  } catch {
    return undefined;
  }
}
