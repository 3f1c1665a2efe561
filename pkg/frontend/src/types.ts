// Wire types mirroring the service's JSON schemas. Field names match the
// server exactly; every request/response body round-trips through these.

export interface DocumentWire {
  doc_id: string;
  title: string;
  body: string;
}

export interface SpanWire {
  start: number;
  end: number;
}

export interface HighlightWire {
  highlight_id: string;
  doc_id: string;
  span: SpanWire;
  text: string;
  weight: number;
}

export type AttachmentKind = "cluster" | "document";

export interface NoteWire {
  note_id: string;
  attachment: { kind: AttachmentKind; id: string };
  text: string;
}

export interface ClusterWire {
  cluster_id: string;
  label: string;
  member_doc_ids: string[];
}

export interface SnapshotWire {
  schema_version: number;
  kind: "workspace_snapshot";
  snapshot_id: string;
  sequence_index: number;
  clusters: ClusterWire[];
  documents: DocumentWire[];
  highlights: HighlightWire[];
  notes: NoteWire[];
}

export interface ParagraphWire {
  section_key: string;
  sentences: string[];
}

export interface ReportWire {
  schema_version: number;
  kind: "structured_report";
  report_id: string;
  summary: ParagraphWire;
  cluster_paragraphs: { cluster_id: string; paragraph: ParagraphWire }[];
  conclusion: ParagraphWire;
}

export type EditKind = "added" | "removed" | "modified";

export interface SentenceEditWire {
  section_key: string;
  kind: EditKind;
  text: string;
  old_text?: string;
}

export interface ReportDiffWire {
  edited_sections: string[];
  edited_sentences: SentenceEditWire[];
}

export interface InteractionWire {
  kind: string;
  subject_id: string;
  affected_cluster_ids: string[];
  detail: Record<string, unknown>;
}

export interface InteractionSetWire {
  schema_version: number;
  kind: "interaction_set";
  from_sequence_index: number;
  to_sequence_index: number;
  interactions: InteractionWire[];
}

export interface PlannedEditWire {
  target_section: string;
  action: string;
  instruction: string;
  evidence_refs: string[];
}

export interface AnalysisWire {
  intent_inference: string;
  refinement_plan: PlannedEditWire[];
  raw_model_output: string;
}

export interface RefineResponseWire {
  committed: boolean;
  sequence_index: number;
  method: string;
  report: ReportWire;
  analysis: AnalysisWire | null;
  report_diff: ReportDiffWire;
  interaction_set: InteractionSetWire;
}

export interface TimelineEntryWire {
  iteration: number;
  timestamp: string;
  interaction_digest: string;
  plan_digest: string;
  report_id: string;
  intent?: string;
}

export interface TimelineWire {
  session_id: string;
  entries: TimelineEntryWire[];
}

export function reportParagraphs(report: ReportWire): ParagraphWire[] {
  return [
    report.summary,
    ...report.cluster_paragraphs.map((cp) => cp.paragraph),
    report.conclusion,
  ];
}
