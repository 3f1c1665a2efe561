// Change badges for the rendered report. This module only reorganizes the
// server's report_diff per section; the client never re-diffs text, so the
// badges cannot disagree with what the pipeline computed.

import type {
  ParagraphWire,
  ReportDiffWire,
  ReportWire,
  SentenceEditWire,
} from "./types.js";
import { reportParagraphs } from "./types.js";

export interface SectionBadge {
  sectionKey: string;
  edited: boolean;
  added: SentenceEditWire[];
  modified: SentenceEditWire[];
  removed: SentenceEditWire[];
}

export type SentenceMark = "added" | "modified" | null;

export function computeBadges(
  report: ReportWire,
  diff: ReportDiffWire,
): Map<string, SectionBadge> {
  const badges = new Map<string, SectionBadge>();
  const ensure = (sectionKey: string): SectionBadge => {
    let badge = badges.get(sectionKey);
    if (!badge) {
      badge = { sectionKey, edited: false, added: [], modified: [], removed: [] };
      badges.set(sectionKey, badge);
    }
    return badge;
  };

  for (const paragraph of reportParagraphs(report)) ensure(paragraph.section_key);
  for (const sectionKey of diff.edited_sections) ensure(sectionKey).edited = true;
  for (const edit of diff.edited_sentences) {
    const badge = ensure(edit.section_key);
    if (edit.kind === "added") badge.added.push(edit);
    else if (edit.kind === "modified") badge.modified.push(edit);
    else badge.removed.push(edit);
  }
  return badges;
}

/** Per-sentence marks for a paragraph, matched on exact sentence text. */
export function sentenceMarks(
  paragraph: ParagraphWire,
  badge: SectionBadge | undefined,
): SentenceMark[] {
  if (!badge) return paragraph.sentences.map(() => null);
  const added = new Set(badge.added.map((e) => e.text));
  const modified = new Set(badge.modified.map((e) => e.text));
  return paragraph.sentences.map((sentence) => {
    if (added.has(sentence)) return "added";
    if (modified.has(sentence)) return "modified";
    return null;
  });
}
