// Timeline presentation helpers: condensed one-liners, newest first.

import type { TimelineEntryWire } from "./types.js";

const MAX_CONDENSED_LENGTH = 200;

function interactionCount(entry: TimelineEntryWire): number {
  return entry.interaction_digest
    .split("\n")
    .filter((line) => line.trim().length > 0).length;
}

function firstSentence(text: string): string {
  const match = /^.*?[.!?](?=\s|$)/s.exec(text.trim());
  return match ? match[0] : text.trim();
}

export function condenseEntry(entry: TimelineEntryWire): string {
  const count = interactionCount(entry);
  const noun = count === 1 ? "interaction" : "interactions";
  const base = entry.intent
    ? `${firstSentence(entry.intent)} (${count} ${noun})`
    : `${entry.interaction_digest.trim()} (${count} ${noun})`;
  return base.length > MAX_CONDENSED_LENGTH
    ? base.slice(0, MAX_CONDENSED_LENGTH - 1).trimEnd() + "…"
    : base;
}

/** Entries newest-first for the panel. */
export function reverseChronological(
  entries: TimelineEntryWire[],
): TimelineEntryWire[] {
  return [...entries].sort((a, b) => b.iteration - a.iteration);
}
