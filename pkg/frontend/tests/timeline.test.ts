import { describe, expect, it } from "vitest";

import { condenseEntry, reverseChronological } from "../src/timeline.js";
import type { TimelineEntryWire } from "../src/types.js";

function entry(iteration: number, intent?: string,
               digest = "- HighlightAdded h1 clusters=[c1]\n- NoteAdded n1 clusters=[]"):
    TimelineEntryWire {
  return {
    iteration,
    timestamp: "2026-08-10T00:00:00+00:00",
    interaction_digest: digest,
    plan_digest: "",
    report_id: `r${iteration}`,
    ...(intent ? { intent } : {}),
  };
}

describe("condenseEntry", () => {
  it("takes the first intent sentence plus the interaction count", () => {
    const text = condenseEntry(entry(
      1, "The analyst pinned the explosives lead. They also moved a doc."));
    expect(text).toBe("The analyst pinned the explosives lead. (2 interactions)");
  });

  it("falls back to the digest without intent", () => {
    const text = condenseEntry(entry(2, undefined, "- NoteAdded n1 clusters=[]"));
    expect(text).toContain("NoteAdded");
    expect(text).toContain("(1 interaction)");
  });

  it("caps the condensed length", () => {
    const text = condenseEntry(entry(3, "word ".repeat(100) + "."));
    expect(text.length).toBeLessThanOrEqual(200);
    expect(text.endsWith("…")).toBe(true);
  });
});

describe("reverseChronological", () => {
  it("orders newest first without mutating the input", () => {
    const entries = [entry(1), entry(3), entry(2)];
    const sorted = reverseChronological(entries);
    expect(sorted.map((e) => e.iteration)).toEqual([3, 2, 1]);
    expect(entries.map((e) => e.iteration)).toEqual([1, 3, 2]);
  });
});
