"""Paragraph- and sentence-level diff between two structured reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Optional

from ..textops import normalize_ws, tokens
from ..types import StructuredReport

# Token-overlap threshold above which a removed/added sentence pair is
# reported as one modification instead of two separate edits.
MODIFIED_SIMILARITY_THRESHOLD = 0.6

KIND_ADDED = "added"
KIND_REMOVED = "removed"
KIND_MODIFIED = "modified"


@dataclass(frozen=True)
class SentenceEdit:
    section_key: str
    kind: str
    text: str  # new text for added/modified, old text for removed
    old_text: Optional[str] = None


@dataclass(frozen=True)
class ReportDiff:
    edited_sections: frozenset[str]
    edited_sentences: tuple[SentenceEdit, ...]

    def is_empty(self) -> bool:
        return not self.edited_sections and not self.edited_sentences


def token_overlap(a: str, b: str) -> float:
    """Normalized token overlap in [0, 1]."""
    ta, tb = set(tokens(a)), set(tokens(b))
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / max(len(ta), len(tb))


def _multiset_leftovers(prev_sentences, new_sentences):
    """Sentences without an exact (whitespace-normalized) counterpart."""
    prev_norm = [normalize_ws(s) for s in prev_sentences]
    new_norm = [normalize_ws(s) for s in new_sentences]
    avail = Counter(new_norm)
    removed = []
    for norm, orig in zip(prev_norm, prev_sentences):
        if avail[norm] > 0:
            avail[norm] -= 1
        else:
            removed.append(orig)
    avail = Counter(prev_norm)
    added = []
    for norm, orig in zip(new_norm, new_sentences):
        if avail[norm] > 0:
            avail[norm] -= 1
        else:
            added.append(orig)
    return removed, added


def _section_edits(section_key: str, prev_sentences, new_sentences) -> list[SentenceEdit]:
    removed, added = _multiset_leftovers(prev_sentences, new_sentences)
    if not removed and not added:
        return []
    # Pair removed/added sentences by best similarity; ties break on position.
    candidates = []
    for i, old in enumerate(removed):
        for j, new in enumerate(added):
            score = token_overlap(old, new)
            if score >= MODIFIED_SIMILARITY_THRESHOLD:
                candidates.append((-score, i, j))
    candidates.sort()
    used_removed: set[int] = set()
    used_added: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, i, j in candidates:
        if i in used_removed or j in used_added:
            continue
        used_removed.add(i)
        used_added.add(j)
        pairs.append((i, j))

    edits: list[SentenceEdit] = []
    for i, j in sorted(pairs, key=lambda p: p[1]):
        edits.append(SentenceEdit(section_key, KIND_MODIFIED,
                                  text=added[j], old_text=removed[i]))
    for j, new in enumerate(added):
        if j not in used_added:
            edits.append(SentenceEdit(section_key, KIND_ADDED, text=new))
    for i, old in enumerate(removed):
        if i not in used_removed:
            edits.append(SentenceEdit(section_key, KIND_REMOVED, text=old))
    return edits


def diff_reports(prev: StructuredReport, new: StructuredReport) -> ReportDiff:
    """Align sections by key and report per-sentence edits within each."""
    order: list[str] = list(prev.section_keys())
    for key in new.section_keys():
        if key not in order:
            order.append(key)

    edited_sections: set[str] = set()
    edits: list[SentenceEdit] = []
    for key in order:
        p = prev.paragraph(key)
        n = new.paragraph(key)
        prev_sentences = p.sentences if p else ()
        new_sentences = n.sentences if n else ()
        section_edits = _section_edits(key, prev_sentences, new_sentences)
        if section_edits or (p is None) != (n is None):
            edited_sections.add(key)
        edits.extend(section_edits)
    return ReportDiff(edited_sections=frozenset(edited_sections),
                      edited_sentences=tuple(edits))


def report_diff_to_dict(diff: ReportDiff) -> dict[str, Any]:
    return {
        "edited_sections": sorted(diff.edited_sections),
        "edited_sentences": [
            {"section_key": e.section_key, "kind": e.kind, "text": e.text,
             **({"old_text": e.old_text} if e.old_text is not None else {})}
            for e in diff.edited_sentences
        ],
    }
