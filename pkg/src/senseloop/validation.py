"""Snapshot invariant checking.

Violations are data, not exceptions: validate_snapshot returns the full list
so a service endpoint can hand it back to the client. Checks are ordered so a
single injected fault yields exactly one violation (e.g. the text-match check
is skipped when the span is already out of bounds).
"""

from __future__ import annotations

from dataclasses import dataclass

from .types import NoteAttachment, WorkspaceSnapshot

RULE_NEGATIVE_SEQUENCE = "negative-sequence-index"
RULE_EMPTY_DOC_ID = "empty-doc-id"
RULE_DUPLICATE_DOC_ID = "duplicate-doc-id"
RULE_EMPTY_DOC_BODY = "empty-doc-body"
RULE_DUPLICATE_HIGHLIGHT_ID = "duplicate-highlight-id"
RULE_UNKNOWN_HIGHLIGHT_DOC = "unknown-highlight-doc"
RULE_SPAN_OUT_OF_BOUNDS = "span-out-of-bounds"
RULE_HIGHLIGHT_TEXT_MISMATCH = "highlight-text-mismatch"
RULE_NONPOSITIVE_WEIGHT = "nonpositive-highlight-weight"
RULE_DUPLICATE_NOTE_ID = "duplicate-note-id"
RULE_EMPTY_NOTE_TEXT = "empty-note-text"
RULE_BAD_ATTACHMENT_KIND = "invalid-note-attachment-kind"
RULE_DANGLING_ATTACHMENT = "dangling-note-attachment"
RULE_DUPLICATE_CLUSTER_ID = "duplicate-cluster-id"
RULE_DUPLICATE_MEMBER = "duplicate-cluster-member"
RULE_UNKNOWN_MEMBER = "unknown-cluster-member"
RULE_MULTI_MEMBERSHIP = "multi-cluster-membership"


@dataclass(frozen=True)
class Violation:
    object_id: str
    rule: str
    message: str


def validate_snapshot(snapshot: WorkspaceSnapshot) -> list[Violation]:
    """Check every type invariant; empty list means the snapshot is valid."""
    violations: list[Violation] = []

    if snapshot.sequence_index < 0:
        violations.append(Violation(snapshot.snapshot_id, RULE_NEGATIVE_SEQUENCE,
                                    f"sequence_index {snapshot.sequence_index} < 0"))

    docs: dict[str, object] = {}
    for doc in snapshot.documents:
        if not doc.doc_id:
            violations.append(Violation(doc.doc_id, RULE_EMPTY_DOC_ID,
                                        "document with empty doc_id"))
            continue
        if doc.doc_id in docs:
            violations.append(Violation(doc.doc_id, RULE_DUPLICATE_DOC_ID,
                                        f"doc_id {doc.doc_id!r} appears more than once"))
            continue
        docs[doc.doc_id] = doc
        if not doc.body:
            violations.append(Violation(doc.doc_id, RULE_EMPTY_DOC_BODY,
                                        f"document {doc.doc_id!r} has an empty body"))

    doc_map = snapshot.document_map()

    seen_highlights: set[str] = set()
    for h in snapshot.highlights:
        if h.highlight_id in seen_highlights:
            violations.append(Violation(h.highlight_id, RULE_DUPLICATE_HIGHLIGHT_ID,
                                        f"highlight_id {h.highlight_id!r} appears more than once"))
            continue
        seen_highlights.add(h.highlight_id)
        if h.weight < 1:
            violations.append(Violation(h.highlight_id, RULE_NONPOSITIVE_WEIGHT,
                                        f"highlight {h.highlight_id!r} has weight {h.weight}"))
        doc = doc_map.get(h.doc_id)
        if doc is None:
            violations.append(Violation(h.highlight_id, RULE_UNKNOWN_HIGHLIGHT_DOC,
                                        f"highlight {h.highlight_id!r} references unknown document {h.doc_id!r}"))
            continue
        start, end = h.span
        if not (0 <= start < end <= len(doc.body)):
            violations.append(Violation(h.highlight_id, RULE_SPAN_OUT_OF_BOUNDS,
                                        f"highlight {h.highlight_id!r} span {h.span} outside body of length {len(doc.body)}"))
            continue
        if doc.body[start:end] != h.text:
            violations.append(Violation(h.highlight_id, RULE_HIGHLIGHT_TEXT_MISMATCH,
                                        f"highlight {h.highlight_id!r} text does not equal body[{start}:{end}]"))

    cluster_ids: set[str] = set()
    membership: dict[str, list[str]] = {}
    for cluster in snapshot.clusters:
        if cluster.cluster_id in cluster_ids:
            violations.append(Violation(cluster.cluster_id, RULE_DUPLICATE_CLUSTER_ID,
                                        f"cluster_id {cluster.cluster_id!r} appears more than once"))
            continue
        cluster_ids.add(cluster.cluster_id)
        seen_members: set[str] = set()
        for doc_id in cluster.member_doc_ids:
            if doc_id in seen_members:
                violations.append(Violation(cluster.cluster_id, RULE_DUPLICATE_MEMBER,
                                            f"cluster {cluster.cluster_id!r} lists member {doc_id!r} twice"))
                continue
            seen_members.add(doc_id)
            if doc_id not in doc_map:
                violations.append(Violation(cluster.cluster_id, RULE_UNKNOWN_MEMBER,
                                            f"cluster {cluster.cluster_id!r} references unknown document {doc_id!r}"))
                continue
            membership.setdefault(doc_id, []).append(cluster.cluster_id)
    for doc_id, owners in sorted(membership.items()):
        if len(owners) > 1:
            violations.append(Violation(doc_id, RULE_MULTI_MEMBERSHIP,
                                        f"document {doc_id!r} belongs to clusters {owners}"))

    seen_notes: set[str] = set()
    for note in snapshot.notes:
        if note.note_id in seen_notes:
            violations.append(Violation(note.note_id, RULE_DUPLICATE_NOTE_ID,
                                        f"note_id {note.note_id!r} appears more than once"))
            continue
        seen_notes.add(note.note_id)
        if not note.text.strip():
            violations.append(Violation(note.note_id, RULE_EMPTY_NOTE_TEXT,
                                        f"note {note.note_id!r} has empty text"))
        att = note.attachment
        if att.kind not in (NoteAttachment.CLUSTER, NoteAttachment.DOCUMENT):
            violations.append(Violation(note.note_id, RULE_BAD_ATTACHMENT_KIND,
                                        f"note {note.note_id!r} has attachment kind {att.kind!r}"))
            continue
        pool = cluster_ids if att.kind == NoteAttachment.CLUSTER else doc_map.keys()
        if att.ref_id not in pool:
            violations.append(Violation(note.note_id, RULE_DANGLING_ATTACHMENT,
                                        f"note {note.note_id!r} attached to unknown {att.kind} {att.ref_id!r}"))

    return violations


def require_valid(snapshot: WorkspaceSnapshot) -> None:
    """Raise SnapshotValidationError when the snapshot has any violation."""
    from .errors import SnapshotValidationError

    violations = validate_snapshot(snapshot)
    if violations:
        raise SnapshotValidationError(violations)
