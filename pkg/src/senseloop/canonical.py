"""Canonical text serialization of workspace snapshots.

This is the single source of truth for "workspace content": the same text is
embedded in model prompts, and two snapshots are content-equal exactly when
their canonical texts are byte-equal. Snapshot-level ids and the sequence
index are deliberately excluded; object ids are included so id-level changes
stay visible. Documents that are neither clustered nor marked are treated as
shelf material and do not appear.
"""

from __future__ import annotations

from dataclasses import dataclass

from .types import Document, NoteAttachment, WorkspaceSnapshot
from .validation import require_valid


@dataclass(frozen=True)
class SerializeConfig:
    """Controls the body excerpt policy; None means full bodies."""

    body_excerpt_chars: int | None = None


DEFAULT_CONFIG = SerializeConfig()


def _excerpt(body: str, limit: int | None) -> str:
    if limit is None or len(body) <= limit:
        return body
    return body[:limit].rstrip() + " [...]"


def _indent_block(text: str, prefix: str) -> str:
    return "\n".join(prefix + line if line else prefix.rstrip() for line in text.splitlines())


def serialize_workspace_text(snapshot: WorkspaceSnapshot,
                             config: SerializeConfig = DEFAULT_CONFIG,
                             *, validate: bool = True) -> str:
    """Deterministic, byte-stable canonical text of a snapshot's content."""
    if validate:
        require_valid(snapshot)

    doc_map = snapshot.document_map()
    highlights_by_doc: dict[str, list] = {}
    for h in snapshot.highlights:
        highlights_by_doc.setdefault(h.doc_id, []).append(h)
    for doc_id in highlights_by_doc:
        highlights_by_doc[doc_id].sort(key=lambda h: (h.span[0], h.span[1], h.highlight_id))

    doc_notes: dict[str, list] = {}
    cluster_notes: dict[str, list] = {}
    for n in snapshot.notes:
        target = doc_notes if n.attachment.kind == NoteAttachment.DOCUMENT else cluster_notes
        target.setdefault(n.attachment.ref_id, []).append(n)
    for pool in (doc_notes, cluster_notes):
        for key in pool:
            pool[key].sort(key=lambda n: n.note_id)

    lines: list[str] = ["WORKSPACE CONTENT", "================="]

    def emit_document(doc: Document, indent: str) -> None:
        lines.append(f"{indent}DOCUMENT {doc.doc_id} :: {doc.title}")
        body = _excerpt(doc.body, config.body_excerpt_chars)
        lines.append(_indent_block(body, indent + "  | "))
        for h in highlights_by_doc.get(doc.doc_id, ()):
            lines.append(f"{indent}  HIGHLIGHT {h.highlight_id} "
                         f"[{h.span[0]}..{h.span[1]}] weight={h.weight}: {h.text}")
        for n in doc_notes.get(doc.doc_id, ()):
            lines.append(f"{indent}  NOTE {n.note_id}: {n.text}")

    for cluster in sorted(snapshot.clusters, key=lambda c: c.cluster_id):
        lines.append("")
        lines.append(f"CLUSTER {cluster.cluster_id} :: {cluster.label}")
        for n in cluster_notes.get(cluster.cluster_id, ()):
            lines.append(f"  NOTE {n.note_id}: {n.text}")
        for doc_id in cluster.member_doc_ids:
            emit_document(doc_map[doc_id], "  ")

    clustered = snapshot.clustered_doc_ids()
    marked = set(highlights_by_doc) | set(doc_notes)
    loose = sorted(marked - clustered)
    if loose:
        lines.append("")
        lines.append("UNCLUSTERED DOCUMENTS")
        for doc_id in loose:
            emit_document(doc_map[doc_id], "  ")

    return "\n".join(lines) + "\n"


def content_equal(a: WorkspaceSnapshot, b: WorkspaceSnapshot) -> bool:
    """Whether two snapshots carry the same workspace content."""
    return (serialize_workspace_text(a, validate=False)
            == serialize_workspace_text(b, validate=False))
