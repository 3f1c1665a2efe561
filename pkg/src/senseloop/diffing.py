"""Semantic interaction extraction by comparing adjacent workspace snapshots.

The diff is object-identity based: clusters, highlights, and notes are keyed
by their ids, and every id whose state differs between the two snapshots
yields exactly one interaction. All membership changes of one cluster
collapse into a single reorganization for that cluster, so moving a document
between two clusters produces two interactions (both clusters differ).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Optional

from .errors import DiffError
from .textops import normalize_ws
from .types import Document, WorkspaceSnapshot
from .validation import require_valid


class InteractionKind(str, Enum):
    CLUSTER_CREATED = "ClusterCreated"
    CLUSTER_DELETED = "ClusterDeleted"
    CLUSTER_REORGANIZED = "ClusterReorganized"
    HIGHLIGHT_ADDED = "HighlightAdded"
    HIGHLIGHT_REMOVED = "HighlightRemoved"
    HIGHLIGHT_EDITED = "HighlightEdited"
    NOTE_ADDED = "NoteAdded"
    NOTE_REMOVED = "NoteRemoved"
    NOTE_EDITED = "NoteEdited"


_KIND_ORDER = {kind: i for i, kind in enumerate(InteractionKind)}

_OBJECT_TYPE = {
    InteractionKind.CLUSTER_CREATED: "cluster",
    InteractionKind.CLUSTER_DELETED: "cluster",
    InteractionKind.CLUSTER_REORGANIZED: "cluster",
    InteractionKind.HIGHLIGHT_ADDED: "highlight",
    InteractionKind.HIGHLIGHT_REMOVED: "highlight",
    InteractionKind.HIGHLIGHT_EDITED: "highlight",
    InteractionKind.NOTE_ADDED: "note",
    InteractionKind.NOTE_REMOVED: "note",
    InteractionKind.NOTE_EDITED: "note",
}

# Added <-> Removed, Created <-> Deleted; edits invert to themselves.
INVERSE_KIND = {
    InteractionKind.CLUSTER_CREATED: InteractionKind.CLUSTER_DELETED,
    InteractionKind.CLUSTER_DELETED: InteractionKind.CLUSTER_CREATED,
    InteractionKind.CLUSTER_REORGANIZED: InteractionKind.CLUSTER_REORGANIZED,
    InteractionKind.HIGHLIGHT_ADDED: InteractionKind.HIGHLIGHT_REMOVED,
    InteractionKind.HIGHLIGHT_REMOVED: InteractionKind.HIGHLIGHT_ADDED,
    InteractionKind.HIGHLIGHT_EDITED: InteractionKind.HIGHLIGHT_EDITED,
    InteractionKind.NOTE_ADDED: InteractionKind.NOTE_REMOVED,
    InteractionKind.NOTE_REMOVED: InteractionKind.NOTE_ADDED,
    InteractionKind.NOTE_EDITED: InteractionKind.NOTE_EDITED,
}


@dataclass(frozen=True)
class SemanticInteraction:
    kind: InteractionKind
    subject_id: str
    detail: Mapping[str, Any]
    affected_cluster_ids: frozenset[str]

    def object_type(self) -> str:
        return _OBJECT_TYPE[self.kind]


@dataclass(frozen=True)
class InteractionSet:
    from_sequence_index: int
    to_sequence_index: int
    interactions: tuple[SemanticInteraction, ...] = ()

    def __len__(self) -> int:
        return len(self.interactions)

    def __bool__(self) -> bool:
        return bool(self.interactions)


def _doc_title(doc_id: str, *snapshots: WorkspaceSnapshot) -> str:
    for snap in snapshots:
        doc = snap.document_map().get(doc_id)
        if doc is not None:
            return doc.title
    return ""


def _member_entries(doc_ids, *snapshots) -> list[dict[str, str]]:
    return [{"doc_id": d, "title": _doc_title(d, *snapshots)} for d in doc_ids]


def _check_same_corpus(prev: WorkspaceSnapshot, cur: WorkspaceSnapshot,
                       corpus: Optional[Mapping[str, Document]]) -> None:
    if corpus is not None:
        for snap in (prev, cur):
            for doc in snap.documents:
                known = corpus.get(doc.doc_id)
                if known is None:
                    raise DiffError(f"document {doc.doc_id!r} is not in the declared corpus")
                if known.title != doc.title or known.body != doc.body:
                    raise DiffError(f"document {doc.doc_id!r} differs from the corpus copy")
    prev_docs = prev.document_map()
    for doc in cur.documents:
        old = prev_docs.get(doc.doc_id)
        if old is not None and (old.title != doc.title or old.body != doc.body):
            raise DiffError(f"document {doc.doc_id!r} changed content between snapshots; "
                            "snapshots must come from one corpus")


def _cluster_of_attachment(snap: WorkspaceSnapshot, attachment) -> frozenset[str]:
    if attachment.kind == "cluster":
        return frozenset({attachment.ref_id})
    owner = snap.cluster_of(attachment.ref_id)
    return frozenset({owner}) if owner else frozenset()


def diff_workspaces(prev: WorkspaceSnapshot, cur: WorkspaceSnapshot,
                    *, corpus: Optional[Mapping[str, Document]] = None,
                    validate: bool = True) -> InteractionSet:
    """Compute the semantic interactions transforming prev into cur."""
    if validate:
        require_valid(prev)
        require_valid(cur)
    _check_same_corpus(prev, cur, corpus)

    interactions: list[SemanticInteraction] = []

    prev_clusters = prev.cluster_map()
    cur_clusters = cur.cluster_map()
    for cid in set(prev_clusters) | set(cur_clusters):
        before = prev_clusters.get(cid)
        after = cur_clusters.get(cid)
        if before is None:
            interactions.append(SemanticInteraction(
                kind=InteractionKind.CLUSTER_CREATED, subject_id=cid,
                detail={"label": after.label,
                        "members": _member_entries(after.member_doc_ids, cur)},
                affected_cluster_ids=frozenset({cid})))
        elif after is None:
            interactions.append(SemanticInteraction(
                kind=InteractionKind.CLUSTER_DELETED, subject_id=cid,
                detail={"label": before.label,
                        "members": _member_entries(before.member_doc_ids, prev)},
                affected_cluster_ids=frozenset({cid})))
        elif before != after:
            added = [d for d in after.member_doc_ids if d not in before.member_doc_ids]
            removed = [d for d in before.member_doc_ids if d not in after.member_doc_ids]
            reordered = (not added and not removed
                         and before.member_doc_ids != after.member_doc_ids)
            detail: dict[str, Any] = {
                "label": after.label,
                "members_added": _member_entries(added, cur, prev),
                "members_removed": _member_entries(removed, prev, cur),
                "reordered": reordered,
            }
            if before.label != after.label:
                detail["label_before"] = before.label
            interactions.append(SemanticInteraction(
                kind=InteractionKind.CLUSTER_REORGANIZED, subject_id=cid,
                detail=detail, affected_cluster_ids=frozenset({cid})))

    prev_highlights = prev.highlight_map()
    cur_highlights = cur.highlight_map()
    for hid in set(prev_highlights) | set(cur_highlights):
        before = prev_highlights.get(hid)
        after = cur_highlights.get(hid)
        if before == after:
            continue
        if before is None:
            kind = InteractionKind.HIGHLIGHT_ADDED
            detail = {"doc_id": after.doc_id, "text": after.text,
                      "weight": after.weight, "span": list(after.span)}
            affected = cur.cluster_of(after.doc_id)
            affected_ids = frozenset({affected}) if affected else frozenset()
        elif after is None:
            kind = InteractionKind.HIGHLIGHT_REMOVED
            detail = {"doc_id": before.doc_id, "text": before.text,
                      "weight": before.weight, "span": list(before.span)}
            affected = prev.cluster_of(before.doc_id)
            affected_ids = frozenset({affected}) if affected else frozenset()
        else:
            kind = InteractionKind.HIGHLIGHT_EDITED
            detail = {"doc_id": after.doc_id,
                      "text": after.text, "text_before": before.text,
                      "weight": after.weight, "weight_before": before.weight,
                      "span": list(after.span)}
            affected_ids = frozenset(
                c for c in (prev.cluster_of(before.doc_id), cur.cluster_of(after.doc_id))
                if c)
        interactions.append(SemanticInteraction(
            kind=kind, subject_id=hid, detail=detail,
            affected_cluster_ids=affected_ids))

    prev_notes = prev.note_map()
    cur_notes = cur.note_map()
    for nid in set(prev_notes) | set(cur_notes):
        before = prev_notes.get(nid)
        after = cur_notes.get(nid)
        if before == after:
            continue
        if before is None:
            kind = InteractionKind.NOTE_ADDED
            detail = {"attachment": {"kind": after.attachment.kind,
                                     "id": after.attachment.ref_id},
                      "text": after.text}
            affected_ids = _cluster_of_attachment(cur, after.attachment)
        elif after is None:
            kind = InteractionKind.NOTE_REMOVED
            detail = {"attachment": {"kind": before.attachment.kind,
                                     "id": before.attachment.ref_id},
                      "text": before.text}
            affected_ids = _cluster_of_attachment(prev, before.attachment)
        else:
            kind = InteractionKind.NOTE_EDITED
            detail = {"attachment": {"kind": after.attachment.kind,
                                     "id": after.attachment.ref_id},
                      "text": after.text, "text_before": before.text}
            affected_ids = (_cluster_of_attachment(prev, before.attachment)
                            | _cluster_of_attachment(cur, after.attachment))
        interactions.append(SemanticInteraction(
            kind=kind, subject_id=nid, detail=detail,
            affected_cluster_ids=affected_ids))

    interactions.sort(key=lambda si: (_KIND_ORDER[si.kind], si.subject_id))
    return InteractionSet(from_sequence_index=prev.sequence_index,
                          to_sequence_index=cur.sequence_index,
                          interactions=tuple(interactions))


def count_differing_objects(si: InteractionSet) -> int:
    """Number of distinct objects (clusters, highlights, notes) whose state differs."""
    return len({(i.object_type(), i.subject_id) for i in si.interactions})


def _quoted(text: str) -> str:
    return '"' + normalize_ws(text).replace('"', "'") + '"'


def _members_digest(members) -> str:
    return "; ".join(f"{m['doc_id']} {_quoted(m['title'])}" for m in members)


def interaction_summary(si: InteractionSet) -> str:
    """One deterministic line per interaction, for prompts and the timeline."""
    lines = []
    for i in si.interactions:
        clusters = ",".join(sorted(i.affected_cluster_ids))
        prefix = f"- {i.kind.value} {i.subject_id} clusters=[{clusters}]"
        d = i.detail
        if i.kind in (InteractionKind.CLUSTER_CREATED, InteractionKind.CLUSTER_DELETED):
            line = f"{prefix} label={_quoted(d['label'])} members=[{_members_digest(d['members'])}]"
        elif i.kind is InteractionKind.CLUSTER_REORGANIZED:
            label = _quoted(d["label"])
            if "label_before" in d:
                label = f"{_quoted(d['label_before'])}->{label}"
            line = (f"{prefix} label={label}"
                    f" added=[{_members_digest(d['members_added'])}]"
                    f" removed=[{_members_digest(d['members_removed'])}]")
            if d.get("reordered"):
                line += " reordered"
        elif i.object_type() == "highlight":
            text = _quoted(d["text"])
            if "text_before" in d and d["text_before"] != d["text"]:
                text = f"{_quoted(d['text_before'])}->{text}"
            weight = str(d["weight"])
            if "weight_before" in d and d["weight_before"] != d["weight"]:
                weight = f"{d['weight_before']}->{weight}"
            line = f"{prefix} doc={d['doc_id']} text={text} weight={weight}"
        else:
            att = d["attachment"]
            text = _quoted(d["text"])
            if "text_before" in d and d["text_before"] != d["text"]:
                text = f"{_quoted(d['text_before'])}->{text}"
            line = f"{prefix} attached={att['kind']}:{att['id']} text={text}"
        lines.append(line)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Wire format


def interaction_set_to_dict(si: InteractionSet) -> dict[str, Any]:
    from .storage import SCHEMA_VERSION

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "interaction_set",
        "from_sequence_index": si.from_sequence_index,
        "to_sequence_index": si.to_sequence_index,
        "interactions": [
            {"kind": i.kind.value, "subject_id": i.subject_id,
             "affected_cluster_ids": sorted(i.affected_cluster_ids),
             "detail": dict(i.detail)}
            for i in si.interactions
        ],
    }


def interaction_set_from_dict(data: Mapping[str, Any]) -> InteractionSet:
    from .errors import SchemaError
    from .storage import SCHEMA_VERSION

    if data.get("schema_version") != SCHEMA_VERSION or data.get("kind") != "interaction_set":
        raise SchemaError("not an interaction_set document")
    try:
        interactions = tuple(
            SemanticInteraction(
                kind=InteractionKind(i["kind"]),
                subject_id=i["subject_id"],
                detail=i["detail"],
                affected_cluster_ids=frozenset(i["affected_cluster_ids"]))
            for i in data["interactions"])
        return InteractionSet(
            from_sequence_index=int(data["from_sequence_index"]),
            to_sequence_index=int(data["to_sequence_index"]),
            interactions=interactions)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed interaction_set document: {exc}") from exc
