"""JSON persistence for snapshots, reports, interaction sets, and corpora.

One structured-text document per object, UTF-8, with a schema_version field.
Field names mirror the domain types so files stay hand-readable and diffable.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Mapping

from .errors import SchemaError
from .types import (Cluster, Document, Highlight, Note, NoteAttachment,
                    Paragraph, StructuredReport, WorkspaceSnapshot)

SCHEMA_VERSION = 1


def _check_envelope(data: Mapping[str, Any], kind: str) -> None:
    if not isinstance(data, Mapping):
        raise SchemaError(f"expected a JSON object for {kind}")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    if data.get("kind") != kind:
        raise SchemaError(f"expected kind {kind!r}, got {data.get('kind')!r}")


def _require(data: Mapping[str, Any], field: str, context: str) -> Any:
    if field not in data:
        raise SchemaError(f"{context}: missing field {field!r}")
    return data[field]


# ---------------------------------------------------------------------------
# Snapshots


def snapshot_to_dict(snapshot: WorkspaceSnapshot) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "workspace_snapshot",
        "snapshot_id": snapshot.snapshot_id,
        "sequence_index": snapshot.sequence_index,
        "clusters": [
            {"cluster_id": c.cluster_id, "label": c.label,
             "member_doc_ids": list(c.member_doc_ids)}
            for c in snapshot.clusters
        ],
        "documents": [
            {"doc_id": d.doc_id, "title": d.title, "body": d.body}
            for d in snapshot.documents
        ],
        "highlights": [
            {"highlight_id": h.highlight_id, "doc_id": h.doc_id,
             "span": {"start": h.span[0], "end": h.span[1]},
             "text": h.text, "weight": h.weight}
            for h in snapshot.highlights
        ],
        "notes": [
            {"note_id": n.note_id,
             "attachment": {"kind": n.attachment.kind, "id": n.attachment.ref_id},
             "text": n.text}
            for n in snapshot.notes
        ],
    }


def snapshot_from_dict(data: Mapping[str, Any]) -> WorkspaceSnapshot:
    _check_envelope(data, "workspace_snapshot")
    try:
        clusters = tuple(
            Cluster(cluster_id=c["cluster_id"], label=c["label"],
                    member_doc_ids=tuple(c["member_doc_ids"]))
            for c in _require(data, "clusters", "snapshot"))
        documents = tuple(
            Document(doc_id=d["doc_id"], title=d["title"], body=d["body"])
            for d in _require(data, "documents", "snapshot"))
        highlights = tuple(
            Highlight(highlight_id=h["highlight_id"], doc_id=h["doc_id"],
                      span=(int(h["span"]["start"]), int(h["span"]["end"])),
                      text=h["text"], weight=int(h["weight"]))
            for h in _require(data, "highlights", "snapshot"))
        notes = tuple(
            Note(note_id=n["note_id"],
                 attachment=NoteAttachment(kind=n["attachment"]["kind"],
                                           ref_id=n["attachment"]["id"]),
                 text=n["text"])
            for n in _require(data, "notes", "snapshot"))
        return WorkspaceSnapshot(
            snapshot_id=_require(data, "snapshot_id", "snapshot"),
            sequence_index=int(_require(data, "sequence_index", "snapshot")),
            clusters=clusters, documents=documents,
            highlights=highlights, notes=notes)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed snapshot document: {exc}") from exc


# ---------------------------------------------------------------------------
# Reports


def report_to_dict(report: StructuredReport) -> dict[str, Any]:
    def para(p: Paragraph) -> dict[str, Any]:
        return {"section_key": p.section_key, "sentences": list(p.sentences)}

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "structured_report",
        "report_id": report.report_id,
        "summary": para(report.summary),
        "cluster_paragraphs": [
            {"cluster_id": cid, "paragraph": para(p)}
            for cid, p in report.cluster_paragraphs
        ],
        "conclusion": para(report.conclusion),
    }


def report_from_dict(data: Mapping[str, Any]) -> StructuredReport:
    _check_envelope(data, "structured_report")

    def para(d: Mapping[str, Any]) -> Paragraph:
        return Paragraph(section_key=d["section_key"],
                         sentences=tuple(d["sentences"]))

    try:
        return StructuredReport(
            report_id=_require(data, "report_id", "report"),
            summary=para(_require(data, "summary", "report")),
            cluster_paragraphs=tuple(
                (cp["cluster_id"], para(cp["paragraph"]))
                for cp in _require(data, "cluster_paragraphs", "report")),
            conclusion=para(_require(data, "conclusion", "report")))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed report document: {exc}") from exc


# ---------------------------------------------------------------------------
# File helpers


def dump_json(data: Mapping[str, Any]) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=False) + "\n"


def save_json(path: Path, data: Mapping[str, Any]) -> None:
    """Atomic write (temp file + rename): readers never see a torn document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(dump_json(data))
        os.replace(tmp_name, path)
    finally:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)


def load_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc


def save_snapshot(path: Path, snapshot: WorkspaceSnapshot) -> None:
    save_json(path, snapshot_to_dict(snapshot))


def load_snapshot(path: Path) -> WorkspaceSnapshot:
    return snapshot_from_dict(load_json(path))


def save_report(path: Path, report: StructuredReport) -> None:
    save_json(path, report_to_dict(report))


def load_report(path: Path) -> StructuredReport:
    return report_from_dict(load_json(path))


# ---------------------------------------------------------------------------
# Corpus ingestion: a directory of plain-text files, filename stem = doc_id,
# first line = title, rest = body.


def parse_corpus_file(doc_id: str, raw: str) -> Document:
    lines = raw.split("\n")
    title = lines[0].strip()
    body = "\n".join(lines[1:]).strip()
    if not body:
        raise SchemaError(f"corpus file {doc_id!r}: body is empty")
    return Document(doc_id=doc_id, title=title, body=body)


def load_corpus(directory: Path) -> dict[str, Document]:
    directory = Path(directory)
    if not directory.is_dir():
        raise SchemaError(f"corpus directory {directory} does not exist")
    corpus: dict[str, Document] = {}
    for path in sorted(directory.glob("*.txt")):
        doc = parse_corpus_file(path.stem, path.read_text(encoding="utf-8"))
        corpus[doc.doc_id] = doc
    if not corpus:
        raise SchemaError(f"corpus directory {directory} holds no .txt files")
    return corpus
