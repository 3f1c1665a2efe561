"""Domain types for workspaces and reports.

All types are immutable values; anything that looks like mutation elsewhere in
the package builds a new object. Sequences are stored as tuples so snapshots
can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

SECTION_SUMMARY = "summary"
SECTION_CONCLUSION = "conclusion"
_CLUSTER_PREFIX = "cluster:"


def cluster_section(cluster_id: str) -> str:
    """Section key of the report paragraph belonging to a cluster."""
    return _CLUSTER_PREFIX + cluster_id


def section_cluster_id(section_key: str) -> Optional[str]:
    """Inverse of cluster_section; None for summary/conclusion."""
    if section_key.startswith(_CLUSTER_PREFIX):
        return section_key[len(_CLUSTER_PREFIX):]
    return None


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    body: str


@dataclass(frozen=True)
class Highlight:
    """A user-marked span of a document body.

    weight counts how many times the user highlighted this exact span;
    re-highlighting increments it.
    """

    highlight_id: str
    doc_id: str
    span: tuple[int, int]
    text: str
    weight: int = 1


@dataclass(frozen=True)
class NoteAttachment:
    kind: str  # "cluster" or "document"
    ref_id: str

    CLUSTER = "cluster"
    DOCUMENT = "document"


@dataclass(frozen=True)
class Note:
    note_id: str
    attachment: NoteAttachment
    text: str


@dataclass(frozen=True)
class Cluster:
    """A frame grouping documents; membership is exclusive per snapshot."""

    cluster_id: str
    label: str
    member_doc_ids: tuple[str, ...]


@dataclass(frozen=True)
class WorkspaceSnapshot:
    """Committed workspace state at one iteration of a session."""

    snapshot_id: str
    sequence_index: int
    clusters: tuple[Cluster, ...] = ()
    documents: tuple[Document, ...] = ()
    highlights: tuple[Highlight, ...] = ()
    notes: tuple[Note, ...] = ()

    def document_map(self) -> dict[str, Document]:
        return {d.doc_id: d for d in self.documents}

    def cluster_map(self) -> dict[str, Cluster]:
        return {c.cluster_id: c for c in self.clusters}

    def highlight_map(self) -> dict[str, Highlight]:
        return {h.highlight_id: h for h in self.highlights}

    def note_map(self) -> dict[str, Note]:
        return {n.note_id: n for n in self.notes}

    def cluster_of(self, doc_id: str) -> Optional[str]:
        """Id of the cluster containing doc_id, or None if unclustered."""
        for cluster in self.clusters:
            if doc_id in cluster.member_doc_ids:
                return cluster.cluster_id
        return None

    def clustered_doc_ids(self) -> set[str]:
        ids: set[str] = set()
        for cluster in self.clusters:
            ids.update(cluster.member_doc_ids)
        return ids


@dataclass(frozen=True)
class Paragraph:
    section_key: str
    sentences: tuple[str, ...]

    def text(self) -> str:
        return " ".join(self.sentences)


@dataclass(frozen=True)
class StructuredReport:
    """A BLUF report: summary first, one paragraph per cluster, conclusion last."""

    report_id: str
    summary: Paragraph
    cluster_paragraphs: tuple[tuple[str, Paragraph], ...]
    conclusion: Paragraph

    def paragraphs(self) -> tuple[Paragraph, ...]:
        middle = tuple(p for _, p in self.cluster_paragraphs)
        return (self.summary,) + middle + (self.conclusion,)

    def section_keys(self) -> tuple[str, ...]:
        return tuple(p.section_key for p in self.paragraphs())

    def paragraph(self, section_key: str) -> Optional[Paragraph]:
        for p in self.paragraphs():
            if p.section_key == section_key:
                return p
        return None

    def cluster_ids(self) -> tuple[str, ...]:
        return tuple(cid for cid, _ in self.cluster_paragraphs)


def make_report(report_id: str,
                paragraphs: Iterable[Paragraph]) -> StructuredReport:
    """Assemble a report from ordered paragraphs (summary .. clusters .. conclusion)."""
    paragraphs = list(paragraphs)
    if len(paragraphs) < 2:
        raise ValueError("a report needs at least summary and conclusion paragraphs")
    head, *middle, tail = paragraphs
    if head.section_key != SECTION_SUMMARY:
        raise ValueError(f"first paragraph must be '{SECTION_SUMMARY}', got {head.section_key!r}")
    if tail.section_key != SECTION_CONCLUSION:
        raise ValueError(f"last paragraph must be '{SECTION_CONCLUSION}', got {tail.section_key!r}")
    cluster_paragraphs = []
    seen = {SECTION_SUMMARY, SECTION_CONCLUSION}
    for p in middle:
        cid = section_cluster_id(p.section_key)
        if cid is None:
            raise ValueError(f"middle paragraph has non-cluster key {p.section_key!r}")
        if p.section_key in seen:
            raise ValueError(f"duplicate section key {p.section_key!r}")
        seen.add(p.section_key)
        cluster_paragraphs.append((cid, p))
    return StructuredReport(report_id=report_id, summary=head,
                            cluster_paragraphs=tuple(cluster_paragraphs),
                            conclusion=tail)
