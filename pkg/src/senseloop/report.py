"""Rendering and parsing of BLUF reports.

A rendered report is plain text: one paragraph per section, separated by
blank lines, summary first and conclusion last. parse_report is the inverse
given the section keys, which the caller always knows (they come from the
previous report plus any sanctioned new cluster sections).
"""

from __future__ import annotations

import re
from typing import Sequence
import uuid

from .errors import ReportStructureError
from .textops import split_sentences
from .types import (Paragraph, SECTION_CONCLUSION, SECTION_SUMMARY,
                    StructuredReport, WorkspaceSnapshot, cluster_section,
                    make_report)

_PARAGRAPH_SPLIT_RE = re.compile(r"\n\s*\n")


def render_report(report: StructuredReport) -> str:
    """Paragraphs joined by blank lines, in report order."""
    return "\n\n".join(p.text() for p in report.paragraphs()) + "\n"


def paragraph_from_text(section_key: str, text: str) -> Paragraph:
    sentences = tuple(split_sentences(text))
    if not sentences:
        raise ReportStructureError(f"section {section_key!r} is empty after normalization")
    return Paragraph(section_key=section_key, sentences=sentences)


def parse_report(text: str, section_keys: Sequence[str],
                 report_id: str | None = None) -> StructuredReport:
    """Parse blank-line separated paragraphs against an expected section map.

    Raises ReportStructureError when the paragraph count does not match.
    """
    blocks = [b.strip() for b in _PARAGRAPH_SPLIT_RE.split(text.strip()) if b.strip()]
    if len(blocks) != len(section_keys):
        raise ReportStructureError(
            f"expected {len(section_keys)} paragraphs for sections {list(section_keys)}, "
            f"got {len(blocks)}")
    if report_id is None:
        report_id = "report-" + uuid.uuid4().hex[:12]
    paragraphs = [paragraph_from_text(key, block)
                  for key, block in zip(section_keys, blocks)]
    return make_report(report_id, paragraphs)


def draft_report(ws: WorkspaceSnapshot, report_id: str) -> StructuredReport:
    """Deterministic plain-prose report matching the workspace's clusters.

    Every sentence is canonical under split_sentences, so refinement diffs
    never see phantom edits in untouched sections.
    """
    clusters = sorted(ws.clusters, key=lambda c: c.cluster_id)
    labels = ", ".join(c.label for c in clusters) or "no clusters yet"
    paragraphs = [paragraph_from_text(
        SECTION_SUMMARY,
        f"This assessment tracks {len(ws.clustered_doc_ids())} documents "
        f"organized into {len(clusters)} clusters. "
        f"Current focus rests on {labels}.")]
    doc_map = ws.document_map()
    for cluster in clusters:
        members = ", ".join(cluster.member_doc_ids) or "no documents"
        lead_title = (doc_map[cluster.member_doc_ids[0]].title
                      if cluster.member_doc_ids else "none")
        paragraphs.append(paragraph_from_text(
            cluster_section(cluster.cluster_id),
            f"Cluster {cluster.label} gathers {members}. "
            f"The lead document is {lead_title}."))
    paragraphs.append(paragraph_from_text(
        SECTION_CONCLUSION,
        "The plots remain under active review. "
        "Additional corroboration is required before escalation."))
    return make_report(report_id, paragraphs)
