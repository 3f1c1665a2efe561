"""senseloop: semantic-interaction driven, targeted sensemaking report refinement.

Capture semantic interactions as the diff between workspace snapshots, run a
two-agent analyze/refine protocol that performs targeted edits to a BLUF
report, and score refinement quality with paragraph-level (P1) and
sentence-level (P2) precision/recall.
"""

from .canonical import SerializeConfig, content_equal, serialize_workspace_text
from .diffing import (InteractionKind, InteractionSet, SemanticInteraction,
                      count_differing_objects, diff_workspaces,
                      interaction_summary)
from .report import draft_report, parse_report, render_report
from .textops import split_sentences
from .types import (Cluster, Document, Highlight, Note, NoteAttachment,
                    Paragraph, StructuredReport, WorkspaceSnapshot,
                    cluster_section, make_report)
from .validation import Violation, validate_snapshot

__version__ = "0.1.0"

__all__ = [
    "SerializeConfig", "content_equal", "serialize_workspace_text",
    "InteractionKind", "InteractionSet", "SemanticInteraction",
    "count_differing_objects", "diff_workspaces", "interaction_summary",
    "draft_report", "parse_report", "render_report",
    "split_sentences",
    "Cluster", "Document", "Highlight", "Note", "NoteAttachment",
    "Paragraph", "StructuredReport", "WorkspaceSnapshot",
    "cluster_section", "make_report",
    "Violation", "validate_snapshot",
    "__version__",
]
