"""Per-session inference log: one append-only file, atomic replace per append.

Each entry records what the diff saw, what the analysis agent inferred, and
which report resulted. Appends rewrite the whole file through a temp file and
os.replace, so an interrupted append can never leave a torn log -- readers
see either the old or the new entry count.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .errors import SchemaError, SequencingError
from .textops import split_sentences

DEFAULT_CONDENSE_LENGTH = 200


@dataclass(frozen=True)
class TimelineEntry:
    iteration: int
    timestamp: str  # ISO-8601 UTC
    interaction_digest: str
    plan_digest: str
    report_id: str
    intent: Optional[str] = None  # present iff the method was visreact


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def entry_to_dict(entry: TimelineEntry) -> dict:
    data = {
        "iteration": entry.iteration,
        "timestamp": entry.timestamp,
        "interaction_digest": entry.interaction_digest,
        "plan_digest": entry.plan_digest,
        "report_id": entry.report_id,
    }
    if entry.intent is not None:
        data["intent"] = entry.intent
    return data


def entry_from_dict(data: dict) -> TimelineEntry:
    try:
        return TimelineEntry(
            iteration=int(data["iteration"]),
            timestamp=data["timestamp"],
            interaction_digest=data["interaction_digest"],
            plan_digest=data["plan_digest"],
            report_id=data["report_id"],
            intent=data.get("intent"))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed timeline entry: {exc}") from exc


def condense(entry: TimelineEntry,
             max_length: int = DEFAULT_CONDENSE_LENGTH) -> str:
    """First intent sentence plus the interaction count; digest-only otherwise."""
    count = len([ln for ln in entry.interaction_digest.splitlines() if ln.strip()])
    noun = "interaction" if count == 1 else "interactions"
    if entry.intent:
        sentences = split_sentences(entry.intent)
        head = sentences[0] if sentences else entry.intent
        text = f"{head} ({count} {noun})"
    else:
        text = f"{entry.interaction_digest.strip()} ({count} {noun})" if count \
            else "no interactions"
    if len(text) > max_length:
        text = text[:max_length - 1].rstrip() + "…"
    return text


class TimelineStore:
    """One JSONL log per session under a root directory."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    def path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.timeline.jsonl"

    def entries(self, session_id: str) -> tuple[TimelineEntry, ...]:
        path = self.path(session_id)
        if not path.exists():
            return ()
        out = []
        for line in path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                out.append(entry_from_dict(json.loads(line)))
        return tuple(out)

    def append(self, session_id: str, entry: TimelineEntry) -> None:
        """Durably append; entry.iteration must be last iteration + 1."""
        with self._lock:
            existing = self.entries(session_id)
            expected = existing[-1].iteration + 1 if existing else 1
            if entry.iteration != expected:
                raise SequencingError(
                    f"timeline for {session_id!r} expects iteration {expected}, "
                    f"got {entry.iteration}")
            path = self.path(session_id)
            path.parent.mkdir(parents=True, exist_ok=True)
            payload = "".join(json.dumps(entry_to_dict(e), ensure_ascii=False) + "\n"
                              for e in existing + (entry,))
            fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(payload)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp_name, path)
            finally:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)

    def export(self, session_id: str, format: str = "text",
               condense_length: int = DEFAULT_CONDENSE_LENGTH) -> str:
        entries = self.entries(session_id)
        if format == "text":
            lines = [f"[{e.iteration}] {e.timestamp} {condense(e, condense_length)}"
                     for e in entries]
            return "\n".join(lines) + ("\n" if lines else "")
        if format == "structured":
            return json.dumps({
                "schema_version": 1,
                "kind": "timeline",
                "session_id": session_id,
                "entries": [entry_to_dict(e) for e in entries],
            }, indent=2, ensure_ascii=False) + "\n"
        raise ValueError(f"unknown timeline format {format!r}")


def parse_structured_export(text: str) -> tuple[TimelineEntry, ...]:
    """Inverse of export(format="structured")."""
    data = json.loads(text)
    if data.get("kind") != "timeline":
        raise SchemaError("not a timeline export")
    return tuple(entry_from_dict(e) for e in data.get("entries", ()))
