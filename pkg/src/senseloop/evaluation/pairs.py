"""Experiment pairs: original/modified workspace couples with a prior report.

generate_pairs covers the interaction type/granularity combinations singly
and combined, plus control pairs with no change at all. Everything is a pure
function of (corpus, profile counts, seed), so suites regenerate bit-identically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from ..errors import SchemaError
from ..report import draft_report
from ..storage import (SCHEMA_VERSION, load_json, report_from_dict,
                       report_to_dict, save_json, snapshot_from_dict,
                       snapshot_to_dict)
from ..types import (Cluster, Document, Highlight, Note, NoteAttachment,
                     StructuredReport, WorkspaceSnapshot)
from ..validation import require_valid

PROFILES = (
    "highlight-add", "highlight-remove", "highlight-edit",
    "note-add", "note-remove", "note-edit",
    "cluster-create", "cluster-delete", "cluster-move", "cluster-rename",
    "doc-note-add",
    "combo-highlight-note", "combo-cluster-highlight",
)
CONTROL_PROFILE = "control"

# 32 interaction pairs + 3 controls = the 35-pair suite shape.
DEFAULT_PROFILE_COUNTS: dict[str, int] = {
    "highlight-add": 3, "highlight-remove": 3, "highlight-edit": 2,
    "note-add": 3, "note-remove": 2, "note-edit": 2,
    "cluster-create": 2, "cluster-delete": 2, "cluster-move": 3,
    "cluster-rename": 2, "doc-note-add": 2,
    "combo-highlight-note": 3, "combo-cluster-highlight": 3,
    CONTROL_PROFILE: 3,
}

_FIRST_NAMES = ("Abdul", "Carlos", "Dana", "Elena", "Farid", "Grigori",
                "Hana", "Imran", "Jonas", "Katya", "Leila", "Marco",
                "Nadia", "Omar", "Petra", "Rosa", "Sameer", "Tariq", "Vera", "Yusuf")
_LAST_NAMES = ("Ramazi", "Ortiz", "Weber", "Petrov", "Haddad", "Kovac",
               "Silva", "Demir", "Novak", "Araya")
_CITIES = ("North Bergen", "Baton Rouge", "Santa Fe", "El Paso", "New Haven",
           "Fort Lee", "Long Beach", "Grand Forks", "Cedar Rapids", "Little Rock")
_ITEMS = ("C-4 explosive", "ammonium nitrate", "wire transfer",
          "shipping manifest", "encrypted phone", "rental van",
          "storage unit", "flight manual", "cash deposit", "forged passport")
_PLOT_LABELS = ("Plot Crescent", "Plot Harbor", "Plot Skyline", "Plot Meridian")


@dataclass(frozen=True)
class ExperimentPair:
    pair_id: str
    prev_ws: WorkspaceSnapshot
    cur_ws: WorkspaceSnapshot
    prev_report: StructuredReport
    interaction_profile: str


def synthetic_corpus(n_docs: int = 16, seed: int = 7) -> dict[str, Document]:
    """Fictional intelligence-report corpus with stable entity vocabulary."""
    rng = random.Random(f"corpus:{seed}")
    corpus: dict[str, Document] = {}
    for i in range(n_docs):
        doc_id = f"d{i + 1:02d}"
        person = f"{rng.choice(_FIRST_NAMES)} {rng.choice(_LAST_NAMES)}"
        city = rng.choice(_CITIES)
        item = rng.choice(_ITEMS)
        item2 = rng.choice([x for x in _ITEMS if x != item])
        title = f"Report {i + 1:02d} on {person}"
        body = (f"{person} was observed in {city} on several occasions. "
                f"Sources indicate sustained interest in {item} and contact "
                f"with local intermediaries. "
                f"A transaction involving {item2} was flagged by the field office. "
                f"Analysts consider the pattern of activity in {city} significant.")
        corpus[doc_id] = Document(doc_id=doc_id, title=title, body=body)
    return corpus


def _item_span(doc: Document, item: str) -> Highlight:
    start = doc.body.find(item)
    if start < 0:
        raise ValueError(f"{item!r} not present in {doc.doc_id}")
    return Highlight(highlight_id="", doc_id=doc.doc_id,
                     span=(start, start + len(item)), text=item)


def _item_candidates(doc: Document) -> list[str]:
    return [item for item in _ITEMS if item in doc.body]


def _base_workspace(corpus: Mapping[str, Document], rng: random.Random,
                    snapshot_id: str) -> WorkspaceSnapshot:
    if len(corpus) < 12:
        raise ValueError("pair generation needs a corpus of at least 12 documents")
    sampled = rng.sample(sorted(corpus), 12)
    plot_docs, shelf_docs = sampled[:10], sampled[10:]
    labels = rng.sample(_PLOT_LABELS, 3)
    clusters = (
        Cluster("c1", labels[0], tuple(plot_docs[:4])),
        Cluster("c2", labels[1], tuple(plot_docs[4:7])),
        Cluster("c3", labels[2], tuple(plot_docs[7:10])),
    )
    documents = tuple(corpus[d] for d in sorted(sampled))

    def pick_highlight(hid: str, doc_id: str) -> Highlight:
        doc = corpus[doc_id]
        item = rng.choice(_item_candidates(doc))
        return replace(_item_span(doc, item), highlight_id=hid)

    highlights = (
        pick_highlight("h1", plot_docs[0]),
        replace(pick_highlight("h2", plot_docs[4]), weight=2),
    )
    notes = (
        Note("n1", NoteAttachment(NoteAttachment.CLUSTER, "c1"),
             f"Track the {labels[0]} financing through {rng.choice(_CITIES)}"),
    )
    return WorkspaceSnapshot(snapshot_id=snapshot_id, sequence_index=0,
                             clusters=clusters, documents=documents,
                             highlights=highlights, notes=notes)


def _fresh_highlight(ws: WorkspaceSnapshot, rng: random.Random,
                     hid: str, doc_id: str) -> Highlight:
    """A highlight on a span that no existing highlight of the doc covers."""
    doc = ws.document_map()[doc_id]
    taken = {h.span for h in ws.highlights if h.doc_id == doc_id}
    options = [item for item in _item_candidates(doc)
               if _item_span(doc, item).span not in taken]
    if not options:
        raise ValueError(f"no free highlight span in {doc_id}")
    return replace(_item_span(doc, rng.choice(options)), highlight_id=hid)


def _mutate(ws: WorkspaceSnapshot, profile: str, rng: random.Random,
            pair_id: str) -> WorkspaceSnapshot:
    """Apply one profile's object changes; ids of new objects carry the pair id."""
    clusters = list(ws.clusters)
    highlights = list(ws.highlights)
    notes = list(ws.notes)
    shelf = sorted(set(d.doc_id for d in ws.documents) - ws.clustered_doc_ids())

    def cluster_doc(cluster_idx: int, member_idx: int = 0) -> str:
        return clusters[cluster_idx].member_doc_ids[member_idx]

    def move_doc(src_idx: int, dst_idx: int) -> None:
        doc_id = clusters[src_idx].member_doc_ids[-1]
        src, dst = clusters[src_idx], clusters[dst_idx]
        clusters[src_idx] = replace(
            src, member_doc_ids=tuple(d for d in src.member_doc_ids if d != doc_id))
        clusters[dst_idx] = replace(
            dst, member_doc_ids=dst.member_doc_ids + (doc_id,))

    if profile == CONTROL_PROFILE:
        pass
    elif profile == "highlight-add":
        highlights.append(_fresh_highlight(ws, rng, f"hx-{pair_id}", cluster_doc(1)))
    elif profile == "highlight-remove":
        highlights = [h for h in highlights if h.highlight_id != "h1"]
    elif profile == "highlight-edit":
        highlights = [replace(h, weight=h.weight + 1) if h.highlight_id == "h2" else h
                      for h in highlights]
    elif profile == "note-add":
        notes.append(Note(f"nx-{pair_id}", NoteAttachment(NoteAttachment.CLUSTER, "c2"),
                          f"Meeting at {rng.choice(_CITIES)} needs confirmation"))
    elif profile == "note-remove":
        notes = [n for n in notes if n.note_id != "n1"]
    elif profile == "note-edit":
        notes = [replace(n, text=f"{n.text} via {rng.choice(_CITIES)}")
                 if n.note_id == "n1" else n for n in notes]
    elif profile == "cluster-create":
        label = next(lb for lb in _PLOT_LABELS
                     if lb not in {c.label for c in clusters})
        clusters.append(Cluster("c4", label, tuple(shelf[:2])))
    elif profile == "cluster-delete":
        clusters = [c for c in clusters if c.cluster_id != "c3"]
    elif profile == "cluster-move":
        move_doc(0, 1)
    elif profile == "cluster-rename":
        clusters[1] = replace(clusters[1], label=f"{clusters[1].label} Expanded")
    elif profile == "doc-note-add":
        notes.append(Note(f"nx-{pair_id}", NoteAttachment(NoteAttachment.DOCUMENT, shelf[0]),
                          f"Possible link to {rng.choice(_CITIES)}"))
    elif profile == "combo-highlight-note":
        highlights.append(_fresh_highlight(ws, rng, f"hx-{pair_id}", cluster_doc(1)))
        notes.append(Note(f"nx-{pair_id}", NoteAttachment(NoteAttachment.CLUSTER, "c3"),
                          f"Compare with movements near {rng.choice(_CITIES)}"))
    elif profile == "combo-cluster-highlight":
        move_doc(0, 1)
        highlights.append(_fresh_highlight(ws, rng, f"hx-{pair_id}", cluster_doc(2)))
    else:
        raise ValueError(f"unknown interaction profile {profile!r}")

    return replace(ws, snapshot_id=f"{pair_id}-cur", sequence_index=ws.sequence_index + 1,
                   clusters=tuple(clusters), highlights=tuple(highlights),
                   notes=tuple(notes))


def generate_pairs(corpus: Mapping[str, Document],
                   profile_spec: Optional[Mapping[str, int]] = None,
                   seed: int = 0) -> list[ExperimentPair]:
    """Build the experiment suite; deterministic given (corpus, spec, seed)."""
    counts = dict(DEFAULT_PROFILE_COUNTS if profile_spec is None else profile_spec)
    pairs: list[ExperimentPair] = []
    for profile in list(PROFILES) + [CONTROL_PROFILE]:
        for i in range(counts.get(profile, 0)):
            pair_id = f"{profile}-{i:02d}"
            rng = random.Random(f"{seed}:{pair_id}")
            prev_ws = _base_workspace(corpus, rng, f"{pair_id}-prev")
            cur_ws = _mutate(prev_ws, profile, rng, pair_id)
            require_valid(prev_ws)
            require_valid(cur_ws)
            pairs.append(ExperimentPair(
                pair_id=pair_id, prev_ws=prev_ws, cur_ws=cur_ws,
                prev_report=draft_report(prev_ws, f"{pair_id}-report"),
                interaction_profile=profile))
    return pairs


# ---------------------------------------------------------------------------
# Pair files


def pair_to_dict(pair: ExperimentPair) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "experiment_pair",
        "pair_id": pair.pair_id,
        "interaction_profile": pair.interaction_profile,
        "prev_ws": snapshot_to_dict(pair.prev_ws),
        "cur_ws": snapshot_to_dict(pair.cur_ws),
        "prev_report": report_to_dict(pair.prev_report),
    }


def pair_from_dict(data: Mapping[str, Any]) -> ExperimentPair:
    if data.get("schema_version") != SCHEMA_VERSION or data.get("kind") != "experiment_pair":
        raise SchemaError("not an experiment_pair document")
    try:
        return ExperimentPair(
            pair_id=data["pair_id"],
            interaction_profile=data["interaction_profile"],
            prev_ws=snapshot_from_dict(data["prev_ws"]),
            cur_ws=snapshot_from_dict(data["cur_ws"]),
            prev_report=report_from_dict(data["prev_report"]))
    except KeyError as exc:
        raise SchemaError(f"malformed experiment_pair document: {exc}") from exc


def save_pairs(directory: Path, pairs: Sequence[ExperimentPair]) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for pair in pairs:
        save_json(directory / f"{pair.pair_id}.pair.json", pair_to_dict(pair))


def load_pairs(directory: Path) -> list[ExperimentPair]:
    directory = Path(directory)
    paths = sorted(directory.glob("*.pair.json"))
    if not paths:
        raise SchemaError(f"no *.pair.json files under {directory}")
    return [pair_from_dict(load_json(p)) for p in paths]
