"""Shared test machinery: random snapshots, single-object mutations, and the
brute-force id-keyed diff oracle the diff implementation is checked against."""

from __future__ import annotations

import random
import time
from dataclasses import replace

from senseloop.diffing import InteractionKind, InteractionSet
from senseloop.types import (Cluster, Document, Highlight, Note,
                             NoteAttachment, WorkspaceSnapshot)

_CHANGE_OF_KIND = {
    InteractionKind.CLUSTER_CREATED: "added",
    InteractionKind.CLUSTER_DELETED: "removed",
    InteractionKind.CLUSTER_REORGANIZED: "changed",
    InteractionKind.HIGHLIGHT_ADDED: "added",
    InteractionKind.HIGHLIGHT_REMOVED: "removed",
    InteractionKind.HIGHLIGHT_EDITED: "changed",
    InteractionKind.NOTE_ADDED: "added",
    InteractionKind.NOTE_REMOVED: "removed",
    InteractionKind.NOTE_EDITED: "changed",
}


def brute_force_changes(prev: WorkspaceSnapshot, cur: WorkspaceSnapshot) -> set:
    """Independent oracle: straight comparison of id-keyed object maps."""
    changes = set()
    for obj_type, prev_map, cur_map in (
            ("cluster", prev.cluster_map(), cur.cluster_map()),
            ("highlight", prev.highlight_map(), cur.highlight_map()),
            ("note", prev.note_map(), cur.note_map())):
        for oid in set(prev_map) | set(cur_map):
            before, after = prev_map.get(oid), cur_map.get(oid)
            if before == after:
                continue
            if before is None:
                changes.add((obj_type, oid, "added"))
            elif after is None:
                changes.add((obj_type, oid, "removed"))
            else:
                changes.add((obj_type, oid, "changed"))
    return changes


def diff_as_changes(si: InteractionSet) -> set:
    return {(i.object_type(), i.subject_id, _CHANGE_OF_KIND[i.kind])
            for i in si.interactions}


def random_snapshot(rng: random.Random, corpus: dict, *, max_docs=10,
                    max_clusters=4, max_marks=20,
                    snapshot_id="rnd", sequence_index=0) -> WorkspaceSnapshot:
    doc_ids = rng.sample(sorted(corpus), rng.randint(2, max_docs))
    documents = tuple(corpus[d] for d in doc_ids)

    shuffled = list(doc_ids)
    rng.shuffle(shuffled)
    n_clusters = rng.randint(0, max_clusters)
    clusters = []
    cursor = 0
    for i in range(n_clusters):
        size = rng.randint(0, max(0, (len(shuffled) - cursor) // max(1, n_clusters - i)))
        members = tuple(shuffled[cursor:cursor + size])
        cursor += size
        clusters.append(Cluster(f"c{i + 1}", f"Group {chr(65 + i)}", members))

    highlights = []
    for i in range(rng.randint(0, max_marks // 2)):
        doc = corpus[rng.choice(doc_ids)]
        highlights.append(_random_highlight(rng, f"h{i + 1}", doc))

    notes = []
    for i in range(rng.randint(0, max_marks // 2)):
        if clusters and rng.random() < 0.5:
            att = NoteAttachment(NoteAttachment.CLUSTER, rng.choice(clusters).cluster_id)
        else:
            att = NoteAttachment(NoteAttachment.DOCUMENT, rng.choice(doc_ids))
        notes.append(Note(f"n{i + 1}", att, f"Observation {i + 1} about {att.ref_id}"))

    return WorkspaceSnapshot(snapshot_id=snapshot_id, sequence_index=sequence_index,
                             clusters=tuple(clusters), documents=documents,
                             highlights=tuple(highlights), notes=tuple(notes))


def _random_highlight(rng: random.Random, hid: str, doc: Document) -> Highlight:
    start = rng.randrange(0, len(doc.body) - 1)
    end = rng.randrange(start + 1, min(len(doc.body), start + 40) + 1)
    return Highlight(hid, doc.doc_id, (start, end), doc.body[start:end],
                     weight=rng.randint(1, 3))


def mutate_randomly(rng: random.Random, ws: WorkspaceSnapshot, corpus: dict,
                    n_mutations: int) -> WorkspaceSnapshot:
    """Apply n random object-level mutations, keeping the snapshot valid."""
    cur = ws
    for i in range(n_mutations):
        cur = _one_mutation(rng, cur, corpus, tag=f"m{i}")
    return replace(cur, snapshot_id=ws.snapshot_id + "-mut",
                   sequence_index=ws.sequence_index + 1)


def _one_mutation(rng: random.Random, ws: WorkspaceSnapshot, corpus: dict,
                  tag: str) -> WorkspaceSnapshot:
    doc_ids = [d.doc_id for d in ws.documents]
    options = ["add_highlight", "add_note", "add_cluster"]
    if ws.highlights:
        options += ["remove_highlight", "edit_highlight"]
    if ws.notes:
        options += ["remove_note", "edit_note"]
    if ws.clusters:
        options += ["remove_cluster", "rename_cluster", "move_member"]
    op = rng.choice(options)

    if op == "add_highlight":
        doc = corpus[rng.choice(doc_ids)]
        return replace(ws, highlights=ws.highlights
                       + (_random_highlight(rng, f"h-{tag}", doc),))
    if op == "remove_highlight":
        victim = rng.choice(ws.highlights)
        return replace(ws, highlights=tuple(
            h for h in ws.highlights if h.highlight_id != victim.highlight_id))
    if op == "edit_highlight":
        victim = rng.choice(ws.highlights)
        return replace(ws, highlights=tuple(
            replace(h, weight=h.weight + 1) if h.highlight_id == victim.highlight_id else h
            for h in ws.highlights))
    if op == "add_note":
        att = NoteAttachment(NoteAttachment.DOCUMENT, rng.choice(doc_ids))
        if ws.clusters and rng.random() < 0.5:
            att = NoteAttachment(NoteAttachment.CLUSTER, rng.choice(ws.clusters).cluster_id)
        return replace(ws, notes=ws.notes + (Note(f"n-{tag}", att, f"note {tag}"),))
    if op == "remove_note":
        victim = rng.choice(ws.notes)
        return replace(ws, notes=tuple(
            n for n in ws.notes if n.note_id != victim.note_id))
    if op == "edit_note":
        victim = rng.choice(ws.notes)
        return replace(ws, notes=tuple(
            replace(n, text=n.text + " (revised)") if n.note_id == victim.note_id else n
            for n in ws.notes))
    if op == "add_cluster":
        unclustered = sorted(set(doc_ids) - ws.clustered_doc_ids())
        members = tuple(unclustered[:rng.randint(0, len(unclustered))])
        return replace(ws, clusters=ws.clusters
                       + (Cluster(f"c-{tag}", f"Extra {tag}", members),))
    if op == "remove_cluster":
        victim = rng.choice(ws.clusters)
        remaining = tuple(c for c in ws.clusters if c.cluster_id != victim.cluster_id)
        notes = tuple(n for n in ws.notes
                      if not (n.attachment.kind == NoteAttachment.CLUSTER
                              and n.attachment.ref_id == victim.cluster_id))
        return replace(ws, clusters=remaining, notes=notes)
    if op == "rename_cluster":
        victim = rng.choice(ws.clusters)
        return replace(ws, clusters=tuple(
            replace(c, label=c.label + " Renamed") if c.cluster_id == victim.cluster_id else c
            for c in ws.clusters))
    if op == "move_member":
        sources = [c for c in ws.clusters if c.member_doc_ids]
        if not sources:
            return ws
        src = rng.choice(sources)
        doc_id = rng.choice(src.member_doc_ids)
        others = [c for c in ws.clusters if c.cluster_id != src.cluster_id]
        clusters = []
        dst_id = rng.choice(others).cluster_id if others and rng.random() < 0.7 else None
        for c in ws.clusters:
            if c.cluster_id == src.cluster_id:
                c = replace(c, member_doc_ids=tuple(
                    d for d in c.member_doc_ids if d != doc_id))
            if dst_id is not None and c.cluster_id == dst_id:
                c = replace(c, member_doc_ids=c.member_doc_ids + (doc_id,))
            clusters.append(c)
        return replace(ws, clusters=tuple(clusters))
    raise AssertionError(op)


# Single-invariant mutations where the diff must contain exactly one
# interaction per touched object.
def distinct_object_mutations(rng: random.Random, ws: WorkspaceSnapshot,
                              corpus: dict, k: int) -> WorkspaceSnapshot:
    """k mutations, each on a different object, none spanning two clusters."""
    cur = ws
    touched: set[tuple[str, str]] = set()
    attempts = 0
    while len(touched) < k and attempts < 200:
        attempts += 1
        candidate = _one_mutation(rng, cur, corpus, tag=f"k{attempts}")
        new_changes = brute_force_changes(cur, candidate)
        objects = {(t, oid) for t, oid, _ in new_changes}
        if len(objects) == 1 and not (objects & touched):
            touched |= objects
            cur = candidate
    assert len(touched) == k, f"could not build {k} distinct mutations"
    return replace(cur, snapshot_id=ws.snapshot_id + "-kmut",
                   sequence_index=ws.sequence_index + 1)


class CountingClient:
    """Wraps a client and counts complete() calls."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0
        self.retries = getattr(inner, "retries", 0)

    def complete(self, prompt: str) -> str:
        self.calls += 1
        return self.inner.complete(prompt)


class SlowClient:
    """Adds a fixed delay before delegating; for concurrency tests."""

    def __init__(self, inner, delay_s: float = 0.05):
        self.inner = inner
        self.delay_s = delay_s
        self.retries = getattr(inner, "retries", 0)

    def complete(self, prompt: str) -> str:
        time.sleep(self.delay_s)
        return self.inner.complete(prompt)


class FlakyClient:
    """Fails with a transport error a fixed number of times, then succeeds."""

    def __init__(self, inner, failures: int, retries: int = 0):
        from senseloop.errors import ModelTransportError

        self.inner = inner
        self.failures_left = failures
        self.retries = retries
        self._error = ModelTransportError

    def complete(self, prompt: str) -> str:
        if self.failures_left > 0:
            self.failures_left -= 1
            raise self._error("synthetic transport failure")
        return self.inner.complete(prompt)
