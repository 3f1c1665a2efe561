import pytest

from senseloop.evaluation.pairs import synthetic_corpus
from senseloop.types import (Cluster, Document, Highlight, Note,
                             NoteAttachment, WorkspaceSnapshot)


@pytest.fixture(scope="session")
def corpus():
    return synthetic_corpus(n_docs=16, seed=7)


@pytest.fixture
def small_snapshot():
    """Two clusters, one shelf doc, a highlight and two notes. Valid."""
    docs = (
        Document("d1", "Arrest in Queens", "Police arrested a suspect carrying C-4 explosive near the docks."),
        Document("d2", "Wire Transfer Alert", "A large wire transfer reached a front company in North Bergen."),
        Document("d3", "Harbor Watch", "Unusual crane activity was logged at the harbor overnight."),
        Document("d4", "Shelf Report", "Background file with no markings yet."),
    )
    body = docs[0].body
    start = body.index("C-4 explosive")
    highlight = Highlight("h1", "d1", (start, start + len("C-4 explosive")),
                          "C-4 explosive", weight=2)
    return WorkspaceSnapshot(
        snapshot_id="w-test", sequence_index=0,
        clusters=(
            Cluster("c1", "Plot Crescent", ("d1", "d2")),
            Cluster("c2", "Plot Harbor", ("d3",)),
        ),
        documents=docs,
        highlights=(highlight,),
        notes=(
            Note("n1", NoteAttachment(NoteAttachment.CLUSTER, "c1"),
                 "Follow the money through North Bergen"),
            Note("n2", NoteAttachment(NoteAttachment.DOCUMENT, "d3"),
                 "Crane schedule looks staged"),
        ),
    )
