import json
import os

import pytest

from senseloop.errors import SequencingError
from senseloop.timeline import (TimelineEntry, TimelineStore, condense,
                                parse_structured_export, utc_now)


def _entry(i, intent=None, digest="- HighlightAdded h1 clusters=[c1] ..."):
    return TimelineEntry(iteration=i, timestamp=utc_now(),
                         interaction_digest=digest, plan_digest="EDIT summary append: x",
                         report_id=f"r{i}", intent=intent)


def test_append_and_read_back(tmp_path):
    store = TimelineStore(tmp_path)
    first = _entry(1, intent="The analyst focused on the harbor. More follows.")
    store.append("s1", first)
    store.append("s1", _entry(2))
    entries = store.entries("s1")
    assert [e.iteration for e in entries] == [1, 2]
    assert entries[0] == first


def test_iteration_gap_and_duplicate_rejected(tmp_path):
    store = TimelineStore(tmp_path)
    store.append("s1", _entry(1))
    with pytest.raises(SequencingError):
        store.append("s1", _entry(3))
    with pytest.raises(SequencingError):
        store.append("s1", _entry(1))
    assert len(store.entries("s1")) == 1


def test_sessions_are_isolated(tmp_path):
    store = TimelineStore(tmp_path)
    store.append("s1", _entry(1))
    store.append("s2", _entry(1))
    assert len(store.entries("s1")) == 1
    assert len(store.entries("s2")) == 1


def test_condense_uses_first_intent_sentence():
    entry = _entry(1, intent="The analyst highlighted the explosives angle. "
                             "They also moved a document. A third thought.",
                   digest="- line one\n- line two")
    assert condense(entry) == ("The analyst highlighted the explosives angle. "
                               "(2 interactions)")


def test_condense_without_intent_uses_digest():
    entry = _entry(2, digest="- NoteAdded n1 clusters=[] ...")
    out = condense(entry)
    assert out.startswith("- NoteAdded n1")
    assert out.endswith("(1 interaction)")


def test_condense_respects_length_cap():
    entry = _entry(1, intent="word " * 200 + ".")
    out = condense(entry, max_length=50)
    assert len(out) <= 50
    assert out.endswith("…")


def test_export_text_orders_by_iteration(tmp_path):
    store = TimelineStore(tmp_path)
    for i in (1, 2, 3):
        store.append("s1", _entry(i, intent=f"Step {i} looked at the harbor."))
    lines = store.export("s1", format="text").strip().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("[1] ")
    assert lines[2].startswith("[3] ")


def test_structured_export_round_trips(tmp_path):
    store = TimelineStore(tmp_path)
    for i in (1, 2):
        store.append("s1", _entry(i, intent=f"Iteration {i} intent."))
    exported = store.export("s1", format="structured")
    assert parse_structured_export(exported) == store.entries("s1")
    data = json.loads(exported)
    assert data["session_id"] == "s1"


def test_interrupted_append_leaves_previous_log_intact(tmp_path, monkeypatch):
    store = TimelineStore(tmp_path)
    store.append("s1", _entry(1))

    real_replace = os.replace

    def exploding_replace(src, dst):
        raise OSError("simulated crash before rename")

    monkeypatch.setattr(os, "replace", exploding_replace)
    with pytest.raises(OSError):
        store.append("s1", _entry(2))
    monkeypatch.setattr(os, "replace", real_replace)

    entries = store.entries("s1")
    assert [e.iteration for e in entries] == [1]
    # no temp litter left behind
    leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".")]
    assert leftovers == []


def test_unknown_format_rejected(tmp_path):
    store = TimelineStore(tmp_path)
    with pytest.raises(ValueError):
        store.export("s1", format="yaml")
