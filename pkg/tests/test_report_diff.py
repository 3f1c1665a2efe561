from senseloop.evaluation.report_diff import (MODIFIED_SIMILARITY_THRESHOLD,
                                              diff_reports, token_overlap)
from senseloop.report import paragraph_from_text
from senseloop.types import cluster_section, make_report


def _report(rid, sections):
    return make_report(rid, [paragraph_from_text(k, t) for k, t in sections])


BASE = _report("r0", [
    ("summary", "Two plots are active. Evidence is mounting."),
    (cluster_section("c1"), "Plot one tracks the money. A transfer hit North Bergen."),
    (cluster_section("c2"), "Plot two watches the harbor. Crane logs are odd."),
    ("conclusion", "Keep watching."),
])


def test_identical_reports_empty_diff():
    diff = diff_reports(BASE, BASE)
    assert diff.is_empty()


def test_appended_sentence_is_added():
    new = _report("r1", [
        ("summary", "Two plots are active. Evidence is mounting."),
        (cluster_section("c1"), "Plot one tracks the money. A transfer hit North Bergen."),
        (cluster_section("c2"),
         "Plot two watches the harbor. Crane logs are odd. New evidence arrived."),
        ("conclusion", "Keep watching."),
    ])
    diff = diff_reports(BASE, new)
    assert diff.edited_sections == {cluster_section("c2")}
    (edit,) = diff.edited_sentences
    assert edit.kind == "added"
    assert edit.text == "New evidence arrived."


def test_full_rewrite_marks_every_section():
    new = _report("r1", [
        ("summary", "Entirely different framing now."),
        (cluster_section("c1"), "Fresh narrative about finances."),
        (cluster_section("c2"), "Fresh narrative about logistics."),
        ("conclusion", "A new outlook."),
    ])
    diff = diff_reports(BASE, new)
    assert len(diff.edited_sections) == 4


def test_similar_sentences_pair_as_modified():
    new = _report("r1", [
        ("summary", "Two plots are active. Evidence is mounting."),
        (cluster_section("c1"),
         "Plot one tracks the money and the couriers. A transfer hit North Bergen."),
        (cluster_section("c2"), "Plot two watches the harbor. Crane logs are odd."),
        ("conclusion", "Keep watching."),
    ])
    diff = diff_reports(BASE, new)
    (edit,) = diff.edited_sentences
    assert edit.kind == "modified"
    assert edit.old_text == "Plot one tracks the money."
    assert edit.text == "Plot one tracks the money and the couriers."


def test_dissimilar_replacement_counts_separately():
    new = _report("r1", [
        ("summary", "Two plots are active. Evidence is mounting."),
        (cluster_section("c1"),
         "Nothing alike whatsoever here. A transfer hit North Bergen."),
        (cluster_section("c2"), "Plot two watches the harbor. Crane logs are odd."),
        ("conclusion", "Keep watching."),
    ])
    diff = diff_reports(BASE, new)
    kinds = sorted(e.kind for e in diff.edited_sentences)
    assert kinds == ["added", "removed"]


def test_wholesale_section_add_and_remove():
    new = _report("r1", [
        ("summary", "Two plots are active. Evidence is mounting."),
        (cluster_section("c1"), "Plot one tracks the money. A transfer hit North Bergen."),
        (cluster_section("c9"), "A brand new plot emerged."),
        ("conclusion", "Keep watching."),
    ])
    diff = diff_reports(BASE, new)
    assert cluster_section("c2") in diff.edited_sections
    assert cluster_section("c9") in diff.edited_sections
    removed = [e for e in diff.edited_sentences if e.kind == "removed"]
    added = [e for e in diff.edited_sentences if e.kind == "added"]
    assert {e.section_key for e in removed} == {cluster_section("c2")}
    assert {e.section_key for e in added} == {cluster_section("c9")}


def test_whitespace_only_changes_are_not_edits():
    new = _report("r1", [
        ("summary", "Two plots are  active. Evidence is mounting."),
        (cluster_section("c1"), "Plot one tracks the money. A transfer hit North Bergen."),
        (cluster_section("c2"), "Plot two watches the harbor. Crane logs are odd."),
        ("conclusion", "Keep watching."),
    ])
    assert diff_reports(BASE, new).is_empty()


def test_token_overlap_threshold_behavior():
    assert token_overlap("the same exact tokens", "the same exact tokens") == 1.0
    assert token_overlap("alpha beta gamma", "delta epsilon zeta") == 0.0
    mid = token_overlap("the courier moved cash", "the courier moved cash quickly today")
    assert 0.0 < mid < 1.0
    assert MODIFIED_SIMILARITY_THRESHOLD == 0.6
