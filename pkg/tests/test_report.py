import pytest
from hypothesis import given, strategies as st

from senseloop.errors import ReportStructureError
from senseloop.report import (draft_report, paragraph_from_text, parse_report,
                              render_report)
from senseloop.textops import split_sentences
from senseloop.types import Paragraph, cluster_section, make_report


def _report(sections):
    paragraphs = [paragraph_from_text(key, text) for key, text in sections]
    return make_report("r1", paragraphs)


BASIC = _report([
    ("summary", "Two plots are active. Evidence is mounting."),
    (cluster_section("c1"), "Cluster one tracks the money. A transfer hit North Bergen."),
    (cluster_section("c2"), "Cluster two watches the harbor."),
    ("conclusion", "Escalation is premature. Keep watching."),
])


def test_render_order_and_shape():
    text = render_report(BASIC)
    blocks = [b for b in text.split("\n\n") if b.strip()]
    assert len(blocks) == 4
    assert blocks[0].startswith("Two plots are active.")
    assert blocks[-1].startswith("Escalation is premature.")


def test_round_trip():
    text = render_report(BASIC)
    parsed = parse_report(text, BASIC.section_keys(), report_id=BASIC.report_id)
    assert parsed == BASIC


def test_paragraph_count_mismatch():
    text = render_report(BASIC)
    with pytest.raises(ReportStructureError):
        parse_report(text, BASIC.section_keys()[:-1])


def test_empty_paragraph_rejected():
    with pytest.raises(ReportStructureError):
        paragraph_from_text("summary", "   ")


def test_make_report_enforces_bluf_order():
    with pytest.raises(ValueError):
        make_report("r", [Paragraph("conclusion", ("x.",)),
                          Paragraph("summary", ("y.",))])
    with pytest.raises(ValueError):
        make_report("r", [Paragraph("summary", ("x.",)),
                          Paragraph("not-a-cluster", ("y.",)),
                          Paragraph("conclusion", ("z.",))])


_words = st.sampled_from(["the", "plot", "grew", "Harbor", "agents", "money",
                          "moved", "north", "C-4", "was", "found"])


@st.composite
def _canonical_paragraph(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    sentences = []
    for _ in range(n):
        body = " ".join(draw(st.lists(_words, min_size=1, max_size=6)))
        sentences.append(body.capitalize() + draw(st.sampled_from(".!?")))
    return " ".join(sentences)


@given(st.lists(_canonical_paragraph(), min_size=0, max_size=3),
       _canonical_paragraph(), _canonical_paragraph())
def test_round_trip_property(cluster_texts, summary_text, conclusion_text):
    sections = ([("summary", summary_text)]
                + [(cluster_section(f"c{i + 1}"), t)
                   for i, t in enumerate(cluster_texts)]
                + [("conclusion", conclusion_text)])
    report = _report(sections)
    parsed = parse_report(render_report(report), report.section_keys(),
                          report_id=report.report_id)
    assert parsed == report


def test_draft_report_sentences_are_canonical(corpus):
    from senseloop.evaluation.pairs import generate_pairs

    for pair in generate_pairs(corpus, {"cluster-move": 2, "control": 1}, seed=5):
        for paragraph in pair.prev_report.paragraphs():
            assert list(paragraph.sentences) == split_sentences(paragraph.text())


def test_draft_report_empty_workspace():
    from senseloop.types import WorkspaceSnapshot

    report = draft_report(WorkspaceSnapshot("w0", 0), "r0")
    assert report.section_keys() == ("summary", "conclusion")
    assert all(p.sentences for p in report.paragraphs())
