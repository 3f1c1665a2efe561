from dataclasses import replace

import pytest

from senseloop.agents.planning import PlannedEdit
from senseloop.agents.prompts import (PromptConfig, build_analysis_prompt,
                                      build_generation_prompt,
                                      build_refinement_prompt,
                                      build_si_refinement_prompt,
                                      estimate_tokens,
                                      generation_section_order, load_template,
                                      refined_section_order,
                                      sanctioned_new_sections)
from senseloop.diffing import diff_workspaces
from senseloop.errors import NoInteractions, PromptBudgetError
from senseloop.report import draft_report
from senseloop.types import Cluster, Highlight


@pytest.fixture
def refinement_inputs(small_snapshot):
    doc = small_snapshot.document_map()["d3"]
    h = Highlight("h2", "d3", (8, 13), doc.body[8:13], weight=3)
    cur = replace(small_snapshot, snapshot_id="w2", sequence_index=1,
                  highlights=small_snapshot.highlights + (h,))
    report = draft_report(small_snapshot, "r0")
    si = diff_workspaces(small_snapshot, cur)
    return report, si, cur


def test_analysis_prompt_embeds_everything(refinement_inputs):
    report, si, cur = refinement_inputs
    prompt = build_analysis_prompt(report, si, cur)
    assert prompt.startswith("TASK: ANALYSIS")
    assert si.interactions[0].detail["text"] in prompt
    assert "weight=3" in prompt
    assert report.summary.sentences[0] in prompt
    assert "=== WORKSPACE ===" in prompt


def test_prompt_determinism(refinement_inputs):
    report, si, cur = refinement_inputs
    assert build_analysis_prompt(report, si, cur) == build_analysis_prompt(report, si, cur)
    keys = refined_section_order(report, cur)
    p1 = build_si_refinement_prompt(report, si, keys)
    assert p1 == build_si_refinement_prompt(report, si, keys)
    g1 = build_generation_prompt(cur, generation_section_order(cur))
    assert g1 == build_generation_prompt(cur, generation_section_order(cur))


def test_empty_interactions_signal(refinement_inputs):
    report, _, cur = refinement_inputs
    empty = diff_workspaces(cur, cur)
    with pytest.raises(NoInteractions):
        build_analysis_prompt(report, empty, cur)
    with pytest.raises(NoInteractions):
        build_si_refinement_prompt(report, empty, refined_section_order(report, cur))


def test_token_budget_truncates_excerpts(refinement_inputs):
    report, si, cur = refinement_inputs
    filler = " The surveillance annex repeats background detail." * 80
    cur = replace(cur, documents=tuple(
        replace(d, body=d.body + filler) if d.doc_id == "d2" else d
        for d in cur.documents))
    full = build_analysis_prompt(report, si, cur)
    budget = estimate_tokens(full) - 200
    tight = build_analysis_prompt(report, si, cur, PromptConfig(token_budget=budget))
    assert estimate_tokens(tight) <= budget
    assert "[...]" in tight


def test_impossible_budget_raises(refinement_inputs):
    report, si, cur = refinement_inputs
    with pytest.raises(PromptBudgetError):
        build_analysis_prompt(report, si, cur, PromptConfig(token_budget=10))


def test_refinement_prompt_carries_plan_and_sections(refinement_inputs):
    report, si, cur = refinement_inputs
    keys = refined_section_order(report, cur)
    plan = (PlannedEdit("summary", "append", "mention it"),)
    prompt = build_refinement_prompt(cur, report, plan, keys)
    assert "EDIT summary append: mention it" in prompt
    assert "SECTIONS: " + ", ".join(keys) in prompt
    assert "PREVIOUS SECTIONS: " + ", ".join(report.section_keys()) in prompt


def test_refined_section_order_handles_create_and_delete(small_snapshot):
    report = draft_report(small_snapshot, "r0")
    cur = replace(small_snapshot, snapshot_id="w2", sequence_index=1,
                  clusters=(small_snapshot.clusters[0],
                            Cluster("c9", "Plot New", ("d4",))))
    assert refined_section_order(report, cur) == [
        "summary", "cluster:c1", "cluster:c9", "conclusion"]
    si = diff_workspaces(small_snapshot, cur)
    assert sanctioned_new_sections(report, si) == frozenset({"cluster:c9"})


def test_templates_are_loadable():
    for name in ("analysis", "refinement", "refinement_si", "generation",
                 "repair_plan", "repair_report"):
        text = load_template(name)
        assert text.strip()
