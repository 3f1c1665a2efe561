"""Prompt assembly for the analysis, refinement, and baseline-generation calls.

Templates live as versioned text assets under senseloop.prompts. Builders are
pure: identical inputs produce byte-identical prompts. Token budgeting uses a
chars/4 approximation and steps the workspace body excerpt down a fixed
ladder until the prompt fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from ..canonical import SerializeConfig, serialize_workspace_text
from ..diffing import InteractionSet, interaction_summary
from ..errors import NoInteractions, PromptBudgetError
from ..report import render_report
from ..types import (SECTION_CONCLUSION, SECTION_SUMMARY, StructuredReport,
                     WorkspaceSnapshot, cluster_section)
from .planning import PlannedEdit, render_plan

TEMPLATE_VERSION = "v1"

# Body excerpt lengths tried in order until the prompt fits the budget.
_EXCERPT_LADDER: tuple[Optional[int], ...] = (None, 2000, 800, 300, 120)


@dataclass(frozen=True)
class PromptConfig:
    token_budget: int = 24000
    body_excerpt_chars: Optional[int] = None  # first ladder step when set


DEFAULT_PROMPT_CONFIG = PromptConfig()


def estimate_tokens(text: str) -> int:
    """Cheap deterministic approximation: one token per four characters."""
    return math.ceil(len(text) / 4)


def load_template(name: str) -> str:
    """Read a template asset, e.g. load_template("analysis")."""
    filename = f"{name}_{TEMPLATE_VERSION}.txt"
    return resources.files("senseloop.prompts").joinpath(filename).read_text("utf-8")


def section_list_line(section_keys: Sequence[str]) -> str:
    return ", ".join(section_keys)


def refined_section_order(prev_report: StructuredReport,
                          cur_ws: WorkspaceSnapshot) -> list[str]:
    """Section keys the refined report must have, in order.

    Keeps the previous report's cluster order, drops clusters deleted from the
    workspace, and inserts newly created clusters at their id-sorted position.
    """
    cur_ids = {c.cluster_id for c in cur_ws.clusters}
    kept = [cid for cid in prev_report.cluster_ids() if cid in cur_ids]
    for cid in sorted(cur_ids.difference(prev_report.cluster_ids())):
        pos = next((i for i, existing in enumerate(kept) if existing > cid), len(kept))
        kept.insert(pos, cid)
    return ([SECTION_SUMMARY]
            + [cluster_section(cid) for cid in kept]
            + [SECTION_CONCLUSION])


def generation_section_order(cur_ws: WorkspaceSnapshot) -> list[str]:
    """Sections for a from-scratch report: clusters in canonical id order."""
    ids = sorted(c.cluster_id for c in cur_ws.clusters)
    return ([SECTION_SUMMARY]
            + [cluster_section(cid) for cid in ids]
            + [SECTION_CONCLUSION])


def _fit_to_budget(render, config: PromptConfig) -> str:
    """render(excerpt_chars) -> prompt; walk the ladder until it fits."""
    ladder = _EXCERPT_LADDER
    if config.body_excerpt_chars is not None:
        ladder = tuple(step for step in _EXCERPT_LADDER
                       if step is not None and step <= config.body_excerpt_chars)
        ladder = (config.body_excerpt_chars,) + ladder
    prompt = ""
    for step in ladder:
        prompt = render(step)
        if estimate_tokens(prompt) <= config.token_budget:
            return prompt
    raise PromptBudgetError(
        f"prompt needs ~{estimate_tokens(prompt)} tokens even at maximum "
        f"truncation; budget is {config.token_budget}")


def build_analysis_prompt(prev_report: StructuredReport, si: InteractionSet,
                          cur_ws: WorkspaceSnapshot,
                          config: PromptConfig = DEFAULT_PROMPT_CONFIG) -> str:
    if not si.interactions:
        raise NoInteractions("no semantic interactions; nothing to analyze")
    template = load_template("analysis")
    known = prev_report.section_keys()
    sanctioned = sanctioned_new_sections(prev_report, si)

    def render(excerpt: Optional[int]) -> str:
        return template.format(
            prev_report=render_report(prev_report).strip(),
            interactions=interaction_summary(si),
            workspace=serialize_workspace_text(
                cur_ws, SerializeConfig(body_excerpt_chars=excerpt),
                validate=False).strip(),
            section_list=section_list_line(known),
            sanctioned_list=section_list_line(sorted(sanctioned)) or "(none)")

    return _fit_to_budget(render, config)


def build_refinement_prompt(cur_ws: WorkspaceSnapshot,
                            prev_report: StructuredReport,
                            plan: Sequence[PlannedEdit],
                            section_keys: Sequence[str],
                            config: PromptConfig = DEFAULT_PROMPT_CONFIG) -> str:
    template = load_template("refinement")

    def render(excerpt: Optional[int]) -> str:
        return template.format(
            prev_report=render_report(prev_report).strip(),
            prev_section_list=section_list_line(prev_report.section_keys()),
            plan=render_plan(plan),
            workspace=serialize_workspace_text(
                cur_ws, SerializeConfig(body_excerpt_chars=excerpt),
                validate=False).strip(),
            section_list=section_list_line(section_keys))

    return _fit_to_budget(render, config)


def build_si_refinement_prompt(prev_report: StructuredReport,
                               si: InteractionSet,
                               section_keys: Sequence[str],
                               config: PromptConfig = DEFAULT_PROMPT_CONFIG) -> str:
    """Refinement from the interaction set alone, without an analysis phase."""
    if not si.interactions:
        raise NoInteractions("no semantic interactions; nothing to refine")
    template = load_template("refinement_si")
    prompt = template.format(
        prev_report=render_report(prev_report).strip(),
        prev_section_list=section_list_line(prev_report.section_keys()),
        interactions=interaction_summary(si),
        section_list=section_list_line(section_keys))
    if estimate_tokens(prompt) > config.token_budget:
        raise PromptBudgetError(
            f"prompt needs ~{estimate_tokens(prompt)} tokens; "
            f"budget is {config.token_budget}")
    return prompt


def build_generation_prompt(cur_ws: WorkspaceSnapshot,
                            section_keys: Sequence[str],
                            config: PromptConfig = DEFAULT_PROMPT_CONFIG) -> str:
    template = load_template("generation")

    def render(excerpt: Optional[int]) -> str:
        return template.format(
            workspace=serialize_workspace_text(
                cur_ws, SerializeConfig(body_excerpt_chars=excerpt),
                validate=False).strip(),
            section_list=section_list_line(section_keys))

    return _fit_to_budget(render, config)


def build_plan_repair_prompt(original_prompt: str, previous_output: str) -> str:
    return load_template("repair_plan").format(
        original_prompt=original_prompt, previous_output=previous_output)


def build_report_repair_prompt(original_prompt: str, previous_output: str,
                               problem: str, section_keys: Sequence[str]) -> str:
    return load_template("repair_report").format(
        original_prompt=original_prompt, previous_output=previous_output,
        problem=problem, paragraph_count=len(section_keys),
        section_list=section_list_line(section_keys))


def sanctioned_new_sections(prev_report: StructuredReport,
                            si: InteractionSet) -> frozenset[str]:
    """Cluster sections a plan may introduce: one per ClusterCreated."""
    from ..diffing import InteractionKind

    created = {i.subject_id for i in si.interactions
               if i.kind is InteractionKind.CLUSTER_CREATED}
    existing = set(prev_report.section_keys())
    return frozenset(cluster_section(cid) for cid in created) - existing
