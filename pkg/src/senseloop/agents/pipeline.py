"""The analyze-then-refine orchestration, plus the two comparison methods.

Three methods share one entry point:

* baseline  - regenerate the whole report from the current workspace.
* vis       - refine directly from the interaction set, no analysis phase.
* visreact  - diff, analyze (intent + plan), then scoped refinement.

An empty interaction set short-circuits every method: the previous report is
returned untouched and the model is never invoked.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from ..diffing import InteractionSet, diff_workspaces
from ..errors import (ModelTransportError, PipelineError, PlanParseError,
                      ReportStructureError, RefinementFormatError)
from ..report import parse_report
from ..types import Document, StructuredReport, WorkspaceSnapshot
from .client import ModelClient
from .planning import PlannedEdit, parse_analysis_output, validate_plan
from .prompts import (DEFAULT_PROMPT_CONFIG, PromptConfig,
                      build_analysis_prompt, build_generation_prompt,
                      build_plan_repair_prompt, build_refinement_prompt,
                      build_report_repair_prompt, build_si_refinement_prompt,
                      generation_section_order, refined_section_order,
                      sanctioned_new_sections)

logger = logging.getLogger(__name__)


class MethodKind(str, Enum):
    BASELINE = "baseline"
    VIS_ONLY = "vis"
    VIS_REACT = "visreact"

    @classmethod
    def parse(cls, name: str) -> "MethodKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown method {name!r}; expected one of: {valid}")


@dataclass(frozen=True)
class AnalysisResult:
    intent_inference: str
    refinement_plan: tuple[PlannedEdit, ...]
    raw_model_output: str


@dataclass(frozen=True)
class RefineResult:
    report: StructuredReport
    analysis: Optional[AnalysisResult]
    interactions: InteractionSet


def _complete(client: ModelClient, prompt: str) -> str:
    """One model call with the client's transport retry budget."""
    retries = max(0, int(getattr(client, "retries", 0)))
    last: Optional[ModelTransportError] = None
    for attempt in range(retries + 1):
        try:
            return client.complete(prompt)
        except ModelTransportError as exc:
            last = exc
            logger.warning("model call failed (attempt %d/%d): %s",
                           attempt + 1, retries + 1, exc)
    raise PipelineError(f"model transport failed after {retries + 1} attempts: {last}") from last


def run_analysis(client: ModelClient, prompt: str, *,
                 known_sections, sanctioned_new=frozenset()) -> AnalysisResult:
    """Call the analysis agent and parse its intent + plan.

    An unparseable reply gets exactly one repair re-ask before PlanParseError
    propagates; a plan referencing an unknown section raises
    PlanValidationError without a re-ask (the model followed the format but
    not the contract).
    """
    raw = _complete(client, prompt)
    try:
        intent, edits = parse_analysis_output(raw)
    except PlanParseError as first_error:
        logger.info("analysis output unparseable, asking for repair: %s", first_error)
        raw = _complete(client, build_plan_repair_prompt(prompt, raw))
        intent, edits = parse_analysis_output(raw)
    validate_plan(edits, known_sections, sanctioned_new)
    return AnalysisResult(intent_inference=intent, refinement_plan=edits,
                          raw_model_output=raw)


def _complete_report(client: ModelClient, prompt: str, section_keys,
                     report_id: str) -> StructuredReport:
    raw = _complete(client, prompt)
    try:
        return parse_report(raw, section_keys, report_id=report_id)
    except ReportStructureError as first_error:
        logger.info("refinement output malformed, asking for repair: %s", first_error)
        repair = build_report_repair_prompt(prompt, raw, str(first_error), section_keys)
        raw = _complete(client, repair)
        try:
            return parse_report(raw, section_keys, report_id=report_id)
        except ReportStructureError as exc:
            raise RefinementFormatError(
                f"refinement output still malformed after repair: {exc}") from exc


def run_refinement(client: ModelClient, prompt: str,
                   prev_report: Optional[StructuredReport], *,
                   section_keys, report_id: str,
                   plan: Optional[tuple[PlannedEdit, ...]] = None) -> StructuredReport:
    """Call the refinement agent, parse, and mechanically enforce plan scope.

    When a plan is present, sections that exist in both reports but were not
    planned are reverted to the previous text if the model touched them; the
    reversion is logged, not an error.
    """
    report = _complete_report(client, prompt, section_keys, report_id)
    if plan is None or prev_report is None:
        return report
    planned = {edit.target_section for edit in plan}
    reverted = []
    patched = []
    for paragraph in report.paragraphs():
        prev_paragraph = prev_report.paragraph(paragraph.section_key)
        if (paragraph.section_key not in planned and prev_paragraph is not None
                and paragraph.sentences != prev_paragraph.sentences):
            reverted.append(paragraph.section_key)
            patched.append(prev_paragraph)
        else:
            patched.append(paragraph)
    if not reverted:
        return report
    logger.warning("reverted out-of-scope edits in sections: %s", reverted)
    from ..types import make_report

    return make_report(report.report_id, patched)


def refine(client: ModelClient, method: MethodKind,
           prev_ws: WorkspaceSnapshot, cur_ws: WorkspaceSnapshot,
           prev_report: StructuredReport, *,
           corpus: Optional[Mapping[str, Document]] = None,
           prompt_config: PromptConfig = DEFAULT_PROMPT_CONFIG,
           report_id: Optional[str] = None) -> RefineResult:
    """Run one refinement iteration and return the new report.

    The interaction set is always computed first; when it is empty the
    previous report is returned as-is for every method and no model call
    happens.
    """
    si = diff_workspaces(prev_ws, cur_ws, corpus=corpus)
    if not si.interactions:
        return RefineResult(report=prev_report, analysis=None, interactions=si)
    if report_id is None:
        report_id = f"report-{cur_ws.snapshot_id}"

    if method is MethodKind.BASELINE:
        section_keys = generation_section_order(cur_ws)
        prompt = build_generation_prompt(cur_ws, section_keys, prompt_config)
        report = _complete_report(client, prompt, section_keys, report_id)
        return RefineResult(report=report, analysis=None, interactions=si)

    section_keys = refined_section_order(prev_report, cur_ws)

    if method is MethodKind.VIS_ONLY:
        prompt = build_si_refinement_prompt(prev_report, si, section_keys,
                                            prompt_config)
        report = run_refinement(client, prompt, prev_report,
                                section_keys=section_keys, report_id=report_id)
        return RefineResult(report=report, analysis=None, interactions=si)

    if method is not MethodKind.VIS_REACT:
        raise ValueError(f"unsupported method: {method}")

    analysis_prompt = build_analysis_prompt(prev_report, si, cur_ws, prompt_config)
    analysis = run_analysis(
        client, analysis_prompt,
        known_sections=set(prev_report.section_keys()),
        sanctioned_new=sanctioned_new_sections(prev_report, si))
    refinement_prompt = build_refinement_prompt(
        cur_ws, prev_report, analysis.refinement_plan, section_keys, prompt_config)
    report = run_refinement(client, refinement_prompt, prev_report,
                            section_keys=section_keys, report_id=report_id,
                            plan=analysis.refinement_plan)
    return RefineResult(report=report, analysis=analysis, interactions=si)
