"""Refinement plans: the machine-checkable contract between the two agents.

The analysis agent must emit its plan as a fenced, line-oriented block so
scope enforcement is mechanical rather than a matter of prompt compliance:

    EDIT <section_key> <action>: <instruction> [refs: id1,id2]
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Sequence

from ..errors import PlanParseError, PlanValidationError

ACTIONS = ("append", "modify", "remove_sentence", "rewrite_sentence")

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)
_EDIT_RE = re.compile(
    r"^EDIT\s+(?P<section>\S+)\s+(?P<action>[a-z_]+)\s*:\s*(?P<instruction>.+?)"
    r"(?:\s*\[refs:\s*(?P<refs>[^\]]*)\])?\s*$")


@dataclass(frozen=True)
class PlannedEdit:
    target_section: str
    action: str
    instruction: str
    evidence_refs: tuple[str, ...] = ()


def render_plan(edits: Sequence[PlannedEdit]) -> str:
    """The fenced block form, suitable for prompts and digests."""
    lines = []
    for e in edits:
        line = f"EDIT {e.target_section} {e.action}: {e.instruction}"
        if e.evidence_refs:
            line += f" [refs: {','.join(e.evidence_refs)}]"
        lines.append(line)
    return "\n".join(lines)


def _parse_edit_line(line: str) -> PlannedEdit:
    m = _EDIT_RE.match(line.strip())
    if not m:
        raise PlanParseError(f"unparseable plan line: {line!r}")
    action = m.group("action")
    if action not in ACTIONS:
        raise PlanParseError(f"unknown action {action!r} in plan line: {line!r}")
    instruction = m.group("instruction").strip()
    if not instruction:
        raise PlanParseError(f"empty instruction in plan line: {line!r}")
    refs = tuple(r.strip() for r in (m.group("refs") or "").split(",") if r.strip())
    return PlannedEdit(target_section=m.group("section"), action=action,
                       instruction=instruction, evidence_refs=refs)


def parse_analysis_output(raw: str) -> tuple[str, tuple[PlannedEdit, ...]]:
    """Split model output into intent text and a parsed plan.

    The plan is taken from the last fenced block that contains EDIT lines;
    if the model forgot the fence, bare EDIT lines after PLAN: are accepted.
    """
    intent_match = re.search(r"INTENT:\s*(.*?)(?:\n\s*PLAN:|\Z)", raw, re.DOTALL)
    intent = intent_match.group(1).strip() if intent_match else ""
    if not intent:
        raise PlanParseError("analysis output is missing a non-empty INTENT: section")

    edit_lines: list[str] = []
    for block in _FENCE_RE.findall(raw):
        lines = [ln for ln in block.splitlines() if ln.strip().startswith("EDIT ")]
        if lines:
            edit_lines = lines
    if not edit_lines:
        after_plan = raw.split("PLAN:", 1)
        if len(after_plan) == 2:
            edit_lines = [ln for ln in after_plan[1].splitlines()
                          if ln.strip().startswith("EDIT ")]
    if not edit_lines:
        raise PlanParseError("analysis output contains no EDIT lines")
    return intent, tuple(_parse_edit_line(ln) for ln in edit_lines)


def validate_plan(edits: Iterable[PlannedEdit],
                  known_sections: AbstractSet[str],
                  sanctioned_new_sections: AbstractSet[str] = frozenset()) -> None:
    """Every target must be a known section or a sanctioned new cluster section."""
    allowed = set(known_sections) | set(sanctioned_new_sections)
    for edit in edits:
        if edit.target_section not in allowed:
            raise PlanValidationError(
                f"plan targets unknown section {edit.target_section!r}; "
                f"allowed: {sorted(allowed)}")
