"""Targeted-refinement (P1) and semantic-fidelity (P2) scores.

P1 works at paragraph level: a correctly refined section is one that was
edited and should have been. P2 works at sentence level: edited sentences
should carry relevance keys, and each interaction should surface in at least
one edited sentence. When nothing was edited and nothing was expected, both
precision and recall are 1 so a correct no-op is not penalized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Sequence

from ..diffing import InteractionSet, count_differing_objects
from ..types import StructuredReport, cluster_section
from .keys import sentence_matches_any
from .report_diff import ReportDiff


@dataclass(frozen=True)
class P1Scores:
    n_tpp: int
    n_pp: int
    n_tp: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class P2Scores:
    n_tps: int
    n_s: int
    n_rsi: int
    n_si: int
    precision: float
    recall: float
    f1: float


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 1.0


def f1(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both components are 0."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def expected_refined_sections(si: InteractionSet,
                              report: StructuredReport) -> frozenset[str]:
    """Sections that should change: every affected cluster paragraph, plus the
    summary and conclusion whenever any interaction happened at all."""
    if not si.interactions:
        return frozenset()
    expected = {report.summary.section_key, report.conclusion.section_key}
    for interaction in si.interactions:
        for cid in interaction.affected_cluster_ids:
            expected.add(cluster_section(cid))
    return frozenset(expected)


def score_p1(report_diff: ReportDiff, expected: AbstractSet[str]) -> P1Scores:
    n_pp = len(report_diff.edited_sections)
    n_tp = len(expected)
    n_tpp = len(report_diff.edited_sections & set(expected))
    precision = _ratio(n_tpp, n_pp)
    recall = _ratio(n_tpp, n_tp)
    return P1Scores(n_tpp=n_tpp, n_pp=n_pp, n_tp=n_tp,
                    precision=precision, recall=recall,
                    f1=f1(precision, recall))


def score_p2(report_diff: ReportDiff, si: InteractionSet,
             keys: Sequence[AbstractSet[str]]) -> P2Scores:
    """Sentence-level fidelity.

    keys holds one key set per interaction, aligned with si.interactions
    (see interaction_key_sets); recall needs the per-interaction attribution.
    """
    if len(keys) != len(si.interactions):
        raise ValueError("keys must align 1:1 with si.interactions")
    all_keys: set[str] = set()
    for key_set in keys:
        all_keys |= key_set

    n_s = len(report_diff.edited_sentences)
    edited_texts = [e.text for e in report_diff.edited_sentences]
    n_tps = sum(1 for text in edited_texts if sentence_matches_any(text, all_keys))

    n_si = count_differing_objects(si)
    realized = 0
    for key_set in keys:
        if key_set and any(sentence_matches_any(text, key_set) for text in edited_texts):
            realized += 1
    n_rsi = realized

    precision = _ratio(n_tps, n_s)
    recall = _ratio(n_rsi, n_si)
    return P2Scores(n_tps=n_tps, n_s=n_s, n_rsi=n_rsi, n_si=n_si,
                    precision=precision, recall=recall,
                    f1=f1(precision, recall))
