"""Evaluation harness: report diffing, targeted-refinement and semantic-fidelity
metrics, relevance-key extraction, pair generation, and the experiment runner."""

from .report_diff import ReportDiff, SentenceEdit, diff_reports
from .keys import extract_relevance_keys, interaction_key_sets
from .metrics import (P1Scores, P2Scores, expected_refined_sections, f1,
                      score_p1, score_p2)
from .pairs import ExperimentPair, generate_pairs, synthetic_corpus
from .runner import ExperimentResults, MethodAggregate, PairResult, run_experiment, write_results_csv

__all__ = [
    "ReportDiff", "SentenceEdit", "diff_reports",
    "extract_relevance_keys", "interaction_key_sets",
    "P1Scores", "P2Scores", "expected_refined_sections", "f1",
    "score_p1", "score_p2",
    "ExperimentPair", "generate_pairs", "synthetic_corpus",
    "ExperimentResults", "MethodAggregate", "PairResult",
    "run_experiment", "write_results_csv",
]
