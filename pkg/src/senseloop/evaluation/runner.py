"""Batch evaluation over experiment pairs, with micro-averaged aggregates."""

from __future__ import annotations

import csv
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence, Union

from ..agents.client import ModelClient
from ..agents.mock import mock_model
from ..agents.pipeline import MethodKind, refine
from ..agents.prompts import DEFAULT_PROMPT_CONFIG, PromptConfig
from ..errors import SenseloopError
from .keys import interaction_key_sets
from .metrics import P1Scores, P2Scores, expected_refined_sections, f1, score_p1, score_p2
from .pairs import ExperimentPair
from .report_diff import diff_reports

logger = logging.getLogger(__name__)

CSV_HEADER = ("method,pair_id,n_tpp,n_pp,n_tp,n_tps,n_s,n_rsi,n_si,"
              "p1_p,p1_r,p1_f1,p2_p,p2_r,p2_f1")

# Which mock archetype stands in for each method when the caller asks for
# auto-mocking ("mock" without an explicit archetype).
METHOD_ARCHETYPES: dict[MethodKind, str] = {
    MethodKind.BASELINE: "baseline-rewriter",
    MethodKind.VIS_ONLY: "visonly-editor",
    MethodKind.VIS_REACT: "targeted-editor",
}

ClientSpec = Union[ModelClient, Mapping[MethodKind, ModelClient],
                   Callable[[MethodKind], ModelClient]]


@dataclass(frozen=True)
class PairResult:
    method: MethodKind
    pair_id: str
    p1: P1Scores
    p2: P2Scores


@dataclass(frozen=True)
class PairFailure:
    method: MethodKind
    pair_id: str
    error: str


@dataclass(frozen=True)
class MethodAggregate:
    method: MethodKind
    pairs_scored: int
    pairs_failed: int
    p1: P1Scores
    p2: P2Scores


@dataclass(frozen=True)
class ExperimentResults:
    rows: tuple[PairResult, ...]
    failures: tuple[PairFailure, ...]
    aggregates: tuple[MethodAggregate, ...]


def mock_clients_for(methods: Sequence[MethodKind], seed: int = 0
                     ) -> dict[MethodKind, ModelClient]:
    return {m: mock_model(METHOD_ARCHETYPES[m], seed) for m in methods}


def _resolve_client(spec: ClientSpec, method: MethodKind) -> ModelClient:
    if isinstance(spec, Mapping):
        return spec[method]
    if callable(spec) and not hasattr(spec, "complete"):
        return spec(method)
    return spec  # a single client used for every method


def evaluate_pair(pair: ExperimentPair, method: MethodKind,
                  client: ModelClient,
                  prompt_config: PromptConfig = DEFAULT_PROMPT_CONFIG) -> PairResult:
    result = refine(client, method, pair.prev_ws, pair.cur_ws, pair.prev_report,
                    prompt_config=prompt_config)
    report_diff = diff_reports(pair.prev_report, result.report)
    expected = expected_refined_sections(result.interactions, pair.prev_report)
    p1 = score_p1(report_diff, expected)
    p2 = score_p2(report_diff, result.interactions,
                  interaction_key_sets(result.interactions, pair.cur_ws))
    return PairResult(method=method, pair_id=pair.pair_id, p1=p1, p2=p2)


def _aggregate(method: MethodKind, rows: Sequence[PairResult],
               failed: int) -> MethodAggregate:
    def ratio(num: int, den: int) -> float:
        return num / den if den else 1.0

    n_tpp = sum(r.p1.n_tpp for r in rows)
    n_pp = sum(r.p1.n_pp for r in rows)
    n_tp = sum(r.p1.n_tp for r in rows)
    p1_p, p1_r = ratio(n_tpp, n_pp), ratio(n_tpp, n_tp)
    n_tps = sum(r.p2.n_tps for r in rows)
    n_s = sum(r.p2.n_s for r in rows)
    n_rsi = sum(r.p2.n_rsi for r in rows)
    n_si = sum(r.p2.n_si for r in rows)
    p2_p, p2_r = ratio(n_tps, n_s), ratio(n_rsi, n_si)
    return MethodAggregate(
        method=method, pairs_scored=len(rows), pairs_failed=failed,
        p1=P1Scores(n_tpp, n_pp, n_tp, p1_p, p1_r, f1(p1_p, p1_r)),
        p2=P2Scores(n_tps, n_s, n_rsi, n_si, p2_p, p2_r, f1(p2_p, p2_r)))


def run_experiment(pairs: Sequence[ExperimentPair],
                   methods: Sequence[MethodKind],
                   client: ClientSpec,
                   shuffle_seed: int = 0,
                   workers: int = 1,
                   prompt_config: PromptConfig = DEFAULT_PROMPT_CONFIG) -> ExperimentResults:
    """Evaluate every (pair, method); aggregation is order-independent.

    The shuffle seed only permutes execution order. Failed pairs are recorded
    and excluded from the aggregates.
    """
    order = list(pairs)
    random.Random(shuffle_seed).shuffle(order)

    tasks = [(method, pair) for method in methods for pair in order]

    def run_one(task):
        method, pair = task
        try:
            return evaluate_pair(pair, method, _resolve_client(client, method),
                                 prompt_config)
        except SenseloopError as exc:
            logger.warning("pair %s failed under %s: %s", pair.pair_id, method.value, exc)
            return PairFailure(method=method, pair_id=pair.pair_id, error=str(exc))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_one, tasks))
    else:
        outcomes = [run_one(t) for t in tasks]

    rows = tuple(o for o in outcomes if isinstance(o, PairResult))
    failures = tuple(o for o in outcomes if isinstance(o, PairFailure))
    aggregates = tuple(
        _aggregate(method,
                   [r for r in rows if r.method is method],
                   sum(1 for fl in failures if fl.method is method))
        for method in methods)
    return ExperimentResults(rows=rows, failures=failures, aggregates=aggregates)


def write_results_csv(results: ExperimentResults, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for r in sorted(results.rows, key=lambda r: (r.method.value, r.pair_id)):
            writer.writerow([
                r.method.value, r.pair_id,
                r.p1.n_tpp, r.p1.n_pp, r.p1.n_tp,
                r.p2.n_tps, r.p2.n_s, r.p2.n_rsi, r.p2.n_si,
                f"{r.p1.precision:.6f}", f"{r.p1.recall:.6f}", f"{r.p1.f1:.6f}",
                f"{r.p2.precision:.6f}", f"{r.p2.recall:.6f}", f"{r.p2.f1:.6f}",
            ])


def format_aggregate_table(results: ExperimentResults) -> str:
    """A small fixed-width table of per-method precision/recall/F1."""
    lines = [f"{'method':<10} {'P1-P':>7} {'P1-R':>7} {'P1-F1':>7} "
             f"{'P2-P':>7} {'P2-R':>7} {'P2-F1':>7} {'pairs':>6} {'failed':>6}"]
    for agg in results.aggregates:
        lines.append(
            f"{agg.method.value:<10} {agg.p1.precision:>7.3f} {agg.p1.recall:>7.3f} "
            f"{agg.p1.f1:>7.3f} {agg.p2.precision:>7.3f} {agg.p2.recall:>7.3f} "
            f"{agg.p2.f1:>7.3f} {agg.pairs_scored:>6} {agg.pairs_failed:>6}")
    return "\n".join(lines)
