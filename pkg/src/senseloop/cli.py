"""Batch command-line entry points.

Exit codes: 0 success, 2 validation/schema problems (argparse uses 2 for bad
flags as well), 3 pipeline or model-transport failures. All outputs are
deterministic under mock clients and fixed seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agents.client import HttpModelClient, ModelConfig
from .agents.mock import ARCHETYPES, mock_model
from .agents.pipeline import MethodKind, refine
from .agents.planning import render_plan
from .diffing import diff_workspaces, interaction_set_to_dict
from .errors import (DiffError, PipelineError, SchemaError, SenseloopError,
                     SnapshotValidationError, ModelTransportError)
from .evaluation.pairs import generate_pairs, load_pairs, save_pairs
from .evaluation.report_diff import diff_reports, report_diff_to_dict
from .evaluation.runner import (format_aggregate_table, mock_clients_for,
                                run_experiment, write_results_csv)
from .storage import (dump_json, load_corpus, load_report, load_snapshot,
                      save_json, report_to_dict)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PIPELINE = 3


def _client_from_spec(spec: str, methods: list[MethodKind], seed: int):
    if spec == "http":
        return HttpModelClient(ModelConfig.from_env())
    if spec == "mock":
        return mock_clients_for(methods, seed)
    if spec.startswith("mock:"):
        archetype = spec.split(":", 1)[1]
        if archetype not in ARCHETYPES:
            raise SchemaError(f"unknown mock archetype {archetype!r}; "
                              f"choose from {', '.join(ARCHETYPES)}")
        return mock_model(archetype, seed)
    raise SchemaError(f"unknown client spec {spec!r}; use http, mock, or mock:<archetype>")


def _parse_methods(raw: str) -> list[MethodKind]:
    return [MethodKind.parse(m) for m in raw.split(",") if m.strip()]


def cmd_diff(args: argparse.Namespace) -> int:
    prev = load_snapshot(Path(args.prev))
    cur = load_snapshot(Path(args.cur))
    si = diff_workspaces(prev, cur)
    sys.stdout.write(dump_json(interaction_set_to_dict(si)))
    return EXIT_OK


def cmd_refine(args: argparse.Namespace) -> int:
    prev_ws = load_snapshot(Path(args.prev_ws))
    cur_ws = load_snapshot(Path(args.cur_ws))
    prev_report = load_report(Path(args.prev_report))
    method = MethodKind.parse(args.method)
    client = _client_from_spec(args.client, [method], args.seed)
    if isinstance(client, dict):
        client = client[method]
    result = refine(client, method, prev_ws, cur_ws, prev_report)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_json(out / "report.json", report_to_dict(result.report))
    save_json(out / "interactions.json", interaction_set_to_dict(result.interactions))
    rd = diff_reports(prev_report, result.report)
    save_json(out / "report_diff.json", report_diff_to_dict(rd))
    if result.analysis is not None:
        save_json(out / "analysis.json", {
            "intent_inference": result.analysis.intent_inference,
            "refinement_plan": render_plan(result.analysis.refinement_plan),
            "raw_model_output": result.analysis.raw_model_output,
        })
    edited = ", ".join(sorted(rd.edited_sections)) or "(none)"
    print(f"interactions: {len(result.interactions)}  edited sections: {edited}")
    print(f"wrote {out}/report.json")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    pairs = load_pairs(Path(args.pairs))
    methods = _parse_methods(args.methods)
    client = _client_from_spec(args.client, methods, args.seed)
    results = run_experiment(pairs, methods, client, shuffle_seed=args.seed,
                             workers=args.workers)
    write_results_csv(results, Path(args.out))
    print(format_aggregate_table(results))
    print(f"wrote {args.out}")
    if results.failures:
        for failure in results.failures:
            print(f"FAILED {failure.method.value}/{failure.pair_id}: {failure.error}",
                  file=sys.stderr)
        if not results.rows:
            return EXIT_PIPELINE
    return EXIT_OK


def cmd_genpairs(args: argparse.Namespace) -> int:
    corpus = load_corpus(Path(args.corpus))
    pairs = generate_pairs(corpus, seed=args.seed)
    save_pairs(Path(args.out), pairs)
    print(f"wrote {len(pairs)} pairs to {args.out}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig.from_file(args.config)
    serve(config)
    return EXIT_OK


def cmd_timeline_export(args: argparse.Namespace) -> int:
    from .timeline import TimelineStore

    store = TimelineStore(Path(args.data_dir) / "timelines")
    sys.stdout.write(store.export(args.session, format=args.format))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="senseloop",
        description="Semantic-interaction driven, targeted report refinement.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diff", help="compute the interaction set between two snapshots")
    p.add_argument("--prev", required=True, help="previous snapshot JSON file")
    p.add_argument("--cur", required=True, help="current snapshot JSON file")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("refine", help="run one refinement from snapshot files")
    p.add_argument("--prev-ws", required=True, help="previous snapshot JSON file")
    p.add_argument("--cur-ws", required=True, help="current snapshot JSON file")
    p.add_argument("--prev-report", required=True, help="previous report JSON file")
    p.add_argument("--method", default=MethodKind.VIS_REACT.value,
                   help="baseline, vis, or visreact")
    p.add_argument("--client", default="mock",
                   help="http, mock, or mock:<archetype>")
    p.add_argument("--seed", type=int, default=0, help="seed for mock clients")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("eval", help="evaluate methods over an experiment pair suite")
    p.add_argument("--pairs", required=True, help="directory of *.pair.json files")
    p.add_argument("--methods", default="baseline,vis,visreact",
                   help="comma-separated method list")
    p.add_argument("--client", default="mock",
                   help="http, mock (auto archetypes), or mock:<archetype>")
    p.add_argument("--seed", type=int, default=0, help="shuffle/mock seed")
    p.add_argument("--workers", type=int, default=1, help="parallel pair workers")
    p.add_argument("--out", required=True, help="results CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("genpairs", help="generate an experiment pair suite from a corpus")
    p.add_argument("--corpus", required=True,
                   help="directory of .txt documents (stem=doc id, first line=title)")
    p.add_argument("--seed", type=int, default=0, help="generation seed")
    p.add_argument("--out", required=True, help="output directory for pair files")
    p.set_defaults(func=cmd_genpairs)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True, help="service config JSON file")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("timeline", help="timeline utilities")
    tsub = p.add_subparsers(dest="timeline_command", required=True)
    pe = tsub.add_parser("export", help="export one session's timeline")
    pe.add_argument("--session", required=True, help="session id")
    pe.add_argument("--format", choices=("text", "structured"), default="text",
                    help="output format")
    pe.add_argument("--data-dir", required=True, help="service data directory")
    pe.set_defaults(func=cmd_timeline_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, SnapshotValidationError, DiffError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PipelineError, ModelTransportError) as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except SenseloopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
