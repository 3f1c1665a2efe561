"""HTTP service exposing corpora, sessions, refinement, and timelines.

State is a per-session directory of plain files (snapshots, reports, staged
snapshot, timeline log): restart recovery is just re-reading the directory.
Within a session, a single non-blocking writer lock guards the
stage-commit-refine path; a second refine while one is in flight gets 409.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from fastapi import Body, FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse

from .agents.client import HttpModelClient, ModelClient, ModelConfig
from .agents.mock import ARCHETYPES, mock_model
from .agents.pipeline import MethodKind, RefineResult, refine
from .agents.prompts import PromptConfig
from .diffing import interaction_set_to_dict, interaction_summary
from .errors import (DiffError, ModelTransportError, PipelineError,
                     SchemaError, SenseloopError)
from .evaluation.pairs import load_pairs
from .evaluation.report_diff import diff_reports, report_diff_to_dict
from .evaluation.runner import (format_aggregate_table, run_experiment,
                                write_results_csv)
from .agents.planning import render_plan
from .report import draft_report
from .storage import (load_json, parse_corpus_file, report_from_dict,
                      report_to_dict, save_json, snapshot_from_dict,
                      snapshot_to_dict)
from .timeline import TimelineEntry, TimelineStore, utc_now
from .types import Document, StructuredReport, WorkspaceSnapshot
from .validation import validate_snapshot

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path
    host: str = "127.0.0.1"
    port: int = 8040
    client: str = "mock"  # "mock", "mock:<archetype>", or "http"
    default_method: str = MethodKind.VIS_REACT.value
    model: ModelConfig = field(default_factory=ModelConfig.from_env)
    token_budget: int = 24000
    static_dir: Optional[Path] = None  # serve the built browser UI from here

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        model = ModelConfig.from_env(**raw.get("model", {}))
        static_dir = raw.get("static_dir")
        return cls(data_dir=Path(raw["data_dir"]),
                   host=raw.get("host", cls.host),
                   port=int(raw.get("port", cls.port)),
                   client=raw.get("client", cls.client),
                   default_method=raw.get("default_method", cls.default_method),
                   model=model,
                   token_budget=int(raw.get("token_budget", cls.token_budget)),
                   static_dir=Path(static_dir) if static_dir else None)


class SessionStore:
    """File layout: corpora/<cid>/*.txt, sessions/<sid>/{snapshots,reports}/NNNNNN.json."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.timelines = TimelineStore(self.data_dir / "timelines")

    # -- corpora -------------------------------------------------------------

    def corpus_dir(self, corpus_id: str) -> Path:
        return self.data_dir / "corpora" / corpus_id

    def create_corpus(self, files: list[tuple[str, str]]) -> str:
        corpus_id = "corpus-" + uuid.uuid4().hex[:10]
        directory = self.corpus_dir(corpus_id)
        directory.mkdir(parents=True, exist_ok=False)
        for filename, content in files:
            doc_id = Path(filename).stem
            parse_corpus_file(doc_id, content)  # raises SchemaError when empty
            (directory / f"{doc_id}.txt").write_text(content, encoding="utf-8")
        return corpus_id

    def load_corpus(self, corpus_id: str) -> dict[str, Document]:
        from .storage import load_corpus

        return load_corpus(self.corpus_dir(corpus_id))

    # -- sessions --------------------------------------------------------------

    def session_dir(self, session_id: str) -> Path:
        return self.data_dir / "sessions" / session_id

    def session_exists(self, session_id: str) -> bool:
        return (self.session_dir(session_id) / "session.json").exists()

    def create_session(self, corpus_id: str, default_method: str
                       ) -> tuple[str, WorkspaceSnapshot, StructuredReport]:
        session_id = "session-" + uuid.uuid4().hex[:10]
        sdir = self.session_dir(session_id)
        (sdir / "snapshots").mkdir(parents=True)
        (sdir / "reports").mkdir(parents=True)
        save_json(sdir / "session.json", {
            "session_id": session_id, "corpus_id": corpus_id,
            "default_method": default_method, "created_at": utc_now(),
        })
        snapshot = WorkspaceSnapshot(snapshot_id=f"{session_id}-w0", sequence_index=0)
        report = draft_report(snapshot, f"{session_id}-r0")
        self._write_pair(session_id, 0, snapshot, report)
        return session_id, snapshot, report

    def session_meta(self, session_id: str) -> dict:
        return load_json(self.session_dir(session_id) / "session.json")

    def _snapshot_path(self, session_id: str, n: int) -> Path:
        return self.session_dir(session_id) / "snapshots" / f"{n:06d}.json"

    def _report_path(self, session_id: str, n: int) -> Path:
        return self.session_dir(session_id) / "reports" / f"{n:06d}.json"

    def committed_count(self, session_id: str) -> int:
        """Contiguous snapshot/report pairs; the snapshot file seals a commit."""
        n = 0
        while (self._snapshot_path(session_id, n).exists()
               and self._report_path(session_id, n).exists()):
            n += 1
        return n

    def load_snapshot(self, session_id: str, n: int) -> WorkspaceSnapshot:
        return snapshot_from_dict(load_json(self._snapshot_path(session_id, n)))

    def load_report(self, session_id: str, n: int) -> StructuredReport:
        return report_from_dict(load_json(self._report_path(session_id, n)))

    def _write_pair(self, session_id: str, n: int,
                    snapshot: WorkspaceSnapshot, report: StructuredReport) -> None:
        # Report first: a crash in between leaves an orphan report that
        # committed_count ignores, never a snapshot without its report.
        save_json(self._report_path(session_id, n), report_to_dict(report))
        save_json(self._snapshot_path(session_id, n), snapshot_to_dict(snapshot))

    # -- staging ---------------------------------------------------------------

    def _staged_path(self, session_id: str) -> Path:
        return self.session_dir(session_id) / "staged.json"

    def stage(self, session_id: str, snapshot: WorkspaceSnapshot) -> None:
        save_json(self._staged_path(session_id), snapshot_to_dict(snapshot))

    def staged(self, session_id: str) -> Optional[WorkspaceSnapshot]:
        path = self._staged_path(session_id)
        if not path.exists():
            return None
        return snapshot_from_dict(load_json(path))

    def clear_staged(self, session_id: str) -> None:
        path = self._staged_path(session_id)
        if path.exists():
            path.unlink()

    def commit(self, session_id: str, snapshot: WorkspaceSnapshot,
               report: StructuredReport) -> int:
        n = self.committed_count(session_id)
        self._write_pair(session_id, n, snapshot, report)
        self.clear_staged(session_id)
        return n


def build_client(config: ServiceConfig) -> ModelClient | dict[MethodKind, ModelClient]:
    spec = config.client
    if spec == "http":
        return HttpModelClient(config.model)
    if spec == "mock":
        from .evaluation.runner import METHOD_ARCHETYPES

        return {m: mock_model(a) for m, a in METHOD_ARCHETYPES.items()}
    if spec.startswith("mock:"):
        archetype = spec.split(":", 1)[1]
        if archetype not in ARCHETYPES:
            raise ValueError(f"unknown mock archetype {archetype!r}")
        return mock_model(archetype)
    raise ValueError(f"unknown client spec {spec!r}")


def _client_for(client, method: MethodKind) -> ModelClient:
    if isinstance(client, Mapping):
        return client[method]
    return client


def _error_json(status: int, error: str, **extra: Any) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": error, **extra})


def create_app(config: ServiceConfig,
               client: ModelClient | Mapping[MethodKind, ModelClient] | None = None
               ) -> FastAPI:
    store = SessionStore(config.data_dir)
    config.data_dir.mkdir(parents=True, exist_ok=True)
    resolved_client = client if client is not None else build_client(config)
    prompt_config = PromptConfig(token_budget=config.token_budget)
    locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    app = FastAPI(title="senseloop", version="0.1.0")

    def session_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(session_id, threading.Lock())

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        response = await call_next(request)
        logger.info("%s %s -> %d", request.method, request.url.path,
                    response.status_code)
        return response

    @app.post("/corpora")
    async def create_corpus(files: list[UploadFile]):
        contents = []
        for f in files:
            contents.append((f.filename or "doc.txt",
                             (await f.read()).decode("utf-8")))
        try:
            corpus_id = store.create_corpus(contents)
        except SchemaError as exc:
            return _error_json(422, "invalid-corpus", detail=str(exc))
        return {"corpus_id": corpus_id, "doc_count": len(contents)}

    @app.get("/corpora/{corpus_id}")
    def get_corpus(corpus_id: str):
        try:
            corpus = store.load_corpus(corpus_id)
        except SchemaError:
            return _error_json(404, "unknown-corpus")
        return {"corpus_id": corpus_id,
                "documents": [{"doc_id": d.doc_id, "title": d.title, "body": d.body}
                              for d in corpus.values()]}

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.json()
        corpus_id = body.get("corpus_id", "")
        if not store.corpus_dir(corpus_id).is_dir():
            return _error_json(404, "unknown-corpus")
        method = body.get("method", config.default_method)
        try:
            MethodKind.parse(method)
        except ValueError as exc:
            return _error_json(422, "invalid-method", detail=str(exc))
        session_id, snapshot, report = store.create_session(corpus_id, method)
        return {"session_id": session_id,
                "snapshot": snapshot_to_dict(snapshot),
                "report": report_to_dict(report)}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        if not store.session_exists(session_id):
            return _error_json(404, "unknown-session")
        meta = store.session_meta(session_id)
        count = store.committed_count(session_id)
        return {**meta, "committed_snapshots": count,
                "staged": store.staged(session_id) is not None}

    @app.get("/sessions/{session_id}/workspace")
    def get_workspace(session_id: str):
        if not store.session_exists(session_id):
            return _error_json(404, "unknown-session")
        staged = store.staged(session_id)
        if staged is not None:
            return snapshot_to_dict(staged)
        last = store.committed_count(session_id) - 1
        return snapshot_to_dict(store.load_snapshot(session_id, last))

    @app.put("/sessions/{session_id}/workspace")
    def put_workspace(session_id: str, body: dict = Body(...)):
        if not store.session_exists(session_id):
            return _error_json(404, "unknown-session")
        try:
            snapshot = snapshot_from_dict(body)
        except SchemaError as exc:
            return _error_json(422, "schema", detail=str(exc))
        violations = validate_snapshot(snapshot)
        if violations:
            return _error_json(422, "invalid-snapshot", violations=[
                {"object_id": v.object_id, "rule": v.rule, "message": v.message}
                for v in violations])
        # Staging shares the session's single-writer lock so a refine in
        # flight never sees its staged snapshot swapped underneath it.
        lock = session_lock(session_id)
        if not lock.acquire(timeout=30.0):
            return _error_json(409, "refine-in-flight")
        try:
            store.stage(session_id, snapshot)
            next_index = store.committed_count(session_id)
        finally:
            lock.release()
        return {"staged": True, "sequence_index_on_commit": next_index}

    @app.post("/sessions/{session_id}/refine")
    def refine_session(session_id: str, payload: Optional[dict] = Body(default=None)):
        # Sync handler on purpose: it runs in the threadpool, so slow model
        # calls cannot stall the event loop and concurrent refines really race.
        if not store.session_exists(session_id):
            return _error_json(404, "unknown-session")
        body = payload or {}
        method_name = body.get("method") or store.session_meta(session_id)["default_method"]
        try:
            method = MethodKind.parse(method_name)
        except ValueError as exc:
            return _error_json(422, "invalid-method", detail=str(exc))

        lock = session_lock(session_id)
        if not lock.acquire(blocking=False):
            return _error_json(409, "refine-in-flight")
        try:
            return _do_refine(session_id, method)
        finally:
            lock.release()

    def _do_refine(session_id: str, method: MethodKind):
        from dataclasses import replace as _replace

        meta = store.session_meta(session_id)
        corpus = store.load_corpus(meta["corpus_id"])
        last = store.committed_count(session_id) - 1
        prev_ws = store.load_snapshot(session_id, last)
        prev_report = store.load_report(session_id, last)
        staged = store.staged(session_id)
        next_index = last + 1
        cur_ws = _replace(staged, sequence_index=next_index) if staged is not None else prev_ws

        try:
            result: RefineResult = refine(
                _client_for(resolved_client, method), method,
                prev_ws, cur_ws, prev_report,
                corpus=corpus, prompt_config=prompt_config,
                report_id=f"{session_id}-r{next_index}")
        except DiffError as exc:
            return _error_json(422, "corpus-mismatch", detail=str(exc))
        except (ModelTransportError, PipelineError) as exc:
            return _error_json(502, "pipeline-failure", detail=str(exc))

        committed = bool(result.interactions)
        sequence_index = last
        if committed:
            entry = TimelineEntry(
                iteration=next_index, timestamp=utc_now(),
                interaction_digest=interaction_summary(result.interactions),
                plan_digest=(render_plan(result.analysis.refinement_plan)
                             if result.analysis else ""),
                report_id=result.report.report_id,
                intent=(result.analysis.intent_inference
                        if method is MethodKind.VIS_REACT and result.analysis
                        else None))
            store.commit(session_id, cur_ws, result.report)
            store.timelines.append(session_id, entry)
            sequence_index = next_index

        report_diff = diff_reports(prev_report, result.report)
        return JSONResponse({
            "committed": committed,
            "sequence_index": sequence_index,
            "method": method.value,
            "report": report_to_dict(result.report),
            "analysis": ({
                "intent_inference": result.analysis.intent_inference,
                "refinement_plan": [
                    {"target_section": e.target_section, "action": e.action,
                     "instruction": e.instruction,
                     "evidence_refs": list(e.evidence_refs)}
                    for e in result.analysis.refinement_plan],
                "raw_model_output": result.analysis.raw_model_output,
            } if result.analysis else None),
            "report_diff": report_diff_to_dict(report_diff),
            "interaction_set": interaction_set_to_dict(result.interactions),
        })

    @app.get("/sessions/{session_id}/reports/{n}")
    def get_report(session_id: str, n: int):
        if not store.session_exists(session_id):
            return _error_json(404, "unknown-session")
        if not (0 <= n < store.committed_count(session_id)):
            return _error_json(404, "unknown-report")
        return report_to_dict(store.load_report(session_id, n))

    @app.get("/sessions/{session_id}/timeline")
    def get_timeline(session_id: str):
        if not store.session_exists(session_id):
            return _error_json(404, "unknown-session")
        return JSONResponse(json.loads(
            store.timelines.export(session_id, format="structured")))

    @app.post("/experiments")
    def run_experiments(body: dict = Body(...)):
        try:
            pairs = load_pairs(Path(body["pairs_dir"]))
        except (KeyError, SchemaError) as exc:
            return _error_json(422, "invalid-pairs", detail=str(exc))
        try:
            methods = [MethodKind.parse(m) for m in body.get(
                "methods", [m.value for m in MethodKind])]
        except ValueError as exc:
            return _error_json(422, "invalid-method", detail=str(exc))
        client_spec = body.get("client", "mock")
        exp_config = ServiceConfig(data_dir=config.data_dir, client=client_spec,
                                   model=config.model)
        try:
            exp_client = build_client(exp_config)
        except ValueError as exc:
            return _error_json(422, "invalid-client", detail=str(exc))
        results = run_experiment(pairs, methods, exp_client,
                                 shuffle_seed=int(body.get("seed", 0)),
                                 workers=int(body.get("workers", 1)),
                                 prompt_config=prompt_config)
        exp_id = "exp-" + uuid.uuid4().hex[:10]
        out_path = config.data_dir / "experiments" / exp_id / "results.csv"
        write_results_csv(results, out_path)
        return {"experiment_id": exp_id,
                "results_path": str(out_path),
                "pairs_failed": len(results.failures),
                "table": format_aggregate_table(results)}

    @app.exception_handler(SenseloopError)
    async def senseloop_error(request: Request, exc: SenseloopError):
        logger.exception("unhandled package error")
        return _error_json(500, "internal", detail=str(exc))

    if config.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="ui")

    app.state.store = store
    app.state.config = config
    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
