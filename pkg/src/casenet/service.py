"""HTTP API over models and running cases.

A single-process FastAPI app. The model directory is scanned once at
startup; every JSON file that parses and validates cleanly is compiled and
served under its file stem. Models uploaded over HTTP get an id derived
from their content hash. Case state lives in memory; steps on the same
case are serialized with a per-case lock, reads are lock-free.

The API adds no semantics of its own: every state change goes through
``Engine.apply_step``.
"""

from __future__ import annotations

import logging
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .compiler import CompileError, export_dot, model_hash
from .engine import CaseState, Engine, SchemaError, StaleOption, VersionMismatch
from .parsing import ParseError, parse_case_model
from .validation import validate_all

log = logging.getLogger(__name__)


class _State:
    def __init__(self) -> None:
        self.engines: dict[str, Engine] = {}
        self.cases: dict[str, CaseState] = {}
        self.case_model: dict[str, str] = {}
        self.locks: dict[str, threading.Lock] = {}

    def register(self, model_id: str, engine: Engine) -> None:
        self.engines[model_id] = engine

    def new_case(self, model_id: str) -> CaseState:
        engine = self.engines[model_id]
        cs = engine.create_case(uuid.uuid4().hex)
        self.cases[cs.case_id] = cs
        self.case_model[cs.case_id] = model_id
        self.locks[cs.case_id] = threading.Lock()
        return cs


def _scan_model_dir(state: _State, model_dir: Path) -> None:
    for path in sorted(model_dir.glob("*.json")):
        try:
            model = parse_case_model(path.read_text())
        except ParseError as exc:
            log.warning("skipping %s: %s", path.name, exc)
            continue
        violations = validate_all(model)
        if violations:
            log.warning("skipping %s: %d violation(s)", path.name, len(violations))
            continue
        try:
            state.register(path.stem, Engine(model))
        except CompileError as exc:
            log.warning("skipping %s: %s", path.name, exc)


def _model_summary(model_id: str, engine: Engine) -> dict:
    return {
        "id": model_id,
        "caseClass": engine.model.case_class,
        "classes": sorted(engine.model.classes),
        "fragments": [f.id for f in engine.model.fragments],
        "transitions": len(engine.net.transitions),
        "places": len(engine.net.places),
        "modelHash": engine.net.model_hash,
    }


def _case_summary(state: _State, case_id: str) -> dict:
    cs = state.cases[case_id]
    engine = state.engines[state.case_model[case_id]]
    return {
        "caseId": case_id,
        "modelId": state.case_model[case_id],
        "status": cs.status,
        "objects": [r.to_json() for r in engine.object_records(cs)],
        "associations": [list(pair) for pair in engine.associations(cs)],
        "steps": len(cs.step_log),
    }


def create_app(model_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="casenet")
    state = _State()
    app.state.casenet = state
    if model_dir is not None:
        _scan_model_dir(state, Path(model_dir))

    def not_found(kind: str, value: str) -> JSONResponse:
        return JSONResponse({"detail": f"unknown {kind} '{value}'"}, status_code=404)

    @app.get("/models")
    def list_models() -> dict:
        return {
            "models": [
                _model_summary(model_id, engine)
                for model_id, engine in sorted(state.engines.items())
            ]
        }

    @app.post("/models")
    async def upload_model(request: Request):
        try:
            document = await request.json()
        except Exception:
            return JSONResponse({"detail": "body is not JSON"}, status_code=422)
        try:
            model = parse_case_model(document)
        except ParseError as exc:
            return JSONResponse({"detail": str(exc), "violations": []}, status_code=422)
        violations = validate_all(model)
        if violations:
            return JSONResponse(
                {
                    "detail": f"{len(violations)} violation(s)",
                    "violations": [v.to_json() for v in violations],
                },
                status_code=422,
            )
        model_id = f"m-{model_hash(model)[:12]}"
        if model_id not in state.engines:
            state.register(model_id, Engine(model))
        return JSONResponse(_model_summary(model_id, state.engines[model_id]), status_code=201)

    @app.get("/models/{model_id}/net.dot")
    def model_dot(model_id: str):
        engine = state.engines.get(model_id)
        if engine is None:
            return not_found("model", model_id)
        return PlainTextResponse(export_dot(engine.net))

    @app.post("/cases")
    async def create_case(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"detail": "body is not JSON"}, status_code=422)
        model_id = body.get("modelId")
        if model_id not in state.engines:
            return not_found("model", str(model_id))
        cs = state.new_case(model_id)
        return JSONResponse(_case_summary(state, cs.case_id), status_code=201)

    @app.get("/cases/{case_id}")
    def get_case(case_id: str):
        if case_id not in state.cases:
            return not_found("case", case_id)
        return _case_summary(state, case_id)

    @app.get("/cases/{case_id}/steps")
    def get_steps(case_id: str):
        if case_id not in state.cases:
            return not_found("case", case_id)
        cs = state.cases[case_id]
        engine = state.engines[state.case_model[case_id]]
        if cs.status == "terminated":
            return {"status": "terminated", "options": []}
        return {
            "status": cs.status,
            "options": [o.to_json() for o in engine.enabled_steps(cs)],
        }

    @app.post("/cases/{case_id}/steps")
    async def post_step(case_id: str, request: Request):
        if case_id not in state.cases:
            return not_found("case", case_id)
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"detail": "body is not JSON"}, status_code=422)
        option_id = body.get("optionId")
        if not isinstance(option_id, str):
            return JSONResponse({"detail": "optionId is required"}, status_code=422)
        attributes = body.get("attributes") or {}
        engine = state.engines[state.case_model[case_id]]
        with state.locks[case_id]:
            cs = state.cases[case_id]
            try:
                state.cases[case_id] = engine.apply_step(cs, option_id, attributes)
            except StaleOption:
                return JSONResponse(
                    {"detail": f"option '{option_id}' is no longer enabled"}, status_code=409
                )
            except SchemaError as exc:
                return JSONResponse({"detail": str(exc)}, status_code=422)
            except RuntimeError as exc:  # CaseTerminated
                return JSONResponse({"detail": str(exc)}, status_code=409)
        return _case_summary(state, case_id)

    @app.get("/cases/{case_id}/terminable")
    def get_terminable(case_id: str):
        if case_id not in state.cases:
            return not_found("case", case_id)
        cs = state.cases[case_id]
        engine = state.engines[state.case_model[case_id]]
        return {"terminable": engine.is_terminable(cs) if cs.status != "terminated" else False}

    @app.get("/cases/{case_id}/snapshot")
    def get_snapshot(case_id: str):
        if case_id not in state.cases:
            return not_found("case", case_id)
        engine = state.engines[state.case_model[case_id]]
        return engine.snapshot(state.cases[case_id])

    @app.put("/cases/{case_id}/snapshot")
    async def put_snapshot(case_id: str, request: Request):
        try:
            document = await request.json()
        except Exception:
            return JSONResponse({"detail": "body is not JSON"}, status_code=422)
        if not isinstance(document, dict) or "modelHash" not in document:
            return JSONResponse({"detail": "not a case snapshot"}, status_code=422)
        target = None
        for model_id, engine in state.engines.items():
            if engine.net.model_hash == document["modelHash"]:
                target = model_id
                break
        if target is None:
            return JSONResponse(
                {"detail": "no loaded model matches the snapshot's modelHash"}, status_code=409
            )
        engine = state.engines[target]
        try:
            cs = engine.restore({**document, "caseId": case_id})
        except VersionMismatch as exc:  # pragma: no cover - hash matched above
            return JSONResponse({"detail": str(exc)}, status_code=409)
        except (KeyError, TypeError, ValueError) as exc:
            return JSONResponse({"detail": f"malformed snapshot: {exc}"}, status_code=422)
        state.cases[case_id] = cs
        state.case_model[case_id] = target
        state.locks.setdefault(case_id, threading.Lock())
        return _case_summary(state, case_id)

    return app
