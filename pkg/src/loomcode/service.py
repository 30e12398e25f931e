"""HTTP JSON API over the session engine.

All error bodies are {"error": code, "detail": text} with a 4xx status.
LOOM_DATA_DIR selects the persistence directory (default ./data). Clients
poll; there is no push channel.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.staticfiles import StaticFiles

from .encode import export_svg
from .fileio import FileFormatError, palette_from_json, palette_to_json, questionnaire_from_json, questionnaire_to_json
from .model import check_palette_covers, validate_palette, validate_questionnaire
from .session import (
    EV_ANSWER_RECORDED,
    EV_CLOSED,
    EV_FREEFORM_PICK,
    EV_PARTICIPANT_ADDED,
    MODE_DATA,
    MODE_FREEFORM,
    EventRejected,
    SessionConfig,
    SessionState,
    SessionStore,
    next_picks,
    preview,
    report,
    session_draft,
)
from .wif import WifMetadata, emit_wif

DEFAULT_DATA_DIR = "./data"
PREVIEW_CELL_PX = 12

_STATUS_BY_CODE = {
    "UnknownParticipant": 404,
    "DuplicateAnswer": 409,
    "DuplicateParticipant": 409,
    "SessionClosed": 409,
    "ModeMismatch": 409,
    "InvalidAnswer": 400,
    "InvalidEvent": 400,
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail


def _session_view(state: SessionState) -> dict:
    current = None
    if state.mode == MODE_DATA:
        for p in state.participants:
            if not state.is_complete(p):
                current = p.participant_id
                break
    return {
        "session_id": state.id,
        "mode": state.mode,
        "closed": state.closed,
        "questionnaire": questionnaire_to_json(state.questionnaire),
        "palette": palette_to_json(state.palette),
        "config": state.config.to_json(),
        "participants": [
            {
                "participant_id": p.participant_id,
                "label": p.label,
                "answers": {str(qi): oi for qi, oi in sorted(p.answers.items())},
            }
            for p in state.participants
        ],
        "freeform_picks": [{"participant_id": pid, "color_name": name} for pid, name in state.freeform_picks],
        "current_participant_id": current,
    }


def create_app(data_dir: str | Path | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    store = SessionStore(data_dir or os.environ.get("LOOM_DATA_DIR", DEFAULT_DATA_DIR))
    app = FastAPI(title="loomcode session service", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.code, "detail": exc.detail})

    @app.exception_handler(EventRejected)
    def _rejected(_request: Request, exc: EventRejected):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content={"error": exc.code, "detail": exc.detail})

    @app.exception_handler(RequestValidationError)
    def _bad_request(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "InvalidRequest", "detail": str(exc)})

    def _get_state(session_id: str) -> SessionState:
        state = store.get(session_id)
        if state is None:
            raise ApiError(404, "UnknownSession", f"no session {session_id!r}")
        return state

    @app.post("/api/sessions", status_code=201)
    def create_session(payload: dict):
        try:
            questionnaire = questionnaire_from_json(payload.get("questionnaire") or {})
            palette = palette_from_json(payload.get("palette") or {})
            config = SessionConfig.from_json(payload.get("config") or {})
        except (FileFormatError, TypeError, ValueError) as e:
            raise ApiError(400, "InvalidRequest", str(e)) from e
        mode = payload.get("mode", MODE_DATA)
        if mode not in (MODE_DATA, MODE_FREEFORM):
            raise ApiError(400, "InvalidRequest", f"mode must be {MODE_DATA!r} or {MODE_FREEFORM!r}")
        issues = validate_questionnaire(questionnaire) + validate_palette(palette) \
            + check_palette_covers(palette, questionnaire)
        if issues:
            raise ApiError(400, "ValidationFailed", "; ".join(str(i) for i in issues))
        state = store.create(questionnaire, palette, mode, config)
        return {"session_id": state.id}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(_get_state(session_id))

    @app.post("/api/sessions/{session_id}/participants", status_code=201)
    def add_participant(session_id: str, payload: dict):
        state = _get_state(session_id)
        label = payload.get("label")
        if not isinstance(label, str) or not label:
            raise ApiError(400, "InvalidRequest", "label must be a non-empty string")
        pid = f"p{len(state.participants) + 1}"
        store.append(session_id, EV_PARTICIPANT_ADDED, {"participant_id": pid, "label": label})
        return {"participant_id": pid}

    @app.post("/api/sessions/{session_id}/answers", status_code=204)
    def record_answer(session_id: str, payload: dict):
        _get_state(session_id)
        try:
            data = {
                "participant_id": str(payload["participant_id"]),
                "question_index": int(payload["question_index"]),
                "option_index": int(payload["option_index"]),
            }
        except (KeyError, TypeError, ValueError) as e:
            raise ApiError(400, "InvalidRequest", f"bad answer payload: {e}") from e
        store.append(session_id, EV_ANSWER_RECORDED, data)
        return Response(status_code=204)

    @app.post("/api/sessions/{session_id}/freeform-picks", status_code=204)
    def record_freeform_pick(session_id: str, payload: dict):
        _get_state(session_id)
        try:
            data = {
                "participant_id": str(payload["participant_id"]),
                "color_name": str(payload["color_name"]),
            }
        except KeyError as e:
            raise ApiError(400, "InvalidRequest", f"bad freeform pick payload: missing {e}") from e
        store.append(session_id, EV_FREEFORM_PICK, data)
        return Response(status_code=204)

    @app.post("/api/sessions/{session_id}/close", status_code=204)
    def close_session(session_id: str):
        _get_state(session_id)
        store.append(session_id, EV_CLOSED, {})
        return Response(status_code=204)

    @app.get("/api/sessions/{session_id}/next-picks")
    def get_next_picks(session_id: str):
        state = _get_state(session_id)
        return {"picks": [p.to_json() for p in next_picks(state)]}

    @app.get("/api/sessions/{session_id}/preview.svg")
    def get_preview(session_id: str, cell_px: int = PREVIEW_CELL_PX):
        state = _get_state(session_id)
        if cell_px < 1:
            raise ApiError(400, "InvalidRequest", "cell_px must be >= 1")
        svg = export_svg(preview(state), cell_px)
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/api/sessions/{session_id}/draft.wif")
    def get_draft_wif(session_id: str):
        state = _get_state(session_id)
        if state.mode != MODE_DATA:
            raise ApiError(409, "ModeMismatch", "drafts are exported from data sessions")
        text = emit_wif(session_draft(state), state.palette, WifMetadata())
        return Response(content=text, media_type="text/plain; charset=utf-8")

    @app.get("/api/sessions/{session_id}/report")
    def get_report(session_id: str):
        return report(_get_state(session_id)).to_json()

    if ui_dir is None:
        ui_dir = os.environ.get("LOOM_UI_DIR")
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
