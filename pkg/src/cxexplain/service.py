"""HTTP service backing the analyst UI.

The session is loaded at startup and never mutated, so concurrent
requests need no locking. All endpoints are read-only and live under
/api; responses reuse the CLI's canonical JSON encoder so the two
surfaces are byte-identical.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from .errors import (CxError, StepOutOfRangeError, TargetOutsideTraceError,
                     UnknownGateError)
from .jsonutil import dumps
from .session import Session


def _json(doc, status=200):
    return Response(content=dumps(doc), status_code=status,
                    media_type="application/json")


def _error(status, message):
    return _json({"error": message}, status=status)


def create_app(session: Session) -> FastAPI:
    app = FastAPI(title="cx-explain", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.get("/api/health")
    def health():
        return _json({"status": "ok", "session": session.id,
                      "traceLoaded": session.trace is not None,
                      "formulaLoaded": session.formula is not None})

    @app.get("/api/diagram")
    def diagram():
        return _json(session.diagram_doc())

    @app.get("/api/trace")
    def trace():
        if session.trace is None:
            return _error(404, "no trace loaded")
        return _json(session.trace_doc())

    @app.get("/api/trace/extended")
    def extended(upTo: int | None = None):
        if session.extended is None:
            return _error(404, "no trace loaded")
        if upTo is not None and not (1 <= upTo <= session.trace.length):
            return _error(404, f"upTo outside [1, {session.trace.length}]")
        return _json(session.extended_doc(upTo))

    @app.get("/api/formula/tree")
    def formula_tree(step: int = 0):
        if session.eval_table is None:
            return _error(404, "no formula/trace loaded")
        try:
            return _json(session.formula_tree_doc(step + 1))
        except StepOutOfRangeError as e:
            return _error(404, str(e))

    @app.post("/api/explain")
    async def explain(request: Request):
        if session.extended is None:
            return _error(404, "no trace loaded")
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be a JSON object")
        if not isinstance(body, dict):
            return _error(400, "request body must be a JSON object")
        var = body.get("var") or body.get("gate")
        if not isinstance(var, str):
            return _error(400, "missing 'var' (variable name or gate id)")
        if "step" in body:
            step = body["step"]
        elif "displayStep" in body:
            step = body["displayStep"] + 1 \
                if isinstance(body["displayStep"], int) else None
        else:
            step = None
        if not isinstance(step, int):
            return _error(400, "missing integer 'step' or 'displayStep'")
        scope = body.get("block")
        try:
            return _json(session.explain_doc(var, step, scope))
        except (UnknownGateError, TargetOutsideTraceError) as e:
            return _error(404, str(e))
        except CxError as e:
            return _error(422, str(e))

    @app.post("/api/explain-formula")
    async def explain_formula(request: Request):
        if session.eval_table is None:
            return _error(404, "no formula/trace loaded")
        try:
            body = await request.json()
        except Exception:
            body = {}
        if not isinstance(body, dict):
            return _error(400, "request body must be a JSON object")
        if "step" in body:
            step = body["step"]
        elif "displayStep" in body:
            step = body.get("displayStep", 0) + 1
        else:
            step = 1
        if not isinstance(step, int):
            return _error(400, "'step' must be an integer")
        try:
            return _json(session.explain_formula_doc(step))
        except StepOutOfRangeError as e:
            return _error(404, str(e))
        except CxError as e:
            return _error(422, str(e))

    return app


def serve(session: Session, host="127.0.0.1", port=8000):
    import uvicorn
    uvicorn.run(create_app(session), host=host, port=port, log_level="warning")
