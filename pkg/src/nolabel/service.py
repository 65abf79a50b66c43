"""HTTP front end: stateless endpoints over the decompose/sweep/check runs.

Responses are produced by the same canonical serializer as the CLI, so a
remote call and a local run yield byte-identical documents. Library errors
map onto status codes by category: parse 400, physics 422, verification 409.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import Response
from pydantic import BaseModel, Field

from . import __version__
from .dsl import parse_state, with_param_defaults
from .errors import NoLabelError, ParseError
from .pipeline import canonical_json, run_check, run_decompose, run_sweep
from .schmidt import ZERO_TOL

_STATUS_BY_CATEGORY = {"parse": 400, "physics": 422, "verification": 409}


class DecomposeRequest(BaseModel):
    state: str
    params: dict[str, float] = Field(default_factory=dict)
    trace: str = "global"
    oracle: bool = True
    zero_tol: float = ZERO_TOL


class SweepRequest(DecomposeRequest):
    param: str
    start: float
    stop: float
    steps: int = Field(gt=0)


class CheckRequest(BaseModel):
    oracle: bool = True


def _json_response(record: dict, status_code: int = 200) -> Response:
    return Response(canonical_json(record), status_code=status_code,
                    media_type="application/json")


def error_body(exc: NoLabelError) -> dict:
    error = {"code": exc.code, "category": exc.category, "message": str(exc)}
    if isinstance(exc, ParseError):
        error["line"] = exc.line
        error["column"] = exc.column
        error["expected"] = list(exc.expected)
    return {"error": error}


def create_app() -> FastAPI:
    app = FastAPI(title="nolabel", version=__version__)

    @app.exception_handler(NoLabelError)
    async def _handle_library_error(request: Request, exc: NoLabelError):
        status = _STATUS_BY_CATEGORY.get(exc.category, 500)
        return _json_response(error_body(exc), status)

    @app.exception_handler(RequestValidationError)
    async def _handle_validation(request: Request,
                                 exc: RequestValidationError):
        message = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors())
        body = {"error": {"code": "E_REQUEST", "category": "parse",
                          "message": message}}
        return _json_response(body, 400)

    @app.get("/health")
    async def health():
        return _json_response({"status": "ok", "version": __version__})

    @app.post("/decompose")
    async def decompose(request: DecomposeRequest):
        spec = parse_state(request.state)
        record = run_decompose(spec, request.trace,
                               with_oracle=request.oracle,
                               zero_tol=request.zero_tol,
                               params=request.params or None)
        return _json_response(record)

    @app.post("/sweep")
    async def sweep(request: SweepRequest):
        spec = with_param_defaults(parse_state(request.state), request.params)
        result = run_sweep(spec, request.param, request.start, request.stop,
                           request.steps, request.trace,
                           with_oracle=request.oracle,
                           zero_tol=request.zero_tol)
        return _json_response(result.to_record())

    @app.post("/check")
    async def check(request: CheckRequest):
        return _json_response(run_check(with_oracle=request.oracle))

    return app


app = create_app()
