"""HTTP reward service: the end-to-end pipeline behind a JSON API.

POST /v1/rewards runs collection through advantages for one response group;
POST /v1/cdr audits a batch of precomputed matrices; GET /healthz answers
immediately without touching the judge. Reward responses are rendered with
the same canonical encoder as the CLI, so the two surfaces byte-match.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .errors import DeconflictError, StrategyError, ValidationError
from .judge.gateway import JudgeConfig, JudgeGateway, build_http_judge
from .metrics import compute_cdr
from .pipeline import RewardRequest, compute_rewards_end_to_end
from .records import dumps_canonical, matrix_from_record


class RewardRequestModel(BaseModel):
    id: str
    query: str
    responses: list[str]
    strategy: str
    seed: Optional[int] = None
    judge: Optional[dict] = None  # per-request JudgeConfig field overrides


class MatrixRecordModel(BaseModel):
    id: str
    g: Optional[int] = None
    entries: list[list[int]]


class CdrRequestModel(BaseModel):
    samples: list[MatrixRecordModel] = Field(min_length=1)


_TRANSPORT_FIELDS = ("api_base", "api_key", "model", "temperature", "timeout_ms")


def _gateway_for(base: JudgeGateway, overrides: Optional[dict]) -> JudgeGateway:
    """Apply per-request judge overrides, keeping the global in-flight gate."""
    if not overrides:
        return base
    unknown = set(overrides) - set(JudgeConfig.__dataclass_fields__)
    if unknown:
        raise ValidationError(f"unknown judge override keys: {sorted(unknown)}")
    config = replace(base.config, **overrides)
    judge = base.judge
    if any(field in overrides for field in _TRANSPORT_FIELDS):
        judge = build_http_judge(config)
    return JudgeGateway(judge, config, cache=base.cache, gate=base._gate)


def create_app(gateway: JudgeGateway) -> FastAPI:
    app = FastAPI(title="deconflict reward service", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        errors = [
            {"path": [str(p) for p in err.get("loc", [])], "message": err.get("msg", "")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": "malformed request", "detail": errors})

    @app.exception_handler(DeconflictError)
    async def domain_error(request: Request, exc: DeconflictError):
        status = 422 if isinstance(exc, (ValidationError, StrategyError)) else 500
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/healthz")
    def healthz():
        # Liveness must not wait on judge latency: report configuration only.
        return {
            "status": "ok",
            "judge_model": gateway.config.model or None,
            "judge_api_base": gateway.config.api_base or None,
            "prompt_id": gateway.config.prompt_id,
        }

    @app.post("/v1/rewards")
    def rewards(body: RewardRequestModel) -> Response:
        request = RewardRequest(
            id=body.id,
            query=body.query,
            responses=tuple(body.responses),
            strategy=body.strategy,
            seed=body.seed,
        )
        effective = _gateway_for(gateway, body.judge)
        document = compute_rewards_end_to_end(request, effective)
        return Response(content=dumps_canonical(document), media_type="application/json")

    @app.post("/v1/cdr")
    def cdr(body: CdrRequestModel) -> Response:
        samples = [
            matrix_from_record({"id": s.id, "g": s.g, "entries": s.entries})
            for s in body.samples
        ]
        report = compute_cdr(samples)
        return Response(
            content=dumps_canonical(report.to_json_dict()), media_type="application/json"
        )

    return app


def build_service(
    config: JudgeConfig, judge=None, cache=None
) -> FastAPI:
    gateway = JudgeGateway(judge or build_http_judge(config), config, cache=cache)
    return create_app(gateway)
