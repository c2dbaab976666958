"""Stateless HTTP front end over the forecast engine.

Every request runs an isolated engine pass; identical requests produce
identical responses, and /api/v1/forecast bodies are byte-identical to the
CLI report for the same scenario and seed.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .emit import report_json_bytes, report_to_dict
from .errors import InsufficientDataError, ValidationError
from .forecast import run_forecast
from .scenario import parse_scenario

MAX_BODY_BYTES = 1 << 20  # 1 MiB
MAX_COMPARE_SCENARIOS = 8


def _error_response(status: int, code: str, message: str, field_path=None, **extra) -> Response:
    payload = {"code": code, "message": message, "field_path": field_path}
    payload.update(extra)
    return Response(
        content=json.dumps(payload, indent=2) + "\n",
        status_code=status,
        media_type="application/json",
    )


async def _read_json_body(request: Request):
    body = await request.body()
    if len(body) > MAX_BODY_BYTES:
        return None, _error_response(
            413, "invalid_scenario", f"request body exceeds {MAX_BODY_BYTES} bytes"
        )
    try:
        return json.loads(body), None
    except json.JSONDecodeError as exc:
        return None, _error_response(400, "invalid_scenario", f"request body is not valid JSON: {exc}")


def create_app() -> FastAPI:
    app = FastAPI(title="heartcast", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/api/v1/forecast")
    async def forecast_endpoint(request: Request) -> Response:
        data, error = await _read_json_body(request)
        if error is not None:
            return error
        try:
            scenario = parse_scenario(data)
            report = run_forecast(scenario)
        except InsufficientDataError as exc:
            return _error_response(
                422,
                "insufficient_data",
                str(exc),
                relaxation_log=[
                    {"step": s.step, "action": s.action, "count": s.count}
                    for s in exc.relaxation_log
                ],
            )
        except ValidationError as exc:
            return _error_response(400, "invalid_scenario", str(exc), field_path=exc.field_path)
        except Exception as exc:  # pragma: no cover - defensive
            return _error_response(500, "internal", f"internal error: {exc}")
        return Response(content=report_json_bytes(report), media_type="application/json")

    @app.post("/api/v1/compare")
    async def compare_endpoint(request: Request) -> Response:
        data, error = await _read_json_body(request)
        if error is not None:
            return error
        if not isinstance(data, dict) or set(data) != {"scenarios"}:
            return _error_response(
                400, "invalid_scenario", "body must be an object with exactly one key 'scenarios'"
            )
        scenarios_raw = data["scenarios"]
        if not isinstance(scenarios_raw, list) or not 1 <= len(scenarios_raw) <= MAX_COMPARE_SCENARIOS:
            return _error_response(
                400,
                "invalid_scenario",
                f"scenarios must be an array of 1 to {MAX_COMPARE_SCENARIOS} scenarios",
                field_path="scenarios",
            )
        reports = []
        best_values = []
        for index, raw in enumerate(scenarios_raw):
            try:
                scenario = parse_scenario(raw)
                report = run_forecast(scenario)
            except InsufficientDataError as exc:
                return _error_response(
                    422,
                    "insufficient_data",
                    f"scenarios[{index}]: {exc}",
                    field_path=f"scenarios[{index}]",
                    relaxation_log=[
                        {"step": s.step, "action": s.action, "count": s.count}
                        for s in exc.relaxation_log
                    ],
                )
            except ValidationError as exc:
                prefix = f"scenarios[{index}]"
                path = f"{prefix}.{exc.field_path}" if exc.field_path else prefix
                return _error_response(400, "invalid_scenario", f"{prefix}: {exc}", field_path=path)
            except Exception as exc:  # pragma: no cover - defensive
                return _error_response(500, "internal", f"internal error: {exc}")
            reports.append(report_to_dict(report))
            best_values.append(max(option.value for option in report.options))
        ranking = sorted(range(len(reports)), key=lambda i: (-best_values[i], i))
        payload = {"reports": reports, "ranking": ranking}
        return Response(
            content=json.dumps(payload, indent=2) + "\n", media_type="application/json"
        )

    return app


app = create_app()
