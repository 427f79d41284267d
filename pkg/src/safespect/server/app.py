"""Session service: REST endpoints for headless operation plus the WebSocket
tick loop driving one cockpit per session."""

from __future__ import annotations

import asyncio
from dataclasses import dataclass, replace
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .. import __version__
from ..engine import EngineConfig
from ..hud import ADAPT_AR, INTERFACE_MODES, frame_to_dict
from ..scenario import (
    ScenarioError,
    ScenarioSyntaxError,
    SchemaError,
    parse_scenario,
    validate_scenario,
)
from ..session import Session, replay_log, run_script
from ..stock import STOCK_NAMES, stock_document
from ..telemetry import (
    InputFrame,
    LogFormatError,
    ScenarioMismatch,
    parse_script,
    serialize_log,
    sha256_text,
)
from .wire import (
    PROTOCOL_VERSION,
    Error,
    Frame,
    Hello,
    Input,
    MissionEnd,
    Pause,
    ProtocolError,
    Resume,
    Welcome,
    decode,
    encode,
)


@dataclass
class ServiceConfig:
    scenario_doc: Optional[str] = None   # default scenario for live sessions
    mode: str = ADAPT_AR
    realtime_factor: float = 1.0
    seed_override: Optional[int] = None


class ValidateRequest(BaseModel):
    document: str


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[str] = []
    parse_error: Optional[str] = None


class FlyRequest(BaseModel):
    scenario: str
    script: str
    mode: str = ADAPT_AR
    seed_override: Optional[int] = None


class FlyResponse(BaseModel):
    metrics: dict
    telemetry: str
    telemetry_hash: str


class MetricsRequest(BaseModel):
    telemetry: str


class MetricsResponse(BaseModel):
    metrics: dict


class ReplayRequest(BaseModel):
    telemetry: str


class ReplayResponse(BaseModel):
    ok: bool
    live_hash: str
    recorded_hash: str
    divergent_tick: Optional[int] = None


class ApiError(Exception):
    """Maps to an HTTP 422 with a machine-readable error code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _load_spec(document: str, seed_override: Optional[int]):
    spec = parse_scenario(document)
    if seed_override is not None:
        spec = replace(spec, seed=seed_override)
    return spec


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="safespect", version=__version__)
    app.state.config = config
    app.state.live_session = None
    app.state.client_attached = False

    @app.exception_handler(ApiError)
    async def handle_api_error(request, exc: ApiError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"code": exc.code, "message": exc.message})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__, "protocol": PROTOCOL_VERSION}

    @app.get("/scenarios")
    def scenarios() -> dict:
        return {"stock": list(STOCK_NAMES)}

    @app.get("/scenarios/{name}")
    def scenario(name: str) -> dict:
        if name not in STOCK_NAMES:
            raise ApiError("unknown_scenario", f"no stock scenario named {name!r}")
        return {"name": name, "document": stock_document(name)}

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        try:
            spec = parse_scenario(req.document)
        except ScenarioSyntaxError as exc:
            return ValidateResponse(ok=False, parse_error=str(exc))
        except SchemaError as exc:
            return ValidateResponse(ok=False, violations=exc.violations)
        return ValidateResponse(ok=True, violations=validate_scenario(spec))

    @app.post("/fly", response_model=FlyResponse)
    def fly(req: FlyRequest) -> FlyResponse:
        if req.mode not in INTERFACE_MODES:
            raise ApiError("bad_mode", f"mode must be one of {INTERFACE_MODES}")
        try:
            spec = _load_spec(req.scenario, req.seed_override)
        except ScenarioError as exc:
            raise ApiError("bad_scenario", str(exc)) from exc
        try:
            header, frames = parse_script(req.script)
        except LogFormatError as exc:
            raise ApiError("bad_script", str(exc)) from exc
        from ..scenario import emit_scenario

        if header.get("scenario_sha256") != sha256_text(emit_scenario(spec)):
            raise ApiError("scenario_mismatch", "script was recorded against a different scenario")
        session = run_script(spec, req.mode, frames)
        return FlyResponse(
            metrics=session.metrics(partial=not session.ended),
            telemetry=serialize_log(session.log),
            telemetry_hash=session.telemetry_hash(),
        )

    @app.post("/metrics", response_model=MetricsResponse)
    def metrics(req: MetricsRequest) -> MetricsResponse:
        try:
            session, _, _ = replay_log(req.telemetry)
        except (LogFormatError, ScenarioMismatch, ScenarioError) as exc:
            raise ApiError("bad_telemetry", str(exc)) from exc
        return MetricsResponse(metrics=session.metrics(partial=not session.ended))

    @app.post("/replay", response_model=ReplayResponse)
    def replay(req: ReplayRequest) -> ReplayResponse:
        try:
            session, recorded_hash, divergent = replay_log(req.telemetry)
        except (LogFormatError, ScenarioMismatch, ScenarioError) as exc:
            raise ApiError("bad_telemetry", str(exc)) from exc
        live = session.telemetry_hash()
        return ReplayResponse(
            ok=live == recorded_hash and divergent is None,
            live_hash=live,
            recorded_hash=recorded_hash,
            divergent_tick=divergent,
        )

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        if app.state.client_attached:
            await ws.send_text(encode(Error(message="session busy: one cockpit per session")))
            await ws.close()
            return
        app.state.client_attached = True
        try:
            await _run_session_socket(app, ws)
        except WebSocketDisconnect:
            pass  # session state is preserved for reconnection
        finally:
            app.state.client_attached = False

    return app


async def _run_session_socket(app: FastAPI, ws: WebSocket):
    config: ServiceConfig = app.state.config

    raw = await ws.receive_text()
    try:
        msg = decode(raw)
    except ProtocolError as exc:
        await ws.send_text(encode(Error(message=str(exc))))
        await ws.close()
        return
    if not isinstance(msg, Hello):
        await ws.send_text(encode(Error(message="expected hello")))
        await ws.close()
        return
    if msg.schema_version != PROTOCOL_VERSION:
        await ws.send_text(
            encode(Error(message=f"schema version mismatch: server {PROTOCOL_VERSION}, client {msg.schema_version}"))
        )
        await ws.close()
        return

    mode = msg.mode or config.mode
    if mode not in INTERFACE_MODES:
        await ws.send_text(encode(Error(message=f"mode must be one of {INTERFACE_MODES}")))
        await ws.close()
        return

    session: Session | None = app.state.live_session
    if session is None or session.mode != mode or session.ended:
        doc = config.scenario_doc or stock_document("short_a")
        spec = _load_spec(doc, config.seed_override)
        session = Session(spec, mode)
        app.state.live_session = session

    from ..scenario import scenario_to_dict

    await ws.send_text(
        encode(
            Welcome(
                scenario_digest=session.scenario_hash,
                mode=mode,
                scenario=scenario_to_dict(session.spec),
                tick_rate_hz=session.cfg.tick_rate_hz,
            )
        )
    )

    inbox: asyncio.Queue[str] = asyncio.Queue()

    async def reader():
        while True:
            inbox.put_nowait(await ws.receive_text())

    reader_task = asyncio.create_task(reader())
    paused = False
    last_input = InputFrame()
    try:
        while not session.ended:
            latest: InputFrame | None = None
            while not inbox.empty():
                try:
                    msg = decode(inbox.get_nowait())
                except ProtocolError as exc:
                    await ws.send_text(encode(Error(message=str(exc))))
                    continue
                if isinstance(msg, Input):
                    f = msg.frame
                    latest = InputFrame(
                        axes=f.axes,
                        takeoff=f.takeoff,
                        rth=f.rth,
                        autopilot_toggle=f.autopilot_toggle,
                        mark=f.mark,
                        gaze_origin=f.gaze_origin,
                        gaze_direction=f.gaze_direction,
                    )
                elif isinstance(msg, Pause):
                    paused = True
                elif isinstance(msg, Resume):
                    paused = False

            if paused:
                await asyncio.sleep(0.05)
                if reader_task.done():
                    raise reader_task.exception() or WebSocketDisconnect(1006)
                continue

            if latest is None:
                # hold last axes; button edges and marks never repeat
                inp = InputFrame(
                    axes=last_input.axes,
                    gaze_origin=last_input.gaze_origin,
                    gaze_direction=last_input.gaze_direction,
                )
            else:
                inp = latest
                last_input = latest

            result = session.tick(inp)
            await ws.send_text(
                encode(
                    Frame(
                        tick=result.tick,
                        drone=_finite(session_drone_dict(result)),
                        hud=_finite(frame_to_dict(result.frame)),
                        events=list(result.events),
                    )
                )
            )
            if result.ended:
                await ws.send_text(encode(MissionEnd(metrics=session.metrics())))
                break
            if config.realtime_factor > 0:
                await asyncio.sleep(session.cfg.dt * config.realtime_factor)
            else:
                await asyncio.sleep(0)
            if reader_task.done():
                exc = reader_task.exception()
                if exc:
                    raise exc
    finally:
        reader_task.cancel()


def session_drone_dict(result) -> dict:
    from ..session import drone_to_dict

    return drone_to_dict(result.drone)


def _finite(value):
    """JSON wire payloads cannot carry inf; mirror telemetry's encoding."""
    from ..telemetry import _jsonable

    return _jsonable(value)
