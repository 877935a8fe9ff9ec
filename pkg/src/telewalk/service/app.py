"""FastAPI service wrapping the simulator.

Endpoints: a WebSocket at /session carrying snapshot/command JSON messages,
REST wrappers for batch runs and schema discovery, and (optionally) the
static cockpit UI at the root.
"""

from __future__ import annotations

import asyncio
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from ..config import ScenarioConfig
from ..engine import run_scenario
from .session import LiveSession
from .wire import WireStateSnapshot, command_json_schema

__all__ = ["create_app"]


def create_app(
    template: ScenarioConfig,
    realtime: bool = True,
    snapshot_hz: float = 60.0,
    outdir: str | Path | None = None,
    ui_dir: str | Path | None = None,
    command_rate_limit: int = 30,
) -> FastAPI:
    session = LiveSession(template, realtime=realtime, outdir=outdir)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        session.close()

    app = FastAPI(title="telewalk teleop server", version="1", lifespan=lifespan)
    app.state.session = session
    app.state.snapshot_hz = snapshot_hz

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "session_state": session.state.value}

    @app.get("/template")
    def template_config() -> dict:
        return template.model_dump(mode="json")

    @app.get("/schemas/command")
    def command_schema() -> dict:
        return command_json_schema()

    @app.get("/schemas/snapshot")
    def snapshot_schema() -> dict:
        return WireStateSnapshot.model_json_schema()

    @app.post("/runs")
    def run_batch(cfg: ScenarioConfig) -> dict:
        result = run_scenario(cfg)
        return result.summary.to_json()

    @app.websocket("/session")
    async def session_ws(ws: WebSocket) -> None:
        await ws.accept()
        send_lock = asyncio.Lock()
        interval = 1.0 / app.state.snapshot_hz
        # verify the client-side pilot-command rate cap (nominal 20 Hz);
        # rejected commands get an error reply, never a silent drop
        window_start = asyncio.get_event_loop().time()
        window_count = 0

        async def sender() -> None:
            while True:
                payload = session.latest_json()
                if payload is not None:
                    async with send_lock:
                        await ws.send_text(payload)
                await asyncio.sleep(interval)

        async def receiver() -> None:
            nonlocal window_start, window_count
            while True:
                text = await ws.receive_text()
                now = asyncio.get_event_loop().time()
                if now - window_start >= 1.0:
                    window_start = now
                    window_count = 0
                window_count += 1
                if window_count > command_rate_limit:
                    reply = '{"type": "error", "reason": "command rate cap exceeded"}'
                else:
                    reply = session.handle_text(text)
                async with send_lock:
                    await ws.send_text(reply)

        sender_task = asyncio.create_task(sender())
        try:
            await receiver()
        except WebSocketDisconnect:
            pass
        finally:
            sender_task.cancel()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="cockpit")

    return app
