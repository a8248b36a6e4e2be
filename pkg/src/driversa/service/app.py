"""FastAPI application: live engine sessions over a websocket.

Every websocket connection gets its own session: an engine instance plus a
runner task that steps it at scenario tick rate in wall-clock time. Late
ticks are never skipped; the pacing deadline re-anchors instead, and it also
re-anchors after a pause so resuming does not sprint. Inbound messages are
handled between ticks: gaze directions overwrite each other and the freshest
one before a tick wins, control actions take effect at the next tick
boundary.
"""

from __future__ import annotations

import asyncio
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket
from fastapi.staticfiles import StaticFiles
from pydantic import ValidationError
from starlette.websockets import WebSocketDisconnect, WebSocketState

from .. import __version__
from ..session import SessionConfig, SessionEngine
from ..simulator import GAZE_INTERACTIVE, GazeSpec, Scenario
from .models import (
    DomainResponse,
    HealthResponse,
    ScenarioResponse,
    error_message,
    parse_inbound,
    snapshot_message,
    state_message,
    validation_detail,
)

_IDLE_POLL_S = 0.05  # restart/disconnect poll while paused or finished


class SessionLoop:
    """One connection's engine plus the flags the socket can flip."""

    def __init__(self, scenario: Scenario, config: SessionConfig | None):
        self.scenario = scenario
        self.config = config
        self.engine = SessionEngine(scenario, config)
        self.gaze: np.ndarray | None = None
        self.paused = False
        self.restart_requested = False
        self.takeover_requested = False

    def handle(self, text: str) -> dict | None:
        """Apply one inbound message; returns an error reply or None."""
        try:
            msg = parse_inbound(text)
        except ValidationError as exc:
            return error_message(validation_detail(exc))
        if msg.type == "gaze":
            self.gaze = np.asarray(msg.direction, dtype=float)
            return None
        if msg.action == "pause":
            self.paused = True
        elif msg.action == "resume":
            self.paused = False
        elif msg.action == "restart":
            self.restart_requested = True
            self.paused = False
        elif msg.action == "takeover_now":
            self.takeover_requested = True
        return None

    def _restart(self) -> None:
        self.engine = SessionEngine(self.scenario, self.config)
        self.gaze = None
        self.takeover_requested = False
        self.restart_requested = False

    async def run(self, ws: WebSocket) -> None:
        dt = self.scenario.dt
        deadline = time.perf_counter() + dt
        while True:
            if self.restart_requested:
                self._restart()
                await ws.send_json(snapshot_message(self.scenario))
                deadline = time.perf_counter() + dt
            if self.paused or self.engine.finished:
                await asyncio.sleep(_IDLE_POLL_S)
                deadline = time.perf_counter() + dt  # re-anchor on resume
                continue
            if self.takeover_requested:
                self.engine.force_manual()
                self.takeover_requested = False
            rec = self.engine.step(self.gaze)
            await ws.send_json(state_message(rec, finished=self.engine.finished))
            now = time.perf_counter()
            if deadline > now:
                await asyncio.sleep(deadline - now)
                deadline += dt
            else:
                deadline = now + dt  # behind schedule: next tick runs at once


def create_app(scenario: Scenario, *, interactive: bool = True,
               config: SessionConfig | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    """Build the service around one scenario.

    With `interactive` the scenario's gaze script is replaced by the
    interactive mode, so fixation comes entirely from gaze messages.
    """
    if interactive and scenario.gaze.mode != GAZE_INTERACTIVE:
        scenario = replace(
            scenario, gaze=GazeSpec(mode=GAZE_INTERACTIVE, params=scenario.gaze.params))
    app = FastAPI(title="driversa", version=__version__)
    domain = (config.domain if config is not None
              else SessionConfig.for_scenario(scenario).domain)

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", engine=f"driversa {__version__}",
                              scenario=scenario.name)

    @app.get("/api/domain", response_model=DomainResponse)
    def domain_info() -> DomainResponse:
        return DomainResponse.from_domain(domain)

    @app.get("/api/scenario", response_model=ScenarioResponse)
    def scenario_info() -> ScenarioResponse:
        return ScenarioResponse.from_scenario(scenario)

    @app.websocket("/ws/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        loop = SessionLoop(scenario, config)
        await ws.send_json(snapshot_message(scenario))
        runner = asyncio.create_task(loop.run(ws))
        try:
            while True:
                message = await ws.receive()
                if message["type"] == "websocket.disconnect":
                    break
                text = message.get("text")
                if text is None:
                    await ws.send_json(error_message("expected a text frame"))
                    continue
                reply = loop.handle(text)
                if reply is not None:
                    await ws.send_json(reply)
        except WebSocketDisconnect:
            pass
        finally:
            runner.cancel()
            try:
                await runner
            except (asyncio.CancelledError, WebSocketDisconnect):
                pass
            except RuntimeError:
                pass  # send raced the disconnect
            if ws.client_state == WebSocketState.CONNECTED:
                await ws.close()

    static_dir = (Path(ui_dir) if ui_dir
                  else Path(__file__).resolve().parents[3] / "frontend" / "dist")
    if static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
