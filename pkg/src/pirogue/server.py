"""Interactive steering server: run lifecycle, live frames, interventions.

Plain HTTP handles lifecycle and control; a WebSocket at
``/runs/{id}/stream`` pushes every monitor frame (and intervention echoes)
as self-describing JSON whose field names match the output CSV headers.
Late subscribers replay the backlog from any index, so disconnects resume
cleanly. All steering quantizes to day boundaries, keeping server-driven
runs byte-equivalent to batch runs of the same config and seed.
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import RedirectResponse
from fastapi.staticfiles import StaticFiles

from pirogue.config import ConfigError, RunConfig, config_from_mapping, parse_run_config
from pirogue.engine import (InterventionError, SimulationInvariantError, WorldState,
                            apply_intervention, build_world, finalize_run, step_hour)
from pirogue.env_grid import EnvironmentError_
from pirogue.fish import InitializationError
from pirogue.fleet import FleetConfigError
from pirogue.ports import SitesConfigError
from pirogue.species import SpeciesConfigError

_VALIDATION_ERRORS = (ConfigError, EnvironmentError_, InitializationError,
                      FleetConfigError, SitesConfigError, SpeciesConfigError)

POLL_SECONDS = 0.03


class RunSession:
    """One simulation run owned by a single stepping thread."""

    def __init__(self, run_id: str, config: RunConfig):
        self.run_id = run_id
        self.config = config
        self.world: WorldState = build_world(config)
        self.status = "created"
        self.speed: float | None = None          # simulated hours per wall-second
        self.total_hours = config.years * 8760
        self.events: list[dict] = []
        self.lock = threading.RLock()
        self.wake = threading.Event()
        self.thread: threading.Thread | None = None
        self.error: str | None = None
        self._frame_count = 0
        self._intervention_cursor = 0
        self.world.frame_sinks.append(self._on_frame)

    # -- event log -----------------------------------------------------------

    def _frame_payload(self, frame) -> dict:
        sites = self.world.sites
        return {
            "type": "frame",
            "index": self._frame_count,
            "date": frame.date,
            "landings": [{"site": s.name, "tons": frame.site_landings[i]}
                         for i, s in enumerate(sites)],
            "fleet": [{"site": s.name, "cat": cat, "count": frame.site_fu_counts[i][cat - 1]}
                      for i, s in enumerate(sites) for cat in (1, 2, 3)],
            "biomass": [{"species": name, "tons": frame.species_biomass[j]}
                        for j, name in enumerate(n.name for n in self.world.species)],
            "short_migrations": frame.short_migrations,
            "long_migrations": frame.long_migrations,
            "country_catch": dict(frame.country_catch),
        }

    def _on_frame(self, frame) -> None:
        with self.lock:
            payload = self._frame_payload(frame)
            payload["seq"] = len(self.events)
            self.events.append(payload)
            self._frame_count += 1
            log = self.world.intervention_log
            while self._intervention_cursor < len(log):
                date, cmd = log[self._intervention_cursor]
                self._intervention_cursor += 1
                self.events.append({"seq": len(self.events), "type": "intervention",
                                    "effective_date": date, "command": cmd})

    def _append_end(self) -> None:
        with self.lock:
            self.events.append({"seq": len(self.events), "type": "end",
                                "status": self.status, "error": self.error})

    # -- stepping --------------------------------------------------------------

    def _step_one_day(self) -> bool:
        """Advance 24 hours; returns False when the run is complete."""
        world = self.world
        remaining = self.total_hours - world.hour
        if remaining <= 0:
            return False
        for _ in range(min(24, remaining)):
            step_hour(world)
        return world.hour < self.total_hours

    def _run_loop(self) -> None:
        try:
            while True:
                with self.lock:
                    if self.status != "running":
                        if self.status in ("finished", "failed"):
                            return
                        wait = True
                    else:
                        wait = False
                if wait:
                    self.wake.wait(timeout=0.1)
                    self.wake.clear()
                    continue
                t0 = time.monotonic()
                with self.lock:
                    more = self._step_one_day()
                    if not more:
                        finalize_run(self.world)
                        self.status = "finished"
                        self._append_end()
                        return
                speed = self.speed
                if speed and speed > 0:
                    budget = 24.0 / speed - (time.monotonic() - t0)
                    if budget > 0:
                        time.sleep(budget)
        except SimulationInvariantError as exc:
            with self.lock:
                self.status = "failed"
                self.error = str(exc)
                self._append_end()

    # -- control ----------------------------------------------------------------

    def control(self, action: str, speed: float | None = None) -> dict:
        with self.lock:
            if action == "start":
                if self.status in ("finished", "failed"):
                    raise InterventionError(f"cannot start a {self.status} run")
                if self.total_hours == 0:
                    finalize_run(self.world)
                    self.status = "finished"
                    self._append_end()
                    return self.describe()
                self.status = "running"
                if self.thread is None:
                    self.thread = threading.Thread(target=self._run_loop, daemon=True)
                    self.thread.start()
                self.wake.set()
            elif action == "pause":
                if self.status == "running":
                    self.status = "paused"
            elif action == "step_day":
                if self.status == "running":
                    raise InterventionError("pause the run before stepping days")
                if self.status in ("finished", "failed"):
                    raise InterventionError(f"cannot step a {self.status} run")
                self.status = "paused"
                more = self._step_one_day()
                if not more:
                    finalize_run(self.world)
                    self.status = "finished"
                    self._append_end()
            elif action == "set_speed":
                if speed is None or speed < 0:
                    raise InterventionError("set_speed needs speed >= 0")
                self.speed = speed
                if speed == 0:
                    if self.status == "running":
                        self.status = "paused"
                else:
                    self.wake.set()
            else:
                raise InterventionError(f"unknown action: {action}")
            return self.describe()

    def intervene(self, cmd: dict) -> dict:
        with self.lock:
            if self.status in ("finished", "failed"):
                raise InterventionError(f"cannot intervene in a {self.status} run")
            effective = apply_intervention(self.world, cmd)
            return {"effective_date": effective, "command": cmd}

    def describe(self) -> dict:
        return {"run_id": self.run_id, "status": self.status,
                "frames": self._frame_count, "events": len(self.events),
                "speed": self.speed, "date": self.world.clock.date_str,
                "error": self.error,
                "sites": [{"name": s.name, "lat": s.lat, "lon": s.lon,
                           "country": s.country, "capacity": s.capacity}
                          for s in self.world.sites],
                "species": [sp.name for sp in self.world.species]}

    def events_from(self, start: int) -> list[dict]:
        with self.lock:
            return list(self.events[start:])


def create_app(frontend_dir: str | Path | None = None,
               preset_config: RunConfig | None = None) -> FastAPI:
    app = FastAPI(title="pirogue steering server")
    sessions: dict[str, RunSession] = {}
    counter = {"n": 0}
    app.state.sessions = sessions

    if preset_config is not None:
        counter["n"] += 1
        run_id = f"run-{counter['n']}"
        sessions[run_id] = RunSession(run_id, preset_config)

    def _session(run_id: str) -> RunSession:
        if run_id not in sessions:
            raise HTTPException(status_code=404, detail=f"unknown run: {run_id}")
        return sessions[run_id]

    @app.post("/runs", status_code=201)
    def create_run(body: dict = Body(...)):
        try:
            if "config_path" in body:
                config = parse_run_config(body["config_path"])
            elif "config" in body:
                config = config_from_mapping(body["config"], body.get("base_dir", "."))
            else:
                raise ConfigError("body must carry 'config_path' or 'config'")
            counter["n"] += 1
            run_id = f"run-{counter['n']}"
            sessions[run_id] = RunSession(run_id, config)
        except _VALIDATION_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return sessions[run_id].describe()

    @app.get("/runs")
    def list_runs():
        return [s.describe() for s in sessions.values()]

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return _session(run_id).describe()

    @app.post("/runs/{run_id}/control")
    def control(run_id: str, body: dict = Body(...)):
        try:
            return _session(run_id).control(body.get("action", ""), body.get("speed"))
        except InterventionError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.post("/runs/{run_id}/interventions")
    def intervene(run_id: str, body: dict = Body(...)):
        try:
            return _session(run_id).intervene(body)
        except InterventionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/runs/{run_id}/frames")
    def frames(run_id: str, from_: int = Query(0, alias="from")):
        session = _session(run_id)
        events = session.events_from(from_)
        return {"from": from_, "events": events, "next": from_ + len(events)}

    @app.websocket("/runs/{run_id}/stream")
    async def stream(websocket: WebSocket, run_id: str):
        await websocket.accept()
        if run_id not in sessions:
            await websocket.send_text(json.dumps({"type": "error", "detail": "unknown run"}))
            await websocket.close()
            return
        session = sessions[run_id]
        cursor = int(websocket.query_params.get("from", 0) or 0)
        try:
            while True:
                batch = session.events_from(cursor)
                for event in batch:
                    await websocket.send_text(json.dumps(event))
                    if event.get("type") == "end":
                        await websocket.close()
                        return
                cursor += len(batch)
                await asyncio.sleep(POLL_SECONDS)
        except WebSocketDisconnect:
            return

    if frontend_dir is not None and Path(frontend_dir).exists():
        app.mount("/ui", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

        @app.get("/")
        def index():
            return RedirectResponse(url="/ui/")

    return app


def serve(config: RunConfig | None = None, host: str = "127.0.0.1",
          port: int = 8765, frontend_dir: str | None = None) -> None:
    import uvicorn
    if frontend_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "site"
        if bundled.exists():
            frontend_dir = str(bundled)
    app = create_app(frontend_dir=frontend_dir, preset_config=config)
    uvicorn.run(app, host=host, port=port)
