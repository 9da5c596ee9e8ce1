"""REST surface of the behavior service.

Endpoints (JSON bodies mirror the store records; errors come back as
{"error": <code>, "path": <field>}):

    GET/POST        /api/profiles
    GET/PUT/DELETE  /api/profiles/{id}
    GET/PUT         /api/robot
    POST            /api/exp/{profile_id}
    GET             /api/exp/{request_id}
    GET/PUT         /api/assets/{id}        (opaque bytes)
    GET             /api/export             (canonical dump)

The data directory comes from the CLI flag; the listen port falls back to
the SOBOT_BEHAVIOR_PORT environment variable.
"""

from __future__ import annotations

import os
import threading

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from sobot.behavior.exp import BehaviorRuntime
from sobot.behavior.store import AssetMissing, BehaviorStore, NotFound, ValidationError
from sobot.bus import Bus


def _error(status: int, code: str, path: str = "") -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "path": path})


def create_app(store: BehaviorStore, runtime: BehaviorRuntime | None) -> FastAPI:
    app = FastAPI(title="behavior service")

    @app.exception_handler(NotFound)
    async def not_found(request, exc: NotFound):
        return _error(404, "NotFound", str(exc))

    @app.exception_handler(ValidationError)
    async def invalid(request, exc: ValidationError):
        return _error(400, "ValidationError", exc.path)

    @app.exception_handler(AssetMissing)
    async def asset_missing(request, exc: AssetMissing):
        return _error(400, "AssetMissing", exc.path)

    @app.get("/api/profiles")
    def list_profiles():
        return store.list_profiles()

    @app.post("/api/profiles", status_code=201)
    async def create_profile(request: Request):
        return store.create_profile(await request.json())

    @app.get("/api/profiles/{profile_id}")
    def get_profile(profile_id: str):
        return store.get_profile(profile_id)

    @app.put("/api/profiles/{profile_id}")
    async def update_profile(profile_id: str, request: Request):
        return store.update_profile(profile_id, await request.json())

    @app.delete("/api/profiles/{profile_id}", status_code=204)
    def delete_profile(profile_id: str):
        store.delete_profile(profile_id)
        return Response(status_code=204)

    @app.get("/api/robot")
    def get_robot():
        return store.get_robot()

    @app.put("/api/robot")
    async def put_robot(request: Request):
        return store.put_robot(await request.json())

    @app.post("/api/exp/{profile_id}", status_code=202)
    def trigger_exp(profile_id: str):
        if runtime is None:
            return _error(503, "NoBus", "behavior runtime not attached")
        return runtime.trigger(profile_id)

    @app.get("/api/exp/{request_id}")
    def get_exp(request_id: str):
        if runtime is None:
            return _error(503, "NoBus", "behavior runtime not attached")
        return runtime.get_request(request_id)

    @app.put("/api/assets/{asset_id}", status_code=201)
    async def put_asset(asset_id: str, request: Request):
        store.assets.put(asset_id, await request.body())
        return {"id": asset_id, "size": len(store.assets.get(asset_id))}

    @app.get("/api/assets/{asset_id}")
    def get_asset(asset_id: str):
        return Response(content=store.assets.get(asset_id),
                        media_type="application/octet-stream")

    @app.get("/api/export")
    def export_dump():
        return Response(content=store.export_dump(), media_type="application/json")

    return app


class BehaviorServer:
    def __init__(self, app: FastAPI, port: int):
        import uvicorn

        self._config = uvicorn.Config(app, host="127.0.0.1", port=port,
                                      log_level="warning")
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True,
                                        name="behavior-http")
        self._thread.start()
        while not self._server.started and self._thread.is_alive():
            threading.Event().wait(0.01)
        self.port = self._server.servers[0].sockets[0].getsockname()[1]

    def close(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=5)


def serve_behavior(bus: Bus, data_dir: str, port: int | None = None) -> BehaviorServer:
    if port is None:
        port = int(os.environ.get("SOBOT_BEHAVIOR_PORT", "8080"))
    store = BehaviorStore(data_dir)
    runtime = BehaviorRuntime(bus, store)
    return BehaviorServer(create_app(store, runtime), port)
