"""HTTP facade: read-only queries plus what-if and simulation over workspaces.

Workspaces are subdirectories of a root directory; the path segment after
/v1/workspaces/ is the subdirectory name. Snapshots are immutable and cached
keyed on the manifest bytes, so a rebuilt directory is picked up as an atomic
swap while in-flight requests finish on the old snapshot.

All success bodies are produced by the same canonical JSON serializer the CLI
uses, so identical queries return byte-identical payloads on both surfaces.
Error bodies are ``{code, message, detail}``.
"""
from __future__ import annotations

import asyncio
import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field
from starlette.concurrency import run_in_threadpool

from .errors import (
    CapacityError,
    InfeasibleTargetError,
    MissingIndicatorError,
    UnknownIdError,
    WorkspaceError,
    WorkspaceRebuildingError,
)
from .jsonutil import canonical_dumps
from .spatial import complexity_gradient
from .strategy import (
    Policy,
    PortfolioSchedule,
    expected_completion,
    load_instance,
    portfolio_split,
    simulate,
)
from .workspace import MANIFEST_NAME, IndicatorsUnavailableError, Workspace


class ServiceError(Exception):
    """An error with a fixed HTTP status and a stable machine-readable code."""

    def __init__(self, status: int, code: str, message: str, detail: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"code": self.code, "message": self.message,
                     "detail": self.detail},
        )


class WorkspaceRegistry:
    """Loads and caches workspace snapshots from a root directory.

    The cache key is the manifest text: when a rebuild replaces the directory
    the manifest changes, the next request loads the new snapshot, and the
    cache entry is swapped atomically (readers that already hold the old
    snapshot are unaffected — snapshots are immutable).
    """

    def __init__(self, root: Path):
        self.root = Path(root)
        self._lock = threading.Lock()
        self._cache: dict[str, tuple[str, Workspace]] = {}

    def get(self, wid: str) -> Workspace:
        if not wid or wid != Path(wid).name or wid.startswith("."):
            raise ServiceError(404, "unknown_workspace",
                               f"no workspace named {wid!r}")
        path = self.root / wid
        if not path.is_dir():
            raise ServiceError(404, "unknown_workspace",
                               f"no workspace named {wid!r}")
        manifest = path / MANIFEST_NAME
        if not manifest.is_file():
            raise ServiceError(409, "workspace_rebuilding",
                               f"workspace {wid!r} has no manifest yet; "
                               f"it may still be building")
        stamp = manifest.read_text(encoding="utf-8")
        with self._lock:
            cached = self._cache.get(wid)
        if cached is not None and cached[0] == stamp:
            return cached[1]
        try:
            ws = Workspace.load(path)
        except WorkspaceRebuildingError as exc:
            raise ServiceError(409, "workspace_rebuilding", str(exc)) from exc
        except WorkspaceError as exc:
            raise ServiceError(500, "workspace_error", str(exc)) from exc
        with self._lock:
            self._cache[wid] = (stamp, ws)
        return ws


class WhatIfBody(BaseModel):
    location: str
    add: list[str] = Field(default_factory=list)
    value: str = "pci"
    recompute: str = "frozen"


class SimulateParams(BaseModel):
    trials: int | None = None
    seed: int | None = None
    ci_level: float = 0.95


class SimulateBody(BaseModel):
    nodes: list[str]
    edges: list[list[str]]
    active: list[str]
    policy: str = "greedy"
    order: list[str] | None = None
    params: SimulateParams = Field(default_factory=SimulateParams)


def _json(payload: dict) -> Response:
    return Response(content=canonical_dumps(payload),
                    media_type="application/json")


def create_app(workspace_dir: str | Path, *, sim_workers: int = 2) -> FastAPI:
    """Build the service over a directory of workspace subdirectories."""
    registry = WorkspaceRegistry(Path(workspace_dir))
    app = FastAPI(title="ecp", docs_url=None, redoc_url=None)
    sim_budget = asyncio.Semaphore(max(1, sim_workers))

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return exc.response()

    @app.exception_handler(RequestValidationError)
    async def _invalid_body(_req: Request, exc: RequestValidationError):
        return ServiceError(422, "invalid_body", "request body failed validation",
                            detail=exc.errors()).response()

    def _get_workspace(wid: str) -> Workspace:
        return registry.get(wid)

    @app.get("/v1/workspaces/{wid}/frontier/{location}")
    def frontier(wid: str, location: str, value: str = "pci"):
        ws = _get_workspace(wid)
        try:
            diagram = ws.frontier(location, value)
        except UnknownIdError as exc:
            raise ServiceError(404, "unknown_id", str(exc)) from exc
        except IndicatorsUnavailableError as exc:
            raise ServiceError(422, "missing_indicators", str(exc)) from exc
        except (ValueError, MissingIndicatorError) as exc:
            raise ServiceError(422, "invalid_request", str(exc)) from exc
        return _json(diagram.to_payload())

    @app.get("/v1/workspaces/{wid}/activities/{activity}/locations")
    def activity_locations(wid: str, activity: str):
        ws = _get_workspace(wid)
        try:
            diagram = ws.location_view(activity)
        except UnknownIdError as exc:
            raise ServiceError(404, "unknown_id", str(exc)) from exc
        return _json(diagram.to_payload())

    @app.get("/v1/workspaces/{wid}/spatial/gradients")
    def gradients(wid: str):
        ws = _get_workspace(wid)
        if ws.geo is None:
            raise ServiceError(404, "no_spatial_layer",
                               f"workspace {wid!r} was built without an "
                               f"adjacency table")
        try:
            gv = complexity_gradient(ws.scores, ws.geo)
        except UnknownIdError as exc:
            raise ServiceError(422, "invalid_request", str(exc)) from exc
        return _json(gv.to_payload())

    @app.post("/v1/workspaces/{wid}/whatif")
    def whatif(wid: str, body: WhatIfBody):
        ws = _get_workspace(wid)
        try:
            payload = ws.whatif(body.location, tuple(body.add),
                                value_kind=body.value, recompute=body.recompute)
        except UnknownIdError as exc:
            raise ServiceError(404, "unknown_id", str(exc)) from exc
        except IndicatorsUnavailableError as exc:
            raise ServiceError(422, "missing_indicators", str(exc)) from exc
        except (ValueError, MissingIndicatorError) as exc:
            raise ServiceError(422, "invalid_request", str(exc)) from exc
        return _json(payload)

    @app.post("/v1/workspaces/{wid}/simulate")
    async def simulate_endpoint(wid: str, body: SimulateBody):
        _get_workspace(wid)  # scoping: the workspace must exist
        try:
            g, active, _, _ = load_instance({
                "nodes": body.nodes, "edges": body.edges, "active": body.active,
            })
            policy = Policy.parse(body.policy,
                                  tuple(body.order) if body.order else None)
        except UnknownIdError as exc:
            raise ServiceError(404, "unknown_id", str(exc)) from exc
        except ValueError as exc:
            raise ServiceError(422, "invalid_request", str(exc)) from exc

        def run():
            if body.params.trials is None:
                return expected_completion(g, active, policy)
            if body.params.seed is None:
                raise ServiceError(422, "invalid_request",
                                   "params.trials needs params.seed "
                                   "(all randomness is seeded)")
            return simulate(g, active, policy, body.params.trials,
                            body.params.seed, ci_level=body.params.ci_level)

        async with sim_budget:  # long runs bounded; reads stay responsive
            try:
                ev = await run_in_threadpool(run)
            except CapacityError as exc:
                raise ServiceError(422, "capacity_exceeded", str(exc)) from exc
            except InfeasibleTargetError as exc:
                raise ServiceError(422, "infeasible_target", str(exc)) from exc
            except UnknownIdError as exc:
                raise ServiceError(404, "unknown_id", str(exc)) from exc
            except ValueError as exc:
                raise ServiceError(422, "invalid_request", str(exc)) from exc
        return _json(ev.to_payload())

    @app.get("/v1/workspaces/{wid}/portfolio")
    def portfolio(wid: str, eci: float, peak: float = 0.0, width: float = 1.0,
                  max_unrelated: float = 0.5):
        _get_workspace(wid)  # scoping: the workspace must exist
        try:
            schedule = PortfolioSchedule(peak, width, max_unrelated)
        except ValueError as exc:
            raise ServiceError(422, "invalid_request", str(exc)) from exc
        return _json(portfolio_split(eci, schedule).to_payload())

    return app
