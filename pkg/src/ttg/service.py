"""HTTP service exposing solve/generate/health to the planner UI and scripts.

Stateless: every handler is a pure function of its payload (plus the env
configuration snapshot taken at startup), so any request sequence replays
to identical responses.  Inventory is generated on demand from a hash of
the canonical request when the caller does not supply one, keeping the demo
self-contained.
"""

from __future__ import annotations

import hashlib
import os
import random
from dataclasses import dataclass
from typing import Any, Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .generator import (
    ConfigError,
    GeneratorConfig,
    InfeasibleRequest,
    sample_inventory,
    sample_pair,
)
from .model import EmptySegment, GridTooCoarse, ModelConfig
from .schema import (
    Inventory,
    OBJECTIVE_KINDS,
    SchemaViolation,
    canonicalize,
    inventory_from_dict,
    inventory_to_dict,
    itinerary_to_dict,
    request_from_dict,
    request_to_dict,
)
from .solver import SolverParams, solve_request


@dataclass(frozen=True)
class ServiceConfig:
    time_limit_ms: Optional[int] = None
    slot_minutes: int = 60

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        tl = os.environ.get("TTG_TIME_LIMIT_MS")
        sm = os.environ.get("TTG_SLOT_MINUTES")
        return cls(time_limit_ms=int(tl) if tl else None,
                   slot_minutes=int(sm) if sm else 60)


def inventory_seed(canonical_request: str) -> int:
    digest = hashlib.sha256(canonical_request.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _error(status: int, kind: str, detail: str,
           field: Optional[str] = None) -> JSONResponse:
    body: dict[str, Any] = {"error": kind, "detail": detail}
    if field is not None:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    cfg = config or ServiceConfig.from_env()
    app = FastAPI(title="travel planner service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    params = SolverParams(time_limit_ms=cfg.time_limit_ms)
    model_config = ModelConfig(slot_minutes=cfg.slot_minutes)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/generate")
    def generate(payload: dict) -> Any:
        seed = payload.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool):
            return _error(400, "SchemaViolation", "seed must be an integer",
                          "seed")
        try:
            gen_config = GeneratorConfig.from_dict(payload.get("config", {}))
        except (ConfigError, KeyError, TypeError, ValueError) as e:
            return _error(400, "ConfigError", str(e))
        try:
            request, inventory = sample_pair(seed, 0, gen_config)
        except InfeasibleRequest as e:
            return _error(422, "InfeasibleRequest", str(e))
        return {"schema_version": 1, "request": request_to_dict(request),
                "inventory": inventory_to_dict(inventory)}

    @app.post("/api/solve")
    def solve(payload: dict) -> Any:
        try:
            request = request_from_dict(payload.get("request"), "request")
        except SchemaViolation as e:
            return _error(400, "SchemaViolation", e.message, e.path)
        if "inventory" in payload:
            try:
                inventory = inventory_from_dict(payload["inventory"])
            except SchemaViolation as e:
                return _error(400, "SchemaViolation", e.message, e.path)
        else:
            rng = random.Random(inventory_seed(canonicalize(request)))
            try:
                inventory = sample_inventory(rng, request, GeneratorConfig())
            except InfeasibleRequest as e:
                return _error(422, "InfeasibleRequest", str(e))

        options: dict[str, Any] = {}
        for kind in OBJECTIVE_KINDS:
            try:
                _, result, itinerary = solve_request(
                    request, inventory, kind, params, model_config)
            except EmptySegment as e:
                return _error(422, "EmptySegment", str(e))
            except GridTooCoarse as e:
                return _error(422, "GridTooCoarse", str(e))
            timing = {
                "translate_ms": None,
                "load_ms": round(result.load_ms, 3),
                "solve_ms": round(result.solve_ms, 3),
                "total_ms": round(result.total_ms, 3),
            }
            if result.status.startswith("time_limit"):
                return _error(503, "TimeLimit",
                              f"{kind} hit the solver time limit")
            if result.status == "optimal":
                # echo the chosen offers so clients can render details even
                # when the inventory was generated server-side
                flights = inventory_to_dict(Inventory(
                    tuple(inventory.flight(fid)
                          for fid in itinerary.chosen_flights),
                    tuple(inventory.hotel(s.hotel_id)
                          for s in itinerary.hotel_stays)))
                options[kind] = {
                    "status": "optimal",
                    "itinerary": itinerary_to_dict(itinerary),
                    "offers": {"flights": flights["flights"],
                               "hotels": flights["hotels"]},
                    "timing": timing,
                }
            else:
                options[kind] = {
                    "status": "infeasible",
                    "detail": "no itinerary satisfies every constraint",
                    "timing": timing,
                }
        return {
            "schema_version": 1,
            "request": request_to_dict(request),
            "options": options,
        }

    return app


app = create_app()
