"""HTTP facade over parse / point / reason for the companion workbench UI.

Stateless besides the params, lexicon, and embedder loaded at startup:
every response is a pure function of the request body, so concurrent
identical requests return identical bodies. Pointing evidence arrives either
as a recorded trajectory or as an explicit clicked ground point (scored as a
single-sample kernel density with the configured bandwidth).
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .embeddings import EmbeddingProvider
from .gesture import DEFAULT_CLICK_BANDWIDTH, trajectory_from_dict
from .instruction import step_to_dict
from .pipeline import make_embedder, program_for, resolve
from .reasoner import ReasonerParams, identity_params
from .scene import scene_from_dict
from .vocab import (
    DEFAULT_LEXICON,
    DEMONSTRATIVES,
    RELATIONS,
    Lexicon,
    lexicon_to_dict,
)


class ParseRequest(BaseModel):
    instruction: str


class ReasonOptions(BaseModel):
    no_gesture: bool = False
    trace: bool = False
    temperature: float | None = None


class ReasonRequest(BaseModel):
    scene: dict
    instruction: str
    pointing: Any = None
    options: ReasonOptions = ReasonOptions()


def _split_pointing(pointing: Any):
    """The request's pointing field is a trajectory, a ground point, or absent."""
    if pointing is None:
        return None, None
    if isinstance(pointing, dict) and "samples" in pointing:
        return trajectory_from_dict(pointing), None
    if isinstance(pointing, dict) and {"x", "y"} <= set(pointing):
        return None, [float(pointing["x"]), float(pointing["y"])]
    if isinstance(pointing, (list, tuple)) and len(pointing) == 2:
        return None, [float(pointing[0]), float(pointing[1])]
    raise ValueError(
        "pointing must be a trajectory object, a ground point, or absent")


def create_app(params: ReasonerParams | None = None,
               lexicon: Lexicon = DEFAULT_LEXICON,
               embedder: EmbeddingProvider | None = None,
               click_bandwidth: float = DEFAULT_CLICK_BANDWIDTH) -> FastAPI:
    if embedder is None:
        dim = params.dim if params is not None else None
        embedder = make_embedder("hash", dim=dim or 50)
    if params is None:
        params = identity_params(embedder.dim)
    if params.dim != embedder.dim:
        raise ValueError(
            f"params dimension {params.dim} does not match embedding dimension "
            f"{embedder.dim}")

    app = FastAPI(title="pointref service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    app.state.params = params
    app.state.lexicon = lexicon
    app.state.embedder = embedder

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(ValueError)
    async def _domain_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/api/health")
    async def health():
        return {"ok": True}

    @app.get("/api/vocab")
    async def vocab():
        out = lexicon_to_dict(lexicon)
        out["demonstrative"] = list(DEMONSTRATIVES)
        out["relation"] = list(RELATIONS)
        return out

    @app.post("/api/parse")
    async def parse(req: ParseRequest):
        steps = program_for(instruction=req.instruction, lexicon=lexicon,
                            embedder=embedder)
        return {"steps": [step_to_dict(s) for s in steps]}

    @app.post("/api/reason")
    async def reason(req: ReasonRequest):
        scene = scene_from_dict(req.scene)
        trajectory, click = _split_pointing(req.pointing)
        active = params
        if req.options.temperature is not None:
            active = params.copy()
            active.temperature = float(req.options.temperature)
            if active.temperature <= 0:
                raise ValueError("temperature must be positive")
        return resolve(scene, active, lexicon, embedder,
                       instruction=req.instruction,
                       trajectory=trajectory, click=click,
                       no_gesture=req.options.no_gesture,
                       trace=req.options.trace,
                       click_bandwidth=click_bandwidth)

    return app
