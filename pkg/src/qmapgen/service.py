"""HTTP session service for interactive games.

Sessions live in memory; all game rules stay in the engine, the service only
validates inputs and serializes state. Versioned under /v1; request bodies
reject unknown fields.
"""

from __future__ import annotations

import threading
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from .engine import Game, MissingPlacementError, RunConfig
from .policy import payoffs
from .render import PALETTE

__all__ = ["create_app", "SessionState", "rle_encode", "rle_decode"]


def rle_encode(grid: np.ndarray) -> list[list[int]]:
    """Row-major run-length encoding: [[value, run], ...]."""
    flat = grid.reshape(-1)
    if flat.size == 0:
        return []
    changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], changes))
    ends = np.concatenate((changes, [flat.size]))
    return [[int(flat[s]), int(e - s)] for s, e in zip(starts, ends)]


def rle_decode(runs: list[list[int]], shape: tuple[int, int]) -> np.ndarray:
    total = shape[0] * shape[1]
    flat = np.empty(total, dtype=np.int32)
    pos = 0
    for value, run in runs:
        flat[pos : pos + run] = value
        pos += run
    if pos != total:
        raise ValueError(f"run lengths cover {pos} cells, expected {total}")
    return flat.reshape(shape)


class CouplingBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n: int
    edges: list[list[int]]


class MapBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    L: int = 256
    r: int = 5
    aggressive_threshold: Optional[float] = None


class SessionCreateBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    coupling: CouplingBody
    map: MapBody = Field(default_factory=MapBody)
    rounds: int = 20
    seed: int = 0
    tomography_mode: str = "exact"
    shots: int = 8192
    opponent_coloring: str = "none"
    human_nations: list[int] = Field(default_factory=list)
    initial_layout: Optional[list[list[int]]] = None


class PlacementBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    nation: int
    cell: list[int]


class SessionState:
    """One interactive game plus its pending human placements."""

    def __init__(self, session_id: str, game: Game):
        self.session_id = session_id
        self.game = game
        self.pending: dict[int, tuple[int, int]] = {}
        self.lock = threading.Lock()

    def waiting_for(self) -> list[int]:
        return [
            j
            for j in sorted(self.game.config.human_nations)
            if not self.game.world.is_eliminated(j) and j not in self.pending
        ]

    @property
    def phase(self) -> str:
        if self.game.finished:
            return "finished"
        return "awaiting-input" if self.waiting_for() else "advancing"

    def group_of(self, nation: int) -> str:
        if nation in self.game.config.human_nations:
            return "human"
        if nation in self.game.opponents:
            return "opponent"
        return "standard"

    def render_model(self) -> dict:
        game = self.game
        world = game.world
        latest = game.records[-1] if game.records else None
        return {
            "session_id": self.session_id,
            "round": game.rounds_played,
            "rounds": game.config.rounds,
            "phase": self.phase,
            "awaiting": self.waiting_for(),
            "L": world.config.L,
            "r": world.config.r,
            "grid_rle": rle_encode(world.ownership),
            "cities": [c.to_dict() for c in world.cities],
            "ruins": [
                [int(r), int(c)] for r, c in zip(*np.nonzero(world.ruins))
            ],
            "areas": [world.area(j) for j in range(game.n)],
            "stats": latest.nation_stats if latest else None,
            "groups": [self.group_of(j) for j in range(game.n)],
            "pending": {str(j): list(cell) for j, cell in self.pending.items()},
            "palette": [list(color) for color in PALETTE],
        }


def create_app() -> FastAPI:
    app = FastAPI(title="qmapgen session service")
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, SessionState] = {}
    app.state.sessions = sessions

    def get_session(session_id: str) -> SessionState:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: SessionCreateBody):
        try:
            config = RunConfig.from_dict(body.model_dump())
            game = Game(config)
        except (ValueError, RuntimeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = SessionState(uuid.uuid4().hex, game)
        sessions[session.session_id] = session
        return {"session_id": session.session_id, "state": session.render_model()}

    @app.get("/v1/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return session.render_model()

    @app.get("/v1/sessions/{session_id}/advisor/{nation}")
    def get_advisor(session_id: str, nation: int):
        session = get_session(session_id)
        with session.lock:
            game = session.game
            if not 0 <= nation < game.n:
                raise HTTPException(status_code=422, detail="unknown nation")
            if game.world.is_eliminated(nation):
                return {
                    "nation": nation,
                    "eliminated": True,
                    "rows": [],
                    "suggested_tactic": None,
                    "suggested_cell": None,
                    "bloch": list(map(float, _bloch(game, nation))),
                }
            neighbours = game.neighbour_map()
            snap = game.snapshot(game.pair_set(neighbours), game.rounds_played + 1)
            table = payoffs(snap, neighbours)
            tactic, cell = game.advisor(nation)
            rows = [
                [j, k, axis, value]
                for j, k, axis, value in table.rows()
                if j == nation
            ]
            return {
                "nation": nation,
                "eliminated": False,
                "rows": rows,
                "suggested_tactic": tactic.to_dict() if tactic else None,
                "suggested_cell": list(cell) if cell else None,
                "bloch": list(map(float, _bloch(game, nation))),
            }

    @app.post("/v1/sessions/{session_id}/placements")
    def post_placement(session_id: str, body: PlacementBody):
        session = get_session(session_id)
        with session.lock:
            game = session.game
            if game.finished:
                raise HTTPException(status_code=409, detail="session finished")
            if not 0 <= body.nation < game.n:
                raise HTTPException(status_code=422, detail="unknown nation")
            if body.nation not in game.config.human_nations:
                raise HTTPException(status_code=422, detail="not human nation")
            if len(body.cell) != 2:
                raise HTTPException(status_code=422, detail="out of bounds")
            row, col = body.cell
            L = game.config.map_config.L
            if not (0 <= row < L and 0 <= col < L):
                raise HTTPException(status_code=422, detail="out of bounds")
            if game.world.ruins[row, col]:
                raise HTTPException(status_code=422, detail="ruin")
            if game.world.city_at((row, col)) is not None:
                raise HTTPException(status_code=422, detail="occupied")
            session.pending[body.nation] = (int(row), int(col))
            return {"accepted": True, "nation": body.nation, "cell": [row, col]}

    @app.post("/v1/sessions/{session_id}/advance")
    def advance(session_id: str):
        session = get_session(session_id)
        with session.lock:
            game = session.game
            if game.finished:
                raise HTTPException(status_code=409, detail="session finished")
            waiting = session.waiting_for()
            if waiting:
                raise HTTPException(
                    status_code=409,
                    detail={"waiting": waiting, "message": "placements missing"},
                )
            try:
                record = game.run_round(dict(session.pending))
            except MissingPlacementError as exc:
                raise HTTPException(status_code=409, detail={"waiting": exc.waiting})
            session.pending.clear()
            return {"record": record.to_dict()}

    @app.get("/v1/sessions/{session_id}/history")
    def get_history(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return session.game.history()

    return app


def _bloch(game: Game, nation: int) -> tuple[float, float, float]:
    from . import qsim

    return tuple(qsim.bloch_vector(game.network, nation))
