"""Session server: create and edit scenes, step them, stream snapshots.

HTTP endpoints carry control (JSON in, JSON out); a WebSocket per session
streams one message per executed step, each message being the canonical
snapshot object plus a {"t": n, "parity": s} header.  Requests within a
session are serialized by a per-session lock; editing is restricted to
classical (single-branch) states unless the request collapses to a chosen
branch first, because cell-wise edits of a superposition are ill-defined.
"""
from __future__ import annotations

import asyncio
import itertools
import json
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse

from .evolution import DEFAULT_PRUNE_EPS, SimClock, parity_for_step, step
from .gadgets import catalogue, catalogue_json, transform_gadget
from .scattering import build_scattering_unitary, verify_scattering_unitary
from .state import Superposition, make_configuration, norm, snapshot_dict
from .scene import Scene, SceneError, parse_scene


@dataclass
class Session:
    sid: str
    scene: Scene
    state: Superposition
    clock: SimClock
    prune_eps: float
    u_checksum: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    frames: list = field(default_factory=list)  # step frames, for streaming


def _snapshot_message(session: Session) -> dict:
    msg = {"t": session.clock.t, "parity": parity_for_step(session.clock.t)}
    msg.update(snapshot_dict(session.state))
    return msg


def create_app() -> FastAPI:
    app = FastAPI(title="qgol session server")
    op = build_scattering_unitary()
    sessions: dict[str, Session] = {}
    counter = itertools.count(1)

    def get_session(sid: str) -> Session:
        try:
            return sessions[sid]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {sid}")

    @app.post("/sessions")
    def create_session(payload: dict):
        try:
            scene = parse_scene(payload, op)
        except SceneError as e:
            raise HTTPException(status_code=400, detail=str(e))
        sid = str(next(counter))
        prune_eps = (
            scene.prune_eps if scene.prune_eps is not None else DEFAULT_PRUNE_EPS
        )
        session = Session(
            sid=sid,
            scene=scene,
            state=dict(scene.initial),
            clock=SimClock(scene.clock_origin),
            prune_eps=prune_eps,
            u_checksum=op.checksum,
        )
        sessions[sid] = session
        return {"id": sid, "u_checksum": op.checksum, "snapshot": _snapshot_message(session)}

    @app.get("/sessions/{sid}/snapshot")
    def snapshot(sid: str):
        session = get_session(sid)
        with session.lock:
            return _snapshot_message(session)

    @app.post("/sessions/{sid}/advance")
    def advance(sid: str, payload: dict):
        session = get_session(sid)
        n = payload.get("n", 1)
        if not isinstance(n, int) or n < 0:
            raise HTTPException(status_code=400, detail="n must be a non-negative integer")
        with session.lock:
            for _ in range(n):
                session.state = step(
                    session.state,
                    parity_for_step(session.clock.t),
                    op,
                    prune_eps=session.prune_eps,
                )
                session.clock.t += 1
                session.frames.append(_snapshot_message(session))
            return _snapshot_message(session)

    @app.post("/sessions/{sid}/mutate")
    def mutate(sid: str, payload: dict):
        session = get_session(sid)
        allowed = {"add", "remove", "place_gadget", "collapse_to_branch"}
        unknown = set(payload) - allowed
        if unknown:
            raise HTTPException(status_code=400, detail=f"unknown edit keys {sorted(unknown)}")
        with session.lock:
            state = session.state
            if len(state) > 1:
                branch = payload.get("collapse_to_branch")
                if branch is None:
                    raise HTTPException(
                        status_code=409,
                        detail="editing a multi-branch state requires collapse_to_branch",
                    )
                configs = sorted(state)
                if not isinstance(branch, int) or not 0 <= branch < len(configs):
                    raise HTTPException(status_code=400, detail="bad branch index")
                state = {configs[branch]: 1.0 + 0j}
            if not state:
                state = {(): 1.0 + 0j}
            (config, _amp), = state.items()
            cells = set(config)
            for c in payload.get("add", ()):
                cells.add(tuple(c))
            for c in payload.get("remove", ()):
                cells.discard(tuple(c))
            placement = payload.get("place_gadget")
            if placement is not None:
                cat = catalogue(op)
                name = placement.get("name")
                if name not in cat:
                    raise HTTPException(status_code=400, detail=f"unknown gadget {name!r}")
                anchor = tuple(placement.get("anchor", (0, 0, 0)))
                orientation = placement.get("orientation", 0)
                if any(v % 2 for v in anchor):
                    raise HTTPException(status_code=400, detail="gadget anchor must be even")
                placed = transform_gadget(cat[name], orientation, anchor, 0)
                overlap = cells & set(placed.cells)
                if overlap:
                    raise HTTPException(
                        status_code=409, detail=f"placement collision at {sorted(overlap)[:4]}"
                    )
                cells.update(placed.cells)
            session.state = {make_configuration(cells): 1.0 + 0j}
            return _snapshot_message(session)

    @app.post("/sessions/{sid}/reset")
    def reset(sid: str):
        session = get_session(sid)
        with session.lock:
            session.state = dict(session.scene.initial)
            session.clock = SimClock(session.scene.clock_origin)
            return _snapshot_message(session)

    @app.get("/rules/report", response_class=PlainTextResponse)
    def rules_report():
        return verify_scattering_unitary(op).to_text()

    @app.get("/gadgets")
    def gadgets():
        return json.loads(catalogue_json(op))

    @app.websocket("/sessions/{sid}/stream")
    async def stream(websocket: WebSocket, sid: str):
        session = sessions.get(sid)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        sent = len(session.frames)
        try:
            await websocket.send_json(_snapshot_message(session))
            while True:
                if sent < len(session.frames):
                    frame = session.frames[sent]
                    sent += 1
                    await websocket.send_json(frame)
                else:
                    await asyncio.sleep(0.02)
        except (WebSocketDisconnect, RuntimeError):
            pass

    return app
