"""HTTP JSON endpoints for interactive play (the serve verb).

    POST /session                    {family, x0, budget, r} -> {id, state}
    GET  /session/{id}               -> current state
    POST /session/{id}/protect       [[coords], ..] -> state after the spread
    POST /session/{id}/undo          -> state of the previous turn
    GET  /session/{id}/trace         -> JSON-lines trace of the play so far
    GET  /session/{id}/board?margin=M -> window of vertices around the fire
    POST /session/{id}/close         {save?} -> drop the session

Sessions live in memory under opaque ids.  Writes to one session are
serialized by a per-session lock; reads need no lock (state snapshots are
immutable).  Every numeric field in a payload is an integer or an exact
rational string "p/q".  Rule violations (protecting a burning vertex,
overspending the budget) come back as structured 4xx errors naming the
offending vertices; the client is expected to pre-check, the server always
re-checks.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse

from .core import LazyGraph, VertexKey, ball
from .engine import BudgetSeq, FireState, initial_state, step
from .errors import BudgetExceededError, FiregraphError, ProtectionOverlapError
from .families import graph_from_text, hyper37_layer


def _key_lists(keys) -> list[list[int]]:
    return [list(k.coords) for k in sorted(keys)]


@dataclass
class Session:
    id: str
    g: LazyGraph
    r: int
    budget: BudgetSeq
    x0: frozenset[VertexKey]
    states: list[FireState]
    protections: list[tuple[VertexKey, ...]] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def state(self) -> FireState:
        return self.states[-1]

    def stable(self) -> bool:
        if len(self.states) < 2:
            return False
        return self.states[-1].burning == self.states[-2].burning

    def state_json(self) -> dict:
        st = self.state
        return {
            "id": self.id,
            "family": self.g.family,
            "r": self.r,
            "turn": st.turn,
            "burning": _key_lists(st.burning),
            "protected": _key_lists(st.protected),
            "burned_total": len(st.burning),
            "next_budget": self.budget.f(st.turn + 1),
            "stable": self.stable(),
        }

    def trace_lines(self) -> str:
        header = {
            "kind": "game-trace",
            "family": self.g.family,
            "key_tag": self.g.base.tag,
            "x0": _key_lists(self.x0),
            "r": self.r,
            "budget": self.budget.to_json(horizon=max(1, len(self.protections))),
            "radius_cap": 0,
            "outcome": "open",
            "containment_time": None,
            "burned_total": len(self.state.burning),
        }
        lines = [json.dumps(header, separators=(",", ":"))]
        for n, w in enumerate(self.protections, start=1):
            prev, cur = self.states[n - 1], self.states[n]
            lines.append(
                json.dumps(
                    {
                        "turn": n,
                        "protected": _key_lists(w),
                        "burning_count": len(cur.burning),
                        "frontier_count": len(cur.burning - prev.burning),
                    },
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines) + "\n"


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse({"code": code, "message": message, **extra}, status_code=status)


def create_app() -> FastAPI:
    app = FastAPI(title="firegraph serve")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(sid: str) -> Session | None:
        return sessions.get(sid)

    @app.exception_handler(FiregraphError)
    async def _fg_error(request: Request, exc: FiregraphError):
        return JSONResponse(exc.payload(), status_code=400)

    @app.exception_handler(ProtectionOverlapError)
    async def _overlap_error(request: Request, exc: ProtectionOverlapError):
        doc = exc.payload()
        doc["vertices"] = [list(k.coords) for k in exc.offending]
        return JSONResponse(doc, status_code=400)

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        return _error(400, "invalid-argument", "malformed request body")

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return _error(400, "invalid-argument", str(exc))

    @app.exception_handler(KeyError)
    async def _key_error(request: Request, exc: KeyError):
        return _error(400, "invalid-argument", f"missing field {exc}")

    @app.exception_handler(TypeError)
    async def _type_error(request: Request, exc: TypeError):
        return _error(400, "invalid-argument", str(exc))

    @app.post("/session")
    async def create_session(body: dict):
        g = graph_from_text(body["family"])
        r = int(body["r"])
        if r < 1:
            return _error(400, "invalid-argument", "need r >= 1")
        budget = BudgetSeq.from_json(body["budget"])
        x0_spec = body["x0"]
        if isinstance(x0_spec, dict) and "ball" in x0_spec:
            x0 = ball(g, [g.base], int(x0_spec["ball"])).members
        elif isinstance(x0_spec, dict) and "keys" in x0_spec:
            x0 = frozenset(
                VertexKey(g.base.tag, tuple(int(c) for c in row))
                for row in x0_spec["keys"]
            )
        else:
            return _error(400, "invalid-argument", "x0 must be {ball: M} or {keys: [..]}")
        if not x0:
            return _error(400, "invalid-argument", "x0 is empty")
        bad = [k for k in x0 if not g.contains(k)]
        if bad:
            return _error(400, "unknown-vertex", "x0 has vertices outside the graph",
                          vertices=_key_lists(bad))
        sid = uuid.uuid4().hex[:12]
        sess = Session(sid, g, r, budget, x0, [initial_state(x0)])
        with registry_lock:
            sessions[sid] = sess
        return {"id": sid, "state": sess.state_json()}

    @app.get("/session/{sid}")
    async def read_session(sid: str):
        sess = get_session(sid)
        if sess is None:
            return _error(404, "unknown-session", f"no session {sid}")
        return sess.state_json()

    @app.post("/session/{sid}/protect")
    async def protect(sid: str, body: list[list[int]] | dict):
        sess = get_session(sid)
        if sess is None:
            return _error(404, "unknown-session", f"no session {sid}")
        rows = body["keys"] if isinstance(body, dict) else body
        keys = frozenset(
            VertexKey(sess.g.base.tag, tuple(int(c) for c in row)) for row in rows
        )
        if len(keys) < len(rows):
            return _error(400, "invalid-argument", "duplicate vertices in request")
        bad = [k for k in keys if not sess.g.contains(k)]
        if bad:
            return _error(400, "unknown-vertex", "vertices outside the graph",
                          vertices=_key_lists(bad))
        with sess.lock:
            turn = sess.state.turn + 1
            quota = sess.budget.f(turn)
            if len(keys) > quota:
                raise BudgetExceededError(
                    f"turn {turn}: {len(keys)} protections > budget f_{turn} = {quota}"
                )
            # step() re-checks the overlap rule and raises protection-overlap
            nxt = step(sess.g, sess.state, keys, sess.r)
            sess.states.append(nxt)
            sess.protections.append(tuple(sorted(keys)))
            return sess.state_json()

    @app.post("/session/{sid}/undo")
    async def undo(sid: str):
        sess = get_session(sid)
        if sess is None:
            return _error(404, "unknown-session", f"no session {sid}")
        with sess.lock:
            if len(sess.states) == 1:
                return _error(409, "cannot-undo", "already at turn 0")
            sess.states.pop()
            sess.protections.pop()
            return sess.state_json()

    @app.get("/session/{sid}/trace")
    async def trace(sid: str):
        sess = get_session(sid)
        if sess is None:
            return _error(404, "unknown-session", f"no session {sid}")
        return PlainTextResponse(sess.trace_lines(), media_type="application/jsonl")

    @app.get("/session/{sid}/board")
    async def board(sid: str, margin: int = 2):
        sess = get_session(sid)
        if sess is None:
            return _error(404, "unknown-session", f"no session {sid}")
        if margin < 1 or margin > 12:
            return _error(400, "invalid-argument", "margin must be in 1..12")
        st = sess.state
        window = ball(sess.g, st.burning | st.protected, margin).members
        doc: dict = {
            "margin": margin,
            "vertices": _key_lists(window),
        }
        if sess.g.family == "hyper37":
            levels = sorted({k.coords[0] for k in window})
            doc["ring_sizes"] = {
                str(n): (1 if n == 0 else hyper37_layer(n).size) for n in levels
            }
        return doc

    @app.post("/session/{sid}/close")
    async def close(sid: str, body: dict | None = None):
        sess = get_session(sid)
        if sess is None:
            return _error(404, "unknown-session", f"no session {sid}")
        saved = None
        with sess.lock:
            if body and body.get("save"):
                saved = str(body["save"])
                with open(saved, "w") as fh:
                    fh.write(sess.trace_lines())
            with registry_lock:
                del sessions[sid]
        return {"closed": sid, "saved": saved}

    return app
