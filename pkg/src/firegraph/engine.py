"""Containment game engine.

One round, at turn n >= 1: the defender protects a set W_n of unburned,
unprotected vertices (at most f_n of them), then the fire extends along every
path of length <= r that avoids all protections placed so far.  Protected
vertices never burn; burned vertices stay burned.  A play is contained when
the burning set stops changing once the schedule is exhausted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .core import LazyGraph, VertexKey, ball
from .errors import (
    BudgetExceededError,
    NonMonotoneBudgetError,
    PartitionInfeasibleError,
    ProtectionOverlapError,
    ReplayMismatchError,
)

OUTCOME_CONTAINED = "contained"
OUTCOME_EXHAUSTED = "budget-exhausted-still-spreading"
OUTCOME_CAP = "cap-exceeded"


@dataclass(frozen=True)
class BudgetSeq:
    """Per-turn protection budget f_n, n >= 1.

    kinds: constant (f_n = c), polynomial (f_n = c * n**d), explicit (listed
    values, 0 beyond the list), callback (arbitrary rule; serialized as an
    explicit prefix).
    """

    kind: str
    c: int = 0
    d: int = 0
    values: tuple[int, ...] = ()
    fn: Optional[Callable[[int], int]] = field(default=None, repr=False, compare=False)

    @staticmethod
    def constant(c: int) -> "BudgetSeq":
        if c < 0:
            raise ValueError("budget must be nonnegative")
        return BudgetSeq("constant", c=c)

    @staticmethod
    def polynomial(c: int, d: int) -> "BudgetSeq":
        if c < 0 or d < 0:
            raise ValueError("budget must be nonnegative")
        return BudgetSeq("polynomial", c=c, d=d)

    @staticmethod
    def explicit(values: Iterable[int]) -> "BudgetSeq":
        vals = tuple(int(v) for v in values)
        if any(v < 0 for v in vals):
            raise ValueError("budget must be nonnegative")
        return BudgetSeq("explicit", values=vals)

    @staticmethod
    def callback(fn: Callable[[int], int]) -> "BudgetSeq":
        return BudgetSeq("callback", fn=fn)

    def f(self, n: int) -> int:
        if n < 1:
            raise ValueError("turns are numbered from 1")
        if self.kind == "constant":
            return self.c
        if self.kind == "polynomial":
            return self.c * n**self.d
        if self.kind == "explicit":
            return self.values[n - 1] if n <= len(self.values) else 0
        v = int(self.fn(n))
        if v < 0:
            raise ValueError(f"budget callback returned {v} at {n}")
        return v

    def is_nondecreasing(self, upto: int) -> bool:
        if self.kind in ("constant", "polynomial"):
            return True
        vals = [self.f(n) for n in range(1, upto + 1)]
        return all(a <= b for a, b in zip(vals, vals[1:]))

    def to_json(self, horizon: int = 0) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "c": self.c}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "c": self.c, "d": self.d}
        if self.kind == "explicit":
            return {"kind": "explicit", "values": list(self.values)}
        h = max(horizon, 1)
        return {"kind": "explicit", "values": [self.f(n) for n in range(1, h + 1)]}

    @staticmethod
    def from_json(d: dict) -> "BudgetSeq":
        kind = d["kind"]
        if kind == "constant":
            return BudgetSeq.constant(d["c"])
        if kind == "polynomial":
            return BudgetSeq.polynomial(d["c"], d["d"])
        if kind == "explicit":
            return BudgetSeq.explicit(d["values"])
        raise ValueError(f"unknown budget kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Strategy:
    """Spread radius, budget, and the protection schedule W_1..W_N."""

    r: int
    budget: BudgetSeq
    schedule: tuple[frozenset[VertexKey], ...]
    provenance: Optional[dict] = None

    def validate(self) -> None:
        seen: set[VertexKey] = set()
        for n, w in enumerate(self.schedule, start=1):
            cap = self.budget.f(n)
            if len(w) > cap:
                raise BudgetExceededError(f"|W_{n}| = {len(w)} > f_{n} = {cap}")
            overlap = seen.intersection(w)
            if overlap:
                raise ProtectionOverlapError(
                    f"schedule sets overlap at turn {n}", sorted(overlap)
                )
            seen.update(w)

    def protected_union(self) -> frozenset[VertexKey]:
        out: set[VertexKey] = set()
        for w in self.schedule:
            out.update(w)
        return frozenset(out)


@dataclass(frozen=True)
class FireState:
    turn: int
    burning: frozenset[VertexKey]
    protected: frozenset[VertexKey]


@dataclass(frozen=True)
class TurnRecord:
    turn: int
    protected: tuple[VertexKey, ...]
    burning_count: int
    frontier_count: int


@dataclass(frozen=True, eq=False)
class GameTrace:
    family: str
    x0: tuple[VertexKey, ...]
    r: int
    budget: BudgetSeq
    schedule: tuple[frozenset[VertexKey], ...]
    turns: tuple[TurnRecord, ...]
    outcome: str
    containment_time: Optional[int]
    burned_total: int
    radius_cap: int = 0
    states: tuple[FireState, ...] = ()  # runtime only, not serialized


def initial_state(x0: Iterable[VertexKey]) -> FireState:
    return FireState(0, frozenset(x0), frozenset())


def _checked_protection(state: FireState, protect: Iterable[VertexKey]) -> frozenset[VertexKey]:
    w = frozenset(protect)
    burning_hit = w & state.burning
    if burning_hit:
        raise ProtectionOverlapError(
            f"turn {state.turn + 1}: protecting burning vertices",
            sorted(burning_hit),
        )
    protected_hit = w & state.protected
    if protected_hit:
        raise ProtectionOverlapError(
            f"turn {state.turn + 1}: protecting already-protected vertices",
            sorted(protected_hit),
        )
    return w


def step(
    g: LazyGraph,
    state: FireState,
    protect: Iterable[VertexKey],
    r: int,
    *,
    cap: Optional[int] = None,
) -> FireState:
    """One turn: place protections, then spread by <= r punctured steps."""
    w = _checked_protection(state, protect)
    protected = state.protected | w
    bv = ball(g, state.burning, r, avoid=protected, cap=cap)
    return FireState(state.turn + 1, bv.members, protected)


def _spread_depth(old: frozenset, new_members: frozenset, layers) -> int:
    # deepest layer that actually added vertices this turn
    depth = 0
    for i, layer in enumerate(layers):
        if any(v not in old for v in layer):
            depth = i
    return depth


def run(
    g: LazyGraph,
    x0: Iterable[VertexKey],
    strategy: Strategy,
    *,
    radius_cap: Optional[int] = None,
    stall_window: int = 512,
    cap: Optional[int] = None,
    keep_states: bool = True,
) -> GameTrace:
    """Play the schedule, then empty turns until the fire is stable.

    Outcomes: ``contained`` once a post-schedule turn adds nothing (spread is
    deterministic and monotone, so one stable turn is stable forever), with
    containment_time the last turn that added vertices; ``cap-exceeded`` when
    the cumulative spread depth passes radius_cap (default 256*r) — for an
    unobstructed fire this equals the distance of the farthest burning vertex
    from x0; ``budget-exhausted-still-spreading`` when the fire is still
    growing stall_window turns past the end of the schedule.
    """
    strategy.validate()
    r = strategy.r
    if radius_cap is None:
        radius_cap = 256 * r
    state = initial_state(x0)
    states = [state]
    records: list[TurnRecord] = []
    n_sched = len(strategy.schedule)
    depth_used = 0
    outcome = None
    turn = 1
    while True:
        w = strategy.schedule[turn - 1] if turn <= n_sched else frozenset()
        if len(w) > strategy.budget.f(turn):
            raise BudgetExceededError(
                f"|W_{turn}| = {len(w)} > f_{turn} = {strategy.budget.f(turn)}"
            )
        prev = state
        wset = _checked_protection(prev, w)
        protected = prev.protected | wset
        bv = ball(g, prev.burning, r, avoid=protected, cap=cap)
        state = FireState(prev.turn + 1, bv.members, protected)
        frontier = state.burning - prev.burning
        records.append(TurnRecord(turn, tuple(sorted(w)), len(state.burning), len(frontier)))
        if keep_states:
            states.append(state)
        if frontier:
            depth_used += _spread_depth(prev.burning, state.burning, bv.layers)
        if turn >= n_sched and not frontier:
            outcome = OUTCOME_CONTAINED
            break
        if depth_used > radius_cap:
            outcome = OUTCOME_CAP
            break
        if turn >= n_sched + stall_window:
            outcome = OUTCOME_EXHAUSTED
            break
        turn += 1
    containment_time = None
    if outcome == OUTCOME_CONTAINED:
        containment_time = max((t.turn for t in records if t.frontier_count), default=0)
    return GameTrace(
        family=g.family,
        x0=tuple(sorted(frozenset(x0))),
        r=r,
        budget=strategy.budget,
        schedule=strategy.schedule,
        turns=tuple(records),
        outcome=outcome,
        containment_time=containment_time,
        burned_total=len(state.burning),
        radius_cap=radius_cap,
        states=tuple(states) if keep_states else (),
    )


# ------------------------------------------------------------- rescaling --


def scale_up(strategy: Strategy, r: int) -> Strategy:
    """Bundle r consecutive turns of a radius-1 strategy into one radius-r
    turn: U_n = W_{(n-1)r+1} u ... u W_{nr}, g_{n+1} = sum f_{rn+i}.

    Needs a nondecreasing budget; a radius-r opponent is faster, and the
    regrouped budget only dominates when f is monotone.
    """
    if strategy.r != 1:
        raise ValueError("scale_up starts from a radius-1 strategy")
    if r < 1:
        raise ValueError("target radius must be >= 1")
    if r == 1:
        return strategy
    # monotone only where protections happen; an explicit budget's zero tail
    # past the schedule never feeds a regrouped turn
    if not strategy.budget.is_nondecreasing(max(len(strategy.schedule), 1)):
        raise NonMonotoneBudgetError("scale_up needs a nondecreasing budget")
    f = strategy.budget
    if f.kind == "constant":
        g_budget = BudgetSeq.constant(r * f.c)
    elif f.kind == "explicit":
        blocks = (len(f.values) + r - 1) // r
        g_budget = BudgetSeq.explicit(
            sum(f.f((n - 1) * r + i) for i in range(1, r + 1))
            for n in range(1, blocks + 1)
        )
    else:

        def g_of(n: int, _f=f, _r=r) -> int:
            return sum(_f.f((n - 1) * _r + i) for i in range(1, _r + 1))

        g_budget = BudgetSeq.callback(g_of)
    sched = []
    for start in range(0, len(strategy.schedule), r):
        u: set[VertexKey] = set()
        for w in strategy.schedule[start : start + r]:
            u.update(w)
        sched.append(frozenset(u))
    out = Strategy(r, g_budget, tuple(sched), provenance=strategy.provenance)
    out.validate()
    return out


def scale_down(strategy: Strategy, f: BudgetSeq) -> Strategy:
    """Split each radius-r turn into r radius-1 turns under budget f.

    W_{n+1} is cut (in key order) into pieces of sizes f_{rn+1}..f_{rn+r}.
    Valid for an initial fire X_0 with B(X_0, r) contained by the input
    strategy; the radius-1 fire is slower, so each piece still lands ahead of
    it.  Raises PartitionInfeasibleError when a set cannot be split.
    """
    r = strategy.r
    if r < 1:
        raise ValueError("strategy radius must be >= 1")
    if r == 1:
        return Strategy(1, f, strategy.schedule, provenance=strategy.provenance)
    sched: list[frozenset[VertexKey]] = []
    for n0, w in enumerate(strategy.schedule):  # w is W_{n0+1}
        allowed = [f.f(r * n0 + i) for i in range(1, r + 1)]
        if len(w) > sum(allowed):
            raise PartitionInfeasibleError(
                f"|W_{n0 + 1}| = {len(w)} > {sum(allowed)} available over turns "
                f"{r * n0 + 1}..{r * n0 + r}"
            )
        items = sorted(w)
        pos = 0
        for a in allowed:
            piece = items[pos : pos + a]
            sched.append(frozenset(piece))
            pos += len(piece)
    out = Strategy(1, f, tuple(sched), provenance=strategy.provenance)
    out.validate()
    return out


def restrict_strategy(strategy: Strategy, sub: LazyGraph) -> Strategy:
    """Intersect every protection set with an induced subgraph's vertex set."""
    sched = tuple(
        frozenset(v for v in w if sub.contains(v)) for w in strategy.schedule
    )
    return Strategy(strategy.r, strategy.budget, sched, provenance=strategy.provenance)


# --------------------------------------------------------- serialization --


def _keys_to_lists(keys: Iterable[VertexKey]) -> list[list[int]]:
    return [list(k.coords) for k in sorted(keys)]


def _keys_from_lists(tag: str, rows: Iterable[Iterable[int]]) -> tuple[VertexKey, ...]:
    return tuple(VertexKey(tag, tuple(int(c) for c in row)) for row in rows)


def strategy_to_json(strategy: Strategy) -> dict:
    """JSON document for a Strategy.  Keys are coordinate arrays under a
    single key_tag; an empty schedule carries key_tag null."""
    tag = None
    for w in strategy.schedule:
        for k in w:
            tag = k.tag
            break
        if tag is not None:
            break
    return {
        "kind": "strategy",
        "r": strategy.r,
        "budget": strategy.budget.to_json(horizon=len(strategy.schedule)),
        "key_tag": tag,
        "schedule": [_keys_to_lists(w) for w in strategy.schedule],
        "provenance": strategy.provenance,
    }


def strategy_from_json(doc: dict) -> Strategy:
    if doc.get("kind") != "strategy":
        raise ValueError("not a strategy document")
    tag = doc.get("key_tag")
    sched = []
    for rows in doc["schedule"]:
        if rows and tag is None:
            raise ValueError("schedule has vertices but key_tag is null")
        sched.append(frozenset(_keys_from_lists(tag, rows)))
    out = Strategy(
        int(doc["r"]),
        BudgetSeq.from_json(doc["budget"]),
        tuple(sched),
        provenance=doc.get("provenance"),
    )
    out.validate()
    return out


def trace_to_json_lines(trace: GameTrace) -> str:
    """One JSON object per line: a header, then one line per turn."""
    tag = trace.x0[0].tag if trace.x0 else None
    header = {
        "kind": "game-trace",
        "family": trace.family,
        "key_tag": tag,
        "x0": _keys_to_lists(trace.x0),
        "r": trace.r,
        "budget": trace.budget.to_json(horizon=len(trace.schedule)),
        "radius_cap": trace.radius_cap,
        "outcome": trace.outcome,
        "containment_time": trace.containment_time,
        "burned_total": trace.burned_total,
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for rec in trace.turns:
        lines.append(
            json.dumps(
                {
                    "turn": rec.turn,
                    "protected": _keys_to_lists(rec.protected),
                    "burning_count": rec.burning_count,
                    "frontier_count": rec.frontier_count,
                },
                separators=(",", ":"),
            )
        )
    return "\n".join(lines) + "\n"


def _replay_open(g, header, x0, sched, turns, *, cap) -> GameTrace:
    # in-progress trace (no final outcome): replay the recorded turns one
    # step at a time, empty turns included, and rebuild the same records
    budget = BudgetSeq.from_json(header["budget"])
    r = int(header["r"])
    state = initial_state(x0)
    records = []
    for n, w in enumerate(sched, start=1):
        if len(w) > budget.f(n):
            raise BudgetExceededError(f"|W_{n}| = {len(w)} > f_{n} = {budget.f(n)}")
        prev = state
        state = step(g, state, w, r, cap=cap)
        records.append(
            TurnRecord(n, tuple(sorted(w)), len(state.burning), len(state.burning - prev.burning))
        )
    return GameTrace(
        family=g.family,
        x0=tuple(sorted(frozenset(x0))),
        r=r,
        budget=budget,
        schedule=tuple(sched),
        turns=tuple(records),
        outcome="open",
        containment_time=None,
        burned_total=len(state.burning),
    )


def replay_trace(
    text: str,
    g: LazyGraph,
    *,
    cap: Optional[int] = None,
) -> GameTrace:
    """Re-run a trace file against g and require identical turn records.

    For a finished trace the schedule is the recorded protection sets with
    trailing empty turns dropped (run() appends those itself once the
    schedule is exhausted); an in-progress trace (outcome "open", as exported
    by a live serve session) is replayed turn for turn.  Raises
    ReplayMismatchError when any recorded count or the outcome disagrees
    with the re-run.
    """
    rows = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0].get("kind") != "game-trace":
        raise ValueError("not a game-trace file")
    header, turns = rows[0], rows[1:]
    if header["family"] != g.family:
        raise ReplayMismatchError(
            f"trace is for {header['family']!r}, graph is {g.family!r}"
        )
    tag = header["key_tag"] or g.base.tag
    x0 = _keys_from_lists(tag, header["x0"])
    sched = [frozenset(_keys_from_lists(tag, row["protected"])) for row in turns]
    if header["outcome"] == "open":
        fresh = _replay_open(g, header, x0, sched, turns, cap=cap)
    else:
        while sched and not sched[-1]:
            sched.pop()
        strategy = Strategy(
            int(header["r"]), BudgetSeq.from_json(header["budget"]), tuple(sched)
        )
        fresh = run(g, x0, strategy, radius_cap=header.get("radius_cap"), cap=cap)
    if fresh.outcome != header["outcome"]:
        raise ReplayMismatchError(
            f"outcome {fresh.outcome!r} != recorded {header['outcome']!r}"
        )
    if fresh.burned_total != header["burned_total"]:
        raise ReplayMismatchError(
            f"burned_total {fresh.burned_total} != recorded {header['burned_total']}"
        )
    if len(fresh.turns) != len(turns):
        raise ReplayMismatchError(
            f"{len(fresh.turns)} turns != recorded {len(turns)}"
        )
    for rec, row in zip(fresh.turns, turns):
        if (
            rec.turn != row["turn"]
            or rec.burning_count != row["burning_count"]
            or rec.frontier_count != row["frontier_count"]
            or _keys_to_lists(rec.protected) != row["protected"]
        ):
            raise ReplayMismatchError(f"turn {row['turn']} differs on re-run")
    return fresh
