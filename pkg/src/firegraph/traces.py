"""JSON-lines game traces: serialization, parsing, deterministic replay.

One JSON object per line: a header (family, x0, r, budget, embedded
schedule), one record per turn, and a footer with the outcome.  Replays
rebuild the graph from the family text and re-run the schedule; a trace
checks out when every per-turn record and the footer match bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import parse_key_text
from .engine import BudgetSeq, GameTrace, Strategy, TurnRecord, run
from .families import graph_from_text


def trace_lines(trace: GameTrace) -> list[str]:
    header = {
        "record": "header",
        "family": trace.family,
        "x0": [k.text() for k in trace.x0],
        "r": trace.r,
        "budget": trace.budget.to_json(horizon=len(trace.schedule)),
        "schedule": [[k.text() for k in sorted(w)] for w in trace.schedule],
    }
    lines = [json.dumps(header, sort_keys=True)]
    for t in trace.turns:
        lines.append(
            json.dumps(
                {
                    "record": "turn",
                    "turn": t.turn,
                    "protected": [k.text() for k in t.protected],
                    "burning_count": t.burning_count,
                    "frontier_count": t.frontier_count,
                },
                sort_keys=True,
            )
        )
    lines.append(
        json.dumps(
            {
                "record": "footer",
                "outcome": trace.outcome,
                "containment_time": trace.containment_time,
                "burned_total": trace.burned_total,
            },
            sort_keys=True,
        )
    )
    return lines


def write_trace(trace: GameTrace, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(trace_lines(trace)) + "\n")


@dataclass(frozen=True, eq=False)
class TraceDoc:
    """A parsed trace file (no graph attached yet)."""

    family: str
    x0: tuple
    r: int
    budget: BudgetSeq
    schedule: tuple
    turns: tuple[TurnRecord, ...]
    outcome: Optional[str]
    containment_time: Optional[int]
    burned_total: Optional[int]

    def strategy(self) -> Strategy:
        return Strategy(self.r, self.budget, self.schedule)


def parse_trace(lines: Iterable[str]) -> TraceDoc:
    header = None
    turns: list[TurnRecord] = []
    footer: dict = {}
    for raw in lines:
        raw = raw.strip()
        if not raw:
            continue
        obj = json.loads(raw)
        kind = obj.get("record")
        if kind == "header":
            header = obj
        elif kind == "turn":
            turns.append(
                TurnRecord(
                    obj["turn"],
                    tuple(obj["protected"]),  # key text; resolved below
                    obj["burning_count"],
                    obj["frontier_count"],
                )
            )
        elif kind == "footer":
            footer = obj
        else:
            raise ValueError(f"unknown trace record {kind!r}")
    if header is None:
        raise ValueError("trace has no header record")
    g = graph_from_text(header["family"])
    tag = g.base.tag
    x0 = tuple(parse_key_text(tag, t) for t in header["x0"])
    schedule = tuple(
        frozenset(parse_key_text(tag, t) for t in w) for w in header["schedule"]
    )
    resolved = tuple(
        TurnRecord(
            t.turn,
            tuple(sorted(parse_key_text(tag, txt) for txt in t.protected)),
            t.burning_count,
            t.frontier_count,
        )
        for t in turns
    )
    return TraceDoc(
        family=header["family"],
        x0=x0,
        r=header["r"],
        budget=BudgetSeq.from_json(header["budget"]),
        schedule=schedule,
        turns=resolved,
        outcome=footer.get("outcome"),
        containment_time=footer.get("containment_time"),
        burned_total=footer.get("burned_total"),
    )


def read_trace(path: str) -> TraceDoc:
    with open(path) as fh:
        return parse_trace(fh)


def replay(doc: TraceDoc, **run_kwargs) -> GameTrace:
    g = graph_from_text(doc.family)
    return run(g, doc.x0, doc.strategy(), **run_kwargs)


def check_trace(doc: TraceDoc, **run_kwargs) -> tuple[bool, list[str]]:
    """Re-run the embedded schedule and diff against the recorded play."""
    fresh = replay(doc, **run_kwargs)
    problems: list[str] = []
    if len(fresh.turns) != len(doc.turns):
        problems.append(
            f"turn count differs: recorded {len(doc.turns)}, replay {len(fresh.turns)}"
        )
    for a, b in zip(doc.turns, fresh.turns):
        if a != b:
            problems.append(f"turn {a.turn} differs: recorded {a}, replay {b}")
    if doc.outcome is not None and doc.outcome != fresh.outcome:
        problems.append(f"outcome differs: {doc.outcome} vs {fresh.outcome}")
    if doc.containment_time != fresh.containment_time:
        problems.append(
            f"containment_time differs: {doc.containment_time} vs {fresh.containment_time}"
        )
    if doc.burned_total is not None and doc.burned_total != fresh.burned_total:
        problems.append(
            f"burned_total differs: {doc.burned_total} vs {fresh.burned_total}"
        )
    return (not problems, problems)
