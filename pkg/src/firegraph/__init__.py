"""Containment games on infinite, locally finite graphs.

Simulation of budgeted fire-containment play, strategy synthesis from growth
data, growth/expansion analysis with exact arithmetic, quasi-isometric
strategy transfer, and machine-checkable impossibility certificates.
"""

from .core import (
    BallView,
    FamilyFacts,
    LazyGraph,
    VertexKey,
    ball,
    distance,
    parse_key_text,
    power_graph,
    rebase,
    restrict,
)
from .engine import (
    OUTCOME_CAP,
    OUTCOME_CONTAINED,
    OUTCOME_EXHAUSTED,
    BudgetSeq,
    FireState,
    GameTrace,
    Strategy,
    initial_state,
    restrict_strategy,
    run,
    scale_down,
    scale_up,
    step,
)
from .families import (
    FamilySpec,
    build_hyper37_disk,
    graph_from_text,
    hyper37_layer,
    level_sequence_subexp,
    make,
    parse_family,
)

__version__ = "0.1.0"

__all__ = [
    "BallView",
    "BudgetSeq",
    "FamilyFacts",
    "FamilySpec",
    "FireState",
    "GameTrace",
    "LazyGraph",
    "OUTCOME_CAP",
    "OUTCOME_CONTAINED",
    "OUTCOME_EXHAUSTED",
    "Strategy",
    "VertexKey",
    "ball",
    "build_hyper37_disk",
    "distance",
    "graph_from_text",
    "hyper37_layer",
    "initial_state",
    "level_sequence_subexp",
    "make",
    "parse_family",
    "parse_key_text",
    "power_graph",
    "rebase",
    "restrict",
    "restrict_strategy",
    "run",
    "scale_down",
    "scale_up",
    "step",
]
