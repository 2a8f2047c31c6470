"""Vertex keys, lazily enumerated graphs, and capped BFS primitives.

A graph here is never materialized: it is a base vertex plus a pure neighbor
function.  Everything downstream (fire spread, growth profiles, flow checks)
works on finite windows obtained by bounded BFS, so every enumeration in this
module carries a cap and fails loudly rather than walking an infinite graph
forever.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional

from .errors import EnumerationCapExceeded, InvalidFamilyError

# Hard ceiling on vertices any single enumeration may visit.  Overridable per
# process via FIREGRAPH_CAP (used by the CLI and tests, checked at call time).
DEFAULT_MEMBER_CAP = 5_000_000


def member_cap(explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("FIREGRAPH_CAP")
    if env:
        return int(env)
    return DEFAULT_MEMBER_CAP


@dataclass(frozen=True, order=True)
class VertexKey:
    """Canonical vertex identity: a family tag plus an integer tuple payload.

    Payloads are integer tuples for every family (lattice coordinates, tree
    root paths as digit tuples, (layer, index) pairs), so ordering and
    equality are total within a family and deterministic across runs.
    """

    tag: str
    coords: tuple[int, ...]

    def text(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    def __str__(self) -> str:  # traces render keys via text form
        return self.text()


def parse_key_text(tag: str, text: str) -> VertexKey:
    """Inverse of VertexKey.text for a known family tag."""
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"malformed key text: {text!r}")
    inner = body[1:-1].strip()
    coords = tuple(int(p) for p in inner.split(",")) if inner else ()
    return VertexKey(tag, coords)


@dataclass(frozen=True)
class FamilyFacts:
    """Structural facts a constructor vouches for, consumed by certification.

    These are premises established by construction (not by finite checks):
    e.g. orthant sphere sizes are a fixed binomial polynomial, regular trees
    grow geometrically.  ``structurally_homogeneous`` means the homogeneity
    condition holds at every level by the family's layer structure, so a
    certificate may cite it beyond the machine-checked horizon.
    """

    kind: str
    params: tuple[tuple[str, int], ...] = ()
    sphere_poly_degree: Optional[int] = None  # s_n is a degree-d polynomial
    sphere_exp_base: Optional[int] = None  # s_n grows like base**n
    structurally_homogeneous: bool = False
    expansion_lambda: Optional[int] = None  # per-level expansion by structure

    def param(self, name: str) -> int:
        for k, v in self.params:
            if k == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True, eq=False)
class LazyGraph:
    """An infinite (or finite) graph given by a base vertex and neighbor rule.

    neighbor_fn must be pure and symmetric, return no self-loops or
    duplicates, and list neighbors in a deterministic canonical order.
    membership_fn, when present, recognizes the vertex set (used by induced
    subgraphs; neighbor_fn is already filtered to members).
    """

    family: str
    base: VertexKey
    neighbor_fn: Callable[[VertexKey], tuple[VertexKey, ...]] = field(repr=False)
    degree_bound: Optional[int] = None
    membership_fn: Optional[Callable[[VertexKey], bool]] = field(default=None, repr=False)
    facts: Optional[FamilyFacts] = None

    def neighbors(self, v: VertexKey) -> tuple[VertexKey, ...]:
        return self.neighbor_fn(v)

    def contains(self, v: VertexKey) -> bool:
        return True if self.membership_fn is None else bool(self.membership_fn(v))


@dataclass(frozen=True)
class BallView:
    """Layered closed ball: layers[i] holds the vertices at distance exactly
    i from the center set (distance measured to the nearest center)."""

    centers: tuple[VertexKey, ...]
    radius: int
    layers: tuple[tuple[VertexKey, ...], ...]

    @property
    def members(self) -> frozenset[VertexKey]:
        return frozenset(v for layer in self.layers for v in layer)

    def layer(self, i: int) -> tuple[VertexKey, ...]:
        return self.layers[i] if i < len(self.layers) else ()

    def sphere_sizes(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)

    def __len__(self) -> int:
        return sum(len(layer) for layer in self.layers)


def ball(
    g: LazyGraph,
    centers: Iterable[VertexKey],
    radius: int,
    *,
    avoid: frozenset[VertexKey] = frozenset(),
    cap: Optional[int] = None,
) -> BallView:
    """Layered BFS ball around a center set.

    ``avoid`` vertices are treated as deleted (never entered, never expanded);
    centers must not be in ``avoid``.  Layers come out sorted by key, so the
    enumeration order is deterministic.  Exceeding the member cap raises
    EnumerationCapExceeded: resource exhaustion, not a game outcome.
    """
    limit = member_cap(cap)
    ctr = sorted(set(centers))
    if not ctr:
        return BallView((), radius, ((),) if radius >= 0 else ())
    bad = [v for v in ctr if v in avoid]
    if bad:
        raise ValueError(f"center {bad[0]} is in the avoid set")
    seen: set[VertexKey] = set(ctr)
    layers: list[tuple[VertexKey, ...]] = [tuple(ctr)]
    frontier = ctr
    for _ in range(radius):
        nxt: set[VertexKey] = set()
        for u in frontier:
            for w in g.neighbor_fn(u):
                if w not in seen and w not in avoid:
                    nxt.add(w)
        if not nxt:
            break
        seen.update(nxt)
        if len(seen) > limit:
            raise EnumerationCapExceeded(
                f"ball of radius {radius} exceeded member cap {limit}"
            )
        frontier = sorted(nxt)
        layers.append(tuple(frontier))
    return BallView(tuple(ctr), radius, tuple(layers))


def distance(
    g: LazyGraph,
    u: VertexKey,
    v: VertexKey,
    cap: int,
    *,
    member_limit: Optional[int] = None,
) -> Optional[int]:
    """Exact graph distance if it is <= cap, else None (distinct outcome)."""
    if u == v:
        return 0
    limit = member_cap(member_limit)
    seen = {u}
    frontier = [u]
    for d in range(1, cap + 1):
        nxt = []
        for x in frontier:
            for w in g.neighbor_fn(x):
                if w == v:
                    return d
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            return None
        if len(seen) > limit:
            raise EnumerationCapExceeded(
                f"distance search exceeded member cap {limit}"
            )
        frontier = nxt
    return None


def power_graph(g: LazyGraph, k: int) -> LazyGraph:
    """Graph on the same vertices with edges between distinct vertices at
    distance <= k in g.  Needs a declared degree bound (the power of an
    unbounded-degree graph has no usable bound).  k = 1 returns g itself.
    """
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    if k == 1:
        return g
    if g.degree_bound is None:
        raise InvalidFamilyError("power graph needs a declared degree bound")
    d = g.degree_bound
    # closed neighborhood growth: d*(d-1)^(i-1) new vertices at depth i
    bound = 0
    width = d
    for _ in range(k):
        bound += width
        width *= max(d - 1, 1)

    @lru_cache(maxsize=200_000)
    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        bv = ball(g, (v,), k)
        out = [w for w in sorted(bv.members) if w != v]
        return tuple(out)

    return LazyGraph(
        family=f"power:k={k}({g.family})",
        base=g.base,
        neighbor_fn=nbrs,
        degree_bound=bound,
        membership_fn=g.membership_fn,
        facts=None,
    )


def restrict(g: LazyGraph, predicate: Callable[[VertexKey], bool]) -> LazyGraph:
    """Induced subgraph on vertices satisfying ``predicate``."""
    if not predicate(g.base):
        raise InvalidFamilyError("base vertex fails the restriction predicate")
    prev = g.membership_fn

    def member(v: VertexKey) -> bool:
        return bool(predicate(v)) and (prev is None or bool(prev(v)))

    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        return tuple(w for w in g.neighbor_fn(v) if predicate(w))

    return LazyGraph(
        family=f"restrict({g.family})",
        base=g.base,
        neighbor_fn=nbrs,
        degree_bound=g.degree_bound,
        membership_fn=member,
        facts=None,
    )


def rebase(g: LazyGraph, base: VertexKey) -> LazyGraph:
    """Same graph viewed from a different base vertex."""
    if not g.contains(base):
        raise InvalidFamilyError(f"{base} is not a vertex of {g.family}")
    return LazyGraph(
        family=g.family,
        base=base,
        neighbor_fn=g.neighbor_fn,
        degree_bound=g.degree_bound,
        membership_fn=g.membership_fn,
        facts=g.facts,
    )
