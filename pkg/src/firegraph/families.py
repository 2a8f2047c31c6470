"""Built-in graph families.

Text grammar (used by the CLI and by trace headers):

    lattice:d=3     integer lattice Z^d, one edge per unit step (degree 2d)
    orthant:d=4     nonnegative orthant of Z^d (induced subgraph)
    square          Z^2 with steps (+-1,0),(0,+-1)
    tri             square plus the two diagonal steps (1,1),(-1,-1)
    hex             degree-3 honeycomb on Z^2 (brick-wall coordinates)
    strong          Z^2 with king moves (degree 8)
    tree:delta=3    infinite delta-regular tree, root-path digit keys
    hyper37         order-7 triangulation, layered cycles around a root
    subexp          layered graph with level widths 2^{s(n)}, s the tent wave
    power:k=2(F)    distance-<=k power of family F (same vertex set)

Every constructor returns a LazyGraph whose neighbor function is pure,
symmetric, duplicate-free, and sorted by vertex key.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from math import isqrt
from typing import Optional

from .core import FamilyFacts, LazyGraph, VertexKey, power_graph
from .errors import InvalidFamilyError


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: tuple[tuple[str, int], ...] = ()
    inner: Optional["FamilySpec"] = None

    def text(self) -> str:
        body = self.kind
        if self.params:
            body += ":" + ",".join(f"{k}={v}" for k, v in self.params)
        if self.inner is not None:
            body += f"({self.inner.text()})"
        return body

    def param(self, name: str) -> int:
        for k, v in self.params:
            if k == name:
                return v
        raise InvalidFamilyError(f"{self.kind} needs parameter {name}")


_SIMPLE = {"square", "tri", "hex", "strong", "hyper37", "subexp"}


def parse_family(text: str) -> FamilySpec:
    """Parse the family grammar above (whitespace-insensitive, recursive)."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"power:k=(\d+)\((.+)\)", s)
    if m:
        return FamilySpec("power", (("k", int(m.group(1))),), parse_family(m.group(2)))
    if "(" in s or ")" in s:
        raise InvalidFamilyError(f"malformed family text: {text!r}")
    name, _, rest = s.partition(":")
    if name in _SIMPLE:
        if rest:
            raise InvalidFamilyError(f"{name} takes no parameters")
        return FamilySpec(name)
    if name in ("lattice", "orthant", "tree"):
        if not rest:
            raise InvalidFamilyError(f"{name} needs parameters")
        params = []
        for piece in rest.split(","):
            k, eq, v = piece.partition("=")
            if not eq or not v.lstrip("-").isdigit():
                raise InvalidFamilyError(f"bad parameter {piece!r} in {text!r}")
            params.append((k, int(v)))
        return FamilySpec(name, tuple(params))
    raise InvalidFamilyError(f"unknown family {name!r}")


def make(spec: FamilySpec) -> LazyGraph:
    if spec.kind == "power":
        inner = make(spec.inner)
        k = spec.param("k")
        return power_graph(inner, k)
    builder = _BUILDERS.get(spec.kind)
    if builder is None:
        raise InvalidFamilyError(f"unknown family kind {spec.kind!r}")
    return builder(spec)


def graph_from_text(text: str) -> LazyGraph:
    return make(parse_family(text))


# ---------------------------------------------------------------- lattices --


def _lattice_neighbors(tag: str, d: int):
    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        out = []
        c = v.coords
        for i in range(d):
            for step in (-1, 1):
                w = c[:i] + (c[i] + step,) + c[i + 1 :]
                out.append(VertexKey(tag, w))
        return tuple(sorted(out))

    return nbrs


def _lattice(spec: FamilySpec) -> LazyGraph:
    d = spec.param("d")
    if d < 1:
        raise InvalidFamilyError("lattice needs d >= 1")
    tag = spec.text()
    return LazyGraph(
        family=tag,
        base=VertexKey(tag, (0,) * d),
        neighbor_fn=_lattice_neighbors(tag, d),
        degree_bound=2 * d,
        membership_fn=lambda v: v.tag == tag and len(v.coords) == d,
        facts=FamilyFacts("lattice", (("d", d),), sphere_poly_degree=d - 1),
    )


def _orthant(spec: FamilySpec) -> LazyGraph:
    d = spec.param("d")
    if d < 1:
        raise InvalidFamilyError("orthant needs d >= 1")
    tag = spec.text()
    full = _lattice_neighbors(tag, d)

    def member(v: VertexKey) -> bool:
        return v.tag == tag and len(v.coords) == d and all(c >= 0 for c in v.coords)

    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        return tuple(w for w in full(v) if all(c >= 0 for c in w.coords))

    return LazyGraph(
        family=tag,
        base=VertexKey(tag, (0,) * d),
        neighbor_fn=nbrs,
        degree_bound=2 * d,
        membership_fn=member,
        facts=FamilyFacts(
            "orthant",
            (("d", d),),
            sphere_poly_degree=d - 1,
            structurally_homogeneous=True,
        ),
    )


def _offset_grid(tag: str, offsets: tuple[tuple[int, int], ...], facts: FamilyFacts):
    def build(spec: FamilySpec) -> LazyGraph:
        def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
            x, y = v.coords
            return tuple(
                sorted(VertexKey(tag, (x + dx, y + dy)) for dx, dy in offsets)
            )

        return LazyGraph(
            family=tag,
            base=VertexKey(tag, (0, 0)),
            neighbor_fn=nbrs,
            degree_bound=len(offsets),
            membership_fn=lambda v: v.tag == tag and len(v.coords) == 2,
            facts=facts,
        )

    return build


def _hex(spec: FamilySpec) -> LazyGraph:
    tag = "hex"

    # brick-wall honeycomb: vertical edge goes up from even-parity vertices
    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        x, y = v.coords
        third = (x, y + 1) if (x + y) % 2 == 0 else (x, y - 1)
        out = [(x - 1, y), (x + 1, y), third]
        return tuple(sorted(VertexKey(tag, c) for c in out))

    return LazyGraph(
        family=tag,
        base=VertexKey(tag, (0, 0)),
        neighbor_fn=nbrs,
        degree_bound=3,
        membership_fn=lambda v: v.tag == tag and len(v.coords) == 2,
        facts=FamilyFacts("hex", sphere_poly_degree=1),
    )


# ------------------------------------------------------------------- trees --


def _tree(spec: FamilySpec) -> LazyGraph:
    delta = spec.param("delta")
    if delta < 2:
        raise InvalidFamilyError("tree needs delta >= 2")
    tag = spec.text()

    def member(v: VertexKey) -> bool:
        if v.tag != tag:
            return False
        if not v.coords:
            return True
        if not (0 <= v.coords[0] < delta):
            return False
        return all(0 <= c < delta - 1 for c in v.coords[1:])

    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        p = v.coords
        out = []
        if p:
            out.append(VertexKey(tag, p[:-1]))
            child_digits = delta - 1
        else:
            child_digits = delta
        for c in range(child_digits):
            out.append(VertexKey(tag, p + (c,)))
        return tuple(sorted(out))

    return LazyGraph(
        family=tag,
        base=VertexKey(tag, ()),
        neighbor_fn=nbrs,
        degree_bound=delta,
        membership_fn=member,
        facts=FamilyFacts(
            "tree",
            (("delta", delta),),
            sphere_exp_base=delta - 1,
            structurally_homogeneous=True,
            expansion_lambda=delta - 1,
        ),
    )


# ------------------------------------------------- order-7 triangulation --


@dataclass
class _H37Layer:
    size: int
    types: str  # 'a' = one parent, 'b' = two parents
    parents: tuple[tuple[int, ...], ...]  # indices into the previous layer
    children: Optional[list[list[int]]] = None  # filled when next layer built


class _Hyper37Builder:
    """Layered construction of the degree-7 triangulation.

    Around each layer cycle: a vertex with one parent contributes two
    exclusive children, a vertex with two parents contributes one, and each
    consecutive pair on the cycle shares one child.  The children, emitted in
    cycle order, form the next layer's cycle.  This reproduces the layer-size
    recurrence a' = 2a + b, b' = a + b (sizes 7, 21, 56, 147, 385, ...); an
    independent check against the star-completion builder below lives in the
    test suite.
    """

    def __init__(self) -> None:
        self.layers: list[_H37Layer] = [
            _H37Layer(7, "a" * 7, tuple((0,) for _ in range(7)))
        ]  # layer 1; the root is implicit

    def layer(self, n: int) -> _H37Layer:
        # n >= 1
        while len(self.layers) < n:
            self._extend()
        return self.layers[n - 1]

    def children_of(self, n: int, i: int) -> list[int]:
        top = self.layer(n)
        if top.children is None:
            self.layer(n + 1)
        return top.children[i]

    def _extend(self) -> None:
        top = self.layers[-1]
        kids: list[list[int]] = [[] for _ in range(top.size)]
        types: list[str] = []
        parents: list[tuple[int, ...]] = []
        c = 0
        for i in range(top.size):
            for _ in range(2 if top.types[i] == "a" else 1):
                parents.append((i,))
                types.append("a")
                kids[i].append(c)
                c += 1
            j = (i + 1) % top.size
            parents.append((i, j) if i < j else (j, i))
            types.append("b")
            kids[i].append(c)
            kids[j].append(c)
            c += 1
        top.children = kids
        self.layers.append(_H37Layer(c, "".join(types), tuple(parents)))


_H37 = _Hyper37Builder()


@dataclass(frozen=True)
class Hyper37LayerInfo:
    n: int
    size: int
    a_count: int
    b_count: int
    types: str


def hyper37_layer(n: int) -> Hyper37LayerInfo:
    """Descriptor of layer n >= 1 (layer 0 is the single root)."""
    if n < 1:
        raise ValueError("layers are numbered from 1")
    lay = _H37.layer(n)
    return Hyper37LayerInfo(
        n, lay.size, lay.types.count("a"), lay.types.count("b"), lay.types
    )


def _hyper37(spec: FamilySpec) -> LazyGraph:
    tag = "hyper37"

    def member(v: VertexKey) -> bool:
        if v.tag != tag or len(v.coords) != 2:
            return False
        n, i = v.coords
        if n == 0:
            return i == 0
        return n >= 1 and 0 <= i < _H37.layer(n).size

    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        n, i = v.coords
        if n == 0:
            return tuple(VertexKey(tag, (1, j)) for j in range(7))
        lay = _H37.layer(n)
        out = [
            VertexKey(tag, (n, (i - 1) % lay.size)),
            VertexKey(tag, (n, (i + 1) % lay.size)),
        ]
        if n == 1:
            out.append(VertexKey(tag, (0, 0)))
        else:
            out.extend(VertexKey(tag, (n - 1, p)) for p in lay.parents[i])
        out.extend(VertexKey(tag, (n + 1, c)) for c in _H37.children_of(n, i))
        return tuple(sorted(out))

    return LazyGraph(
        family=tag,
        base=VertexKey(tag, (0, 0)),
        neighbor_fn=nbrs,
        degree_bound=7,
        membership_fn=member,
        facts=FamilyFacts("hyper37", sphere_exp_base=2, expansion_lambda=2),
    )


def build_hyper37_disk(depth: int) -> tuple[dict[int, list[int]], dict[int, int]]:
    """Brute-force disk of the degree-7 triangulation, for cross-checks.

    Grows the tiling one vertex star at a time using only the local rule:
    every vertex has seven neighbors whose cyclic order closes into seven
    triangles.  Rotations are kept as oriented arcs; the successor of x
    around v is the predecessor of v around x (shared triangle), which either
    names an existing vertex or forces a new one.  No layer bookkeeping, no
    type counts: an independent oracle for the layered construction.

    Returns (rotation lists, BFS-creation distances) for every vertex created
    while completing all vertices at distance <= depth.
    """
    rot: dict[int, list[int]] = {0: list(range(1, 8))}
    dist = {0: 0}
    edges: set[frozenset[int]] = set()

    def connect(u: int, w: int) -> None:
        edges.add(frozenset((u, w)))

    for j in range(1, 8):
        connect(0, j)
        connect(j, 1 + (j % 7))
    for j in range(1, 8):
        succ = 1 + (j % 7)
        pred = 1 + ((j - 2) % 7)
        rot[j] = [succ, 0, pred]
        dist[j] = 1
    nxt = 8
    queue = deque(range(1, 8))

    while queue and dist[queue[0]] <= depth:
        v = queue.popleft()
        r = rot[v]
        while len(r) < 7:
            x = r[-1]
            rx = rot[x]
            idx = rx.index(v)
            if idx > 0:
                w = rx[idx - 1]
                if rot[w][0] != x:
                    raise RuntimeError("rotation invariant broken (existing)")
                rot[w].insert(0, v)
            else:
                w = nxt
                nxt += 1
                rot[w] = [v, x]
                dist[w] = dist[v] + 1
                queue.append(w)
                rx.insert(0, w)
                connect(x, w)
            connect(v, w)
            r.append(w)
        a, b = r[-1], r[0]
        if frozenset((a, b)) not in edges:
            if rot[a][0] != v or rot[b][-1] != v:
                raise RuntimeError("rotation invariant broken (closure)")
            connect(a, b)
            rot[a].insert(0, b)
            rot[b].append(a)
    return rot, dist


# ----------------------------------------------------------------- subexp --


def level_sequence_subexp(n: int) -> int:
    """Tent-wave level sequence: zero exactly at n = k(k+1), rising by one to
    height k+1 in the middle of each block [k(k+1), (k+1)(k+2)]."""
    if n < 0:
        raise ValueError("levels are numbered from 0")
    k = (isqrt(4 * n + 1) - 1) // 2
    while k * (k + 1) > n:
        k -= 1
    while (k + 1) * (k + 2) <= n:
        k += 1
    return min(n - k * (k + 1), (k + 1) * (k + 2) - n)


def _subexp(spec: FamilySpec) -> LazyGraph:
    tag = "subexp"

    def member(v: VertexKey) -> bool:
        if v.tag != tag or len(v.coords) != 2:
            return False
        n, x = v.coords
        return n >= 0 and 1 <= x <= (1 << level_sequence_subexp(n))

    def nbrs(v: VertexKey) -> tuple[VertexKey, ...]:
        n, x = v.coords
        sn = level_sequence_subexp(n)
        out = []
        for m in (n - 1, n + 1):
            if m < 0:
                continue
            sm = level_sequence_subexp(m)
            if sm == sn + 1:
                out.append(VertexKey(tag, (m, 2 * x - 1)))
                out.append(VertexKey(tag, (m, 2 * x)))
            elif sm == sn - 1:
                out.append(VertexKey(tag, (m, (x + 1) // 2)))
            else:  # the level sequence moves by exactly one each step
                raise RuntimeError("level sequence step != 1")
        return tuple(sorted(out))

    return LazyGraph(
        family=tag,
        base=VertexKey(tag, (0, 1)),
        neighbor_fn=nbrs,
        degree_bound=4,
        membership_fn=member,
        facts=FamilyFacts("subexp"),
    )


_BUILDERS = {
    "lattice": _lattice,
    "orthant": _orthant,
    "square": _offset_grid(
        "square",
        ((1, 0), (-1, 0), (0, 1), (0, -1)),
        FamilyFacts("square", sphere_poly_degree=1),
    ),
    "tri": _offset_grid(
        "tri",
        ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)),
        FamilyFacts("tri", sphere_poly_degree=1),
    ),
    "strong": _offset_grid(
        "strong",
        ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)),
        FamilyFacts("strong", sphere_poly_degree=1),
    ),
    "hex": _hex,
    "tree": _tree,
    "hyper37": _hyper37,
    "subexp": _subexp,
}
