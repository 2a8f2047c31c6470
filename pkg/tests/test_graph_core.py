"""Audits of the lazy-graph primitives: symmetry, layering, caps, powers."""

from __future__ import annotations

import math
import random

import pytest

from firegraph import (
    ball,
    distance,
    graph_from_text,
    parse_key_text,
    power_graph,
    rebase,
    restrict,
)
from firegraph.core import VertexKey
from firegraph.errors import EnumerationCapExceeded, InvalidFamilyError


def test_neighbor_lists_are_symmetric_sorted_and_clean(audited):
    g, radius = audited
    for v in ball(g, [g.base], radius).members:
        ns = g.neighbors(v)
        assert list(ns) == sorted(set(ns)), f"{v} has unsorted or duplicate neighbors"
        assert v not in ns, f"{v} has a self-loop"
        if g.degree_bound is not None:
            assert len(ns) <= g.degree_bound
        for w in ns:
            assert v in g.neighbors(w), f"edge {v}-{w} not symmetric"


def test_ball_layers_partition_and_match_distance(audited):
    g, radius = audited
    bv = ball(g, [g.base], radius)
    seen = set()
    for layer in bv.layers:
        assert not (set(layer) & seen), "layers overlap"
        seen.update(layer)
    rng = random.Random(7)
    for i, layer in enumerate(bv.layers):
        sample = rng.sample(sorted(layer), min(5, len(layer)))
        for v in sample:
            assert distance(g, g.base, v, radius) == i


def test_ball_nesting(audited):
    g, radius = audited
    small = ball(g, [g.base], radius - 1).members
    big = ball(g, [g.base], radius).members
    assert small <= big


def test_distance_symmetry_and_triangle():
    g = graph_from_text("square")
    rng = random.Random(11)
    pts = [VertexKey("square", (rng.randint(-6, 6), rng.randint(-6, 6))) for _ in range(12)]
    for _ in range(40):
        u, v, w = rng.sample(pts, 3)
        duv = distance(g, u, v, 40)
        dvw = distance(g, v, w, 40)
        duw = distance(g, u, w, 40)
        assert duv == distance(g, v, u, 40)
        assert duw <= duv + dvw
        # L1 oracle on the square grid
        assert duv == abs(u.coords[0] - v.coords[0]) + abs(u.coords[1] - v.coords[1])


def test_distance_cap_is_a_distinct_outcome():
    g = graph_from_text("square")
    far = VertexKey("square", (9, 0))
    assert distance(g, g.base, far, 8) is None
    assert distance(g, g.base, far, 9) == 9


def test_ball_member_cap_raises():
    g = graph_from_text("tree:delta=3")
    with pytest.raises(EnumerationCapExceeded):
        ball(g, [g.base], 12, cap=100)


def test_env_cap_override(monkeypatch):
    g = graph_from_text("square")
    monkeypatch.setenv("FIREGRAPH_CAP", "10")
    with pytest.raises(EnumerationCapExceeded):
        ball(g, [g.base], 4)
    monkeypatch.delenv("FIREGRAPH_CAP")
    assert len(ball(g, [g.base], 4)) == 41


def test_ball_multi_center_and_avoid():
    g = graph_from_text("square")
    a = VertexKey("square", (0, 0))
    b = VertexKey("square", (4, 0))
    bv = ball(g, [a, b], 1)
    assert len(bv) == 10
    blocked = frozenset(g.neighbors(a))
    alone = ball(g, [a], 3, avoid=blocked)
    assert alone.members == frozenset([a])
    with pytest.raises(ValueError):
        ball(g, [a], 1, avoid=frozenset([a]))


def test_power_graph_degrees():
    sq = graph_from_text("square")
    p2 = power_graph(sq, 2)
    assert len(p2.neighbors(p2.base)) == 12
    tree = graph_from_text("tree:delta=3")
    t2 = power_graph(tree, 2)
    assert len(t2.neighbors(t2.base)) == 9
    assert power_graph(sq, 1) is sq


def test_power_graph_distance_is_ceiling_of_base_distance():
    g = graph_from_text("square")
    for k in (2, 3):
        pk = power_graph(g, k)
        rng = random.Random(5)
        for _ in range(25):
            v = VertexKey("square", (rng.randint(-5, 5), rng.randint(-5, 5)))
            if v == g.base:
                continue
            d_base = distance(g, g.base, v, 30)
            d_pow = distance(pk, pk.base, v, 30)
            assert d_pow == math.ceil(d_base / k)


def test_power_graph_requires_degree_bound():
    g = graph_from_text("square")
    from dataclasses import replace

    unbounded = replace(g, degree_bound=None)
    with pytest.raises(InvalidFamilyError):
        power_graph(unbounded, 2)


def test_restrict_to_orthant_matches_orthant_family():
    full = graph_from_text("lattice:d=3")
    sub = restrict(full, lambda v: all(c >= 0 for c in v.coords))
    orth = graph_from_text("orthant:d=3")
    for m in range(6):
        got = ball(sub, [sub.base], m).sphere_sizes()
        want = ball(orth, [orth.base], m).sphere_sizes()
        assert got == want


def test_restrict_rejects_excluded_base():
    full = graph_from_text("square")
    with pytest.raises(InvalidFamilyError):
        restrict(full, lambda v: v.coords[0] > 3)


def test_rebase_checks_membership():
    orth = graph_from_text("orthant:d=2")
    with pytest.raises(InvalidFamilyError):
        rebase(orth, VertexKey(orth.base.tag, (-1, 0)))
    moved = rebase(orth, VertexKey(orth.base.tag, (2, 2)))
    assert ball(moved, [moved.base], 1).sphere_sizes() == (1, 4)


def test_key_text_round_trip(audited):
    g, radius = audited
    for v in ball(g, [g.base], min(radius, 3)).members:
        assert parse_key_text(v.tag, v.text()) == v
