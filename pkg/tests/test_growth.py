"""Growth profiles, exact series values, flow checks vs exhaustive oracles."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firegraph import ball, graph_from_text
from firegraph.errors import HypothesisViolationError
from firegraph.growth import (
    DegreeEstimate,
    check_expansion,
    check_homogeneous,
    degree_estimate,
    faulhaber,
    geometric_series_value,
    profile,
    rearrange_check,
    series_tail,
)


def test_profile_square():
    p = profile(graph_from_text("square"), 5)
    assert p.beta == (1, 5, 13, 25, 41, 61)
    assert p.s == (1, 4, 8, 12, 16, 20)
    assert p.beta1 == (1, 4, 8, 12, 16, 20)
    assert p.beta2[1:] == (3, 4, 4, 4, 4)


def test_profile_on_finite_graph_pads_with_zeros():
    g = graph_from_text("subexp")
    from firegraph import restrict

    below = restrict(g, lambda v: v.coords[0] <= 2)
    p = profile(below, 5)
    assert p.s == (1, 2, 1, 0, 0, 0)


# ------------------------------------------------------------ faulhaber ----


def _bernoulli(m: int) -> Fraction:
    # B_0..B_m by the defining recurrence, B_1 = -1/2 convention
    b = [Fraction(1)]
    for k in range(1, m + 1):
        acc = Fraction(0)
        for j in range(k):
            acc += math.comb(k + 1, j) * b[j]
        b.append(-acc / (k + 1))
    return b[m]


def _faulhaber_closed_form(n: int, d: int) -> Fraction:
    # sum_{k=1}^n k^(d-1) via the Bernoulli polynomial identity
    if d == 1:
        return Fraction(n)
    total = Fraction(n**d, d) + Fraction(n ** (d - 1), 2)
    for j in range(2, d):
        total += Fraction(math.comb(d, j) * _bernoulli(j), d) * n ** (d - j)
    return total


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_faulhaber_matches_bernoulli_closed_form(d):
    for n in range(21):
        assert faulhaber(n, d) == _faulhaber_closed_form(n, d)


# ------------------------------------------------------------ expansion ----


def _enumerate_expansion(g, level, lam):
    """Oracle: check every nonempty subset of the layer directly."""
    bv = ball(g, [g.base], level + 1)
    layer_n, layer_n1 = bv.layers[level], set(bv.layers[level + 1])
    worst = None
    for size in range(1, len(layer_n) + 1):
        for combo in itertools.combinations(layer_n, size):
            star = {w for v in combo for w in g.neighbors(v) if w in layer_n1}
            ratio = Fraction(len(star), len(combo))
            if worst is None or ratio < worst:
                worst = ratio
    return worst >= lam, worst


CASES = [
    ("square", 0, Fraction(2)),
    ("square", 1, Fraction(2)),       # holds with equality, 8 over 4
    ("square", 2, Fraction(2)),       # fails: the full sphere only grows by 3/2
    ("square", 2, Fraction(3, 2)),
    ("square", 3, Fraction(4, 3)),
    ("tree:delta=4", 1, Fraction(3)),
    ("tree:delta=4", 2, Fraction(3)),
    ("hyper37", 1, Fraction(2)),
    ("hex", 2, Fraction(1)),
    ("orthant:d=2", 4, Fraction(6, 5)),
    ("subexp", 3, Fraction(2)),
    ("subexp", 4, Fraction(2)),       # fails: level 5 is narrower than level 4
]


@pytest.mark.parametrize("family,level,lam", CASES)
def test_flow_matches_exhaustive_enumeration(family, level, lam):
    g = graph_from_text(family)
    rep = check_expansion(g, level, lam)
    assert rep.s_n <= 14, "oracle only exhaustive for small layers"
    want_holds, worst = _enumerate_expansion(g, level, lam)
    assert rep.holds == want_holds
    if not rep.holds:
        assert rep.witness, "failing report must carry a violating subset"
        star = {
            w
            for v in rep.witness
            for w in g.neighbors(v)
            if w in set(ball(g, [g.base], level + 1).layers[level + 1])
        }
        assert Fraction(len(star), len(rep.witness)) < lam
        assert rep.witness_ratio == Fraction(len(star), len(rep.witness))


def test_tree_equality_witness():
    g = graph_from_text("tree:delta=4")
    rep = check_expansion(g, 2, Fraction(3))
    assert rep.holds
    assert rep.witness is not None and len(rep.witness) == rep.s_n
    assert rep.witness_ratio == 3


def test_homogeneous_orthants():
    g2 = graph_from_text("orthant:d=2")
    rep = check_homogeneous(g2, range(0, 9))
    assert rep.holds and len(rep.reports) == 9
    g3 = graph_from_text("orthant:d=3")
    rep3 = check_homogeneous(g3, range(0, 7))
    assert rep3.holds
    for r in rep3.reports:
        assert r.lam == Fraction(
            math.comb(r.level + 3, 2), math.comb(r.level + 2, 2)
        )


def test_homogeneous_fails_on_shrinking_layer():
    rep = check_homogeneous(graph_from_text("subexp"), range(1, 3))
    assert not rep.holds
    assert rep.first_failure == 1
    assert "s_2" in rep.reason


# --------------------------------------------------------------- series ----


def test_geometric_series_exact_values():
    assert geometric_series_value(1, 0, Fraction(2)) == 1
    assert geometric_series_value(1, 1, Fraction(2)) == 2
    assert geometric_series_value(1, 2, Fraction(2)) == 6
    assert geometric_series_value(3, 1, Fraction(2)) == 6
    assert geometric_series_value(1, 0, Fraction(3, 2)) == 2


@pytest.mark.parametrize("c,d,lam", [(1, 0, Fraction(2)), (2, 3, Fraction(5, 2)), (1, 2, Fraction(3))])
def test_geometric_series_dominates_partial_sums(c, d, lam):
    val = geometric_series_value(c, d, lam)
    acc = Fraction(0)
    for kk in range(1, 60):
        acc += Fraction(c * kk**d) / lam**kk
        assert acc < val
    assert val - acc < Fraction(1, 10**6)


# ----------------------------------------------------------- rearranging ---


def test_rearrange_margins_nonnegative():
    f = [2, 2, 2, 2, 2]
    p = [0, 2, 2, 2, 2]
    s = [1, 1, 2, 3, 5]
    margins = rearrange_check(f, p, s)
    assert all(m >= 0 for m in margins)


def test_rearrange_rejects_bad_preconditions():
    with pytest.raises(HypothesisViolationError) as ei:
        rearrange_check([1, 1], [0, 1], [2, 1])
    assert ei.value.index == 1
    with pytest.raises(HypothesisViolationError) as ei:
        rearrange_check([1, 1], [2, 0], [1, 1])
    assert ei.value.index == 0
    with pytest.raises(HypothesisViolationError):
        rearrange_check([1], [0], [0])


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_rearrange_lemma_property(data):
    n = data.draw(st.integers(1, 10))
    f = data.draw(st.lists(st.integers(0, 9), min_size=n, max_size=n))
    steps = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    s = []
    cur = data.draw(st.integers(1, 5))
    for d in steps:
        cur += d
        s.append(cur)
    # p built to respect prefix dominance by construction
    p = []
    slack = 0
    for i in range(n):
        budget = slack + f[i]
        take = data.draw(st.integers(0, budget))
        p.append(take)
        slack = budget - take
    margins = rearrange_check(f, p, s)
    assert all(m >= 0 for m in margins)


# ---------------------------------------------------------- series_tail ----


def test_series_tail_geometric_matches_closed_form():
    one = series_tail("geometric", c=1, d=0, lam=Fraction(2))
    assert (one.verdict, one.bound) == ("converges", Fraction(1))
    two = series_tail("geometric", c=1, d=1, lam=Fraction(2))
    assert two.bound == Fraction(2)
    assert series_tail("geometric", c=5, d=3, lam=Fraction(3, 2)).bound == (
        geometric_series_value(5, 3, Fraction(3, 2))
    )


def test_series_tail_ratio_orthant_converges():
    # constant budget over the quadratic spheres of the 3d quarter-space
    s = [math.comb(n + 2, 2) for n in range(1, 9)]
    out = series_tail(
        "ratio", f=[1] * 8, s=s, budget_degree=0, sphere_poly_degree=2
    )
    assert out.verdict == "converges"
    assert out.partials[0] == Fraction(1, 3)
    assert out.partials[-1] == sum(Fraction(1, v) for v in s)


def test_series_tail_ratio_verdicts():
    diverging = series_tail(
        "ratio", f=[n for n in range(1, 6)], s=[n * n for n in range(1, 6)],
        budget_degree=1, sphere_poly_degree=2,
    )
    assert diverging.verdict == "diverges"
    exp = series_tail("ratio", f=[1, 2, 3], s=[3, 6, 12], budget_degree=1,
                      sphere_exp_base=2)
    assert exp.verdict == "converges"
    no_budget = series_tail("ratio", f=[1, 1], s=[2, 3], sphere_poly_degree=2)
    assert no_budget.verdict == "unknown"
    no_profile = series_tail("ratio", f=[1, 1], s=[2, 3], budget_degree=0)
    assert no_profile.verdict == "unknown"


def test_series_tail_rejects_bad_input():
    with pytest.raises(ValueError):
        series_tail("geometric", c=1, d=0)
    with pytest.raises(ValueError):
        series_tail("harmonic")
    with pytest.raises(ValueError):
        series_tail("ratio", f=[1, 2], s=[3])
    with pytest.raises(ValueError):
        series_tail("ratio", f=[1], s=[0], budget_degree=0)


# ------------------------------------------------------ degree estimate ----


def test_degree_estimates():
    sq = degree_estimate(profile(graph_from_text("square"), 12))
    assert (sq.d, sq.inconclusive) == (2, False)
    assert sq.witness == 4
    l3 = degree_estimate(profile(graph_from_text("lattice:d=3"), 12))
    assert (l3.d, l3.inconclusive) == (3, False)
    tree = degree_estimate(profile(graph_from_text("tree:delta=3"), 12))
    assert tree.inconclusive
    with pytest.raises(ValueError):
        degree_estimate(profile(graph_from_text("square"), 6))
