"""Coarse-map verification and cross-graph strategy transfer."""

from __future__ import annotations

import random

import pytest

from firegraph import OUTCOME_CONTAINED, ball, graph_from_text, run
from firegraph.core import VertexKey
from firegraph.engine import BudgetSeq, initial_state, step
from firegraph.errors import QiVerificationError, TransferInvariantError
from firegraph.qi import (
    QiMapPair,
    asymptotic_class,
    identity_pair,
    retag_pair,
    transfer,
    verify_qi,
)
from firegraph.synth import synth_second_difference


def k(tag, *coords):
    return VertexKey(tag, tuple(coords))


def seeded_pairs(tag, count, seed, span=5):
    rng = random.Random(seed)
    return [
        (
            k(tag, rng.randint(-span, span), rng.randint(-span, span)),
            k(tag, rng.randint(-span, span), rng.randint(-span, span)),
        )
        for _ in range(count)
    ]


def second_diff_source(g, m):
    return synth_second_difference(g, m)


# ---------------------------------------------------------------- verify ---


def test_identity_pair_verifies():
    g = graph_from_text("square")
    rep = verify_qi(identity_pair(g), seeded_pairs("square", 8, 1), seeded_pairs("square", 8, 2))
    assert rep.ok
    assert rep.worst_slack is not None and rep.worst_slack >= 0
    # identity with c=1: slack of the lipschitz checks is exactly the +c term
    lip = [ch for ch in rep.checks if ch.kind == "phi-lipschitz"]
    assert all(ch.slack == 1 for ch in lip)


def test_square_strong_pair_verifies():
    sq, strong = graph_from_text("square"), graph_from_text("strong")
    pair = retag_pair("square-strong", sq, strong, 2)
    rep = verify_qi(pair, seeded_pairs("square", 12, 3), seeded_pairs("strong", 12, 4))
    assert rep.ok


def test_square_power_pair_verifies():
    sq = graph_from_text("square")
    pw = graph_from_text("power:k=2(square)")
    pair = retag_pair("square-power2", sq, pw, 2)
    rep = verify_qi(pair, seeded_pairs("square", 12, 5), seeded_pairs("square", 12, 6))
    assert rep.ok


def test_verify_flags_a_false_pair():
    g = graph_from_text("square")
    stretch = QiMapPair(
        "stretch", g, g,
        phi=lambda v: k("square", 2 * v.coords[0], 2 * v.coords[1]),
        psi=lambda v: v,
        c=1,
    )
    rep = verify_qi(stretch, seeded_pairs("square", 10, 7), [])
    assert not rep.ok
    assert any(ch.kind == "phi-lipschitz" for ch in rep.violations)
    with pytest.raises(QiVerificationError):
        verify_qi(stretch, seeded_pairs("square", 10, 7), [], strict=True)


# -------------------------------------------------------------- transfer ---


def test_identity_transfer_square():
    g = graph_from_text("square")
    s = transfer(identity_pair(g), second_diff_source, k("square", 0, 0), 1)
    assert s.provenance["r"] == 3 and s.provenance["delta"] == 4
    # b_n = a_n * 4^(3+1)
    assert all(v % 256 == 0 for v in s.budget.values)
    trace = run(g, ball(g, [g.base], 1).members, s)
    assert trace.outcome == OUTCOME_CONTAINED


@pytest.mark.parametrize("q", [0, 1, 2])
def test_square_to_strong_transfer(q):
    sq, strong = graph_from_text("square"), graph_from_text("strong")
    pair = retag_pair("square-strong", sq, strong, 2)
    h0 = k("strong", 0, 0)
    s = transfer(pair, second_diff_source, h0, q)
    assert s.provenance["r"] == 8 and s.provenance["delta"] == 8
    y0 = ball(strong, [h0], q).members
    trace = run(strong, y0, s)
    assert trace.outcome == OUTCOME_CONTAINED
    # per-turn bound and disjointness from the evolving fire, re-simulated
    st = initial_state(y0)
    for n, w in enumerate(s.schedule, start=1):
        assert len(w) <= s.budget.f(n)
        assert not w & st.burning
        st = step(strong, st, w, 1)


@pytest.mark.parametrize("q", [0, 1])
def test_square_to_power_transfer(q):
    sq = graph_from_text("square")
    pw = graph_from_text("power:k=2(square)")
    pair = retag_pair("square-power2", sq, pw, 2)
    s = transfer(pair, second_diff_source, k("square", 0, 0), q)
    trace = run(pw, ball(pw, [k("square", 0, 0)], q).members, s)
    assert trace.outcome == OUTCOME_CONTAINED


def test_transfer_lemma_check_catches_a_broken_pair():
    g = graph_from_text("square")
    shifted = QiMapPair(
        "broken", g, g,
        phi=lambda v: v,
        psi=lambda v: k("square", v.coords[0] + 100, v.coords[1]),
        c=1,
    )
    with pytest.raises(TransferInvariantError):
        transfer(shifted, second_diff_source, k("square", 0, 0), 0)


def test_transfer_keeps_bounded_class():
    g = graph_from_text("square")
    s = transfer(identity_pair(g), second_diff_source, k("square", 0, 0), 0)
    assert asymptotic_class(s.budget) == "O(1)"


# ------------------------------------------------------------ asymptotics --


def test_asymptotic_classes():
    assert asymptotic_class(BudgetSeq.constant(5)) == "O(1)"
    assert asymptotic_class(BudgetSeq.polynomial(3, 1)) == "O(n^1)"
    assert asymptotic_class(BudgetSeq.polynomial(2, 3)) == "O(n^3)"
    assert asymptotic_class(BudgetSeq.polynomial(4, 0)) == "O(1)"
    assert asymptotic_class(BudgetSeq.explicit([9, 4, 1])) == "O(1)"
    assert asymptotic_class(BudgetSeq.callback(lambda n: 2**n)) == "exponential"
    assert asymptotic_class(BudgetSeq.callback(lambda n: 7 * n * n)) == "O(n^2)"
    assert asymptotic_class(BudgetSeq.callback(lambda n: 3)) == "O(1)"
    assert asymptotic_class(BudgetSeq.callback(lambda n: n if n % 2 else 1)) == "other"
