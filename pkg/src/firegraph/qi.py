"""Coarse maps between graph families and constructive strategy transfer.

A pair of coordinate maps (phi, psi) with constant c carries a radius-1
containment strategy on G over to one on H: the source is regrouped to
radius 2c, each protected G-set is blown up to radius-r balls around its
phi-image (r = c*c + 2c), and the H-side fire is simulated in lockstep so
the blown-up sets can drop already-burned and already-protected vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .core import LazyGraph, VertexKey, ball, distance
from .engine import (
    OUTCOME_CONTAINED,
    BudgetSeq,
    Strategy,
    initial_state,
    run,
    scale_up,
    step,
)
from .errors import QiVerificationError, TransferInvariantError


@dataclass(frozen=True, eq=False)
class QiMapPair:
    """phi: G -> H and psi: H -> G with multiplicative-plus-additive constant c."""

    name: str
    g: LazyGraph
    h: LazyGraph
    phi: Callable[[VertexKey], VertexKey] = field(repr=False)
    psi: Callable[[VertexKey], VertexKey] = field(repr=False)
    c: int = 1


def identity_pair(g: LazyGraph) -> QiMapPair:
    return QiMapPair("identity", g, g, lambda v: v, lambda v: v, 1)


def retag_pair(name: str, g: LazyGraph, h: LazyGraph, c: int) -> QiMapPair:
    """Same coordinates, different vertex tag (square <-> strong, power graphs)."""
    gtag, htag = g.base.tag, h.base.tag

    def phi(v: VertexKey) -> VertexKey:
        return v if gtag == htag else VertexKey(htag, v.coords)

    def psi(v: VertexKey) -> VertexKey:
        return v if gtag == htag else VertexKey(gtag, v.coords)

    return QiMapPair(name, g, h, phi, psi, c)


@dataclass(frozen=True)
class QiCheck:
    kind: str
    keys: tuple
    bound: int
    actual: Optional[int]

    @property
    def slack(self) -> Optional[int]:
        return None if self.actual is None else self.bound - self.actual


@dataclass(frozen=True)
class QiReport:
    pair: str
    c: int
    checks: tuple[QiCheck, ...]
    worst_slack: Optional[int]
    violations: tuple[QiCheck, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_qi(
    pair: QiMapPair,
    g_pairs: Iterable[tuple[VertexKey, VertexKey]],
    h_pairs: Iterable[tuple[VertexKey, VertexKey]],
    cap: int = 64,
    *,
    strict: bool = False,
) -> QiReport:
    """Check the four defining inequalities on sampled vertex pairs.

    phi compresses G-distances up to c*d+c, psi compresses H-distances the
    same way, and both round trips move points by at most c. Violations are
    report content unless strict is set.
    """
    c = pair.c
    checks: list[QiCheck] = []

    def record(kind, keys, bound, src, u, v):
        actual = distance(src, u, v, max(bound, 1))
        checks.append(QiCheck(kind, keys, bound, actual))

    for g1, g2 in g_pairs:
        d = distance(pair.g, g1, g2, cap)
        if d is None:
            raise QiVerificationError(f"sample pair farther than cap {cap} in G")
        record("phi-lipschitz", (g1, g2), c * d + c, pair.h, pair.phi(g1), pair.phi(g2))
        record("psi-roundtrip", (g1,), c, pair.g, g1, pair.psi(pair.phi(g1)))
    for h1, h2 in h_pairs:
        d = distance(pair.h, h1, h2, cap)
        if d is None:
            raise QiVerificationError(f"sample pair farther than cap {cap} in H")
        record("psi-lipschitz", (h1, h2), c * d + c, pair.g, pair.psi(h1), pair.psi(h2))
        record("phi-roundtrip", (h1,), c, pair.h, h1, pair.phi(pair.psi(h1)))
    violations = tuple(ch for ch in checks if ch.actual is None or ch.slack < 0)
    slacks = [ch.slack for ch in checks if ch.slack is not None]
    report = QiReport(
        pair=pair.name,
        c=c,
        checks=tuple(checks),
        worst_slack=min(slacks) if slacks else None,
        violations=violations,
    )
    if strict and violations:
        first = violations[0]
        raise QiVerificationError(
            f"{first.kind} fails at {tuple(k.text() for k in first.keys)}: "
            f"distance {first.actual} > bound {first.bound}"
        )
    return report


# --------------------------------------------------------------- transfer --


def _scaled_budget(a: BudgetSeq, factor: int) -> BudgetSeq:
    if a.kind == "constant":
        return BudgetSeq.constant(a.c * factor)
    if a.kind == "polynomial":
        return BudgetSeq.polynomial(a.c * factor, a.d)
    if a.kind == "explicit":
        return BudgetSeq.explicit(v * factor for v in a.values)
    return BudgetSeq.callback(lambda n, _a=a, _f=factor: _a.f(n) * _f)


def transfer(
    pair: QiMapPair,
    source: Callable[[LazyGraph, int], Strategy],
    h0: VertexKey,
    q: int,
    *,
    cap: Optional[int] = None,
) -> Strategy:
    """Carry containment of B_G(psi h0, 2c(q+2)) over to Y_0 = B_H(h0, q).

    source(graph, m) must hand back a radius-1 strategy on the given graph
    whose replay contains B(graph.base, m); it is regrouped to radius 2c
    giving budgets a_n, and the emitted H-side budget is b_n = a_n * d^(r+1)
    with d the degree bound of H and r = c*c + 2c.

    Each turn k protects Q_k = union of B_H(phi g, r) over g in W_k, minus
    the burned set Y_{k-1} and all earlier protections; the G-side game runs
    in lockstep and every turn asserts the carrying invariant psi(Y_k) is a
    subset of X_{k-1}.
    """
    from .core import rebase

    if q < 0:
        raise ValueError("need q >= 0")
    if pair.h.degree_bound is None:
        raise TransferInvariantError("transfer needs a degree bound on H")
    c = pair.c
    r = c * c + 2 * c
    delta = pair.h.degree_bound
    g0 = pair.psi(h0)
    gg = rebase(pair.g, g0)
    m = 2 * c * (q + 2)
    src = source(gg, m)
    if src.r != 1:
        raise TransferInvariantError("source must be a radius-1 strategy")
    scaled = scale_up(src, 2 * c)
    a = scaled.budget
    factor = delta ** (r + 1)
    b = _scaled_budget(a, factor)

    x_state = initial_state(ball(gg, [g0], m, cap=cap).members)
    y_state = initial_state(ball(pair.h, [h0], q, cap=cap).members)
    schedule: list[frozenset[VertexKey]] = []
    guarded: set[VertexKey] = set()
    n_turns = len(scaled.schedule)
    k = 0
    while True:
        k += 1
        w = scaled.schedule[k - 1] if k <= n_turns else frozenset()
        if len(w) > a.f(k):
            raise TransferInvariantError(f"|W_{k}| exceeds a_{k} after regrouping")
        quarters: set[VertexKey] = set()
        for g in w:
            quarters.update(ball(pair.h, [pair.phi(g)], r, cap=cap).members)
        qk = frozenset(quarters - y_state.burning - guarded)
        if len(qk) > b.f(k):
            raise TransferInvariantError(f"|Q_{k}| = {len(qk)} exceeds b_{k}")
        x_prev = x_state.burning
        grew = len(y_state.burning)
        x_state = step(gg, x_state, w, scaled.r, cap=cap)
        y_state = step(pair.h, y_state, qk, 1, cap=cap)
        bad = sorted(h for h in y_state.burning if pair.psi(h) not in x_prev)
        if bad:
            raise TransferInvariantError(
                f"carrying invariant fails at turn {k}: psi({bad[0].text()}) "
                f"is outside the G-side fire of turn {k - 1}"
            )
        if k <= n_turns:
            schedule.append(qk)
            guarded.update(qk)
        elif len(y_state.burning) == grew:
            break
        if k > n_turns + 10_000:
            raise TransferInvariantError("H-side fire did not stabilize")
    out = Strategy(
        r=1,
        budget=b,
        schedule=tuple(schedule),
        provenance={
            "method": "qi-transfer",
            "pair": pair.name,
            "c": c,
            "r": r,
            "delta": delta,
            "source": (src.provenance or {}).get("method", "callable"),
        },
    )
    out.validate()
    trace = run(pair.h, ball(pair.h, [h0], q, cap=cap).members, out, cap=cap)
    if trace.outcome != OUTCOME_CONTAINED:
        raise TransferInvariantError(f"transferred strategy replayed to {trace.outcome!r}")
    return out


# ------------------------------------------------------------ asymptotics --


def asymptotic_class(b: BudgetSeq, probe: int = 32) -> str:
    """O(1), O(n^d), exponential, or other; closed forms plus a sampler."""
    if b.kind == "constant":
        return "O(1)"
    if b.kind == "polynomial":
        return "O(1)" if b.c == 0 or b.d == 0 else f"O(n^{b.d})"
    if b.kind == "explicit":
        return "O(1)"  # finitely many nonzero values
    vals = [b.f(n) for n in range(1, probe + 1)]
    if min(vals) < 0:
        return "other"
    while vals and vals[-1] == 0:
        vals.pop()
    if len(set(vals)) <= 1 or len(vals) < probe:
        return "O(1)"  # eventually zero means finitely many protections
    if all(v > 0 for v in vals):
        ratios = [vals[n + 1] / vals[n] for n in range(probe // 2, probe - 1)]
        if min(ratios) > 1.2 and max(ratios) / min(ratios) < 1.2:
            return "exponential"
        half, end = vals[probe // 2 - 1], vals[-1]
        if half > 0 and end > 0:
            slope = math.log(end / half) / math.log(2)
            if abs(slope - round(slope)) < 0.15 and round(slope) >= 1:
                return f"O(n^{round(slope)})"
    return "other"
