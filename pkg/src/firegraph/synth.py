"""Strategy synthesis from growth data, plus an exact finite-window oracle.

Three constructive routes and one brute-force check:

* sphere partition under a polynomial growth bound (budget c'*n^(d-2)),
* sphere partition driven by the second difference of the growth function
  (budget 3*beta''(2n)),
* single cut vertex on the subexponential staircase graph,
* exact min-burned search on a radius-R truncation with memoization.

Every synthesized strategy is replay-verified before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .core import LazyGraph, VertexKey, ball
from .engine import (
    OUTCOME_CONTAINED,
    BudgetSeq,
    GameTrace,
    Strategy,
    run,
)
from .errors import (
    HypothesisViolationError,
    InvalidFamilyError,
    ScanCapExceededError,
)
from .growth import faulhaber

DEFAULT_SCAN_CAP = 10_000


class _Spheres:
    """Sphere sizes and layers around g.base, recomputed at doubling horizons."""

    def __init__(self, g: LazyGraph, cap: Optional[int] = None):
        self.g = g
        self.cap = cap
        self.horizon = -1
        self.bv = None

    def ensure(self, n: int) -> None:
        if n <= self.horizon:
            return
        h = max(n, 8, 2 * max(self.horizon, 0))
        self.bv = ball(self.g, [self.g.base], h, cap=self.cap)
        self.horizon = h

    def layer(self, n: int):
        self.ensure(n)
        return self.bv.layers[n]

    def s(self, n: int) -> int:
        self.ensure(n)
        return len(self.bv.layers[n])

    def beta(self, n: int) -> int:
        self.ensure(n)
        return sum(len(layer) for layer in self.bv.layers[: n + 1])


def _fill_sphere(sphere, piece_sizes: Iterable[int]) -> tuple[frozenset, ...]:
    """Split a sorted sphere into consecutive pieces, |W_k| <= piece_sizes[k]."""
    verts = sorted(sphere)
    out = []
    pos = 0
    for size in piece_sizes:
        piece = verts[pos : pos + size]
        pos += len(piece)
        out.append(frozenset(piece))
    if pos < len(verts):
        raise RuntimeError("sphere does not fit the budget pieces, synthesis bug")
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def _replay_contained(g: LazyGraph, x0, strategy: Strategy, forbidden=frozenset()) -> GameTrace:
    trace = run(g, x0, strategy)
    if trace.outcome != OUTCOME_CONTAINED:
        raise RuntimeError(f"synthesized strategy replayed to {trace.outcome!r}")
    burned = trace.states[-1].burning
    hit = burned & frozenset(forbidden)
    if hit:
        raise RuntimeError(f"fire reached {len(hit)} vertices it was meant to miss")
    return trace


# ------------------------------------------------------- polynomial route --


def synth_sphere_poly(
    g: LazyGraph,
    d: int,
    c: int,
    m: int,
    *,
    scan_cap: int = DEFAULT_SCAN_CAP,
    cap: Optional[int] = None,
) -> Strategy:
    """Contain X_0 = B(g.base, m) on a graph with beta_n <= c*n^d, d >= 2.

    Scans r = m+1, m+2, ... for s_r <= (d-1)(dc+1) * p(r-m, d-1) where p(n, e)
    sums k^(e-1); such r exist infinitely often under the growth bound. The
    sphere S_r is then split into r-m pieces with |W_k| <= (d-1)(dc+1)*k^(d-2)
    and protected one piece per turn while the fire climbs one level per turn,
    so the fire stops at radius r-1.
    """
    if d < 2:
        raise ValueError("polynomial route needs degree d >= 2")
    if c < 1 or m < 0:
        raise ValueError("need c >= 1 and m >= 0")
    amp = (d - 1) * (d * c + 1)
    sph = _Spheres(g, cap)
    hyp_bad = []
    r = None
    for n in range(m + 1, m + scan_cap + 1):
        if sph.beta(n) > c * n**d:
            hyp_bad.append(n)
        if sph.s(n) <= amp * faulhaber(n - m, d - 1):
            r = n
            break
    if r is None:
        raise ScanCapExceededError(
            f"no radius r <= {m + scan_cap} with s_r <= {amp}*p(r-{m},{d-1}); "
            + (
                f"growth bound beta_n <= {c}n^{d} already fails at n = {hyp_bad[0]}"
                if hyp_bad
                else "growth bound held over the scanned range, raise the cap"
            )
        )
    pieces = [amp * k ** (d - 2) for k in range(1, r - m + 1)]
    schedule = _fill_sphere(sph.layer(r), pieces)
    budget = BudgetSeq.constant(amp) if d == 2 else BudgetSeq.polynomial(amp, d - 2)
    strategy = Strategy(
        r=1,
        budget=budget,
        schedule=schedule,
        provenance={"method": "sphere-poly", "d": d, "c": c, "m": m, "r": r},
    )
    strategy.validate()
    x0 = ball(g, [g.base], m, cap=cap).members
    _replay_contained(g, x0, strategy, forbidden=sph.layer(r))
    return strategy


# ------------------------------------------------- second-difference route --


class _SecondDiff:
    """beta'' with beta'(0) = beta(0), hypothesis-checked as indices are read."""

    def __init__(self, sph: _Spheres):
        self.sph = sph
        self.checked = 0

    def beta1(self, n: int) -> int:
        # beta'(0) = beta(0) by convention, beta'(n) = s_n for n >= 1
        return self.sph.beta(0) if n == 0 else self.sph.s(n)

    def value(self, n: int) -> int:
        self.sph.ensure(n)
        while self.checked < n:
            j = self.checked + 1
            v = self.beta1(j) - self.beta1(j - 1)
            if v < 0 or (j >= 2 and v < self.beta1(j - 1) - self.beta1(j - 2)):
                raise HypothesisViolationError(
                    f"beta'' must be nonnegative and nondecreasing, fails at {j}",
                    index=j,
                )
            self.checked = j
        return self.beta1(n) - self.beta1(n - 1)


def synth_second_difference(
    g: LazyGraph,
    n: int,
    *,
    scan_cap: int = DEFAULT_SCAN_CAP,
    cap: Optional[int] = None,
) -> Strategy:
    """Contain X_0 = B(g.base, n) when beta'' is nonnegative and nondecreasing.

    Picks the least m >= 2n with sum_{k<=m-n} beta''(2k) >= beta'(n); the
    budget f_k = 3*beta''(2k) then covers the whole sphere S_m within m-n
    turns, one greedy block per turn.
    """
    if n < 0:
        raise ValueError("need n >= 0")
    sph = _Spheres(g, cap)
    bpp = _SecondDiff(sph)
    target = bpp.beta1(n)
    acc = 0
    m = None
    for cand in range(n + 1, n + scan_cap + 1):
        acc += bpp.value(2 * (cand - n))
        if cand >= 2 * n and acc >= target:
            m = cand
            break
    if m is None:
        raise ScanCapExceededError(
            f"no m <= {n + scan_cap} with sum beta''(2k) >= beta'({n}) = {target}; "
            "the spheres grow too slowly for this route"
        )
    budgets = [3 * bpp.value(2 * k) for k in range(1, m - n + 1)]
    if sum(budgets) < sph.s(m):
        raise RuntimeError("budget does not cover the target sphere, synthesis bug")
    schedule = _fill_sphere(sph.layer(m), budgets)
    strategy = Strategy(
        r=1,
        budget=BudgetSeq.explicit(budgets),
        schedule=schedule,
        provenance={"method": "second-difference", "n": n, "m": m},
    )
    strategy.validate()
    x0 = ball(g, [g.base], n, cap=cap).members
    _replay_contained(g, x0, strategy, forbidden=sph.layer(m))
    return strategy


# ------------------------------------------------------- cut-vertex route --


def synth_cut_vertex(g: LazyGraph, x0, r: int) -> Strategy:
    """One protected vertex contains any fire on the subexponential staircase.

    The single vertex at each zero level k(k+1) is a cut vertex; protecting
    the first zero level at least max-level(X_0) + r + 1 severs the finite
    side from infinity before the fire can reach it.
    """
    if g.facts is None or g.facts.kind != "subexp":
        raise InvalidFamilyError("cut-vertex route is specific to the subexp family")
    if r < 1:
        raise ValueError("need r >= 1")
    x0 = frozenset(x0)
    if not x0:
        raise ValueError("empty initial fire")
    top = max(v.coords[0] for v in x0)
    k = 1
    while k * (k + 1) < top + r + 1:
        k += 1
    m = k * (k + 1)
    gate = VertexKey("subexp", (m, 1))
    strategy = Strategy(
        r=r,
        budget=BudgetSeq.constant(1),
        schedule=(frozenset([gate]),),
        provenance={"method": "cut-vertex", "m": m, "r": r},
    )
    strategy.validate()
    _replay_contained(g, x0, strategy, forbidden=frozenset([gate]))
    return strategy


# --------------------------------------------------------- minimax oracle --

ORACLE_CONTAINABLE = "containable"
ORACLE_BOUNDARY = "boundary-reached"
ORACLE_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OracleReport:
    verdict: str
    radius: int
    f: int
    burned: Optional[int] = None
    strategy: Optional[Strategy] = None
    nodes: int = 0


class _CapHit(Exception):
    pass


def minimax_oracle(
    g: LazyGraph,
    x0,
    f: int,
    radius: int,
    *,
    node_cap: int = 2_000_000,
    cap: Optional[int] = None,
) -> OracleReport:
    """Exact search over all radius-1 schedules inside ball(X_0, radius).

    ``containable`` comes with a min-burned witness schedule; the fire then
    never touches the radius-R layer, so the witness replays identically on
    the untruncated graph. ``boundary-reached`` means every schedule lets the
    fire touch that layer; protections outside the window cannot prevent a
    first contact, so no radius-1 schedule at all keeps the fire inside.
    """
    x0 = frozenset(x0)
    bv = ball(g, x0, radius, cap=cap)
    verts = sorted(bv.members)
    index = {v: i for i, v in enumerate(verts)}
    nbr = [0] * len(verts)
    for v in verts:
        mask = 0
        for w in g.neighbors(v):
            j = index.get(w)
            if j is not None:
                mask |= 1 << j
        nbr[index[v]] = mask
    boundary = 0
    for v in bv.layer(radius):
        boundary |= 1 << index[v]
    full = (1 << len(verts)) - 1
    start = 0
    for v in x0:
        start |= 1 << index[v]

    def reach(burning: int) -> int:
        out = 0
        b = burning
        while b:
            low = b & -b
            out |= nbr[low.bit_length() - 1]
            b ^= low
        return out

    memo: dict = {}
    nodes = 0
    inf = float("inf")

    def solve(burning: int, protected: int):
        nonlocal nodes
        if burning & boundary:
            return inf, None
        spread = reach(burning) & ~protected & ~burning
        if not spread:
            return burning.bit_count(), ()
        key = (burning, protected)
        hit = memo.get(key)
        if hit is not None:
            return hit
        nodes += 1
        if nodes > node_cap:
            raise _CapHit
        avail = [i for i in range(len(verts)) if not ((burning | protected) >> i) & 1]
        take = min(f, len(avail))
        best_val, best_sched = inf, None
        for combo in combinations(avail, take):
            pmask = 0
            for i in combo:
                pmask |= 1 << i
            nxt_protected = protected | pmask
            nxt_burning = burning | (reach(burning) & ~nxt_protected)
            val, tail = solve(nxt_burning, nxt_protected)
            if val < best_val:
                best_val, best_sched = val, None if tail is None else (pmask,) + tail
        memo[key] = (best_val, best_sched)
        return best_val, best_sched

    try:
        value, sched = solve(start, 0)
    except _CapHit:
        return OracleReport(ORACLE_INCONCLUSIVE, radius, f, nodes=nodes)
    if sched is None:
        return OracleReport(ORACLE_BOUNDARY, radius, f, nodes=nodes)
    pieces = tuple(
        frozenset(verts[i] for i in range(len(verts)) if (pmask >> i) & 1)
        for pmask in sched
    )
    while pieces and not pieces[-1]:
        pieces = pieces[:-1]
    strategy = Strategy(
        r=1,
        budget=BudgetSeq.constant(f),
        schedule=pieces,
        provenance={"method": "minimax", "radius": radius, "f": f},
    )
    strategy.validate()
    return OracleReport(
        ORACLE_CONTAINABLE, radius, f, burned=int(value), strategy=strategy, nodes=nodes
    )
