"""Growth profiles and exact growth analysis.

Everything numeric here is an int or a Fraction; floats appear only inside
the explicitly heuristic degree estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import LazyGraph, VertexKey, ball
from .errors import HypothesisViolationError
from .flow import Dinic


@dataclass(frozen=True)
class GrowthProfile:
    """Ball/sphere counts around a root out to a finite horizon.

    beta[n] = |B(root, n)|; s[n] = |S(root, n)|; beta1 is the first
    difference with beta1[0] = beta[0] (so beta1[n] = s[n] for n >= 1);
    beta2[n] = beta1[n] - beta1[n-1], meaningful from n = 1 (index 0 is a
    placeholder zero).
    """

    family: str
    root: VertexKey
    beta: tuple[int, ...]
    s: tuple[int, ...]

    @property
    def horizon(self) -> int:
        return len(self.beta) - 1

    @property
    def beta1(self) -> tuple[int, ...]:
        return (self.beta[0],) + tuple(
            self.beta[n] - self.beta[n - 1] for n in range(1, len(self.beta))
        )

    @property
    def beta2(self) -> tuple[int, ...]:
        b1 = self.beta1
        return (0,) + tuple(b1[n] - b1[n - 1] for n in range(1, len(b1)))


def profile(g: LazyGraph, horizon: int, *, cap: Optional[int] = None) -> GrowthProfile:
    bv = ball(g, [g.base], horizon, cap=cap)
    sizes = bv.sphere_sizes()
    s = sizes + (0,) * (horizon + 1 - len(sizes))  # graph may be finite
    beta = []
    acc = 0
    for n in range(horizon + 1):
        acc += s[n]
        beta.append(acc)
    return GrowthProfile(g.family, g.base, tuple(beta), tuple(s))


def faulhaber(n: int, d: int) -> int:
    """p_{n,d} = 1^(d-1) + 2^(d-1) + ... + n^(d-1), by direct summation.

    The test suite cross-checks this against the Bernoulli closed form.
    """
    if d < 1:
        raise ValueError("power-sum degree must be >= 1")
    return sum(k ** (d - 1) for k in range(1, n + 1))


# ------------------------------------------------------------ expansion ----


@dataclass(frozen=True)
class ExpansionReport:
    """Flow-certified answer to: does every A in layer n have |A*| >= lam|A|?

    When it fails, ``witness`` is the residual side of the min cut, an A with
    |A*|/|A| < lam.  When it holds with q*s_{n+1} = p*s_n, the whole layer
    witnesses equality.
    """

    level: int
    lam: Fraction
    holds: bool
    s_n: int
    s_n1: int
    flow_value: int
    demand: int
    witness: Optional[tuple[VertexKey, ...]] = None
    witness_ratio: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "lambda": str(self.lam),
            "holds": self.holds,
            "s_n": self.s_n,
            "s_n1": self.s_n1,
            "flow_value": self.flow_value,
            "demand": self.demand,
            "witness": None
            if self.witness is None
            else [k.text() for k in self.witness],
            "witness_ratio": None
            if self.witness_ratio is None
            else str(self.witness_ratio),
        }


def _forward_layers(g: LazyGraph, level: int):
    bv = ball(g, [g.base], level + 1)
    if level + 1 >= len(bv.layers):
        raise ValueError(f"graph exhausted before level {level + 1}")
    return bv.layers[level], bv.layers[level + 1]


def check_expansion(g: LazyGraph, level: int, lam: Fraction) -> ExpansionReport:
    """Decide the subset-expansion inequality at one level by max flow.

    Hall-style network: source -> u (capacity p) for u in S_level, u -> v
    (effectively infinite) for edges into S_{level+1}, v -> sink (capacity
    q), with lam = p/q in lowest terms.  Every A has q|A*| >= p|A| iff the
    max flow saturates all source edges; otherwise the residual-reachable
    part of S_level is a violating subset.
    """
    lam = Fraction(lam)
    p, q = lam.numerator, lam.denominator
    layer_n, layer_n1 = _forward_layers(g, level)
    sn, sn1 = len(layer_n), len(layer_n1)
    idx_n = {v: 1 + i for i, v in enumerate(layer_n)}
    idx_n1 = {v: 1 + sn + i for i, v in enumerate(layer_n1)}
    src, sink = 0, 1 + sn + sn1
    net = Dinic(sink + 1)
    inf = p * sn + 1
    for v, i in idx_n.items():
        net.add_edge(src, i, p)
    for v, i in idx_n.items():
        for w in g.neighbors(v):
            j = idx_n1.get(w)
            if j is not None:
                net.add_edge(i, j, inf)
    for w, j in idx_n1.items():
        net.add_edge(j, sink, q)
    value = net.max_flow(src, sink)
    demand = p * sn
    if value == demand:
        witness = None
        ratio = None
        if q * sn1 == p * sn and sn > 0:
            witness = tuple(layer_n)  # the full layer achieves equality
            ratio = Fraction(sn1, sn)
        return ExpansionReport(level, lam, True, sn, sn1, value, demand, witness, ratio)
    reach = net.residual_reachable(src)
    bad = tuple(v for v, i in idx_n.items() if i in reach)
    star = {w for v in bad for w in g.neighbors(v) if w in idx_n1}
    ratio = Fraction(len(star), len(bad)) if bad else None
    return ExpansionReport(level, lam, False, sn, sn1, value, demand, bad, ratio)


@dataclass(frozen=True)
class HomogeneityReport:
    """Per-level subset-expansion checks at lam_n = s_{n+1}/s_n exactly."""

    family: str
    levels: tuple[int, ...]
    reports: tuple[ExpansionReport, ...]
    holds: bool
    first_failure: Optional[int] = None
    reason: Optional[str] = None


def check_homogeneous(g: LazyGraph, levels: Sequence[int]) -> HomogeneityReport:
    reports = []
    for n in sorted(levels):
        layer_n, layer_n1 = _forward_layers(g, n)
        sn, sn1 = len(layer_n), len(layer_n1)
        if sn1 < sn:
            # growth ratio below one cannot satisfy the >= 1 clause
            return HomogeneityReport(
                g.family,
                tuple(sorted(levels)),
                tuple(reports),
                False,
                first_failure=n,
                reason=f"s_{n + 1} = {sn1} < s_{n} = {sn}",
            )
        rep = check_expansion(g, n, Fraction(sn1, sn))
        reports.append(rep)
        if not rep.holds:
            return HomogeneityReport(
                g.family,
                tuple(sorted(levels)),
                tuple(reports),
                False,
                first_failure=n,
                reason=f"subset of S_{n} expands below s_{n + 1}/s_{n}",
            )
    return HomogeneityReport(g.family, tuple(sorted(levels)), tuple(reports), True)


# --------------------------------------------------------------- series ----


def _poly_derive(p: list[int]) -> list[int]:
    return [i * c for i, c in enumerate(p)][1:] or [0]

def _poly_add(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]

def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _series_numerator(d: int) -> list[int]:
    # sum_{k>=1} k^d x^k = P_d(x) / (1-x)^(d+1); built by iterating x*d/dx
    p = [0, 1]
    for dd in range(d):
        p = _poly_mul([0, 1], _poly_add(_poly_mul(_poly_derive(p), [1, -1]), [ (dd+1) * c for c in p]))
    return p


def geometric_series_value(c: int, d: int, lam: Fraction) -> Fraction:
    """Exact value of sum_{k>=1} c * k^d / lam^k for lam > 1.

    Closed form: the series is c * P_d(x)/(1-x)^(d+1) at x = 1/lam, with
    P_d the integer polynomial produced by iterating x d/dx on x/(1-x).
    Exact, so it is also the tightest possible upper tail bound.
    """
    lam = Fraction(lam)
    if lam <= 1:
        raise ValueError("geometric tail needs lam > 1")
    if c < 0 or d < 0:
        raise ValueError("need c >= 0, d >= 0")
    x = 1 / lam
    num = _series_numerator(d)
    val = sum(Fraction(coeff) * x**i for i, coeff in enumerate(num))
    return c * val / (1 - x) ** (d + 1)


def partial_sums(terms: Sequence[Fraction]) -> tuple[Fraction, ...]:
    out = []
    acc = Fraction(0)
    for t in terms:
        acc += t
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class SeriesTail:
    """Outcome of a series classification; ``verdict`` never guesses."""

    kind: str  # "geometric" or "ratio"
    verdict: str  # "converges" | "diverges" | "unknown"
    bound: Optional[Fraction]  # exact tail value, geometric kind only
    partials: tuple[Fraction, ...]  # prefix sums, ratio kind only
    note: str = ""


def series_tail(
    kind: str,
    *,
    c: int = 0,
    d: int = 0,
    lam: Optional[Fraction] = None,
    f: Sequence[int] = (),
    s: Sequence[int] = (),
    budget_degree: Optional[int] = None,
    sphere_poly_degree: Optional[int] = None,
    sphere_exp_base: Optional[int] = None,
) -> SeriesTail:
    """Classify a comparison series, exactly where possible.

    kind "geometric": sum_{k>=1} c*k^d / lam^k for lam > 1.  The closed form
    is exact, so it doubles as the tightest upper tail bound.

    kind "ratio": sum f_n/s_n from finite prefixes.  The verdict needs the
    asymptotic shape of both sequences: with s_n eventually exponential any
    polynomial budget converges; with s_n polynomial of degree D and budget
    degree q this is a p-series, convergent iff q <= D - 2.  Anything else
    comes back "unknown" rather than a guess from finitely many terms.
    """
    if kind == "geometric":
        if lam is None:
            raise ValueError("geometric kind needs lam")
        bound = geometric_series_value(c, d, Fraction(lam))
        return SeriesTail(
            "geometric", "converges", bound, (), f"sum c*k^d/lam^k = {bound} exactly"
        )
    if kind != "ratio":
        raise ValueError(f"unknown series kind {kind!r}")
    if len(f) != len(s):
        raise ValueError("f and s prefixes must share a length")
    terms = []
    for i, (fi, si) in enumerate(zip(f, s)):
        if si <= 0:
            raise ValueError(f"s[{i}] = {si} is not positive")
        terms.append(Fraction(fi, si))
    partials = partial_sums(terms)
    if budget_degree is None:
        return SeriesTail("ratio", "unknown", None, partials, "budget shape unrecognized")
    if sphere_exp_base is not None and sphere_exp_base >= 2:
        return SeriesTail(
            "ratio",
            "converges",
            None,
            partials,
            f"degree-{budget_degree} budget against {sphere_exp_base}^n spheres",
        )
    if sphere_poly_degree is not None:
        gap = sphere_poly_degree - budget_degree
        if gap >= 2:
            verdict, why = "converges", f"p-series with exponent {gap} >= 2"
        else:
            verdict, why = "diverges", f"p-series with exponent {gap} <= 1"
        return SeriesTail("ratio", verdict, None, partials, why)
    return SeriesTail("ratio", "unknown", None, partials, "sphere profile unrecognized")


# ----------------------------------------------------------- rearranging ---


def rearrange_check(
    f: Sequence[int], p: Sequence[int], s: Sequence[int]
) -> tuple[Fraction, ...]:
    """Verify the weighted-prefix comparison: if s is positive nondecreasing
    and sum(p[:k]) <= sum(f[:k]) for every k, then sum(p_i/s_i) <=
    sum(f_i/s_i) for every k.  Returns the margins (rhs - lhs) per prefix,
    all nonnegative; precondition violations raise with the offending index.
    """
    n = len(f)
    if not (len(p) == len(s) == n):
        raise ValueError("sequences must share a length")
    for i, v in enumerate(s):
        if v <= 0:
            raise HypothesisViolationError(f"s[{i}] = {v} is not positive", i)
        if i and s[i] < s[i - 1]:
            raise HypothesisViolationError(
                f"s[{i}] = {s[i]} < s[{i - 1}] = {s[i - 1]}", i
            )
    cf = cp = 0
    for i in range(n):
        cf += f[i]
        cp += p[i]
        if cp > cf:
            raise HypothesisViolationError(
                f"prefix {i}: sum(p) = {cp} > sum(f) = {cf}", i
            )
    margins = []
    lhs = rhs = Fraction(0)
    for i in range(n):
        lhs += Fraction(p[i], s[i])
        rhs += Fraction(f[i], s[i])
        margins.append(rhs - lhs)
    return tuple(margins)


# ------------------------------------------------------ degree estimate ----


@dataclass(frozen=True)
class DegreeEstimate:
    """Finite-horizon heuristic; never feeds certificates."""

    d: Optional[int]
    witness: Optional[Fraction]  # min of s_n / n^(d-1) over the tail window
    inconclusive: bool
    note: str


def degree_estimate(prof: GrowthProfile, *, max_degree: int = 8) -> DegreeEstimate:
    """Guess a polynomial growth degree from log-log slopes on the profile.

    Compares the slope over [N/4, N/2] with the slope over [N/2, N]; an
    accelerating slope reads as super-polynomial and comes back
    inconclusive.  Heuristic by design: a deep horizon can still lie.
    """
    n = prof.horizon
    if n < 8:
        raise ValueError("degree estimation needs a horizon of at least 8")
    quarter, half = max(2, n // 4), n // 2

    def slope(a: int, b: int) -> float:
        sa, sb = max(prof.s[a], 1), max(prof.s[b], 1)
        return math.log(sb / sa) / math.log(b / a)

    s1 = slope(quarter, half)
    s2 = slope(half, n)
    if s2 - s1 > 0.5 or round(s2) + 1 > max_degree:
        return DegreeEstimate(
            None, None, True, f"slope grows {s1:.2f} -> {s2:.2f}; not polynomial-like"
        )
    d = max(1, round(s2) + 1)
    window = range(half, n + 1)
    witness = min(Fraction(prof.s[m], m ** (d - 1)) for m in window)
    return DegreeEstimate(d, witness, False, f"slopes {s1:.2f}, {s2:.2f}")
