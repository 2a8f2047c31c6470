"""Emit and re-check the two kinds of impossibility evidence: an expansion
certificate on the order-7 triangulation, and divergence verdicts that
settle the quarter-space classification table."""

import json
from fractions import Fraction

from firegraph.certify import (
    certify_divergence_required,
    certify_expansion_impossible,
    check_certificate,
    classify_lattice,
)
from firegraph.engine import BudgetSeq
from firegraph.families import graph_from_text

# every layer of the degree-7 triangulation doubles, and a constant budget's
# comparison series sums to 1 < s_1 = 7: no strategy can contain the fire
g = graph_from_text("hyper37")
cert = certify_expansion_impossible(g, Fraction(2), BudgetSeq.constant(1),
                                    level_horizon=4)
print("expansion certificate on hyper37, f = 1:")
print("  lambda =", cert.lam, "| tail bound =", cert.tail_bound,
      "| s_r =", cert.s_r, "at radius", cert.chosen_radius,
      "| margin =", cert.margin)
smoke = cert.audit["smoke"]
print("  greedy smoke: t_k =", smoke["t"][:8], "... outcome", smoke["outcome"])

ok, problems = check_certificate(cert)
print("  independent re-check:", "ok" if ok else problems)

doc = json.dumps(cert.to_json())
print("  serialized size:", len(doc), "bytes, round-trips bit for bit")

# polynomial worlds: containment forces the budget/sphere series to diverge,
# so a convergent series on a homogeneous family is a refusal certificate
print("\ndivergence verdicts on quarter-spaces:")
for d, budget, label in ((3, BudgetSeq.constant(1), "f=1"),
                         (5, BudgetSeq.polynomial(1, 2), "f=n^2"),
                         (3, BudgetSeq.polynomial(1, 1), "f=n")):
    v = certify_divergence_required(graph_from_text(f"orthant:d={d}"), budget, 6)
    print(f"  L^{d}_+ with {label:6s}: series {v.series.verdict:9s} ->", v.conclusion)

# the classification table those verdicts pin down
print("\nlattice classification:")
for d, q in ((2, 0), (3, 0), (4, 2), (5, 2), (1, 0), (7, 1)):
    res = classify_lattice(d, q)
    flag = " (boundary)" if res.boundary else ""
    print(f"  Z^{d}, budget n^{q}: {res.verdict}{flag}")
