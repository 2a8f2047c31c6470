"""Walk through the basic game loop: growth tables, an exact oracle on Z,
and a synthesized strategy on the square grid, replayed in the engine."""

from firegraph.core import ball
from firegraph.engine import run
from firegraph.families import graph_from_text
from firegraph.growth import profile
from firegraph.synth import minimax_oracle, synth_second_difference

# growth profiles: how fast each family's spheres grow
for family in ("lattice:d=1", "square", "tree:delta=3", "orthant:d=3"):
    g = graph_from_text(family)
    prof = profile(g, 6)
    print(f"{family:12s} s_n =", list(prof.s))

# exact minimax on Z: one guard per turn is enough, two vertices burn
z = graph_from_text("lattice:d=1")
rep = minimax_oracle(z, [z.base], f=1, radius=4)
print("\nZ oracle:", rep.verdict, "burned =", rep.burned,
      "searched", rep.nodes, "positions")
schedule = [sorted(w) for w in rep.strategy.schedule]
print("witness schedule:", [[k.text() for k in w] for w in schedule])

trace = run(z, [z.base], rep.strategy)
print("replay:", trace.outcome, "after", trace.containment_time, "turns")

# the square grid needs a growing budget; the synthesizer picks a target
# sphere and a per-turn quota that fills it before the fire arrives
sq = graph_from_text("square")
s = synth_second_difference(sq, 1)
x0 = ball(sq, [sq.base], 1).members
trace = run(sq, x0, s)
print("\nsquare synth: budget f_k =",
      [s.budget.f(k) for k in range(1, len(s.schedule) + 1)])
print("replay:", trace.outcome,
      "| burned", trace.burned_total,
      "| protected", sum(len(w) for w in s.schedule))
for st in trace.states:
    ring = sorted(st.burning, key=lambda k: max(abs(c) for c in k.coords))
    radius = max(abs(c) for c in ring[-1].coords)
    print(f"  turn {st.turn}: {len(st.burning)} burning, fire radius {radius}")
