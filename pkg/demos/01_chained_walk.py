"""
Walking prices down on a three-room instance
============================================

Three agents, three rooms, one straight line per (agent, room).  Each agent
loves a different room (8 - 8x), mildly likes the next (2 - 1.5x) and barely
cares for the last (1 - x).  The solver starts from a high, envy-free price
level and lowers prices until some room is free.  On the way it switches
allocation twice, and every switch picks a matching with a larger product of
slopes.
"""
from pathlib import Path

from rentdiv import check_ef, solve
from rentdiv.io import instance_from_json, loads

inst = instance_from_json(loads((Path(__file__).parent / "data" / "chained.json").read_text()))

# Solve, keeping the trace.  Iteration 0 is the bootstrap from the
# quasilinear instance at the threshold price M.
s, trace = solve(inst)
print("threshold M =", trace.surrogate.M)

for step in trace.steps:
    sigma = step.allocation
    weight = "" if step.weight is None else f"  weight {step.weight}"
    prices = ", ".join(str(p) for p in step.prices)
    print(f"iteration {step.iteration}: allocation {sigma}  prices ({prices}){weight}")

# The final solution is exactly envy-free and some room costs nothing.
print("envy-free:", check_ef(inst, s).ok, " prices:", [str(p) for p in s.prices])

# The same trace as CSV, one row per iteration.
print(trace.to_csv())
