"""
Splitting a fixed total rent
============================

In practice the landlord asks for a fixed amount C.  The fixed-rent mode
keeps lowering prices until they add up to exactly C.  If every agent's zero
crossings add up to at least C, nobody ends with negative utility.
"""
from fractions import Fraction as F
from pathlib import Path

from rentdiv import SolveMode, check_ef, solve, solve_fixed_rent_nonneg
from rentdiv.errors import PreconditionViolated
from rentdiv.io import instance_from_json, loads
from rentdiv.generators import random_instance

# Two agents with identical quasilinear values 4 and 2.  Any EF split of C
# puts the price gap at exactly 2.
twins = instance_from_json(loads((Path(__file__).parent / "data" / "twins.json").read_text()))
for C in (2, 5, -1):
    s, _ = solve(twins, SolveMode.fixed_rent(C))
    print(f"C = {C}: prices {[str(p) for p in s.prices]}, utilities {[str(u) for u in s.utilities(twins)]}")

# Ask for nonnegative utilities.  Each agent's zero crossings add up to 6, so
# C = 6 is fine and C = 7 is refused before any work is done.
for C in (6, 7):
    try:
        s = solve_fixed_rent_nonneg(twins, C)
        print(f"C = {C}: utilities {[str(u) for u in s.utilities(twins)]}")
    except PreconditionViolated as exc:
        print(f"C = {C}: refused ({exc})")

# A structured random instance with piecewise curves.
inst = random_instance(4, 3, seed=12, epsilon=F(1, 2))
s, trace = solve(inst, SolveMode.fixed_rent(30))
print("sum of prices:", sum(s.prices), " EF:", check_ef(inst, s).ok, " iterations:", trace.iterations)
