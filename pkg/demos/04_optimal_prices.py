"""
Cheapest envy-free prices and truthful reporting
================================================

Among all nonnegative envy-free price vectors there is a componentwise
smallest one.  Charging it makes truthful reporting a dominant strategy.  We
compute it, compare it with brute-force enumeration, and try a few lies.
"""
import random
from fractions import Fraction as F

from rentdiv import RentInstance, check_dsic_sample, compute_partition, minimal_price, optimal_solve, solve
from rentdiv.generators import random_instance

# Both agents prefer room 0; agent 0 by 7, agent 1 by only 4.  Room 0 must
# cost at least 4 or agent 1 envies, and no more is needed.
inst = RentInstance.quasilinear([[9, 2], [7, 3]])
s = optimal_solve(inst)
print("optimal prices:", [str(p) for p in s.prices], " allocation:", s.allocation)
print("brute force:   ", [str(p) for p in minimal_price(inst)])

# The plain solver only promises some free room; the optimal one also makes
# every room reachable from a free room through tight comparisons.
inst = random_instance(3, 2, seed=10, epsilon=F(1, 2), contested=True)
plain, _ = solve(inst)
best = optimal_solve(inst)
print("plain solver:  ", [str(p) for p in plain.prices], " unreached:", sorted(compute_partition(inst, plain).Ec))
print("optimal:       ", [str(p) for p in best.prices], " unreached:", sorted(compute_partition(inst, best).Ec))
print("brute force:   ", [str(p) for p in minimal_price(inst)])

# Random misreports never help the liar under the optimal prices.
rng = random.Random(1)
devs = [(rng.randrange(3), random_instance(3, 2, rng=rng, epsilon=F(1, 2)).utilities[0]) for _ in range(10)]
rep = check_dsic_sample(inst, devs)
print(f"{rep.checked} misreports tried, improvements: {list(rep.improvements)}")
