"""
Rent division as a polymatrix game
==================================

A linear instance becomes a star-shaped game: a landlord whose mixed strategy
encodes prices, one player per agent, and a gadget player.  Envy-free
solutions map to equilibria and back.
"""
from fractions import Fraction as F

from rentdiv import (
    LinearInstance,
    build_game,
    check_ef,
    ef_to_candidate,
    extract_ef,
    reduce_piecewise_to_linear,
    solve,
    verify_ne,
)
from rentdiv.generators import random_instance
from rentdiv.reductions import check_claims, lift_solution

lin = LinearInstance(((6, 3, 1), (5, 4, 2), (4, 4, 4)), ((1, 2, 1), (F(1, 2), 1, 1), (1, 1, 3)))
game = build_game(lin)
print("M =", game.M, " eta =", game.eta)

# Solve directly, encode the solution as a strategy profile, and check that
# nobody can gain by deviating.
s, _ = solve(lin.to_rent_instance())
profile = ef_to_candidate(game, s, lin)
print("landlord mixes", [str(x) for x in profile.strategies[0]])
print("equilibrium:", verify_ne(game, profile).ok)
for claim, ok in check_claims(game, profile).items():
    print(f"   {claim}: {ok}")

# Reading the equilibrium back gives the same envy-free solution.
back = extract_ef(game, profile, lin)
print("extracted", back.allocation, [str(p) for p in back.prices], " same:", back == s)

# Piecewise instances reduce to linear ones by looking past the last breakpoint K.
pw = random_instance(3, 3, seed=3)
plin, K = reduce_piecewise_to_linear(pw)
ps, _ = solve(plin.to_rent_instance())
lifted = lift_solution(ps, K)
print("K =", K, " lifted solution EF on the piecewise instance:", check_ef(pw, lifted).ok)
