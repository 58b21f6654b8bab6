import itertools
import random
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from rentdiv.generators import random_base_table
from rentdiv.lp import solve_lp
from rentdiv.model import RentInstance, Solution, check_ef
from rentdiv.quasilinear import quasilinear_price_lp, shift_prices, solve_quasilinear


def mwpm_weights(B):
    n = len(B)
    ws = {p: sum(B[a][p[a]] for a in range(n)) for p in itertools.permutations(range(n))}
    top = max(ws.values())
    return top, [p for p, w in ws.items() if w == top]


def test_diagonal_dominant_table():
    B = [[8, 2, 1], [1, 8, 2], [2, 1, 8]]
    s = solve_quasilinear(B)
    assert s.allocation == (0, 1, 2) and s.prices == (0, 0, 0)
    assert check_ef(RentInstance.quasilinear(B), s).ok


def test_indifferent_agents():
    s = solve_quasilinear([[1, 1], [1, 1]])
    assert s.prices == (0, 0)


def test_shift_examples():
    assert shift_prices(Solution((0, 1, 2), (0, 0, 0)), 7).prices == (7, 7, 7)
    assert shift_prices(Solution((1, 0), (1, 2)), -1).prices == (0, 1)


def test_shift_keeps_quasilinear_ef():
    B = random_base_table(4, 3)
    s = solve_quasilinear(B)
    inst = RentInstance.quasilinear(B)
    for off in (F(-5), F(1, 3), F(100)):
        assert check_ef(inst, shift_prices(s, off)).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_max_weight_and_every_optimum_is_ef(seed, n):
    B = random_base_table(n, seed, hi=6)
    s = solve_quasilinear(B)
    inst = RentInstance.quasilinear(B)
    top, optima = mwpm_weights(B)
    assert sum(B[a][s.allocation[a]] for a in range(n)) == top
    assert check_ef(inst, s).ok
    if n <= 5:
        for sigma in optima:
            assert check_ef(inst, Solution(sigma, s.prices)).ok


def test_suboptimal_matching_has_no_ef_prices():
    rng = random.Random(8)
    checked = 0
    while checked < 20:
        n = rng.randint(2, 3)
        B = [[F(rng.randint(0, 9)) for _ in range(n)] for _ in range(n)]
        top, optima = mwpm_weights(B)
        if len(optima) != 1:
            continue
        checked += 1
        for sigma in itertools.permutations(range(n)):
            if sigma != optima[0]:
                assert not solve_lp(quasilinear_price_lp(B, sigma)).optimal
