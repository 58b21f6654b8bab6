"""Seeded random instances and benchmark families.

All randomness flows through ``random.Random(seed)``, so equal seeds give
identical instances.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .model import PiecewiseLinearUtility, RentInstance


def _rng(seed=None, rng: Optional[random.Random] = None) -> random.Random:
    return rng if rng is not None else random.Random(seed)


def _rational(rng: random.Random, lo: int, hi: int, max_den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * max_den, hi * max_den), rng.randint(1, max_den))


def random_utility(
    rng: random.Random,
    pieces: int,
    epsilon: Optional[Fraction] = None,
    exponent_range=(-3, 3),
    slope_choices: Optional[Sequence] = None,
    base_range=(0, 20),
) -> PiecewiseLinearUtility:
    bps = [Fraction(0)]
    for _ in range(pieces - 1):
        bps.append(bps[-1] + _rational(rng, 1, 6))
    if slope_choices is not None:
        slopes = [Fraction(rng.choice(slope_choices)) for _ in bps]
    elif epsilon is not None:
        slopes = [(1 + epsilon) ** rng.randint(*exponent_range) for _ in bps]
    else:
        slopes = [Fraction(rng.randint(1, 40), rng.randint(1, 10)) for _ in bps]
    base = _rational(rng, *base_range)
    u = PiecewiseLinearUtility(base, tuple(bps), tuple(slopes))
    return u.normalized()


def random_instance(
    n: int,
    max_pieces: int = 3,
    seed=None,
    rng: Optional[random.Random] = None,
    epsilon=None,
    exponent_range=(-3, 3),
    slope_choices: Optional[Sequence] = None,
    exact_pieces: bool = False,
    base_range=(0, 20),
    contested: bool = False,
) -> RentInstance:
    """n x n instance; structured (slopes are powers of 1+epsilon) when ``epsilon`` is given.

    ``contested`` makes agents broadly agree on which rooms are good, which
    forces positive prices far more often.
    """
    rng = _rng(seed, rng)
    eps = None if epsilon is None else Fraction(epsilon)
    quality = [rng.randint(*base_range) for _ in range(n)]
    rows = []
    for _ in range(n):
        row = []
        for r in range(n):
            k = max_pieces if exact_pieces else rng.randint(1, max_pieces)
            u = random_utility(rng, k, eps, exponent_range, slope_choices, base_range)
            if contested:
                u = PiecewiseLinearUtility(quality[r] + _rational(rng, 0, 3), u.breakpoints, u.slopes)
            row.append(u)
        rows.append(tuple(row))
    return RentInstance(tuple(rows), eps)


def random_linear_instance(n: int, seed=None, rng: Optional[random.Random] = None) -> RentInstance:
    """One piece per curve: v(x) = H - lam x."""
    return random_instance(n, 1, seed, rng)


def random_base_table(n: int, seed=None, rng: Optional[random.Random] = None, hi: int = 20) -> list:
    rng = _rng(seed, rng)
    return [[Fraction(rng.randint(0, hi)) for _ in range(n)] for _ in range(n)]


def fixed_n_family(pieces: int, seed=None, n: int = 3, epsilon=Fraction(1, 2)) -> RentInstance:
    """Fixed number of agents, every curve with exactly ``pieces`` pieces."""
    return random_instance(n, pieces, seed, epsilon=epsilon, exact_pieces=True)


def two_slope_family(n: int, seed=None, pieces: int = 2) -> RentInstance:
    """Only slopes 1 and 2 occur, structured with eps = 1."""
    rng = _rng(seed)
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            row.append(random_utility(rng, rng.randint(1, pieces), slope_choices=(1, 2)))
        rows.append(tuple(row))
    return RentInstance(tuple(rows), Fraction(1))


FAMILIES = {
    "random": lambda n, seed: random_instance(n, 3, seed),
    "structured": lambda n, seed: random_instance(n, 3, seed, epsilon=Fraction(1, 2)),
    "fixed-n": lambda pieces, seed: fixed_n_family(pieces, seed),
    "two-slope": lambda n, seed: two_slope_family(n, seed),
    "linear": lambda n, seed: random_linear_instance(n, seed),
}
