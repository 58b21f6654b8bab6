"""Envy-free rent division when every utility is ``base - price``.

An allocation admits envy-free prices exactly when it is a maximum-weight
matching on the base values, and a uniform shift of the prices keeps the
solution envy-free.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import InvariantViolation
from .lp import GE, LinearProgram, solve_lp
from .matching import RATIONAL, WeightedBipartiteGraph, max_weight_perfect_matching
from .model import Solution, as_rational


def quasilinear_price_lp(bases, allocation) -> LinearProgram:
    """min sum(x) s.t. B[a][pi(a)] - x_pi(a) >= B[a][r] - x_r and x >= 0."""
    n = len(bases)
    lp = LinearProgram(n, [1] * n)
    for a, own in enumerate(allocation):
        for r in range(n):
            if r != own:
                row = [0] * n
                row[own] -= 1
                row[r] += 1
                lp.add(row, GE, bases[a][r] - bases[a][own])
    return lp


def solve_quasilinear(bases) -> Solution:
    """Max-weight allocation plus the minimum-sum nonnegative envy-free prices.

    >>> s = solve_quasilinear([[8, 2, 1], [1, 8, 2], [2, 1, 8]])
    >>> s.allocation, [str(p) for p in s.prices]
    ((0, 1, 2), ['0', '0', '0'])
    """
    table = [[as_rational(b, f"bases[{a}][{r}]") for r, b in enumerate(row)] for a, row in enumerate(bases)]
    n = len(table)
    if any(len(row) != n for row in table):
        raise ValueError("base-value table must be square")
    alloc = max_weight_perfect_matching(WeightedBipartiteGraph.complete(table, RATIONAL))
    res = solve_lp(quasilinear_price_lp(table, alloc))
    if not res.optimal:
        raise InvariantViolation(f"envy-free prices missing for a max-weight allocation ({res.status})")
    return Solution(alloc, res.x)


def shift_prices(s: Solution, offset) -> Solution:
    offset = Fraction(offset)
    return Solution(s.allocation, tuple(p + offset for p in s.prices))
