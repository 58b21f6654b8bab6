"""Brute-force ground truth for tiny instances.

Price space is cut into boxes on which every utility is linear (one interval
between consecutive pooled breakpoints per room).  For every allocation and
every box an exact LP decides whether envy-free prices exist there.  This
shares nothing with the walk except the LP solver and utility evaluation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .errors import GuardExceeded, InvariantViolation
from .lp import EQ, GE, LinearProgram, solve_lp
from .model import RentInstance, Solution, as_rational, check_ef, evaluate

MAX_AGENTS = 3
MAX_PIECES = 12


@dataclass(frozen=True)
class OracleCell:
    allocation: tuple
    lower: tuple  # per-room interval, closed; may be +-inf
    upper: tuple
    min_sum: tuple  # the minimum-sum envy-free price vector in this box


def _guard(inst: RentInstance) -> None:
    if inst.n > MAX_AGENTS or inst.total_pieces() > MAX_PIECES:
        raise GuardExceeded(
            f"oracle needs n <= {MAX_AGENTS} and at most {MAX_PIECES} pieces "
            f"(got n = {inst.n}, {inst.total_pieces()} pieces)"
        )


def _intervals(inst: RentInstance, r: int, allow_negative: bool) -> list:
    bps = inst.room_breakpoints(r)
    out = [(-math.inf, Fraction(0))] if allow_negative else []
    for i, b in enumerate(bps):
        out.append((b, bps[i + 1] if i + 1 < len(bps) else math.inf))
    return out


def _line(u, lo, hi):
    """(c, lam) with u(x) = c - lam x on [lo, hi], read off two points of the interval."""
    if lo == -math.inf:
        x0, x1 = hi - 1, hi
    elif hi == math.inf:
        x0, x1 = lo, lo + 1
    else:
        x0, x1 = lo, hi
    y0, y1 = evaluate(u, x0), evaluate(u, x1)
    lam = (y0 - y1) / (x1 - x0)
    return y0 + lam * x0, lam


def _cell_lp(inst: RentInstance, alloc, box, total_rent, objective) -> LinearProgram:
    n = inst.n
    lines = [[_line(inst.utilities[a][r], *box[r]) for r in range(n)] for a in range(n)]
    lp = LinearProgram(n, objective, [], [b[0] for b in box], [b[1] for b in box])
    for a, own in enumerate(alloc):
        c0, l0 = lines[a][own]
        for r in range(n):
            if r != own:
                c1, l1 = lines[a][r]
                row = [Fraction(0)] * n
                row[own] -= l0
                row[r] += l1
                lp.add(row, GE, c1 - c0)
    if total_rent is not None:
        lp.add([1] * n, EQ, total_rent)
    return lp


def enumerate_ef(inst: RentInstance, total_rent=None) -> List[OracleCell]:
    """Every (allocation, box) pair admitting envy-free prices; nonnegative prices unless a total rent is fixed."""
    _guard(inst)
    C = None if total_rent is None else as_rational(total_rent, "total_rent")
    n = inst.n
    per_room = [_intervals(inst, r, C is not None) for r in range(n)]
    cells = []
    for alloc in itertools.permutations(range(n)):
        for box in itertools.product(*per_room):
            res = solve_lp(_cell_lp(inst, alloc, box, C, [1] * n))
            if res.optimal:
                cells.append(OracleCell(alloc, tuple(b[0] for b in box), tuple(b[1] for b in box), res.x))
    return cells


def ef_points(inst: RentInstance, cells: Optional[List[OracleCell]] = None) -> List[Solution]:
    """Distinct envy-free solutions: each cell's min-sum point and its per-coordinate minimisers."""
    cells = enumerate_ef(inst) if cells is None else cells
    seen, out = set(), []
    for cell in cells:
        box = list(zip(cell.lower, cell.upper))
        pts = [cell.min_sum]
        for r in range(inst.n):
            obj = [0] * inst.n
            obj[r] = 1
            res = solve_lp(_cell_lp(inst, cell.allocation, box, None, obj))
            if res.optimal:
                pts.append(res.x)
        for p in pts:
            key = (cell.allocation, p)
            if key not in seen:
                seen.add(key)
                out.append(Solution(cell.allocation, p))
    return out


def minimal_price(inst: RentInstance) -> tuple:
    """Componentwise minimum of all nonnegative envy-free price vectors."""
    cells = enumerate_ef(inst)
    if not cells:
        raise InvariantViolation("no envy-free cell found")
    n = inst.n
    best = [None] * n
    for cell in cells:
        box = list(zip(cell.lower, cell.upper))
        for r in range(n):
            obj = [0] * n
            obj[r] = 1
            res = solve_lp(_cell_lp(inst, cell.allocation, box, None, obj))
            if best[r] is None or res.x[r] < best[r]:
                best[r] = res.x[r]
    p = tuple(best)
    if not any(check_ef(inst, Solution(pi, p)).ok for pi in itertools.permutations(range(n))):
        raise InvariantViolation(f"componentwise minimum {p} is not envy-free")
    return p


def ef_allocations(inst: RentInstance, p) -> list:
    """Allocations that make ``p`` envy-free (exhaustive)."""
    return [pi for pi in itertools.permutations(range(inst.n)) if check_ef(inst, Solution(pi, p)).ok]
