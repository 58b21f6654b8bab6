"""Exact two-phase simplex over rationals (Bland's rule, so it always terminates)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

LE, GE, EQ = "<=", ">=", "="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

_ZERO = Fraction(0)


@dataclass
class LinearProgram:
    """Minimize ``objective . x`` subject to ``rows`` and per-variable bounds.

    Each row is ``(coefficients, relation, rhs)``.  Bounds default to
    ``x >= 0``; use ``-math.inf`` / ``math.inf`` for free directions.
    """

    n: int
    objective: Sequence
    rows: List[Tuple[Sequence, str, object]] = field(default_factory=list)
    lower: Optional[Sequence] = None
    upper: Optional[Sequence] = None

    def __post_init__(self):
        if len(self.objective) != self.n:
            raise ValueError("objective length must equal n")
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != self.n:
                raise ValueError("constraint row length must equal n")
            if rel not in (LE, GE, EQ):
                raise ValueError(f"unknown relation {rel!r}")
        if self.lower is None:
            self.lower = [_ZERO] * self.n
        if self.upper is None:
            self.upper = [math.inf] * self.n

    def add(self, coeffs, rel, rhs) -> int:
        self.rows.append((list(coeffs), rel, rhs))
        return len(self.rows) - 1


@dataclass(frozen=True)
class LpResult:
    status: str
    x: Optional[tuple] = None
    objective: Optional[Fraction] = None
    tight: frozenset = frozenset()
    tight_lower: frozenset = frozenset()
    tight_upper: frozenset = frozenset()

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _finite(b) -> bool:
    return not (isinstance(b, float) and math.isinf(b))


def _pivot(T: list, basis: list, row: int, col: int) -> None:
    prow = T[row]
    piv = prow[col]
    if piv != 1:
        inv = 1 / piv
        prow[:] = [v * inv if v else v for v in prow]
    nz = [(j, v) for j, v in enumerate(prow) if v]
    for i, r in enumerate(T):
        if i != row:
            f = r[col]
            if f:
                for j, v in nz:
                    r[j] -= f * v
    basis[row] = col


def _simplex(T: list, basis: list, m: int, cost_row: int, allowed: int) -> bool:
    """Minimize using row ``cost_row`` as reduced costs; columns >= allowed never enter.

    Rows below ``m`` are constraints.  Returns False when unbounded.
    """
    z = T[cost_row]
    rows = range(m)
    while True:
        col = next((j for j in range(allowed) if z[j] < 0), None)
        if col is None:
            return True
        best, leave = None, None
        for i in rows:
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return False
        _pivot(T, basis, leave, col)


def solve_lp(lp: LinearProgram) -> LpResult:
    """Exact optimum of ``lp``; infeasible and unbounded are statuses, not exceptions.

    >>> r = solve_lp(LinearProgram(2, [1, 1], [([1, 0], ">=", 1), ([0, 1], ">=", 2)]))
    >>> r.status, r.x
    ('optimal', (Fraction(1, 1), Fraction(2, 1)))
    """
    n = lp.n
    lower = [Fraction(b) if _finite(b) else b for b in lp.lower]
    upper = [Fraction(b) if _finite(b) else b for b in lp.upper]
    for lo, hi in zip(lower, upper):
        if _finite(lo) and _finite(hi) and lo > hi:
            return LpResult(INFEASIBLE)

    # x_j = offset_j + sum_k sub[j][k] * y_k with y >= 0
    cols: list = []  # per original var: list of (y index, sign)
    offset: list = []
    ny = 0
    extra_rows: list = []
    for j in range(n):
        lo, hi = lower[j], upper[j]
        if _finite(lo):
            cols.append([(ny, 1)])
            offset.append(lo)
            if _finite(hi):
                extra_rows.append(({ny: Fraction(1)}, LE, hi - lo))
            ny += 1
        elif _finite(hi):
            cols.append([(ny, -1)])
            offset.append(hi)
            ny += 1
        else:
            cols.append([(ny, 1), (ny + 1, -1)])
            offset.append(_ZERO)
            ny += 2

    std: list = []
    for coeffs, rel, rhs in lp.rows:
        row = {}
        b = Fraction(rhs)
        for j, c in enumerate(coeffs):
            if c:
                c = Fraction(c)
                b -= c * offset[j]
                for k, s in cols[j]:
                    row[k] = row.get(k, _ZERO) + s * c
        std.append((row, rel, b))
    std.extend(extra_rows)

    norm = []
    for row, rel, b in std:
        if b < 0 or (b == 0 and rel == GE):
            row = {k: -c for k, c in row.items()}
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        norm.append((row, rel, b))
    m = len(norm)
    n_slack = sum(1 for _, rel, _ in norm if rel != EQ)
    n_art = sum(1 for _, rel, _ in norm if rel != LE)
    width = ny + n_slack + n_art + 1
    first_art = ny + n_slack
    T, basis, art_cols = [], [], []
    s_idx, a_idx = ny, first_art
    for row, rel, b in norm:
        line = [_ZERO] * width
        for k, c in row.items():
            line[k] = c
        line[-1] = b
        if rel == LE:
            line[s_idx] = Fraction(1)
            basis.append(s_idx)
            s_idx += 1
            T.append(line)
            continue
        if rel == GE:
            line[s_idx] = Fraction(-1)
            s_idx += 1
        line[a_idx] = Fraction(1)
        basis.append(a_idx)
        art_cols.append(a_idx)
        a_idx += 1
        T.append(line)

    obj_y = [_ZERO] * (width - 1)
    const = _ZERO
    for j, c in enumerate(lp.objective):
        if c:
            c = Fraction(c)
            const += c * offset[j]
            for k, s in cols[j]:
                obj_y[k] += s * c
    z2 = obj_y + [-const]
    # phase-one row: minimise the sum of artificials
    z1 = [_ZERO] * width
    for a in art_cols:
        z1[a] = Fraction(1)
    for i, bcol in enumerate(basis):
        if z1[bcol]:
            z1 = [v - w for v, w in zip(z1, T[i])]
        if z2[bcol]:
            f = z2[bcol]
            z2 = [v - f * w for v, w in zip(z2, T[i])]
    T.append(z2)
    T.append(z1)
    if art_cols:
        _simplex(T, basis, m, m + 1, width - 1)
        if T[-1][-1] != 0:
            return LpResult(INFEASIBLE)
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] >= first_art:
                col = next((j for j in range(first_art) if T[i][j] != 0), None)
                if col is not None:
                    _pivot(T, basis, i, col)
    T.pop()
    for line in T:
        for a in range(first_art, width - 1):
            line[a] = _ZERO
    if not _simplex(T, basis, m, m, first_art):
        return LpResult(UNBOUNDED)

    y = [_ZERO] * ny
    for i, bcol in enumerate(basis):
        if bcol < ny:
            y[bcol] = T[i][-1]
    x = []
    for j in range(n):
        val = offset[j]
        for k, s in cols[j]:
            val += s * y[k]
        x.append(val)
    x = tuple(x)
    obj = sum((Fraction(c) * xi for c, xi in zip(lp.objective, x)), _ZERO)
    tight = []
    for idx, (coeffs, rel, rhs) in enumerate(lp.rows):
        lhs = sum((Fraction(c) * xi for c, xi in zip(coeffs, x) if c), _ZERO)
        if lhs == rhs:
            tight.append(idx)
    tl = frozenset(j for j in range(n) if _finite(lower[j]) and x[j] == lower[j])
    tu = frozenset(j for j in range(n) if _finite(upper[j]) and x[j] == upper[j])
    return LpResult(OPTIMAL, x, obj, frozenset(tight), tl, tu)


def feasible(lp: LinearProgram, x: Sequence) -> bool:
    """Exact membership test."""
    for j, xi in enumerate(x):
        lo, hi = lp.lower[j], lp.upper[j]
        if xi < lo or xi > hi:
            return False
    for coeffs, rel, rhs in lp.rows:
        lhs = sum((Fraction(c) * xi for c, xi in zip(coeffs, x) if c), _ZERO)
        if (rel == LE and lhs > rhs) or (rel == GE and lhs < rhs) or (rel == EQ and lhs != rhs):
            return False
    return True
